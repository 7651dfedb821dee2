#pragma once

#include <Eigen/Dense>
#include <functional>

namespace ipp {

/// Per-coordinate box [lo, hi]; lo == hi pins every coordinate.
struct Box {
    double lo = -5.0;
    double hi = 5.0;

    void validate() const;
    Eigen::VectorXd project(const Eigen::VectorXd& x) const {
        return x.cwiseMax(lo).cwiseMin(hi);
    }
};

/// Objective returning +inf for points where it cannot be evaluated.
using Objective = std::function<double(const Eigen::VectorXd&)>;
/// Objective with gradient; `gradient` may be null when only the value is needed.
using DifferentiableObjective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>;

struct LocalResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

struct NelderMeadOptions {
    int max_evaluations = 400;
    double initial_step = 0.5;
    /// Stop when the spread of simplex values and vertex distances fall below these.
    double f_tolerance = 1e-10;
    double x_tolerance = 1e-8;
};

/// Nelder-Mead with standard coefficients; trial points are projected onto
/// the box.
LocalResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0, const Box& box,
                        const NelderMeadOptions& options = {});

struct BfgsOptions {
    int max_iterations = 500;
    /// Stop when the projected gradient's infinity norm falls below this.
    double gradient_tolerance = 1e-9;
    double max_step = 1.0;
};

/// Projected BFGS: coordinates at a bound with the gradient pointing out of
/// the box are frozen for the step, the inverse-Hessian approximation acts on
/// the free coordinates, and an Armijo backtracking search runs along the
/// projected path.
LocalResult projected_bfgs(const DifferentiableObjective& f, const Eigen::VectorXd& x0,
                           const Box& box, const BfgsOptions& options = {});

}  // namespace ipp
