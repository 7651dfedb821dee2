#include "ipp/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "ipp/errors.hpp"

namespace ipp {

void Box::validate() const {
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) {
        throw InputError("box requires finite lo <= hi");
    }
}

LocalResult nelder_mead(const Objective& f, const Eigen::VectorXd& x0, const Box& box,
                        const NelderMeadOptions& options) {
    const Eigen::Index n = x0.size();
    LocalResult result;
    auto eval = [&](const Eigen::VectorXd& x) {
        ++result.evaluations;
        const double v = f(x);
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    };

    std::vector<Eigen::VectorXd> simplex(static_cast<std::size_t>(n + 1), box.project(x0));
    std::vector<double> values(static_cast<std::size_t>(n + 1));
    const double width = box.hi - box.lo;
    for (Eigen::Index i = 0; i < n; ++i) {
        auto& v = simplex[static_cast<std::size_t>(i + 1)];
        double step = options.initial_step;
        if (v(i) + step > box.hi) step = -step;
        v(i) = std::clamp(v(i) + step, box.lo, box.hi);
    }
    for (std::size_t i = 0; i < simplex.size(); ++i) values[i] = eval(simplex[i]);
    if (width == 0.0) {
        result.x = simplex[0];
        result.value = values[0];
        result.converged = true;
        return result;
    }

    std::vector<std::size_t> order(simplex.size());
    while (result.evaluations < options.max_evaluations) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second_worst = order[order.size() - 2];

        double spread_x = 0.0;
        for (const auto& v : simplex) {
            spread_x = std::max(spread_x, (v - simplex[best]).lpNorm<Eigen::Infinity>());
        }
        const double spread_f = values[worst] - values[best];
        if (std::isfinite(spread_f) && spread_f <= options.f_tolerance &&
            spread_x <= options.x_tolerance) {
            result.converged = true;
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (std::size_t i = 0; i < simplex.size(); ++i) {
            if (i != worst) centroid += simplex[i];
        }
        centroid /= static_cast<double>(n);

        const Eigen::VectorXd reflected = box.project(centroid + (centroid - simplex[worst]));
        const double f_reflected = eval(reflected);
        if (f_reflected < values[best]) {
            const Eigen::VectorXd expanded =
                box.project(centroid + 2.0 * (centroid - simplex[worst]));
            const double f_expanded = eval(expanded);
            if (f_expanded < f_reflected) {
                simplex[worst] = expanded;
                values[worst] = f_expanded;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_reflected;
            }
            continue;
        }
        if (f_reflected < values[second_worst]) {
            simplex[worst] = reflected;
            values[worst] = f_reflected;
            continue;
        }
        const bool outside = f_reflected < values[worst];
        const Eigen::VectorXd contracted =
            outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                    : Eigen::VectorXd(centroid + 0.5 * (simplex[worst] - centroid));
        const double f_contracted = eval(contracted);
        if (f_contracted < (outside ? f_reflected : values[worst])) {
            simplex[worst] = contracted;
            values[worst] = f_contracted;
            continue;
        }
        // shrink toward the best vertex
        for (std::size_t i = 0; i < simplex.size(); ++i) {
            if (i == best) continue;
            simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
            values[i] = eval(simplex[i]);
        }
    }

    const auto best = static_cast<std::size_t>(
        std::min_element(values.begin(), values.end()) - values.begin());
    result.x = simplex[best];
    result.value = values[best];
    return result;
}

namespace {

// Coordinates pinned at a bound by a gradient pointing outward.
std::vector<bool> active_set(const Eigen::VectorXd& x, const Eigen::VectorXd& g, const Box& box) {
    std::vector<bool> active(static_cast<std::size_t>(x.size()));
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        active[static_cast<std::size_t>(i)] =
            (x(i) <= box.lo && g(i) > 0.0) || (x(i) >= box.hi && g(i) < 0.0);
    }
    return active;
}

double projected_gradient_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                               const Box& box) {
    return (box.project(x - g) - x).lpNorm<Eigen::Infinity>();
}

}  // namespace

LocalResult projected_bfgs(const DifferentiableObjective& f, const Eigen::VectorXd& x0,
                           const Box& box, const BfgsOptions& options) {
    const Eigen::Index n = x0.size();
    LocalResult result;
    result.x = box.project(x0);
    Eigen::VectorXd grad(n);
    result.value = f(result.x, &grad);
    result.evaluations = 1;
    if (!std::isfinite(result.value) || !grad.allFinite()) return result;
    if (box.lo == box.hi) {
        result.converged = true;
        return result;
    }

    Eigen::MatrixXd inv_hessian = Eigen::MatrixXd::Identity(n, n);
    bool scaled = false;
    constexpr double kArmijo = 1e-4;

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        if (projected_gradient_norm(result.x, grad, box) < options.gradient_tolerance) {
            result.converged = true;
            break;
        }
        const auto active = active_set(result.x, grad, box);
        Eigen::VectorXd free_grad = grad;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (active[static_cast<std::size_t>(i)]) free_grad(i) = 0.0;
        }
        Eigen::VectorXd direction = -(inv_hessian * free_grad);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (active[static_cast<std::size_t>(i)]) direction(i) = 0.0;
        }
        if (!(direction.dot(free_grad) < 0.0)) {
            inv_hessian.setIdentity();
            scaled = false;
            direction = -free_grad;
        }

        double step = 1.0;
        const double longest = direction.lpNorm<Eigen::Infinity>();
        if (longest * step > options.max_step) step = options.max_step / longest;

        Eigen::VectorXd candidate;
        Eigen::VectorXd candidate_grad(n);
        double candidate_value = std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            candidate = box.project(result.x + step * direction);
            candidate_value = f(candidate, &candidate_grad);
            ++result.evaluations;
            const double decrease = grad.dot(candidate - result.x);
            if (std::isfinite(candidate_value) && candidate_grad.allFinite() &&
                candidate_value <= result.value + kArmijo * decrease) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            if (!scaled && inv_hessian.isIdentity()) break;  // steepest descent also failed
            inv_hessian.setIdentity();
            scaled = false;
            continue;
        }

        const Eigen::VectorXd s = candidate - result.x;
        const Eigen::VectorXd yv = candidate_grad - grad;
        const double previous = result.value;
        result.x = candidate;
        result.value = candidate_value;
        grad = candidate_grad;

        const double sy = s.dot(yv);
        if (sy > 1e-12 * s.norm() * yv.norm()) {
            if (!scaled) {
                inv_hessian *= sy / yv.squaredNorm();
                scaled = true;
            }
            const double rho = 1.0 / sy;
            const Eigen::VectorXd hy = inv_hessian * yv;
            inv_hessian += rho * ((1.0 + rho * yv.dot(hy)) * (s * s.transpose()) -
                                  (hy * s.transpose() + s * hy.transpose()));
        }
        if (s.lpNorm<Eigen::Infinity>() == 0.0 && previous == result.value) {
            result.converged = projected_gradient_norm(result.x, grad, box) <
                               std::sqrt(options.gradient_tolerance);
            break;
        }
    }
    return result;
}

}  // namespace ipp
