#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "ipp/dataset.hpp"
#include "ipp/model.hpp"
#include "ipp/optimize.hpp"
#include "ipp/scoring.hpp"

namespace ipp {

/// Multi-start settings. For every lambda the candidate starts are the
/// previous solution (when warm starting), the first-lambda solution (or a
/// least-squares start before it exists) and `uniform_starts` seeded draws
/// from the box. Each start runs a budgeted Nelder-Mead; the best
/// `polish_count` are then refined by projected BFGS on the analytic
/// gradient.
struct OptimizerConfig {
    int uniform_starts = 18;
    int nelder_mead_evaluations = 400;
    int polish_count = 3;
    bool warm_start = true;
    BfgsOptions polish{};
    unsigned threads = 1;  ///< 0 = all cores
};

std::vector<double> default_lambda_grid();

struct FitConfig {
    ScoreKind kind = ScoreType::LogS;
    /// Environment weights; empty means 1/E each.
    std::vector<double> weights;
    std::vector<double> lambda_grid = default_lambda_grid();
    Box box{};
    OptimizerConfig optimizer{};
    std::uint64_t seed = 0;
    /// When false, beta0 and gamma0 are held at zero.
    bool fit_intercepts = true;

    /// Throws InputError on bad weights (given E environments), grid or box.
    void validate(std::size_t num_envs) const;
    std::vector<double> resolved_weights(std::size_t num_envs) const;
};

struct FitPoint {
    double lambda = 0.0;
    ModelParams theta_hat;
    std::vector<double> env_risks;
    double penalty = 0.0;
    double objective = 0.0;
    /// Weighted pooled risk sum_e w_e R_e.
    double pooled_risk = 0.0;
    /// Final objective of every start after local refinement, in start order.
    std::vector<double> restart_objectives;
};

struct FitPath {
    ScoreKind kind = ScoreType::LogS;
    std::vector<double> weights;
    std::vector<FitPoint> points;

    const FitPoint& at_lambda(double lambda) const;
};

std::vector<double> env_risks(const ModelParams& params, const EnvDataset& data,
                              const ScoreKind& kind);

/// (1/E^2) sum_{i<j} (v_i - v_j)^2. Throws InputError when fewer than two
/// entries are given.
double variance_penalty(std::span<const double> v);

/// sum_e w_e R_e(params) + lambda * variance_penalty(R(params)).
double objective(const ModelParams& params, const EnvDataset& data, const FitConfig& cfg,
                 double lambda);

/// Objective and its gradient in the flat parameter layout.
double objective_with_gradient(const ModelParams& params, const EnvDataset& data,
                               const ScoreKind& kind, std::span<const double> weights,
                               double lambda, Eigen::VectorXd* gradient);

/// Minimizes the objective over the box for every grid lambda in ascending
/// order. Deterministic given cfg.seed. Throws OptimizationError when every
/// start fails to reach a finite objective.
FitPath fit(const EnvDataset& data, const FitConfig& cfg);

struct MonotonicityReport {
    bool penalty_nonincreasing = true;
    bool pooled_nondecreasing = true;
};

MonotonicityReport penalty_monotonicity_report(const FitPath& path, double slack = 1e-6);

}  // namespace ipp
