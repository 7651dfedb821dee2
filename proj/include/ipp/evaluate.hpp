#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ipp/envdata.hpp"
#include "ipp/estimator.hpp"
#include "ipp/model.hpp"
#include "ipp/scoring.hpp"

namespace ipp {

/// The polynomial factors h(v) for which E[h(V) exp(theta'V)] has a closed
/// form below: 1, (a'v)^2 and (c'v)(a'v).
struct QuadraticForm {
    enum class Kind { Constant, Square, Product };
    Kind kind = Kind::Constant;
    Eigen::VectorXd a;
    Eigen::VectorXd c;

    static QuadraticForm constant() { return {}; }
    static QuadraticForm square(Eigen::VectorXd a) { return {Kind::Square, std::move(a), {}}; }
    static QuadraticForm product(Eigen::VectorXd c, Eigen::VectorXd a) {
        return {Kind::Product, std::move(a), std::move(c)};
    }
};

/// E[h(V) exp(theta'V)] for V ~ N(0, sigma), using
/// E[h(V) exp(theta'V)] = E[h(V + sigma theta)] exp(theta' sigma theta / 2).
/// Throws DecompositionError when sigma is not positive definite.
double gaussian_exp_moment(const QuadraticForm& h, const Eigen::MatrixXd& sigma,
                           const Eigen::VectorXd& theta);

/// Twice the expected LogS of N(b'x, exp(2 g'x)) in training environment
/// `env`, as printed in the identifiability example (additive constant
/// dropped). This expansion omits the mean-shift cross terms; see
/// expected_logs_full for the exact value.
double expected_logs_closed_form(const ScmSpec& spec, std::size_t env, const Eigen::VectorXd& b,
                                 const Eigen::VectorXd& g);

/// Exact 2 E[LogS], including the log(2 pi) constant, from a term-by-term
/// Gaussian moment computation of
///   log(2 pi) + 2 g'W + (delta'W exp(-g'W) + U exp((gamma - g)'W))^2,
/// with W = Gamma eps_X, U = eps_Y and delta = beta - b.
double expected_logs_full(const ScmSpec& spec, std::size_t env, const Eigen::VectorXd& b,
                          const Eigen::VectorXd& g);

/// Error decomposition of one parameter block over replications:
/// mse = mean |x_r - truth|^2, sq_bias = |mean x - truth|^2,
/// variance = mean |x_r - mean x|^2, so mse = sq_bias + variance.
struct ErrorDecomposition {
    double mse = 0.0;
    double sq_bias = 0.0;
    double variance = 0.0;
};

ErrorDecomposition decompose_error(std::span<const Eigen::VectorXd> estimates,
                                   const Eigen::VectorXd& truth);

struct BiasVarianceRow {
    ErrorDecomposition beta;
    ErrorDecomposition gamma;
};

/// Slope blocks only; requires at least two replications.
BiasVarianceRow bias_variance(std::span<const ModelParams> replications, const ModelParams& truth);

struct ReplicationSummaryRow {
    std::string label;  ///< lambda value, or "selected" for the data-driven rule
    double lambda = 0.0;
    BiasVarianceRow errors;
    std::size_t selected_count = 0;
};

struct ReplicationSummary {
    std::size_t n_per_env = 0;
    std::size_t replications = 0;
    std::vector<ReplicationSummaryRow> rows;
};

struct InterventionRisk {
    double lambda = 0.0;
    std::string intervention;
    double mean = 0.0;
    double se = 0.0;
};

/// Mean score of every fitted lambda on one fresh test slice per
/// intervention. Slices are shared across lambda values so differences
/// between lambdas are paired; intervention j uses test stream
/// stream + j.
std::vector<InterventionRisk> intervention_risk_table(const FitPath& path, const ScmSpec& spec,
                                                      std::span<const InterventionSpec> interventions,
                                                      std::size_t n_test, const ScoreKind& kind,
                                                      std::uint64_t stream = 0);

/// The five test interventions of the simulation study: pooled training
/// distribution, variance scale 1/3 and 3/2, correlation perturbation of
/// width 0.75 and a mean shift of range 5 orthogonal to the true gamma.
std::vector<InterventionSpec> default_interventions(const ScmSpec& spec, std::uint64_t seed);

/// Parses pooled, observational, low-variance, high-variance, correlation or
/// orthogonal-shift into the corresponding default intervention.
InterventionSpec parse_intervention(const std::string& name, const ScmSpec& spec,
                                    std::uint64_t seed);

/// 2 mean|a_i - b_j| - mean|a_i - a_i'| - mean|b_j - b_j'| over all pairs of
/// rows, Euclidean norm; each within-sample mean includes the i = i' terms.
double energy_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace ipp
