#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ipp/dataset.hpp"
#include "ipp/model.hpp"

namespace ipp {

/// Structural model with covariate interventions:
///   (eps_Y, eps_X) ~ N(0, sigma),  X^e = Gamma^e eps_X,
///   Y^e = beta'X^e + exp(gamma'X^e) eps_Y.
/// Index 0 of `sigma` is eps_Y; sigma(0, 0) must be 1.
struct ScmSpec {
    int d = 0;
    Eigen::MatrixXd sigma;
    Eigen::VectorXd beta;
    Eigen::VectorXd gamma;
    std::vector<Eigen::MatrixXd> train_gammas;
    std::uint64_t seed = 0;
    /// Weights of the last training matrix as a combination of the others,
    /// when it was built that way (empty otherwise).
    std::vector<double> mixing_alphas;

    /// Symmetric PD sigma with unit (0,0) entry, matching dimensions, and
    /// |det Gamma^e| > 1e-12 for every training matrix.
    void validate() const;

    Eigen::MatrixXd sigma_x() const { return sigma.bottomRightCorner(d, d); }
    Eigen::VectorXd sigma_yx() const { return sigma.col(0).tail(d); }
    /// True parameters as a model with zero intercepts.
    ModelParams truth() const;
};

namespace intervention {

struct Observational {};
/// Each observation uses the training matrix of environment (i mod E): the
/// pooled training distribution with balanced environments.
struct Pooled {};
struct VarianceScale {
    double c = 1.0;
};
struct CorrelationPerturb {
    double width = 0.0;
    std::uint64_t seed = 0;
};
/// X = eps_X + delta - gamma_ref (delta'gamma_ref) / |gamma_ref|^2 with one
/// draw delta_j ~ Unif(-range, range) per environment.
struct MeanShiftOrthogonal {
    double range = 5.0;
    Eigen::VectorXd gamma_ref;
    std::uint64_t seed = 0;
};
struct CustomGamma {
    Eigen::MatrixXd matrix;
};

}  // namespace intervention

using InterventionSpec =
    std::variant<intervention::Observational, intervention::Pooled, intervention::VarianceScale,
                 intervention::CorrelationPerturb, intervention::MeanShiftOrthogonal,
                 intervention::CustomGamma>;

void validate_intervention(const InterventionSpec& spec, int d);
std::string intervention_label(const InterventionSpec& spec);

/// Deterministic mean shift used by a MeanShiftOrthogonal intervention.
Eigen::VectorXd orthogonal_shift(const intervention::MeanShiftOrthogonal& shift, int d);

/// Covariate dimension 5 reproduces the reference design exactly (unit
/// variances, confounding 0.8, -0.4, 0.3, -0.2, 0.1); other dimensions draw
/// the confounding entries from Unif(-0.5, 0.5) until sigma is PD.
/// beta_j ~ Unif(0, 3), gamma_j ~ Unif(0, 0.5), Gamma^e = I + Unif(-0.1, 0.1)
/// for e = 1..d, and Gamma^{d+1} = sum_e alpha_e Gamma^e with alpha = -w,
/// w uniform draws normalized to sum one.
ScmSpec make_default_spec(int d, std::uint64_t seed);

/// One environment per training matrix, labels "env1".."envE". Environment e
/// draws from its own sub-stream of spec.seed.
EnvDataset simulate_training(const ScmSpec& spec, std::size_t n_per_env);
EnvDataset simulate_training(const ScmSpec& spec, std::span<const std::size_t> n_per_env);

/// A test environment under `intervention`; `stream` selects an independent
/// draw of the noise.
EnvSlice simulate_test(const ScmSpec& spec, const InterventionSpec& intervention, std::size_t n,
                       std::uint64_t stream = 0);

/// CSV with header env,y,x1,...,xd. Lines starting with '#' are comments.
EnvDataset load_csv(const std::filesystem::path& path);
void save_csv(const EnvDataset& data, const std::filesystem::path& path,
              const std::string& comment = {});

}  // namespace ipp
