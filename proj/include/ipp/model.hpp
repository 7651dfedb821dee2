#pragma once

#include <Eigen/Dense>

#include "ipp/dataset.hpp"
#include "ipp/scoring.hpp"

namespace ipp {

/// Exponent guard for the scale: |gamma0 + gamma'x| above this raises
/// OverflowError.
inline constexpr double kMaxLogScale = 700.0;

/// Heteroscedastic Gaussian linear model
///   y | x ~ N(beta0 + beta'x, exp(2 gamma0 + 2 gamma'x)).
///
/// The flat parameter layout used by the optimizer and the gradient is
/// (beta0, beta_1..beta_d, gamma0, gamma_1..gamma_d).
struct ModelParams {
    double beta0 = 0.0;
    Eigen::VectorXd beta;
    double gamma0 = 0.0;
    Eigen::VectorXd gamma;

    static ModelParams zeros(int d);
    static ModelParams from_flat(const Eigen::Ref<const Eigen::VectorXd>& flat);

    int dim() const noexcept { return static_cast<int>(beta.size()); }
    Eigen::VectorXd flat() const;

    /// Throws InputError unless beta and gamma share a dimension d >= 1 and
    /// every entry is finite.
    void validate() const;

    friend bool operator==(const ModelParams& a, const ModelParams& b) {
        return a.beta0 == b.beta0 && a.gamma0 == b.gamma0 && a.beta == b.beta &&
               a.gamma == b.gamma;
    }
};

GaussianPrediction predict(const ModelParams& params, const Eigen::Ref<const Eigen::VectorXd>& x);

double obs_score(const ScoreKind& kind, const ModelParams& params,
                 const Eigen::Ref<const Eigen::VectorXd>& x, double y);

/// Per-observation scores of one environment.
Eigen::VectorXd slice_scores(const ScoreKind& kind, const ModelParams& params,
                             const EnvSlice& slice);

/// Mean score over one environment. When `gradient` is non-null it receives
/// the derivative with respect to the flat parameter vector (size 2d + 2).
double slice_risk(const ScoreKind& kind, const ModelParams& params, const EnvSlice& slice,
                  Eigen::VectorXd* gradient = nullptr);

/// Gradient of (1/n) sum_i LogS(predict(params, x_i), y_i), flat layout.
Eigen::VectorXd logs_risk_gradient(const ModelParams& params, const EnvSlice& data);

}  // namespace ipp
