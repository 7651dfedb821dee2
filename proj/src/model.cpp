#include "ipp/model.hpp"

#include <cmath>

#include "ipp/errors.hpp"
#include "ipp/normal.hpp"

namespace ipp {

namespace {

void check_dimension(const ModelParams& params, Eigen::Index cols) {
    if (cols != params.dim()) {
        throw InputError("covariate dimension " + std::to_string(cols) +
                         " does not match model dimension " + std::to_string(params.dim()));
    }
}

void check_log_scale(double log_sd) {
    if (!(std::fabs(log_sd) <= kMaxLogScale)) {
        throw OverflowError("log scale " + std::to_string(log_sd) + " outside [-700, 700]");
    }
}

}  // namespace

ModelParams ModelParams::zeros(int d) {
    return {0.0, Eigen::VectorXd::Zero(d), 0.0, Eigen::VectorXd::Zero(d)};
}

ModelParams ModelParams::from_flat(const Eigen::Ref<const Eigen::VectorXd>& flat) {
    if (flat.size() < 4 || flat.size() % 2 != 0) {
        throw InputError("flat parameter vector must have even length 2d + 2 >= 4, got " +
                         std::to_string(flat.size()));
    }
    const Eigen::Index d = flat.size() / 2 - 1;
    ModelParams p;
    p.beta0 = flat(0);
    p.beta = flat.segment(1, d);
    p.gamma0 = flat(d + 1);
    p.gamma = flat.segment(d + 2, d);
    return p;
}

Eigen::VectorXd ModelParams::flat() const {
    const Eigen::Index d = beta.size();
    Eigen::VectorXd out(2 * d + 2);
    out(0) = beta0;
    out.segment(1, d) = beta;
    out(d + 1) = gamma0;
    out.segment(d + 2, d) = gamma;
    return out;
}

void ModelParams::validate() const {
    if (beta.size() < 1 || beta.size() != gamma.size()) {
        throw InputError("beta and gamma must share a dimension d >= 1 (got " +
                         std::to_string(beta.size()) + " and " + std::to_string(gamma.size()) +
                         ")");
    }
    if (!std::isfinite(beta0) || !std::isfinite(gamma0) || !beta.allFinite() ||
        !gamma.allFinite()) {
        throw InputError("model parameters must be finite");
    }
}

GaussianPrediction predict(const ModelParams& params, const Eigen::Ref<const Eigen::VectorXd>& x) {
    check_dimension(params, x.size());
    const double log_sd = params.gamma0 + params.gamma.dot(x);
    check_log_scale(log_sd);
    return {params.beta0 + params.beta.dot(x), std::exp(log_sd)};
}

double obs_score(const ScoreKind& kind, const ModelParams& params,
                 const Eigen::Ref<const Eigen::VectorXd>& x, double y) {
    return score(kind, predict(params, x), y);
}

Eigen::VectorXd slice_scores(const ScoreKind& kind, const ModelParams& params,
                             const EnvSlice& slice) {
    check_dimension(params, slice.X.cols());
    const Eigen::VectorXd mean = (slice.X * params.beta).array() + params.beta0;
    const Eigen::VectorXd log_sd = (slice.X * params.gamma).array() + params.gamma0;
    const double k = scale_exponent(kind);
    const double a = log_scale_coefficient(kind);
    Eigen::VectorXd out(slice.y.size());
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        check_log_scale(log_sd(i));
        const double z = (slice.y(i) - mean(i)) * std::exp(-log_sd(i));
        const double q = standardized_score(kind, z).standard;
        out(i) = (k == 0.0 ? q : std::exp(k * log_sd(i)) * q) + a * log_sd(i);
    }
    return out;
}

double slice_risk(const ScoreKind& kind, const ModelParams& params, const EnvSlice& slice,
                  Eigen::VectorXd* gradient) {
    check_dimension(params, slice.X.cols());
    const Eigen::Index n = slice.y.size();
    if (n == 0) throw InputError("empty environment slice");

    const Eigen::VectorXd mean = (slice.X * params.beta).array() + params.beta0;
    const Eigen::VectorXd log_sd = (slice.X * params.gamma).array() + params.gamma0;
    if (log_sd.cwiseAbs().maxCoeff() > kMaxLogScale) {
        check_log_scale(log_sd.cwiseAbs().maxCoeff());
    }

    const double k = scale_exponent(kind);
    const double a = log_scale_coefficient(kind);
    double total = 0.0;
    Eigen::VectorXd d_mean;
    Eigen::VectorXd d_log_sd;
    if (gradient != nullptr) {
        d_mean.resize(n);
        d_log_sd.resize(n);
    }

    if (kind.type() == ScoreType::LogS) {
        // log sd + log(2 pi)/2 + z^2/2, written out to keep the hot path tight
        for (Eigen::Index i = 0; i < n; ++i) {
            const double inv_sd = std::exp(-log_sd(i));
            const double z = (slice.y(i) - mean(i)) * inv_sd;
            total += log_sd(i) + 0.5 * z * z;
            if (gradient != nullptr) {
                d_mean(i) = -z * inv_sd;
                d_log_sd(i) = 1.0 - z * z;
            }
        }
        total += 0.5 * kLogTwoPi * static_cast<double>(n);
    } else {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double inv_sd = std::exp(-log_sd(i));
            const double z = (slice.y(i) - mean(i)) * inv_sd;
            const auto [q, dq] = standardized_score(kind, z);
            const double scale = k == 0.0 ? 1.0 : std::exp(k * log_sd(i));
            total += scale * q + a * log_sd(i);
            if (gradient != nullptr) {
                d_mean(i) = -scale * dq * inv_sd;
                d_log_sd(i) = scale * (k * q - z * dq) + a;
            }
        }
    }

    const double inv_n = 1.0 / static_cast<double>(n);
    if (gradient != nullptr) {
        const Eigen::Index d = slice.X.cols();
        gradient->resize(2 * d + 2);
        (*gradient)(0) = d_mean.sum() * inv_n;
        gradient->segment(1, d).noalias() = slice.X.transpose() * d_mean * inv_n;
        (*gradient)(d + 1) = d_log_sd.sum() * inv_n;
        gradient->segment(d + 2, d).noalias() = slice.X.transpose() * d_log_sd * inv_n;
    }
    return total * inv_n;
}

Eigen::VectorXd logs_risk_gradient(const ModelParams& params, const EnvSlice& data) {
    Eigen::VectorXd gradient;
    slice_risk(ScoreType::LogS, params, data, &gradient);
    return gradient;
}

}  // namespace ipp
