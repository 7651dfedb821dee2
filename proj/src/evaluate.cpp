#include "ipp/evaluate.hpp"

#include <algorithm>
#include <cmath>

#include "ipp/errors.hpp"
#include "ipp/normal.hpp"

namespace ipp {

namespace {

void check_example_inputs(const ScmSpec& spec, std::size_t env, const Eigen::VectorXd& b,
                          const Eigen::VectorXd& g) {
    if (env >= spec.train_gammas.size()) {
        throw InputError("environment index " + std::to_string(env) + " out of range");
    }
    if (b.size() != spec.d || g.size() != spec.d) {
        throw InputError("b and g must have dimension " + std::to_string(spec.d));
    }
}

}  // namespace

double gaussian_exp_moment(const QuadraticForm& h, const Eigen::MatrixXd& sigma,
                           const Eigen::VectorXd& theta) {
    if (sigma.rows() != sigma.cols() || sigma.rows() != theta.size()) {
        throw InputError("sigma and theta dimensions do not match");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (!sigma.isApprox(sigma.transpose(), 1e-12) || llt.info() != Eigen::Success) {
        throw DecompositionError("sigma is not symmetric positive definite");
    }
    const Eigen::VectorXd shift = sigma * theta;
    const double mgf = std::exp(0.5 * theta.dot(shift));
    switch (h.kind) {
        case QuadraticForm::Kind::Constant:
            return mgf;
        case QuadraticForm::Kind::Square: {
            if (h.a.size() != theta.size()) throw InputError("form vector has wrong dimension");
            const double m = h.a.dot(shift);
            return mgf * (h.a.dot(sigma * h.a) + m * m);
        }
        case QuadraticForm::Kind::Product: {
            if (h.a.size() != theta.size() || h.c.size() != theta.size()) {
                throw InputError("form vectors have wrong dimension");
            }
            return mgf * (h.c.dot(sigma * h.a) + h.c.dot(shift) * h.a.dot(shift));
        }
    }
    return mgf;
}

double expected_logs_closed_form(const ScmSpec& spec, std::size_t env, const Eigen::VectorXd& b,
                                 const Eigen::VectorXd& g) {
    check_example_inputs(spec, env, b, g);
    const Eigen::MatrixXd& gam = spec.train_gammas[env];
    const Eigen::MatrixXd m = gam * spec.sigma_x() * gam.transpose();
    const Eigen::VectorXd delta = spec.beta - b;
    const Eigen::VectorXd theta = spec.gamma - g;
    const Eigen::VectorXd eta = spec.gamma - 2.0 * g;
    const double dmg = delta.dot(m * g);
    const double first = (delta.dot(m * delta) + 4.0 * dmg * dmg) * std::exp(2.0 * g.dot(m * g));
    const double second = std::exp(2.0 * theta.dot(m * theta));
    const double third =
        2.0 * delta.dot(gam * spec.sigma_yx()) * std::exp(eta.dot(m * eta) / 2.0);
    return first + second + third;
}

double expected_logs_full(const ScmSpec& spec, std::size_t env, const Eigen::VectorXd& b,
                          const Eigen::VectorXd& g) {
    check_example_inputs(spec, env, b, g);
    const int d = spec.d;
    const Eigen::MatrixXd& gam = spec.train_gammas[env];

    // joint covariance of (U, W)
    Eigen::MatrixXd joint(d + 1, d + 1);
    joint(0, 0) = 1.0;
    const Eigen::VectorXd cross = gam * spec.sigma_yx();
    joint.col(0).tail(d) = cross;
    joint.row(0).tail(d) = cross.transpose();
    joint.bottomRightCorner(d, d) = gam * spec.sigma_x() * gam.transpose();

    auto lift = [d](const Eigen::VectorXd& w_part) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(d + 1);
        v.tail(d) = w_part;
        return v;
    };
    Eigen::VectorXd u_dir = Eigen::VectorXd::Zero(d + 1);
    u_dir(0) = 1.0;
    const Eigen::VectorXd delta = lift(spec.beta - b);

    const double location = gaussian_exp_moment(QuadraticForm::square(delta), joint, lift(-2.0 * g));
    const double noise =
        gaussian_exp_moment(QuadraticForm::square(u_dir), joint, lift(2.0 * (spec.gamma - g)));
    const double cross_term = gaussian_exp_moment(QuadraticForm::product(u_dir, delta), joint,
                                                  lift(spec.gamma - 2.0 * g));
    return kLogTwoPi + location + noise + 2.0 * cross_term;
}

ErrorDecomposition decompose_error(std::span<const Eigen::VectorXd> estimates,
                                   const Eigen::VectorXd& truth) {
    if (estimates.size() < 2) throw InputError("need at least two replications");
    const double r = static_cast<double>(estimates.size());
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(truth.size());
    for (const auto& x : estimates) {
        if (x.size() != truth.size()) throw InputError("estimate dimension mismatch");
        mean += x;
    }
    mean /= r;
    ErrorDecomposition out;
    for (const auto& x : estimates) {
        out.mse += (x - truth).squaredNorm();
        out.variance += (x - mean).squaredNorm();
    }
    out.mse /= r;
    out.variance /= r;
    out.sq_bias = (mean - truth).squaredNorm();
    return out;
}

BiasVarianceRow bias_variance(std::span<const ModelParams> replications, const ModelParams& truth) {
    std::vector<Eigen::VectorXd> betas;
    std::vector<Eigen::VectorXd> gammas;
    for (const auto& p : replications) {
        betas.push_back(p.beta);
        gammas.push_back(p.gamma);
    }
    return {decompose_error(betas, truth.beta), decompose_error(gammas, truth.gamma)};
}

std::vector<InterventionRisk> intervention_risk_table(const FitPath& path, const ScmSpec& spec,
                                                      std::span<const InterventionSpec> interventions,
                                                      std::size_t n_test, const ScoreKind& kind,
                                                      std::uint64_t stream) {
    std::vector<InterventionRisk> table;
    for (std::size_t j = 0; j < interventions.size(); ++j) {
        const EnvSlice test = simulate_test(spec, interventions[j], n_test, stream + j);
        for (const auto& point : path.points) {
            const Eigen::VectorXd s = slice_scores(kind, point.theta_hat, test);
            const double n = static_cast<double>(s.size());
            const double mean = s.mean();
            const double var = n > 1 ? (s.array() - mean).square().sum() / (n - 1.0) : 0.0;
            table.push_back({point.lambda, test.label, mean, std::sqrt(var / n)});
        }
    }
    return table;
}

std::vector<InterventionSpec> default_interventions(const ScmSpec& spec, std::uint64_t seed) {
    return {intervention::Pooled{}, intervention::VarianceScale{1.0 / 3.0},
            intervention::VarianceScale{1.5}, intervention::CorrelationPerturb{0.75, seed},
            intervention::MeanShiftOrthogonal{5.0, spec.gamma, seed}};
}

InterventionSpec parse_intervention(const std::string& name, const ScmSpec& spec,
                                    std::uint64_t seed) {
    if (name == "pooled") return intervention::Pooled{};
    if (name == "observational") return intervention::Observational{};
    if (name == "low-variance") return intervention::VarianceScale{1.0 / 3.0};
    if (name == "high-variance") return intervention::VarianceScale{1.5};
    if (name == "correlation") return intervention::CorrelationPerturb{0.75, seed};
    if (name == "orthogonal-shift") return intervention::MeanShiftOrthogonal{5.0, spec.gamma, seed};
    throw InputError("unknown intervention '" + name +
                     "' (expected pooled, observational, low-variance, high-variance, "
                     "correlation or orthogonal-shift)");
}

double energy_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() < 1 || b.rows() < 1) throw InputError("energy distance needs non-empty samples");
    if (a.cols() != b.cols()) throw InputError("samples must have the same number of columns");
    auto mean_distance = [](const Eigen::MatrixXd& p, const Eigen::MatrixXd& q) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < p.rows(); ++i) {
            for (Eigen::Index j = 0; j < q.rows(); ++j) total += (p.row(i) - q.row(j)).norm();
        }
        return total / (static_cast<double>(p.rows()) * static_cast<double>(q.rows()));
    };
    const double value = 2.0 * mean_distance(a, b) - mean_distance(a, a) - mean_distance(b, b);
    return std::max(value, 0.0);
}

}  // namespace ipp
