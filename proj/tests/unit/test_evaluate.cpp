#include <doctest.h>

#include <cmath>

#include "ipp/envdata.hpp"
#include "ipp/errors.hpp"
#include "ipp/evaluate.hpp"
#include "ipp/normal.hpp"
#include "ipp/rng.hpp"

using namespace ipp;

namespace {

struct MeanSe {
    double mean;
    double se;
};

template <typename F>
MeanSe monte_carlo(int n, F&& draw) {
    double mean = 0.0, m2 = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double v = draw();
        const double delta = v - mean;
        mean += delta / i;
        m2 += delta * (v - mean);
    }
    return {mean, std::sqrt(m2 / (n - 1.0) / n)};
}

Eigen::MatrixXd random_spd(Rng& rng, int d) {
    Eigen::MatrixXd a(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) a(i, j) = rng.uniform(-0.5, 0.5);
    }
    return a * a.transpose() + 0.3 * Eigen::MatrixXd::Identity(d, d);
}

Eigen::VectorXd random_vector(Rng& rng, int d, double r) {
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v(i) = rng.uniform(-r, r);
    return v;
}

// 2 LogS of N(b'x, exp(2 g'x)) for one draw from training environment env
double two_logs_draw(const ScmSpec& spec, const Eigen::MatrixXd& lower, std::size_t env,
                     const Eigen::VectorXd& b, const Eigen::VectorXd& g, Rng& rng) {
    Eigen::VectorXd z(spec.d + 1);
    for (auto& v : z) v = rng.normal();
    const Eigen::VectorXd eps = lower * z;
    const Eigen::VectorXd x = spec.train_gammas[env] * eps.tail(spec.d);
    const double y = spec.beta.dot(x) + std::exp(spec.gamma.dot(x)) * eps(0);
    const double r = (y - b.dot(x)) * std::exp(-g.dot(x));
    return kLogTwoPi + 2.0 * g.dot(x) + r * r;
}

}  // namespace

TEST_CASE("gaussian exponential moments") {
    Rng rng(1);
    const Eigen::MatrixXd sigma = random_spd(rng, 3);
    CHECK(gaussian_exp_moment(QuadraticForm::constant(), sigma, Eigen::VectorXd::Zero(3)) == 1.0);
    const Eigen::VectorXd theta = random_vector(rng, 3, 0.4);
    CHECK(gaussian_exp_moment(QuadraticForm::constant(), sigma, theta) ==
          doctest::Approx(std::exp(0.5 * theta.dot(sigma * theta))));

    const Eigen::MatrixXd lower = sigma.llt().matrixL();
    const Eigen::VectorXd a = random_vector(rng, 3, 1.0);
    const Eigen::VectorXd c = random_vector(rng, 3, 1.0);
    Rng mc(2);
    Eigen::VectorXd z(3);
    auto draw_v = [&] {
        for (auto& v : z) v = mc.normal();
        return Eigen::VectorXd(lower * z);
    };
    const auto sq = monte_carlo(1000000, [&] {
        const Eigen::VectorXd v = draw_v();
        return a.dot(v) * a.dot(v) * std::exp(theta.dot(v));
    });
    CHECK(std::fabs(gaussian_exp_moment(QuadraticForm::square(a), sigma, theta) - sq.mean) <
          3.0 * sq.se);
    const auto prod = monte_carlo(1000000, [&] {
        const Eigen::VectorXd v = draw_v();
        return c.dot(v) * a.dot(v) * std::exp(theta.dot(v));
    });
    CHECK(std::fabs(gaussian_exp_moment(QuadraticForm::product(c, a), sigma, theta) - prod.mean) <
          3.0 * prod.se);

    Eigen::MatrixXd bad = sigma;
    bad(0, 0) = -1.0;
    CHECK_THROWS_AS(gaussian_exp_moment(QuadraticForm::constant(), bad, theta), DecompositionError);
    CHECK_THROWS_AS(gaussian_exp_moment(QuadraticForm::square(a), sigma, Eigen::VectorXd::Zero(2)),
                    InputError);
}

TEST_CASE("printed expected LogS") {
    const ScmSpec spec = make_default_spec(5, 4);
    for (std::size_t e = 0; e < spec.train_gammas.size(); ++e) {
        CHECK(expected_logs_closed_form(spec, e, spec.beta, spec.gamma) == doctest::Approx(1.0));
    }
    ScmSpec clean = spec;
    clean.sigma = Eigen::MatrixXd::Identity(6, 6);
    Rng rng(5);
    for (int rep = 0; rep < 30; ++rep) {
        const Eigen::VectorXd b = spec.beta + random_vector(rng, 5, 0.5);
        const Eigen::VectorXd g = spec.gamma + random_vector(rng, 5, 0.2);
        for (std::size_t e = 0; e < clean.train_gammas.size(); ++e) {
            CHECK(expected_logs_closed_form(clean, e, b, g) >
                  expected_logs_closed_form(clean, e, spec.beta, spec.gamma));
            CHECK(expected_logs_full(clean, e, b, g) > expected_logs_full(clean, e, spec.beta, spec.gamma));
        }
    }
    CHECK_THROWS_AS(expected_logs_closed_form(spec, 6, spec.beta, spec.gamma), InputError);
    CHECK_THROWS_AS(expected_logs_full(spec, 0, Eigen::VectorXd::Zero(4), spec.gamma), InputError);
}

TEST_CASE("exact expected LogS against Monte Carlo") {
    const ScmSpec spec = make_default_spec(5, 6);
    const Eigen::MatrixXd lower = spec.sigma.llt().matrixL();
    Rng rng(7);
    for (int rep = 0; rep < 3; ++rep) {
        const std::size_t env = static_cast<std::size_t>(rep * 2);
        const Eigen::VectorXd b = spec.beta + random_vector(rng, 5, 0.5);
        const Eigen::VectorXd g = spec.gamma + random_vector(rng, 5, 0.15);
        Rng mc(100 + rep);
        const auto est = monte_carlo(1000000, [&] { return two_logs_draw(spec, lower, env, b, g, mc); });
        CHECK(std::fabs(expected_logs_full(spec, env, b, g) - est.mean) < 3.0 * est.se);
    }
    // at the truth 2 E[LogS] = log(2 pi) + 1
    CHECK(expected_logs_full(spec, 0, spec.beta, spec.gamma) == doctest::Approx(kLogTwoPi + 1.0));
}

TEST_CASE("bias-variance decomposition") {
    const Eigen::Vector2d truth(1.0, 0.0);
    std::vector<Eigen::VectorXd> same(4, truth);
    auto r = decompose_error(same, truth);
    CHECK(r.mse == 0.0);
    CHECK(r.sq_bias == 0.0);
    CHECK(r.variance == 0.0);

    const std::vector<Eigen::VectorXd> sym{truth + Eigen::Vector2d(0.6, 0.8),
                                           truth - Eigen::Vector2d(0.6, 0.8)};
    r = decompose_error(sym, truth);
    CHECK(r.sq_bias == doctest::Approx(0.0).scale(1.0));
    CHECK(r.variance == doctest::Approx(1.0));
    CHECK(r.mse == doctest::Approx(1.0));

    const std::vector<Eigen::VectorXd> five{Eigen::Vector2d(1, 2), Eigen::Vector2d(3, 0),
                                            Eigen::Vector2d(-1, 1), Eigen::Vector2d(2, 2),
                                            Eigen::Vector2d(0, -1)};
    r = decompose_error(five, truth);
    CHECK(r.mse == doctest::Approx(4.0));
    CHECK(r.sq_bias == doctest::Approx(0.64));
    CHECK(r.variance == doctest::Approx(3.36));

    Rng rng(3);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<Eigen::VectorXd> xs;
        for (int i = 0; i < 2 + rep; ++i) xs.push_back(random_vector(rng, 4, 3.0));
        const Eigen::VectorXd t = random_vector(rng, 4, 1.0);
        const auto d = decompose_error(xs, t);
        CHECK(std::fabs(d.mse - d.sq_bias - d.variance) < 1e-12);
    }
    CHECK_THROWS_AS(decompose_error(std::vector<Eigen::VectorXd>{truth}, truth), InputError);

    std::vector<ModelParams> params;
    for (const auto& v : five) params.push_back({0.0, v, 0.0, 2.0 * v});
    ModelParams t{0.0, truth, 0.0, 2.0 * truth};
    const auto row = bias_variance(params, t);
    CHECK(row.beta.mse == doctest::Approx(4.0));
    CHECK(row.gamma.mse == doctest::Approx(16.0));
}

TEST_CASE("energy distance") {
    Rng rng(10);
    Eigen::MatrixXd a(40, 3);
    for (auto& v : a.reshaped()) v = rng.normal();
    CHECK(energy_distance(a, a) == doctest::Approx(0.0).scale(1.0));
    Eigen::MatrixXd b = a.array() + 0.5;
    CHECK(energy_distance(a, b) == doctest::Approx(energy_distance(b, a)).epsilon(1e-14));
    CHECK(energy_distance(a, b) > 0.0);

    const Eigen::RowVector2d u(1.0, 2.0), v(4.0, 6.0);
    CHECK(energy_distance(u, v) == doctest::Approx(10.0));
    CHECK_THROWS_AS(energy_distance(a, Eigen::MatrixXd::Zero(3, 2)), InputError);

    Eigen::MatrixXd g1(1000, 1), g2(1000, 1);
    for (auto& x : g1.reshaped()) x = rng.normal();
    for (auto& x : g2.reshaped()) x = 10.0 + rng.normal();
    // 2 E|A - B| - E|A - A'| - E|B - B'| with E|A - A'| = 2 / sqrt(pi)
    const double expected = 2.0 * 10.0 - 2.0 * 2.0 / kSqrtPi;
    CHECK(energy_distance(g1, g2) == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("intervention risk table") {
    const ScmSpec spec = make_default_spec(5, 13);
    FitPath path;
    path.weights = std::vector<double>(6, 1.0 / 6.0);
    FitPoint truth_point;
    truth_point.lambda = 0.0;
    truth_point.theta_hat = spec.truth();
    FitPoint other = truth_point;
    other.lambda = 1.0;
    other.theta_hat.beta(0) += 0.5;
    path.points = {truth_point, other};

    const auto defaults = default_interventions(spec, 1);
    const auto table = intervention_risk_table(path, spec, defaults, 2000, ScoreType::LogS);
    CHECK(table.size() == 10);
    CHECK(table[0].intervention == "pooled");
    CHECK(table[1].lambda == 1.0);

    const std::vector<InterventionSpec> pair{intervention::Observational{},
                                             intervention::MeanShiftOrthogonal{5.0, spec.gamma, 2}};
    const auto logs = intervention_risk_table(path, spec, pair, 10000, ScoreType::LogS);
    const double diff = logs[0].mean - logs[2].mean;
    CHECK(std::fabs(diff) < 3.0 * std::hypot(logs[0].se, logs[2].se));

    const auto scrps = intervention_risk_table(path, spec, pair, 10000, ScoreType::SCRPS);
    // at the truth SCRPS = SCRPS(N(0,1), eps) + gamma'x / 2, and E[SCRPS(N(0,1), eps)] = 1 + log(2/sqrt(pi))/2
    const double expected = 1.0 + 0.5 * std::log(2.0 / kSqrtPi);
    CHECK(std::fabs(scrps[0].mean - expected) < 3.0 * scrps[0].se);

    CHECK(std::holds_alternative<intervention::Pooled>(parse_intervention("pooled", spec, 0)));
    CHECK(std::get<intervention::VarianceScale>(parse_intervention("low-variance", spec, 0)).c ==
          doctest::Approx(1.0 / 3.0));
    CHECK(std::get<intervention::CorrelationPerturb>(parse_intervention("correlation", spec, 0)).width ==
          0.75);
    CHECK_THROWS_AS(parse_intervention("sideways", spec, 0), InputError);
}
