#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "ipp/envdata.hpp"
#include "ipp/errors.hpp"

using namespace ipp;
namespace fs = std::filesystem;

namespace {

Eigen::MatrixXd sample_cov(const Eigen::MatrixXd& x) {
    const Eigen::RowVectorXd mean = x.colwise().mean();
    const Eigen::MatrixXd c = x.rowwise() - mean;
    return c.transpose() * c / static_cast<double>(x.rows() - 1);
}

fs::path temp_file(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "ipp_unit";
    fs::create_directories(dir);
    return dir / name;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

}  // namespace

TEST_CASE("default structural model") {
    const ScmSpec spec = make_default_spec(5, 3);
    const double conf[] = {0.8, -0.4, 0.3, -0.2, 0.1};
    for (int i = 0; i <= 5; ++i) CHECK(spec.sigma(i, i) == 1.0);
    for (int j = 1; j <= 5; ++j) {
        CHECK(spec.sigma(0, j) == conf[j - 1]);
        CHECK(spec.sigma(j, 0) == conf[j - 1]);
        for (int k = 1; k <= 5; ++k) {
            if (k != j) CHECK(spec.sigma(j, k) == 0.0);
        }
    }
    CHECK(spec.train_gammas.size() == 6);
    double total = 0.0;
    Eigen::MatrixXd combo = Eigen::MatrixXd::Zero(5, 5);
    for (std::size_t e = 0; e < 5; ++e) {
        CHECK(spec.mixing_alphas[e] <= 0.0);
        total += spec.mixing_alphas[e];
        combo += spec.mixing_alphas[e] * spec.train_gammas[e];
        const Eigen::MatrixXd offset = spec.train_gammas[e] - Eigen::MatrixXd::Identity(5, 5);
        CHECK(offset.cwiseAbs().maxCoeff() < 0.1);
    }
    CHECK(total == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK((combo - spec.train_gammas[5]).cwiseAbs().maxCoeff() < 1e-14);
    for (int j = 0; j < 5; ++j) {
        CHECK(spec.beta(j) > 0.0);
        CHECK(spec.beta(j) < 3.0);
        CHECK(spec.gamma(j) > 0.0);
        CHECK(spec.gamma(j) < 0.5);
    }
    // the confounding directions of the first d environments span R^d
    Eigen::MatrixXd dirs(5, 5);
    for (int e = 0; e < 5; ++e) dirs.col(e) = spec.train_gammas[e] * spec.sigma_yx();
    CHECK(Eigen::FullPivLU<Eigen::MatrixXd>(dirs).rank() == 5);

    CHECK_NOTHROW(make_default_spec(3, 1).validate());
    CHECK(make_default_spec(3, 1).train_gammas.size() == 4);
    CHECK_THROWS_AS(make_default_spec(0, 1), InputError);
}

TEST_CASE("simulation is deterministic with independent environment streams") {
    const ScmSpec spec = make_default_spec(5, 9);
    const EnvDataset a = simulate_training(spec, 200);
    const EnvDataset b = simulate_training(spec, 200);
    for (std::size_t e = 0; e < a.num_envs(); ++e) {
        CHECK(a[e].X == b[e].X);
        CHECK(a[e].y == b[e].y);
        CHECK(a[e].label == "env" + std::to_string(e + 1));
    }
    std::vector<std::size_t> sizes(6, 200);
    sizes[2] = 50;
    const EnvDataset c = simulate_training(spec, sizes);
    CHECK(c[0].X == a[0].X);
    CHECK(c[5].y == a[5].y);
    CHECK(c[2].X == a[2].X.topRows(50));

    ScmSpec other = spec;
    other.seed = 10;
    CHECK(simulate_training(other, 200)[0].y != a[0].y);
}

TEST_CASE("degenerate model reproduces the noise") {
    ScmSpec spec;
    spec.d = 2;
    spec.sigma = Eigen::MatrixXd::Identity(3, 3);
    spec.beta = Eigen::VectorXd::Zero(2);
    spec.gamma = Eigen::VectorXd::Zero(2);
    spec.train_gammas = {Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2)};
    spec.seed = 4;
    const EnvDataset data = simulate_training(spec, 10000);
    const double mean = data[0].y.mean();
    const double var = (data[0].y.array() - mean).square().sum() / 9999.0;
    CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("simulated covariances match population values") {
    const ScmSpec spec = make_default_spec(5, 21);
    const EnvDataset data = simulate_training(spec, 10000);
    for (std::size_t e = 0; e < data.num_envs(); ++e) {
        const Eigen::MatrixXd& g = spec.train_gammas[e];
        const Eigen::MatrixXd expected = g * spec.sigma_x() * g.transpose();
        CHECK((sample_cov(data[e].X) - expected).cwiseAbs().maxCoeff() < 0.05);
    }
    const EnvSlice high = simulate_test(spec, intervention::VarianceScale{1.5}, 10000, 3);
    CHECK((sample_cov(high.X) - 2.25 * spec.sigma_x()).cwiseAbs().maxCoeff() < 0.1);

    const EnvSlice pooled = simulate_test(spec, intervention::Pooled{}, 12000, 4);
    Eigen::MatrixXd mix = Eigen::MatrixXd::Zero(5, 5);
    for (const auto& g : spec.train_gammas) mix += g * spec.sigma_x() * g.transpose() / 6.0;
    CHECK((sample_cov(pooled.X) - mix).cwiseAbs().maxCoeff() < 0.06);

    // the response keeps the structural equation
    const EnvSlice obs = simulate_test(spec, intervention::Observational{}, 20000, 5);
    const Eigen::ArrayXd scale = (obs.X * spec.gamma).array().exp();
    const Eigen::ArrayXd eps = (obs.y - obs.X * spec.beta).array() / scale;
    CHECK(eps.mean() == doctest::Approx(0.0).epsilon(0.03).scale(1.0));
    CHECK(eps.square().mean() == doctest::Approx(1.0).epsilon(0.04));
}

TEST_CASE("orthogonal mean shift") {
    const ScmSpec spec = make_default_spec(5, 8);
    for (std::uint64_t s = 0; s < 10; ++s) {
        const intervention::MeanShiftOrthogonal shift{5.0, spec.gamma, s};
        const Eigen::VectorXd delta = orthogonal_shift(shift, 5);
        CHECK(std::fabs(delta.dot(spec.gamma)) < 1e-12);
        CHECK(delta.cwiseAbs().maxCoeff() > 0.0);
    }
    const intervention::MeanShiftOrthogonal shift{5.0, spec.gamma, 3};
    const EnvSlice slice = simulate_test(spec, shift, 10000, 2);
    const Eigen::VectorXd proj = slice.X * spec.gamma;
    const double mean = proj.mean();
    const double se = std::sqrt((proj.array() - mean).square().sum() / 9999.0 / 10000.0);
    CHECK(std::fabs(mean) < 3.0 * se);
    const Eigen::VectorXd xbar = slice.X.colwise().mean().transpose();
    CHECK((xbar - orthogonal_shift(shift, 5)).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("intervention validation") {
    CHECK_THROWS_AS(validate_intervention(intervention::VarianceScale{0.0}, 2), InputError);
    CHECK_THROWS_AS(validate_intervention(intervention::CorrelationPerturb{-1.0, 0}, 2), InputError);
    CHECK_THROWS_AS(
        validate_intervention(intervention::MeanShiftOrthogonal{5.0, Eigen::VectorXd::Zero(2), 0}, 2),
        InputError);
    CHECK_THROWS_AS(validate_intervention(intervention::CustomGamma{Eigen::MatrixXd::Zero(3, 3)}, 2),
                    InputError);
    CHECK_NOTHROW(validate_intervention(intervention::Observational{}, 2));
}

TEST_CASE("structural model validation") {
    ScmSpec spec = make_default_spec(5, 1);
    spec.sigma(0, 0) = 2.0;
    CHECK_THROWS_AS(spec.validate(), InputError);
    spec = make_default_spec(5, 1);
    spec.sigma(0, 1) = spec.sigma(1, 0) = 1.5;
    CHECK_THROWS_AS(spec.validate(), DecompositionError);
    spec = make_default_spec(5, 1);
    spec.train_gammas[0].setZero();
    CHECK_THROWS_AS(spec.validate(), DecompositionError);
}

TEST_CASE("dataset validation") {
    EnvSlice a{"a", Eigen::MatrixXd::Zero(2, 2), Eigen::VectorXd::Zero(2)};
    EnvSlice b{"b", Eigen::MatrixXd::Zero(3, 2), Eigen::VectorXd::Zero(3)};
    CHECK_NOTHROW(EnvDataset({a, b}));
    CHECK_THROWS_AS(EnvDataset({a}), InputError);
    CHECK_THROWS_AS(EnvDataset({a, a}), InputError);
    EnvSlice wide{"c", Eigen::MatrixXd::Zero(2, 3), Eigen::VectorXd::Zero(2)};
    CHECK_THROWS_AS(EnvDataset({a, wide}), InputError);
    EnvSlice bad = b;
    bad.y(0) = NAN;
    CHECK_THROWS_AS(EnvDataset({a, bad}), InputError);
    EnvDataset ok({a, b});
    CHECK(ok.total_size() == 5);
    CHECK(ok.dim() == 2);
}

TEST_CASE("csv input") {
    const auto small = temp_file("small.csv");
    write_file(small, "# comment\nenv,y,x1,x2\nB,1.5,0.1,0.2\nA,2,3,4\nB,-1,1e-3,5\n");
    const EnvDataset data = load_csv(small);
    REQUIRE(data.num_envs() == 2);
    CHECK(data[0].label == "B");
    CHECK(data[0].size() == 2);
    CHECK(data[1].label == "A");
    CHECK(data[0].X(1, 0) == 1e-3);
    CHECK(data[1].y(0) == 2.0);

    const auto na = temp_file("na.csv");
    write_file(na, "env,y,x1\nA,1,2\nB,NA,3\n");
    try {
        load_csv(na);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("line 3") != std::string::npos);
        CHECK(msg.find("'y'") != std::string::npos);
    }

    const auto ragged = temp_file("ragged.csv");
    write_file(ragged, "env,y,x1\nA,1,2\nB,1\n");
    CHECK_THROWS_AS(load_csv(ragged), ParseError);
    const auto single = temp_file("single.csv");
    write_file(single, "env,y,x1\nA,1,2\nA,1,3\n");
    CHECK_THROWS_AS(load_csv(single), ParseError);
    const auto header = temp_file("header.csv");
    write_file(header, "env,x1,y\nA,1,2\nB,1,3\n");
    CHECK_THROWS_AS(load_csv(header), ParseError);
    CHECK_THROWS_AS(load_csv(temp_file("does_not_exist.csv")), ParseError);
}

TEST_CASE("csv round trip") {
    const ScmSpec spec = make_default_spec(5, 2);
    const EnvDataset data = simulate_training(spec, 100);
    const auto path = temp_file("roundtrip.csv");
    save_csv(data, path, "metadata line");
    const EnvDataset back = load_csv(path);
    REQUIRE(back.num_envs() == data.num_envs());
    for (std::size_t e = 0; e < data.num_envs(); ++e) {
        CHECK(back[e].label == data[e].label);
        CHECK((back[e].X - data[e].X).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((back[e].y - data[e].y).cwiseAbs().maxCoeff() <= 1e-12);
    }
}
