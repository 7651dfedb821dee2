#include "ipp/envdata.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "ipp/errors.hpp"
#include "ipp/rng.hpp"

namespace ipp {

namespace {

// Stream tags; fixed so that data sets stay reproducible across releases.
constexpr std::uint64_t kSpecStream = 0x5350'4543ull;       // "SPEC"
constexpr std::uint64_t kTrainStream = 0x5452'4149'4eull;   // "TRAIN"
constexpr std::uint64_t kTestStream = 0x5445'5354ull;       // "TEST"
constexpr std::uint64_t kInterventionStream = 0x494e'5456ull;  // "INTV"

constexpr double kPivotTolerance = 1e-10;
constexpr double kDeterminantTolerance = 1e-12;
constexpr int kMaxSpecAttempts = 100;

// Lower Cholesky factor; throws when a pivot falls below the tolerance.
Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& sigma) {
    if (sigma.rows() != sigma.cols()) throw DecompositionError("covariance must be square");
    if (!sigma.isApprox(sigma.transpose(), 1e-12)) {
        throw DecompositionError("covariance must be symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) {
        throw DecompositionError("covariance is not positive definite");
    }
    Eigen::MatrixXd lower = llt.matrixL();
    if ((lower.diagonal().array().square() < kPivotTolerance).any()) {
        throw DecompositionError("covariance is numerically singular (pivot below 1e-10)");
    }
    return lower;
}

bool is_invertible(const Eigen::MatrixXd& m) {
    return std::fabs(m.determinant()) > kDeterminantTolerance;
}

Eigen::MatrixXd perturbed_identity(int d, double width, Rng& rng) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) m(i, j) += rng.uniform(-width, width);
    }
    return m;
}

struct NoiseSampler {
    Eigen::MatrixXd lower;
    Eigen::VectorXd z;

    explicit NoiseSampler(const Eigen::MatrixXd& sigma)
        : lower(cholesky_factor(sigma)), z(sigma.rows()) {}

    // (eps_Y, eps_X) stacked
    Eigen::VectorXd draw(Rng& rng) {
        for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
        return lower.triangularView<Eigen::Lower>() * z;
    }
};

void fill_response(const ScmSpec& spec, const Eigen::VectorXd& x, double eps_y, double& y) {
    y = spec.beta.dot(x) + std::exp(spec.gamma.dot(x)) * eps_y;
}

EnvSlice simulate_env(const ScmSpec& spec, const Eigen::MatrixXd& gamma_matrix, std::size_t n,
                      Rng rng, std::string label) {
    NoiseSampler sampler(spec.sigma);
    EnvSlice slice{std::move(label), Eigen::MatrixXd(n, spec.d), Eigen::VectorXd(n)};
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::VectorXd eps = sampler.draw(rng);
        const Eigen::VectorXd x = gamma_matrix * eps.tail(spec.d);
        slice.X.row(static_cast<Eigen::Index>(i)) = x.transpose();
        fill_response(spec, x, eps(0), slice.y(static_cast<Eigen::Index>(i)));
    }
    return slice;
}

}  // namespace

void ScmSpec::validate() const {
    if (d < 1) throw InputError("SCM dimension must be at least 1");
    if (sigma.rows() != d + 1 || sigma.cols() != d + 1) {
        throw InputError("sigma must be (d+1)x(d+1)");
    }
    if (std::fabs(sigma(0, 0) - 1.0) > 1e-12) {
        throw InputError("sigma(0,0), the variance of eps_Y, must equal 1");
    }
    cholesky_factor(sigma);
    if (beta.size() != d || gamma.size() != d) {
        throw InputError("beta and gamma must have dimension d");
    }
    if (!beta.allFinite() || !gamma.allFinite()) throw InputError("beta/gamma must be finite");
    if (train_gammas.empty()) throw InputError("at least one training matrix is required");
    for (std::size_t e = 0; e < train_gammas.size(); ++e) {
        const auto& g = train_gammas[e];
        if (g.rows() != d || g.cols() != d) {
            throw InputError("training matrix " + std::to_string(e + 1) + " must be d x d");
        }
        if (!is_invertible(g)) {
            throw DecompositionError("training matrix " + std::to_string(e + 1) +
                                     " is singular (|det| <= 1e-12)");
        }
    }
}

ModelParams ScmSpec::truth() const {
    return {0.0, beta, 0.0, gamma};
}

void validate_intervention(const InterventionSpec& spec, int d) {
    std::visit(
        [d](const auto& iv) {
            using T = std::decay_t<decltype(iv)>;
            if constexpr (std::is_same_v<T, intervention::VarianceScale>) {
                if (!(iv.c > 0.0) || !std::isfinite(iv.c)) {
                    throw InputError("variance-scale intervention needs c > 0");
                }
            } else if constexpr (std::is_same_v<T, intervention::CorrelationPerturb>) {
                if (!(iv.width >= 0.0) || !std::isfinite(iv.width)) {
                    throw InputError("correlation intervention needs width >= 0");
                }
            } else if constexpr (std::is_same_v<T, intervention::MeanShiftOrthogonal>) {
                if (iv.gamma_ref.size() != d) {
                    throw InputError("mean-shift reference direction must have dimension d");
                }
                if (!(iv.gamma_ref.norm() > 0.0)) {
                    throw InputError("mean-shift reference direction must be non-zero");
                }
                if (!(iv.range >= 0.0) || !std::isfinite(iv.range)) {
                    throw InputError("mean-shift range must be finite and >= 0");
                }
            } else if constexpr (std::is_same_v<T, intervention::CustomGamma>) {
                if (iv.matrix.rows() != d || iv.matrix.cols() != d) {
                    throw InputError("custom intervention matrix must be d x d");
                }
            }
        },
        spec);
}

std::string intervention_label(const InterventionSpec& spec) {
    return std::visit(
        [](const auto& iv) -> std::string {
            using T = std::decay_t<decltype(iv)>;
            if constexpr (std::is_same_v<T, intervention::Observational>) return "observational";
            if constexpr (std::is_same_v<T, intervention::Pooled>) return "pooled";
            if constexpr (std::is_same_v<T, intervention::VarianceScale>) {
                char buf[64];
                std::snprintf(buf, sizeof buf, "variance(c=%g)", iv.c);
                return buf;
            }
            if constexpr (std::is_same_v<T, intervention::CorrelationPerturb>) {
                char buf[64];
                std::snprintf(buf, sizeof buf, "correlation(width=%g)", iv.width);
                return buf;
            }
            if constexpr (std::is_same_v<T, intervention::MeanShiftOrthogonal>) {
                char buf[64];
                std::snprintf(buf, sizeof buf, "orthogonal-shift(range=%g)", iv.range);
                return buf;
            }
            return "custom";
        },
        spec);
}

Eigen::VectorXd orthogonal_shift(const intervention::MeanShiftOrthogonal& shift, int d) {
    Rng rng = Rng(shift.seed).substream(kInterventionStream);
    Eigen::VectorXd delta(d);
    for (int j = 0; j < d; ++j) delta(j) = rng.uniform(-shift.range, shift.range);
    const auto& g = shift.gamma_ref;
    return delta - g * (delta.dot(g) / g.squaredNorm());
}

ScmSpec make_default_spec(int d, std::uint64_t seed) {
    if (d < 1) throw InputError("dimension must be at least 1, got " + std::to_string(d));
    static constexpr double kReferenceConfounding[5] = {0.8, -0.4, 0.3, -0.2, 0.1};
    const Rng base = Rng(seed).substream(kSpecStream);

    for (int attempt = 0; attempt < kMaxSpecAttempts; ++attempt) {
        Rng rng = base.substream(static_cast<std::uint64_t>(attempt));
        ScmSpec spec;
        spec.d = d;
        spec.seed = seed;
        spec.sigma = Eigen::MatrixXd::Identity(d + 1, d + 1);
        for (int j = 1; j <= d; ++j) {
            const double c = d == 5 ? kReferenceConfounding[j - 1] : rng.uniform(-0.5, 0.5);
            spec.sigma(0, j) = c;
            spec.sigma(j, 0) = c;
        }
        Eigen::LLT<Eigen::MatrixXd> llt(spec.sigma);
        if (llt.info() != Eigen::Success) continue;

        spec.beta.resize(d);
        spec.gamma.resize(d);
        for (int j = 0; j < d; ++j) spec.beta(j) = rng.uniform(0.0, 3.0);
        for (int j = 0; j < d; ++j) spec.gamma(j) = rng.uniform(0.0, 0.5);

        for (int e = 0; e < d; ++e) spec.train_gammas.push_back(perturbed_identity(d, 0.1, rng));

        std::vector<double> w(static_cast<std::size_t>(d));
        double total = 0.0;
        for (auto& v : w) {
            v = rng.uniform();
            total += v;
        }
        Eigen::MatrixXd last = Eigen::MatrixXd::Zero(d, d);
        for (int e = 0; e < d; ++e) {
            const double alpha = -w[static_cast<std::size_t>(e)] / total;
            spec.mixing_alphas.push_back(alpha);
            last += alpha * spec.train_gammas[static_cast<std::size_t>(e)];
        }
        spec.train_gammas.push_back(std::move(last));

        try {
            spec.validate();
        } catch (const DecompositionError&) {
            continue;
        }
        return spec;
    }
    throw DecompositionError("could not generate a valid SCM after 100 attempts");
}

EnvDataset simulate_training(const ScmSpec& spec, std::span<const std::size_t> n_per_env) {
    spec.validate();
    if (n_per_env.size() != spec.train_gammas.size()) {
        throw InputError("need one sample size per training environment");
    }
    const Rng base = Rng(spec.seed).substream(kTrainStream);
    std::vector<EnvSlice> envs;
    envs.reserve(n_per_env.size());
    for (std::size_t e = 0; e < n_per_env.size(); ++e) {
        if (n_per_env[e] < 2) throw InputError("each environment needs at least 2 observations");
        envs.push_back(simulate_env(spec, spec.train_gammas[e], n_per_env[e], base.substream(e),
                                    "env" + std::to_string(e + 1)));
    }
    return EnvDataset(std::move(envs));
}

EnvDataset simulate_training(const ScmSpec& spec, std::size_t n_per_env) {
    const std::vector<std::size_t> sizes(spec.train_gammas.size(), n_per_env);
    return simulate_training(spec, sizes);
}

EnvSlice simulate_test(const ScmSpec& spec, const InterventionSpec& iv, std::size_t n,
                       std::uint64_t stream) {
    spec.validate();
    validate_intervention(iv, spec.d);
    if (n < 1) throw InputError("test environment needs at least 1 observation");
    Rng rng = Rng(spec.seed).substream(kTestStream).substream(stream);
    const std::string label = intervention_label(iv);
    const int d = spec.d;

    return std::visit(
        [&](const auto& v) -> EnvSlice {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, intervention::Observational>) {
                return simulate_env(spec, Eigen::MatrixXd::Identity(d, d), n, rng, label);
            } else if constexpr (std::is_same_v<T, intervention::VarianceScale>) {
                return simulate_env(spec, v.c * Eigen::MatrixXd::Identity(d, d), n, rng, label);
            } else if constexpr (std::is_same_v<T, intervention::CorrelationPerturb>) {
                Rng matrix_rng = Rng(v.seed).substream(kInterventionStream);
                const Eigen::MatrixXd g = perturbed_identity(d, v.width, matrix_rng);
                if (!is_invertible(g)) throw DecompositionError("perturbed matrix is singular");
                return simulate_env(spec, g, n, rng, label);
            } else if constexpr (std::is_same_v<T, intervention::CustomGamma>) {
                return simulate_env(spec, v.matrix, n, rng, label);
            } else {
                NoiseSampler sampler(spec.sigma);
                EnvSlice slice{label, Eigen::MatrixXd(n, d), Eigen::VectorXd(n)};
                Eigen::VectorXd shift = Eigen::VectorXd::Zero(d);
                if constexpr (std::is_same_v<T, intervention::MeanShiftOrthogonal>) {
                    shift = orthogonal_shift(v, d);
                }
                const std::size_t envs = spec.train_gammas.size();
                for (std::size_t i = 0; i < n; ++i) {
                    const Eigen::VectorXd eps = sampler.draw(rng);
                    Eigen::VectorXd x;
                    if constexpr (std::is_same_v<T, intervention::Pooled>) {
                        x = spec.train_gammas[i % envs] * eps.tail(d);
                    } else {
                        x = eps.tail(d) + shift;
                    }
                    const auto row = static_cast<Eigen::Index>(i);
                    slice.X.row(row) = x.transpose();
                    fill_response(spec, x, eps(0), slice.y(row));
                }
                return slice;
            }
        },
        iv);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_cell(const std::string& cell, std::size_t line_no, const std::string& column) {
    const std::string text = trim(cell);
    if (!text.empty()) {
        char* end = nullptr;
        const double value = std::strtod(text.c_str(), &end);
        if (end == text.c_str() + text.size() && std::isfinite(value)) return value;
    }
    throw ParseError("line " + std::to_string(line_no) + ", column '" + column +
                     "': cannot parse '" + text + "' as a finite number");
}

}  // namespace

EnvDataset load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");

    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        header = split_csv_line(line);
        break;
    }
    if (header.empty()) throw ParseError(path.string() + ": missing header row");
    for (auto& h : header) h = trim(h);
    if (header.size() < 3 || header[0] != "env" || header[1] != "y") {
        throw ParseError(path.string() + ", line " + std::to_string(line_no) +
                         ": header must be env,y,x1,...,xd");
    }
    for (std::size_t j = 2; j < header.size(); ++j) {
        if (header[j] != "x" + std::to_string(j - 1)) {
            throw ParseError(path.string() + ", line " + std::to_string(line_no) +
                             ": expected column 'x" + std::to_string(j - 1) + "', found '" +
                             header[j] + "'");
        }
    }
    const std::size_t d = header.size() - 2;

    struct Rows {
        std::vector<double> y;
        std::vector<double> x;
    };
    std::vector<std::string> order;
    std::unordered_map<std::string, Rows> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw ParseError(path.string() + ", line " + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " fields, found " +
                             std::to_string(cells.size()));
        }
        const std::string label = trim(cells[0]);
        if (label.empty()) {
            throw ParseError(path.string() + ", line " + std::to_string(line_no) +
                             ": empty env label");
        }
        auto [it, inserted] = rows.try_emplace(label);
        if (inserted) order.push_back(label);
        it->second.y.push_back(parse_cell(cells[1], line_no, "y"));
        for (std::size_t j = 0; j < d; ++j) {
            it->second.x.push_back(parse_cell(cells[j + 2], line_no, header[j + 2]));
        }
    }
    if (order.size() < 2) {
        throw ParseError(path.string() + ": found " + std::to_string(order.size()) +
                         " environment(s), need at least 2");
    }

    std::vector<EnvSlice> envs;
    for (const auto& label : order) {
        const Rows& r = rows.at(label);
        const auto n = static_cast<Eigen::Index>(r.y.size());
        EnvSlice slice{label, Eigen::MatrixXd(n, static_cast<Eigen::Index>(d)), Eigen::VectorXd(n)};
        for (Eigen::Index i = 0; i < n; ++i) {
            slice.y(i) = r.y[static_cast<std::size_t>(i)];
            for (std::size_t j = 0; j < d; ++j) {
                slice.X(i, static_cast<Eigen::Index>(j)) = r.x[static_cast<std::size_t>(i) * d + j];
            }
        }
        envs.push_back(std::move(slice));
    }
    return EnvDataset(std::move(envs));
}

void save_csv(const EnvDataset& data, const std::filesystem::path& path,
              const std::string& comment) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    if (!comment.empty()) out << "# " << comment << '\n';
    out << "env,y";
    for (int j = 1; j <= data.dim(); ++j) out << ",x" << j;
    out << '\n';
    char buf[32];
    for (const auto& env : data.environments()) {
        for (Eigen::Index i = 0; i < env.y.size(); ++i) {
            out << env.label;
            std::snprintf(buf, sizeof buf, ",%.17g", env.y(i));
            out << buf;
            for (Eigen::Index j = 0; j < env.X.cols(); ++j) {
                std::snprintf(buf, sizeof buf, ",%.17g", env.X(i, j));
                out << buf;
            }
            out << '\n';
        }
    }
    if (!out) throw InputError("failed writing '" + path.string() + "'");
}

}  // namespace ipp
