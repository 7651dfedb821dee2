#include "ipp/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "ipp/errors.hpp"
#include "ipp/parallel.hpp"
#include "ipp/rng.hpp"

namespace ipp {

namespace {

constexpr double kTieTolerance = 1e-10;
// E log|Z| for Z ~ N(0, 1) is -(euler_gamma + log 2) / 2.
constexpr double kMeanLogAbsNormal = -0.6351814227307392;

// Maps the optimizer's free coordinates to the flat parameter layout.
struct Parameterization {
    int d;
    bool intercepts;

    Eigen::Index free_size() const { return intercepts ? 2 * d + 2 : 2 * d; }

    Eigen::VectorXd expand(const Eigen::VectorXd& free) const {
        if (intercepts) return free;
        Eigen::VectorXd flat = Eigen::VectorXd::Zero(2 * d + 2);
        flat.segment(1, d) = free.head(d);
        flat.segment(d + 2, d) = free.tail(d);
        return flat;
    }

    Eigen::VectorXd restrict(const Eigen::VectorXd& flat) const {
        if (intercepts) return flat;
        Eigen::VectorXd free(2 * d);
        free.head(d) = flat.segment(1, d);
        free.tail(d) = flat.segment(d + 2, d);
        return free;
    }
};

// Least-squares mean fit followed by a regression of log|residual| for the
// scale; a cheap approximation to the pooled Gaussian MLE.
Eigen::VectorXd least_squares_start(const EnvDataset& data, const Parameterization& param) {
    const Eigen::Index n = static_cast<Eigen::Index>(data.total_size());
    const int d = data.dim();
    const int offset = param.intercepts ? 1 : 0;
    Eigen::MatrixXd design(n, d + offset);
    Eigen::VectorXd y(n);
    Eigen::Index row = 0;
    for (const auto& env : data.environments()) {
        const auto m = static_cast<Eigen::Index>(env.size());
        if (offset == 1) design.block(row, 0, m, 1).setOnes();
        design.block(row, offset, m, d) = env.X;
        y.segment(row, m) = env.y;
        row += m;
    }
    const auto qr = design.colPivHouseholderQr();
    const Eigen::VectorXd mean_coef = qr.solve(y);
    const Eigen::VectorXd resid = y - design * mean_coef;
    Eigen::VectorXd log_abs =
        (resid.array().abs() + 1e-12 * (1.0 + y.cwiseAbs().maxCoeff())).log() -
        kMeanLogAbsNormal;
    const Eigen::VectorXd scale_coef = qr.solve(log_abs);

    Eigen::VectorXd flat = Eigen::VectorXd::Zero(2 * d + 2);
    if (offset == 1) {
        flat(0) = mean_coef(0);
        flat(d + 1) = scale_coef(0);
    }
    flat.segment(1, d) = mean_coef.tail(d);
    flat.segment(d + 2, d) = scale_coef.tail(d);
    if (!flat.allFinite()) flat.setZero();
    return param.restrict(flat);
}

struct Candidate {
    Eigen::VectorXd x;
    double value;
};

bool better(const Candidate& a, const Candidate& b) {
    if (a.value < b.value - kTieTolerance) return true;
    if (b.value < a.value - kTieTolerance) return false;
    return a.x.norm() < b.x.norm();
}

}  // namespace

std::vector<double> default_lambda_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 30; ++i) grid.push_back(0.5 * i);
    return grid;
}

void FitConfig::validate(std::size_t num_envs) const {
    if (!weights.empty()) {
        if (weights.size() != num_envs) {
            throw InputError("expected " + std::to_string(num_envs) + " weights, got " +
                             std::to_string(weights.size()));
        }
        double total = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0) || !std::isfinite(w)) throw InputError("weights must be nonnegative");
            total += w;
        }
        if (std::fabs(total - 1.0) > 1e-12) throw InputError("weights must sum to one");
    }
    if (lambda_grid.empty()) throw InputError("lambda grid is empty");
    if (!(lambda_grid.front() >= 0.0)) throw InputError("lambda grid must start at >= 0");
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
        if (!std::isfinite(lambda_grid[i])) throw InputError("lambda grid must be finite");
        if (i > 0 && !(lambda_grid[i] > lambda_grid[i - 1])) {
            throw InputError("lambda grid must be strictly increasing");
        }
    }
    box.validate();
    if (optimizer.uniform_starts < 0 || optimizer.nelder_mead_evaluations < 0 ||
        optimizer.polish_count < 0) {
        throw InputError("optimizer counts must be nonnegative");
    }
    if (kind.type() == ScoreType::PseudoS && !(kind.alpha() > 1.0)) {
        throw InputError("pseudospherical score requires alpha > 1");
    }
}

std::vector<double> FitConfig::resolved_weights(std::size_t num_envs) const {
    if (!weights.empty()) return weights;
    return std::vector<double>(num_envs, 1.0 / static_cast<double>(num_envs));
}

const FitPoint& FitPath::at_lambda(double lambda) const {
    for (const auto& p : points) {
        if (p.lambda == lambda) return p;
    }
    throw InputError("lambda " + std::to_string(lambda) + " is not on the fitted grid");
}

std::vector<double> env_risks(const ModelParams& params, const EnvDataset& data,
                              const ScoreKind& kind) {
    std::vector<double> out;
    out.reserve(data.num_envs());
    for (const auto& env : data.environments()) out.push_back(slice_risk(kind, params, env));
    return out;
}

double variance_penalty(std::span<const double> v) {
    if (v.size() < 2) throw InputError("variance penalty needs at least two environments");
    const double e = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / e;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    // sum_{i<j} (v_i - v_j)^2 = E * sum_i (v_i - mean)^2
    return ss / e;
}

double objective_with_gradient(const ModelParams& params, const EnvDataset& data,
                               const ScoreKind& kind, std::span<const double> weights,
                               double lambda, Eigen::VectorXd* gradient) {
    const std::size_t n_env = data.num_envs();
    if (weights.size() != n_env) throw InputError("weight count does not match environments");
    std::vector<double> risks(n_env);
    std::vector<Eigen::VectorXd> grads(gradient != nullptr ? n_env : 0);
    for (std::size_t e = 0; e < n_env; ++e) {
        risks[e] = slice_risk(kind, params, data[e], gradient != nullptr ? &grads[e] : nullptr);
    }
    double pooled = 0.0;
    for (std::size_t e = 0; e < n_env; ++e) pooled += weights[e] * risks[e];
    const double value = pooled + lambda * variance_penalty(risks);
    if (gradient != nullptr) {
        const double e_count = static_cast<double>(n_env);
        const double mean = std::accumulate(risks.begin(), risks.end(), 0.0) / e_count;
        gradient->setZero(grads[0].size());
        for (std::size_t e = 0; e < n_env; ++e) {
            *gradient += (weights[e] + lambda * 2.0 / e_count * (risks[e] - mean)) * grads[e];
        }
    }
    return value;
}

double objective(const ModelParams& params, const EnvDataset& data, const FitConfig& cfg,
                 double lambda) {
    const auto w = cfg.resolved_weights(data.num_envs());
    return objective_with_gradient(params, data, cfg.kind, w, lambda, nullptr);
}

FitPath fit(const EnvDataset& data, const FitConfig& cfg) {
    cfg.validate(data.num_envs());
    const auto weights = cfg.resolved_weights(data.num_envs());
    const Parameterization param{data.dim(), cfg.fit_intercepts};
    const auto& opt = cfg.optimizer;

    FitPath path;
    path.kind = cfg.kind;
    path.weights = weights;

    std::optional<Eigen::VectorXd> previous;
    std::optional<Eigen::VectorXd> first_solution;
    const Rng base(cfg.seed);

    for (std::size_t li = 0; li < cfg.lambda_grid.size(); ++li) {
        const double lambda = cfg.lambda_grid[li];
        auto value_and_gradient = [&](const Eigen::VectorXd& free, Eigen::VectorXd* grad) {
            const ModelParams p = ModelParams::from_flat(param.expand(free));
            try {
                Eigen::VectorXd flat_grad;
                const double v = objective_with_gradient(p, data, cfg.kind, weights, lambda,
                                                         grad != nullptr ? &flat_grad : nullptr);
                if (grad != nullptr) *grad = param.restrict(flat_grad);
                return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
            } catch (const OverflowError&) {
                return std::numeric_limits<double>::infinity();
            }
        };
        auto value_only = [&](const Eigen::VectorXd& free) {
            return value_and_gradient(free, nullptr);
        };

        std::vector<Eigen::VectorXd> starts;
        int warm_index = -1;
        if (opt.warm_start && previous) {
            warm_index = static_cast<int>(starts.size());
            starts.push_back(*previous);
        }
        starts.push_back(first_solution ? *first_solution : least_squares_start(data, param));
        Rng lambda_rng = base.substream(li);
        for (int s = 0; s < opt.uniform_starts; ++s) {
            Rng r = lambda_rng.substream(static_cast<std::uint64_t>(s));
            Eigen::VectorXd x(param.free_size());
            for (Eigen::Index j = 0; j < x.size(); ++j) x(j) = r.uniform(cfg.box.lo, cfg.box.hi);
            starts.push_back(x);
        }
        for (auto& s : starts) s = cfg.box.project(s);

        NelderMeadOptions nm;
        nm.max_evaluations = opt.nelder_mead_evaluations;
        std::vector<Candidate> local(starts.size());
        parallel_for(starts.size(), opt.threads, [&](std::size_t i) {
            if (opt.nelder_mead_evaluations == 0) {
                local[i] = {starts[i], value_only(starts[i])};
                return;
            }
            const auto r = nelder_mead(value_only, starts[i], cfg.box, nm);
            local[i] = {r.x, r.value};
        });

        std::vector<std::size_t> order(local.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return local[a].value < local[b].value;
        });
        std::vector<std::size_t> to_polish;
        for (std::size_t k = 0; k < order.size() && static_cast<int>(k) < opt.polish_count; ++k) {
            if (std::isfinite(local[order[k]].value)) to_polish.push_back(order[k]);
        }
        if (warm_index >= 0 && std::isfinite(local[warm_index].value) &&
            std::find(to_polish.begin(), to_polish.end(), static_cast<std::size_t>(warm_index)) ==
                to_polish.end()) {
            to_polish.push_back(static_cast<std::size_t>(warm_index));
        }
        parallel_for(to_polish.size(), opt.threads, [&](std::size_t k) {
            const std::size_t i = to_polish[k];
            const auto r = projected_bfgs(value_and_gradient, local[i].x, cfg.box, opt.polish);
            if (std::isfinite(r.value) && r.value <= local[i].value) local[i] = {r.x, r.value};
        });

        std::optional<std::size_t> best;
        for (std::size_t i = 0; i < local.size(); ++i) {
            if (!std::isfinite(local[i].value)) continue;
            if (!best || better(local[i], local[*best])) best = i;
        }
        if (!best) {
            throw OptimizationError("no start reached a finite objective at lambda = " +
                                    std::to_string(lambda) + " (" +
                                    std::to_string(starts.size()) + " starts)");
        }

        FitPoint point;
        point.lambda = lambda;
        point.theta_hat = ModelParams::from_flat(param.expand(local[*best].x));
        point.env_risks = env_risks(point.theta_hat, data, cfg.kind);
        point.penalty = variance_penalty(point.env_risks);
        for (std::size_t e = 0; e < weights.size(); ++e) {
            point.pooled_risk += weights[e] * point.env_risks[e];
        }
        point.objective = point.pooled_risk + lambda * point.penalty;
        for (const auto& c : local) point.restart_objectives.push_back(c.value);
        path.points.push_back(std::move(point));

        previous = local[*best].x;
        if (!first_solution) first_solution = local[*best].x;
    }
    return path;
}

MonotonicityReport penalty_monotonicity_report(const FitPath& path, double slack) {
    MonotonicityReport report;
    for (std::size_t i = 1; i < path.points.size(); ++i) {
        const auto& a = path.points[i - 1];
        const auto& b = path.points[i];
        if (b.penalty > a.penalty + slack) report.penalty_nonincreasing = false;
        if (b.pooled_risk < a.pooled_risk - slack) report.pooled_nondecreasing = false;
    }
    return report;
}

}  // namespace ipp
