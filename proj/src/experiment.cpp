#include "ipp/experiment.hpp"

#include <cmath>
#include <cstdio>

#include "ipp/errors.hpp"
#include "ipp/parallel.hpp"
#include "ipp/rng.hpp"

namespace ipp {

std::uint64_t replication_data_seed(std::uint64_t seed, std::size_t n_per_env,
                                    std::size_t replication) {
    return mix64(mix64(seed ^ mix64(static_cast<std::uint64_t>(n_per_env))) +
                 static_cast<std::uint64_t>(replication));
}

ReplicationRun run_replication(const ScmSpec& spec, std::size_t n_per_env,
                               std::size_t replication, const ReplicationConfig& cfg) {
    ScmSpec data_spec = spec;
    data_spec.seed = replication_data_seed(cfg.seed, n_per_env, replication);
    const EnvDataset data = simulate_training(data_spec, n_per_env);
    FitConfig fit_cfg = cfg.fit;
    fit_cfg.seed = data_spec.seed;
    ReplicationRun run;
    run.n_per_env = n_per_env;
    run.replication = replication;
    run.path = fit(data, fit_cfg);
    run.choice = select_lambda(run.path, data, fit_cfg.kind, cfg.alpha);
    return run;
}

std::vector<ReplicationRun> run_replications(const ScmSpec& spec, std::size_t n_per_env,
                                             const ReplicationConfig& cfg) {
    std::vector<ReplicationRun> runs(cfg.replications);
    ReplicationConfig inner = cfg;
    inner.fit.optimizer.threads = 1;
    parallel_for(cfg.replications, cfg.threads, [&](std::size_t r) {
        runs[r] = run_replication(spec, n_per_env, r, inner);
    });
    return runs;
}

ReplicationSummary summarize_replications(const std::vector<ReplicationRun>& runs,
                                          const ModelParams& truth) {
    if (runs.size() < 2) throw InputError("need at least two replications to summarize");
    ReplicationSummary summary;
    summary.n_per_env = runs.front().n_per_env;
    summary.replications = runs.size();
    const auto& grid_points = runs.front().path.points;
    for (std::size_t li = 0; li < grid_points.size(); ++li) {
        std::vector<ModelParams> estimates;
        std::size_t count = 0;
        for (const auto& run : runs) {
            estimates.push_back(run.path.points.at(li).theta_hat);
            if (run.choice.lambda_hat == grid_points[li].lambda) ++count;
        }
        char label[32];
        std::snprintf(label, sizeof label, "%g", grid_points[li].lambda);
        summary.rows.push_back(
            {label, grid_points[li].lambda, bias_variance(estimates, truth), count});
    }
    std::vector<ModelParams> selected;
    for (const auto& run : runs) selected.push_back(run.path.at_lambda(run.choice.lambda_hat).theta_hat);
    summary.rows.push_back({"selected", std::nan(""), bias_variance(selected, truth), runs.size()});
    return summary;
}

}  // namespace ipp
