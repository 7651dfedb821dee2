#pragma once

#include <cstdint>
#include <vector>

#include "ipp/envdata.hpp"
#include "ipp/estimator.hpp"
#include "ipp/evaluate.hpp"
#include "ipp/lambda_select.hpp"

namespace ipp {

struct ReplicationConfig {
    int d = 5;
    std::vector<std::size_t> sample_sizes{100, 150, 200, 250, 500, 1000};
    std::size_t replications = 50;
    double alpha = 0.05;
    /// Seed of the structural model; every replication reuses that model and
    /// draws fresh training data.
    std::uint64_t seed = 0;
    unsigned threads = 1;  ///< 0 = all cores
    /// Fit settings; the simulation model has no intercepts, so the default
    /// harness holds them at zero.
    FitConfig fit = [] {
        FitConfig f;
        f.fit_intercepts = false;
        return f;
    }();
};

struct ReplicationRun {
    std::size_t n_per_env = 0;
    std::size_t replication = 0;
    FitPath path;
    LambdaChoice choice;
};

/// Structural model seed for (n, replication); distinct for every pair.
std::uint64_t replication_data_seed(std::uint64_t seed, std::size_t n_per_env,
                                    std::size_t replication);

/// Simulates one training set from `spec` (reseeded per replication), fits
/// the lambda path and selects lambda.
ReplicationRun run_replication(const ScmSpec& spec, std::size_t n_per_env,
                               std::size_t replication, const ReplicationConfig& cfg);

/// All replications for one sample size, in replication order.
std::vector<ReplicationRun> run_replications(const ScmSpec& spec, std::size_t n_per_env,
                                             const ReplicationConfig& cfg);

/// One row per grid lambda plus a final "selected" row for the
/// data-driven lambda, with selection counts on the grid rows.
ReplicationSummary summarize_replications(const std::vector<ReplicationRun>& runs,
                                          const ModelParams& truth);

}  // namespace ipp
