#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ipp::cli {

/// Settings shared by all subcommands; unset optionals fall back to the
/// command's defaults.
struct RunOptions {
    std::optional<std::uint64_t> seed;
    std::string score;  ///< empty = logs (fit) or the fitted score (evaluate)
    double pseudo_alpha = 2.0;
    double alpha = 0.05;
    std::string lambda_grid = "0:0.5:15";
    std::string box = "-5,5";
    int d = 5;
    std::vector<std::size_t> n;
    std::size_t replications = 50;
    unsigned threads = 0;
    std::string input;
    std::string spec;
    std::string output_dir = ".";
    std::vector<std::string> interventions;
    std::size_t n_test = 10000;
    std::optional<bool> fit_intercepts;
};

int cmd_simulate(const RunOptions& opts);
int cmd_fit(const RunOptions& opts);
int cmd_replicate(const RunOptions& opts);
int cmd_evaluate(const RunOptions& opts);

/// "start:step:stop" or a comma-separated list.
std::vector<double> parse_lambda_grid(const std::string& text);
/// Seed from the flag, else IPP_SEED, else 0.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag);

}  // namespace ipp::cli
