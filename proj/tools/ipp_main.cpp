#include <CLI11.hpp>
#include <exception>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "commands.hpp"
#include "ipp/errors.hpp"

namespace {

constexpr int kUsageError = 2;
constexpr int kRuntimeError = 1;

// Turns a JSON config object into "--key value" arguments, skipping keys
// whose flag already appears on the command line.
std::vector<std::string> config_arguments(const std::string& path,
                                          const std::vector<std::string>& given) {
    std::ifstream in(path);
    if (!in) throw ipp::InputError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ipp::InputError("config file '" + path + "': " + e.what());
    }
    if (!j.is_object()) throw ipp::InputError("config file must hold a JSON object");
    std::vector<std::string> args;
    auto scalar = [](const nlohmann::json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
        return v.dump();
    };
    for (const auto& [key, value] : j.items()) {
        std::string flag = "--" + key;
        for (auto& c : flag) c = c == '_' ? '-' : c;
        if (flag == "--config") continue;
        bool explicit_flag = false;
        for (const auto& g : given) {
            if (g == flag || g.rfind(flag + "=", 0) == 0) explicit_flag = true;
        }
        if (explicit_flag) continue;
        if (value.is_array()) {
            for (const auto& v : value) {
                args.push_back(flag);
                args.push_back(scalar(v));
            }
        } else {
            args.push_back(flag);
            args.push_back(scalar(value));
        }
    }
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    using ipp::cli::RunOptions;
    RunOptions opts;
    std::string config_path;

    CLI::App app{"Invariant probabilistic prediction: simulate, fit, replicate, evaluate"};
    app.require_subcommand(1);
    app.set_version_flag("--version", IPP_VERSION);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON file of option values; flags win");
        sub->add_option("--seed", opts.seed, "Random seed (falls back to IPP_SEED, then 0)");
        sub->add_option("--output-dir", opts.output_dir, "Directory for output files");
        sub->add_option("--threads", opts.threads, "Worker threads, 0 = all cores");
    };
    auto add_fit = [&](CLI::App* sub) {
        sub->add_option("--score", opts.score, "Scoring rule")
            ->check(CLI::IsMember({"logs", "crps", "scrps", "qs", "pseudos", "hyvs"}));
        sub->add_option("--pseudo-alpha", opts.pseudo_alpha, "Exponent of the pseudospherical score");
        sub->add_option("--alpha", opts.alpha, "Level of the equal-risk test");
        sub->add_option("--lambda-grid", opts.lambda_grid, "start:step:stop or comma list");
        sub->add_option("--box", opts.box, "Parameter box lo,hi");
        sub->add_option("--fit-intercepts", opts.fit_intercepts, "Estimate beta0 and gamma0");
    };

    auto* simulate = app.add_subcommand("simulate", "Simulate training environments");
    add_common(simulate);
    simulate->add_option("--d", opts.d, "Covariate dimension");
    simulate->add_option("--n", opts.n, "Observations per environment")->expected(1);

    auto* fit = app.add_subcommand("fit", "Fit the penalty path and select lambda");
    add_common(fit);
    add_fit(fit);
    fit->add_option("--input", opts.input, "Training CSV");

    auto* replicate = app.add_subcommand("replicate", "Repeated simulate + fit runs");
    add_common(replicate);
    add_fit(replicate);
    replicate->add_option("--d", opts.d, "Covariate dimension");
    replicate->add_option("--n", opts.n, "Observations per environment (repeatable)")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
        ->delimiter(',');
    replicate->add_option("--replications", opts.replications, "Replications per sample size");

    auto* evaluate = app.add_subcommand("evaluate", "Risk of a fitted path under interventions");
    add_common(evaluate);
    evaluate->add_option("--input", opts.input, "fitpath.json or the directory holding it");
    evaluate->add_option("--spec", opts.spec, "spec.json (default: next to the fit path)");
    evaluate->add_option("--score", opts.score, "Scoring rule (default: the fitted one)")
        ->check(CLI::IsMember({"logs", "crps", "scrps", "qs", "pseudos", "hyvs"}));
    evaluate->add_option("--pseudo-alpha", opts.pseudo_alpha, "Exponent of the pseudospherical score");
    evaluate->add_option("--interventions", opts.interventions,
                         "pooled, observational, low-variance, high-variance, correlation, "
                         "orthogonal-shift")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
        ->delimiter(',');
    evaluate->add_option("--n-test", opts.n_test, "Test observations per intervention");

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        std::string found;
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--config" && i + 1 < args.size()) found = args[i + 1];
            if (args[i].rfind("--config=", 0) == 0) found = args[i].substr(9);
        }
        if (!found.empty()) {
            const auto extra = config_arguments(found, args);
            // right after the subcommand name
            std::size_t pos = 0;
            while (pos < args.size() && args[pos].rfind("-", 0) == 0) ++pos;
            if (pos < args.size()) {
                args.insert(args.begin() + static_cast<long>(pos) + 1, extra.begin(), extra.end());
            }
        }
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageError;
    } catch (const ipp::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    }

    try {
        if (simulate->parsed()) return ipp::cli::cmd_simulate(opts);
        if (fit->parsed()) return ipp::cli::cmd_fit(opts);
        if (replicate->parsed()) return ipp::cli::cmd_replicate(opts);
        if (evaluate->parsed()) return ipp::cli::cmd_evaluate(opts);
    } catch (const ipp::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kUsageError;
}
