#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ipp/envdata.hpp"
#include "ipp/errors.hpp"
#include "ipp/estimator.hpp"
#include "ipp/evaluate.hpp"
#include "ipp/experiment.hpp"
#include "ipp/lambda_select.hpp"
#include "ipp/serialize.hpp"

namespace fs = std::filesystem;

namespace ipp::cli {

namespace {

ScoreKind resolve_score(const RunOptions& opts) {
    ScoreKind kind = ScoreKind::parse(opts.score.empty() ? "logs" : opts.score);
    if (kind.type() == ScoreType::PseudoS) kind = ScoreKind::pseudo(opts.pseudo_alpha);
    return kind;
}

Box parse_box(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw InputError("--box expects lo,hi, got '" + text + "'");
    try {
        std::size_t used = 0;
        const std::string lo_text = text.substr(0, comma);
        const std::string hi_text = text.substr(comma + 1);
        Box box{std::stod(lo_text, &used), 0.0};
        if (used != lo_text.size()) throw std::invalid_argument(lo_text);
        box.hi = std::stod(hi_text, &used);
        if (used != hi_text.size()) throw std::invalid_argument(hi_text);
        box.validate();
        return box;
    } catch (const std::logic_error&) {
        throw InputError("--box expects two numbers lo,hi, got '" + text + "'");
    }
}

FitConfig make_fit_config(const RunOptions& opts, std::uint64_t seed, bool intercepts_default) {
    FitConfig cfg;
    cfg.kind = resolve_score(opts);
    cfg.lambda_grid = parse_lambda_grid(opts.lambda_grid);
    cfg.box = parse_box(opts.box);
    cfg.seed = seed;
    cfg.optimizer.threads = opts.threads;
    cfg.fit_intercepts = opts.fit_intercepts.value_or(intercepts_default);
    return cfg;
}

Json fit_config_json(const FitConfig& cfg) {
    Json score = {{"name", cfg.kind.name()}};
    if (cfg.kind.type() == ScoreType::PseudoS) score["alpha"] = cfg.kind.alpha();
    return {{"score", score},
            {"lambda_grid", cfg.lambda_grid},
            {"box", {cfg.box.lo, cfg.box.hi}},
            {"fit_intercepts", cfg.fit_intercepts},
            {"optimizer",
             {{"uniform_starts", cfg.optimizer.uniform_starts},
              {"nelder_mead_evaluations", cfg.optimizer.nelder_mead_evaluations},
              {"polish_count", cfg.optimizer.polish_count},
              {"warm_start", cfg.optimizer.warm_start}}}};
}

fs::path prepare_output_dir(const RunOptions& opts) {
    const fs::path dir(opts.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError("cannot create output directory '" + dir.string() + "': " + ec.message());
    return dir;
}

void require_file(const fs::path& path, const char* what) {
    if (!fs::is_regular_file(path)) {
        throw InputError(std::string(what) + " '" + path.string() + "' does not exist");
    }
}

template <typename Writer>
void write_text(const fs::path& path, Writer&& writer) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    writer(out);
    if (!out) throw InputError("failed writing '" + path.string() + "'");
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace

std::vector<double> parse_lambda_grid(const std::string& text) {
    auto number = [&](const std::string& s) {
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
            return v;
        } catch (const std::logic_error&) {
            throw InputError("cannot parse '" + s + "' in --lambda-grid '" + text + "'");
        }
    };
    std::vector<double> grid;
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream in(text);
        for (std::string p; std::getline(in, p, ':');) parts.push_back(p);
        if (parts.size() != 3) throw InputError("--lambda-grid range must be start:step:stop");
        const double start = number(parts[0]);
        const double step = number(parts[1]);
        const double stop = number(parts[2]);
        if (!(step > 0.0) || stop < start) throw InputError("--lambda-grid needs step > 0, stop >= start");
        const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
        for (long i = 0; i <= count; ++i) grid.push_back(start + static_cast<double>(i) * step);
    } else {
        std::stringstream in(text);
        for (std::string p; std::getline(in, p, ',');) grid.push_back(number(p));
    }
    if (grid.empty()) throw InputError("--lambda-grid is empty");
    return grid;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("IPP_SEED"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (*end != '\0') throw InputError(std::string("IPP_SEED is not an integer: ") + env);
        return v;
    }
    return 0;
}

int cmd_simulate(const RunOptions& opts) {
    const std::uint64_t seed = resolve_seed(opts.seed);
    if (opts.d < 1) throw InputError("--d must be at least 1");
    if (opts.n.size() > 1) throw InputError("simulate takes a single --n");
    const std::size_t n = opts.n.empty() ? 1000 : opts.n.front();
    const fs::path dir = prepare_output_dir(opts);

    const ScmSpec spec = make_default_spec(opts.d, seed);
    const EnvDataset data = simulate_training(spec, n);
    const Json meta = make_metadata(seed, {{"command", "simulate"}, {"d", opts.d}, {"n", n}});

    std::ostringstream comment;
    comment << meta.dump();
    save_csv(data, dir / "train.csv", comment.str());
    write_json(dir / "spec.json", {{"metadata", meta}, {"spec", to_json(spec)}});
    std::cout << "wrote " << data.num_envs() << " environments x " << n << " rows to "
              << (dir / "train.csv").string() << '\n';
    return 0;
}

int cmd_fit(const RunOptions& opts) {
    const std::uint64_t seed = resolve_seed(opts.seed);
    if (opts.input.empty()) throw InputError("fit requires --input <train.csv>");
    require_file(opts.input, "input file");
    const FitConfig cfg = make_fit_config(opts, seed, true);
    if (!(opts.alpha > 0.0 && opts.alpha < 1.0)) throw InputError("--alpha must lie in (0, 1)");
    const fs::path dir = prepare_output_dir(opts);

    const EnvDataset data = load_csv(opts.input);
    const FitPath path = fit(data, cfg);
    const LambdaChoice choice = select_lambda(path, data, cfg.kind, opts.alpha);

    Json config = fit_config_json(cfg);
    config["command"] = "fit";
    config["input"] = opts.input;
    config["alpha"] = opts.alpha;
    const Json meta = make_metadata(seed, config);
    write_json(dir / "fitpath.json", {{"metadata", meta}, {"path", to_json(path)}});
    write_json(dir / "lambda_choice.json", {{"metadata", meta}, {"choice", to_json(choice)}});
    write_text(dir / "fitpath.csv", [&](std::ostream& out) {
        write_csv_metadata(out, meta);
        write_fitpath_csv(out, path);
    });
    write_text(dir / "lambda_pvalues.csv", [&](std::ostream& out) {
        write_csv_metadata(out, meta);
        out << "lambda,p_value\n";
        for (const auto& [lambda, p] : choice.p_values) out << fmt(lambda) << ',' << p << '\n';
    });

    std::cout << "lambda      p-value\n";
    for (const auto& [lambda, p] : choice.p_values) {
        std::printf("%-10s  %.4g%s\n", fmt(lambda).c_str(), p,
                    lambda == choice.lambda_hat ? "  <- selected" : "");
    }
    std::cout << "lambda_hat = " << fmt(choice.lambda_hat)
              << (choice.fallback_used ? " (no grid value passed; largest used)" : "") << '\n';
    return 0;
}

int cmd_replicate(const RunOptions& opts) {
    const std::uint64_t seed = resolve_seed(opts.seed);
    if (opts.d < 1) throw InputError("--d must be at least 1");
    if (opts.replications < 2) throw InputError("--replications must be at least 2");
    if (!(opts.alpha > 0.0 && opts.alpha < 1.0)) throw InputError("--alpha must lie in (0, 1)");
    ReplicationConfig cfg;
    cfg.d = opts.d;
    if (!opts.n.empty()) cfg.sample_sizes = opts.n;
    for (auto n : cfg.sample_sizes) {
        if (n < 2) throw InputError("--n values must be at least 2");
    }
    cfg.replications = opts.replications;
    cfg.alpha = opts.alpha;
    cfg.seed = seed;
    cfg.threads = opts.threads;
    cfg.fit = make_fit_config(opts, seed, false);
    const fs::path dir = prepare_output_dir(opts);

    const ScmSpec spec = make_default_spec(cfg.d, seed);
    std::vector<ReplicationSummary> summaries;
    Json choices = Json::array();
    for (const std::size_t n : cfg.sample_sizes) {
        const auto runs = run_replications(spec, n, cfg);
        summaries.push_back(summarize_replications(runs, spec.truth()));
        for (const auto& run : runs) {
            choices.push_back({{"n", n},
                               {"replication", run.replication},
                               {"lambda_hat", run.choice.lambda_hat},
                               {"fallback_used", run.choice.fallback_used}});
        }
        std::cerr << "n = " << n << ": " << runs.size() << " replications done\n";
    }

    Json config = fit_config_json(cfg.fit);
    config["command"] = "replicate";
    config["d"] = cfg.d;
    config["sample_sizes"] = cfg.sample_sizes;
    config["replications"] = cfg.replications;
    config["alpha"] = cfg.alpha;
    const Json meta = make_metadata(seed, config);
    write_text(dir / "replication_summary.csv", [&](std::ostream& out) {
        write_csv_metadata(out, meta);
        write_replication_csv(out, summaries);
    });
    write_json(dir / "replication_choices.json",
               {{"metadata", meta}, {"spec", to_json(spec)}, {"choices", choices}});
    std::cout << "wrote " << (dir / "replication_summary.csv").string() << '\n';
    return 0;
}

int cmd_evaluate(const RunOptions& opts) {
    const std::uint64_t seed = resolve_seed(opts.seed);
    if (opts.input.empty()) throw InputError("evaluate requires --input <fitpath.json or directory>");
    fs::path fit_file(opts.input);
    if (fs::is_directory(fit_file)) fit_file /= "fitpath.json";
    require_file(fit_file, "fit path");
    const fs::path spec_file =
        opts.spec.empty() ? fit_file.parent_path() / "spec.json" : fs::path(opts.spec);
    require_file(spec_file, "structural model");
    if (opts.n_test < 2) throw InputError("--n-test must be at least 2");

    const Json fit_json = read_json(fit_file);
    const FitPath path = fitpath_from_json(fit_json.contains("path") ? fit_json["path"] : fit_json);
    const Json spec_json = read_json(spec_file);
    const ScmSpec spec = spec_from_json(spec_json.contains("spec") ? spec_json["spec"] : spec_json);
    if (path.points.front().theta_hat.dim() != spec.d) {
        throw InputError("fit path dimension does not match the structural model");
    }

    std::vector<InterventionSpec> interventions;
    std::vector<std::string> names = opts.interventions;
    if (names.empty()) {
        names = {"pooled", "low-variance", "high-variance", "correlation", "orthogonal-shift"};
    }
    for (const auto& name : names) interventions.push_back(parse_intervention(name, spec, seed));
    const ScoreKind kind = opts.score.empty() ? path.kind : resolve_score(opts);
    const fs::path dir = prepare_output_dir(opts);

    auto table = intervention_risk_table(path, spec, interventions, opts.n_test, kind, seed);
    for (std::size_t i = 0; i < table.size(); ++i) table[i].intervention = names[i / path.points.size()];

    const Json meta = make_metadata(
        seed, {{"command", "evaluate"},
               {"input", fit_file.string()},
               {"spec", spec_file.string()},
               {"score", kind.name()},
               {"interventions", names},
               {"n_test", opts.n_test}});
    write_text(dir / "risk_table.csv", [&](std::ostream& out) {
        write_csv_metadata(out, meta);
        write_risk_table_csv(out, table);
    });
    std::cout << "wrote " << table.size() << " rows to " << (dir / "risk_table.csv").string()
              << '\n';
    return 0;
}

}  // namespace ipp::cli
