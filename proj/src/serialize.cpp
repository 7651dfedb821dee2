#include "ipp/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>

#include "ipp/errors.hpp"

namespace ipp {

namespace {

Json vector_json(const Eigen::VectorXd& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Eigen::VectorXd vector_from(const Json& j) {
    if (!j.is_array()) throw ParseError("expected a numeric array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    return v;
}

Json matrix_json(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vector_json(m.row(i).transpose()));
    return rows;
}

Eigen::MatrixXd matrix_from(const Json& j) {
    if (!j.is_array() || j.empty()) throw ParseError("expected a non-empty matrix");
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (static_cast<Eigen::Index>(j[i].size()) != cols) throw ParseError("ragged matrix");
        m.row(static_cast<Eigen::Index>(i)) = vector_from(j[i]).transpose();
    }
    return m;
}

// Shortest representation that round-trips.
std::string num(double v) {
    char buf[32];
    for (int precision = 15; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

}  // namespace

Json to_json(const ModelParams& params) {
    return {{"beta0", params.beta0},
            {"beta", vector_json(params.beta)},
            {"gamma0", params.gamma0},
            {"gamma", vector_json(params.gamma)}};
}

ModelParams params_from_json(const Json& j) {
    try {
        ModelParams p{j.at("beta0").get<double>(), vector_from(j.at("beta")),
                      j.at("gamma0").get<double>(), vector_from(j.at("gamma"))};
        p.validate();
        return p;
    } catch (const Json::exception& e) {
        throw ParseError(std::string("malformed parameters: ") + e.what());
    }
}

Json to_json(const ScmSpec& spec) {
    Json gammas = Json::array();
    for (const auto& g : spec.train_gammas) gammas.push_back(matrix_json(g));
    return {{"d", spec.d},
            {"seed", spec.seed},
            {"sigma", matrix_json(spec.sigma)},
            {"beta", vector_json(spec.beta)},
            {"gamma", vector_json(spec.gamma)},
            {"train_gammas", gammas},
            {"mixing_alphas", spec.mixing_alphas}};
}

ScmSpec spec_from_json(const Json& j) {
    try {
        ScmSpec spec;
        spec.d = j.at("d").get<int>();
        spec.seed = j.at("seed").get<std::uint64_t>();
        spec.sigma = matrix_from(j.at("sigma"));
        spec.beta = vector_from(j.at("beta"));
        spec.gamma = vector_from(j.at("gamma"));
        for (const auto& g : j.at("train_gammas")) spec.train_gammas.push_back(matrix_from(g));
        if (j.contains("mixing_alphas")) {
            spec.mixing_alphas = j.at("mixing_alphas").get<std::vector<double>>();
        }
        spec.validate();
        return spec;
    } catch (const Json::exception& e) {
        throw ParseError(std::string("malformed structural model: ") + e.what());
    }
}

Json to_json(const FitPath& path) {
    Json points = Json::array();
    for (const auto& p : path.points) {
        points.push_back({{"lambda", p.lambda},
                          {"theta_hat", to_json(p.theta_hat)},
                          {"env_risks", p.env_risks},
                          {"penalty", p.penalty},
                          {"objective", p.objective},
                          {"pooled_risk", p.pooled_risk},
                          {"restart_objectives", p.restart_objectives}});
    }
    Json score = {{"name", path.kind.name()}};
    if (path.kind.type() == ScoreType::PseudoS) score["alpha"] = path.kind.alpha();
    return {{"score", score}, {"weights", path.weights}, {"points", points}};
}

FitPath fitpath_from_json(const Json& j) {
    try {
        FitPath path;
        const auto& score = j.at("score");
        path.kind = ScoreKind::parse(score.at("name").get<std::string>());
        if (score.contains("alpha")) path.kind = ScoreKind::pseudo(score.at("alpha").get<double>());
        path.weights = j.at("weights").get<std::vector<double>>();
        for (const auto& p : j.at("points")) {
            FitPoint point;
            point.lambda = p.at("lambda").get<double>();
            point.theta_hat = params_from_json(p.at("theta_hat"));
            point.env_risks = p.at("env_risks").get<std::vector<double>>();
            point.penalty = p.at("penalty").get<double>();
            point.objective = p.at("objective").get<double>();
            point.pooled_risk = p.at("pooled_risk").get<double>();
            if (p.contains("restart_objectives")) {
                for (const auto& v : p.at("restart_objectives")) {
                    point.restart_objectives.push_back(
                        v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>());
                }
            }
            path.points.push_back(std::move(point));
        }
        if (path.points.empty()) throw ParseError("fit path has no points");
        return path;
    } catch (const Json::exception& e) {
        throw ParseError(std::string("malformed fit path: ") + e.what());
    }
}

Json to_json(const LambdaChoice& choice) {
    Json table = Json::array();
    for (const auto& [lambda, p] : choice.p_values) table.push_back({{"lambda", lambda}, {"p_value", p}});
    return {{"lambda_hat", choice.lambda_hat},
            {"alpha", choice.alpha},
            {"fallback_used", choice.fallback_used},
            {"p_values", table}};
}

Json make_metadata(std::uint64_t seed, const Json& config) {
    return {{"version", IPP_VERSION}, {"seed", seed}, {"config", config}};
}

void write_json(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw InputError("failed writing " + path.string());
}

Json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_csv_metadata(std::ostream& out, const Json& metadata) {
    out << "# " << metadata.dump() << '\n';
}

void write_fitpath_csv(std::ostream& out, const FitPath& path) {
    out << "lambda,field,value\n";
    for (const auto& p : path.points) {
        const std::string lam = num(p.lambda);
        auto row = [&](const std::string& field, double v) {
            out << lam << ',' << field << ',' << num(v) << '\n';
        };
        row("beta0", p.theta_hat.beta0);
        for (Eigen::Index i = 0; i < p.theta_hat.beta.size(); ++i) {
            row("beta" + std::to_string(i + 1), p.theta_hat.beta(i));
        }
        row("gamma0", p.theta_hat.gamma0);
        for (Eigen::Index i = 0; i < p.theta_hat.gamma.size(); ++i) {
            row("gamma" + std::to_string(i + 1), p.theta_hat.gamma(i));
        }
        for (std::size_t e = 0; e < p.env_risks.size(); ++e) {
            row("risk_env" + std::to_string(e + 1), p.env_risks[e]);
        }
        row("penalty", p.penalty);
        row("objective", p.objective);
        row("pooled_risk", p.pooled_risk);
    }
}

void write_replication_csv(std::ostream& out, std::span<const ReplicationSummary> summaries) {
    out << "n,lambda,block,mse,sq_bias,variance,selected_count\n";
    for (const auto& s : summaries) {
        for (const auto& row : s.rows) {
            auto block = [&](const char* name, const ErrorDecomposition& e) {
                out << s.n_per_env << ',' << row.label << ',' << name << ',' << num(e.mse) << ','
                    << num(e.sq_bias) << ',' << num(e.variance) << ',' << row.selected_count
                    << '\n';
            };
            block("beta", row.errors.beta);
            block("gamma", row.errors.gamma);
        }
    }
}

void write_risk_table_csv(std::ostream& out, std::span<const InterventionRisk> table) {
    out << "lambda,intervention,metric,value\n";
    for (const auto& r : table) {
        out << num(r.lambda) << ',' << r.intervention << ",mean_score," << num(r.mean) << '\n';
        out << num(r.lambda) << ',' << r.intervention << ",se," << num(r.se) << '\n';
    }
}

}  // namespace ipp
