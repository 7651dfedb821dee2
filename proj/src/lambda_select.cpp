#include "ipp/lambda_select.hpp"

#include <cmath>

#include "ipp/errors.hpp"
#include "ipp/special.hpp"

namespace ipp {

WelchResult welch_oneway(std::span<const Eigen::VectorXd> groups) {
    const std::size_t k = groups.size();
    if (k < 2) throw InputError("Welch test needs at least two groups");
    std::vector<double> n(k), mean(k), weight(k);
    for (std::size_t e = 0; e < k; ++e) {
        const auto& g = groups[e];
        if (g.size() < 2) {
            throw InputError("group " + std::to_string(e + 1) + " has fewer than two values");
        }
        n[e] = static_cast<double>(g.size());
        mean[e] = g.mean();
        const double var = (g.array() - mean[e]).square().sum() / (n[e] - 1.0);
        if (!(var > 0.0)) {
            throw DegenerateInputError("group " + std::to_string(e + 1) + " has zero variance");
        }
        weight[e] = n[e] / var;
    }
    double w_total = 0.0;
    double shift = 0.0;
    for (std::size_t e = 0; e < k; ++e) {
        w_total += weight[e];
        shift += weight[e] * (mean[e] - mean[0]);
    }
    // weighted grand mean, centered on the first group so equal means give
    // an exactly zero statistic
    const double grand = mean[0] + shift / w_total;
    double a = 0.0;
    double lam = 0.0;
    for (std::size_t e = 0; e < k; ++e) {
        a += weight[e] * (mean[e] - grand) * (mean[e] - grand);
        const double r = 1.0 - weight[e] / w_total;
        lam += r * r / (n[e] - 1.0);
    }
    const double kk = static_cast<double>(k);
    a /= kk - 1.0;
    const double b = 1.0 + 2.0 * (kk - 2.0) * lam / (kk * kk - 1.0);

    WelchResult out;
    out.statistic = a / b;
    out.df1 = kk - 1.0;
    out.df2 = (kk * kk - 1.0) / (3.0 * lam);
    out.p_value = f_survival(out.statistic, out.df1, out.df2);
    return out;
}

WelchResult risk_equality_pvalue(const ModelParams& params, const EnvDataset& data,
                                 const ScoreKind& kind) {
    std::vector<Eigen::VectorXd> groups;
    groups.reserve(data.num_envs());
    for (const auto& env : data.environments()) groups.push_back(slice_scores(kind, params, env));
    return welch_oneway(groups);
}

LambdaChoice select_lambda(std::vector<std::pair<double, double>> p_values, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
    if (p_values.empty()) throw InputError("no lambda values to choose from");
    LambdaChoice choice;
    choice.alpha = alpha;
    choice.p_values = std::move(p_values);
    for (const auto& [lambda, p] : choice.p_values) {
        if (p >= alpha) {
            choice.lambda_hat = lambda;
            return choice;
        }
    }
    choice.lambda_hat = choice.p_values.back().first;
    choice.fallback_used = true;
    return choice;
}

LambdaChoice select_lambda(const FitPath& path, const EnvDataset& data, const ScoreKind& kind,
                           double alpha) {
    if (path.points.empty()) throw InputError("empty fit path");
    std::vector<std::pair<double, double>> p_values;
    p_values.reserve(path.points.size());
    for (const auto& point : path.points) {
        p_values.emplace_back(point.lambda,
                              risk_equality_pvalue(point.theta_hat, data, kind).p_value);
    }
    return select_lambda(std::move(p_values), alpha);
}

}  // namespace ipp
