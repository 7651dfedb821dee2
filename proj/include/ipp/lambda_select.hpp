#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ipp/dataset.hpp"
#include "ipp/estimator.hpp"
#include "ipp/model.hpp"
#include "ipp/scoring.hpp"

namespace ipp {

struct WelchResult {
    double statistic = 0.0;
    double df1 = 0.0;
    double df2 = 0.0;
    double p_value = 1.0;
};

/// Welch's heteroscedastic one-way ANOVA (the test behind R's oneway.test
/// with var.equal = FALSE). Requires at least two groups, each with n >= 2
/// (InputError) and positive sample variance (DegenerateInputError).
WelchResult welch_oneway(std::span<const Eigen::VectorXd> groups);

/// Welch test of equal mean scores across environments, using per-observation
/// scores of the model at `params`.
WelchResult risk_equality_pvalue(const ModelParams& params, const EnvDataset& data,
                                 const ScoreKind& kind);

struct LambdaChoice {
    double lambda_hat = 0.0;
    std::vector<std::pair<double, double>> p_values;  ///< (lambda, p) for every grid point
    double alpha = 0.05;
    bool fallback_used = false;
};

/// Smallest grid lambda whose fit passes the equal-risk test at level alpha
/// (p >= alpha); the largest grid lambda with fallback_used set when none
/// does. The test reuses the training data.
LambdaChoice select_lambda(const FitPath& path, const EnvDataset& data, const ScoreKind& kind,
                           double alpha);

/// Same rule applied to precomputed (lambda, p) pairs in ascending lambda.
LambdaChoice select_lambda(std::vector<std::pair<double, double>> p_values, double alpha);

}  // namespace ipp
