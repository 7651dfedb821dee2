#include "ipp/scoring.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <vector>

#include "ipp/errors.hpp"
#include "ipp/normal.hpp"
#include "ipp/rng.hpp"

namespace ipp {

namespace {

constexpr double kInvSqrtPi = 1.0 / kSqrtPi;

// E|z - eta| for eta ~ N(0, 1).
inline double abs_deviation(double z, double cdf, double pdf) noexcept {
    return z * (2.0 * cdf - 1.0) + 2.0 * pdf;
}

// (int phi^alpha)^(1/alpha - 1) for the standard normal density.
double pseudo_normalizer(double alpha) {
    const double integral = std::pow(2.0 * kPi, 0.5 * (1.0 - alpha)) / std::sqrt(alpha);
    return std::pow(integral, 1.0 / alpha - 1.0);
}

void require_finite(double value, const char* what) {
    if (!std::isfinite(value)) {
        throw InputError(std::string("non-finite ") + what);
    }
}

}  // namespace

void GaussianPrediction::validate() const {
    require_finite(mean, "prediction mean");
    require_finite(sd, "prediction sd");
    if (!(sd > 0.0)) {
        throw DomainError("prediction sd must be positive, got " + std::to_string(sd));
    }
}

ScoreKind ScoreKind::pseudo(double alpha) {
    if (!(alpha > 1.0) || !std::isfinite(alpha)) {
        throw DomainError("pseudospherical score requires alpha > 1, got " + std::to_string(alpha));
    }
    ScoreKind kind(ScoreType::PseudoS);
    kind.alpha_ = alpha;
    return kind;
}

std::string ScoreKind::name() const {
    switch (type_) {
        case ScoreType::LogS: return "logs";
        case ScoreType::CRPS: return "crps";
        case ScoreType::SCRPS: return "scrps";
        case ScoreType::QS: return "qs";
        case ScoreType::PseudoS: return "pseudos";
        case ScoreType::HyvS: return "hyvs";
    }
    return "unknown";
}

ScoreKind ScoreKind::parse(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "logs") return ScoreType::LogS;
    if (lower == "crps") return ScoreType::CRPS;
    if (lower == "scrps") return ScoreType::SCRPS;
    if (lower == "qs") return ScoreType::QS;
    if (lower == "pseudos") return ScoreKind::pseudo(kDefaultPseudoAlpha);
    if (lower == "hyvs") return ScoreType::HyvS;
    throw InputError("unknown score '" + std::string(name) +
                     "' (expected logs, crps, scrps, qs, pseudos or hyvs)");
}

double scale_exponent(const ScoreKind& kind) noexcept {
    switch (kind.type()) {
        case ScoreType::LogS:
        case ScoreType::SCRPS: return 0.0;
        case ScoreType::CRPS: return 1.0;
        case ScoreType::QS: return -1.0;
        case ScoreType::PseudoS: return 1.0 / kind.alpha() - 1.0;
        case ScoreType::HyvS: return -2.0;
    }
    return 0.0;
}

double log_scale_coefficient(const ScoreKind& kind) noexcept {
    switch (kind.type()) {
        case ScoreType::LogS: return 1.0;
        case ScoreType::SCRPS: return 0.5;
        default: return 0.0;
    }
}

StandardizedScore standardized_score(const ScoreKind& kind, double z) noexcept {
    switch (kind.type()) {
        case ScoreType::LogS:
            return {0.5 * kLogTwoPi + 0.5 * z * z, z};
        case ScoreType::CRPS: {
            const double cdf = normal_cdf(z);
            return {abs_deviation(z, cdf, normal_pdf(z)) - kInvSqrtPi, 2.0 * cdf - 1.0};
        }
        case ScoreType::SCRPS: {
            // E|eta - eta'| = 2 / sqrt(pi) for the standard normal
            const double cdf = normal_cdf(z);
            const double half_root_pi = 0.5 * kSqrtPi;
            return {half_root_pi * abs_deviation(z, cdf, normal_pdf(z)) +
                        0.5 * std::log(2.0 * kInvSqrtPi),
                    half_root_pi * (2.0 * cdf - 1.0)};
        }
        case ScoreType::QS: {
            const double pdf = normal_pdf(z);
            return {-2.0 * pdf + 0.5 * kInvSqrtPi, 2.0 * z * pdf};
        }
        case ScoreType::PseudoS: {
            const double alpha = kind.alpha();
            const double c = pseudo_normalizer(alpha);
            const double pdf_pow = std::pow(normal_pdf(z), alpha - 1.0);
            return {-c * pdf_pow, c * (alpha - 1.0) * z * pdf_pow};
        }
        case ScoreType::HyvS:
            return {z * z - 2.0, 2.0 * z};
    }
    return {0.0, 0.0};
}

ScoreDerivatives score_with_derivatives(const ScoreKind& kind, const GaussianPrediction& pred,
                                        double y) {
    pred.validate();
    require_finite(y, "observation");
    const double z = (y - pred.mean) / pred.sd;
    const double k = scale_exponent(kind);
    const double a = log_scale_coefficient(kind);
    const auto [q, dq] = standardized_score(kind, z);
    const double scale = k == 0.0 ? 1.0 : std::pow(pred.sd, k);
    const double log_sd = std::log(pred.sd);
    return {scale * q + a * log_sd, -scale * dq / pred.sd, scale * (k * q - z * dq) + a};
}

double score(const ScoreKind& kind, const GaussianPrediction& pred, double y) {
    return score_with_derivatives(kind, pred, y).value;
}

double score_samples(const ScoreKind& kind, std::span<const double> samples, double y) {
    if (kind.type() != ScoreType::CRPS && kind.type() != ScoreType::SCRPS) {
        throw InputError("score_samples supports only crps and scrps, got " + kind.name());
    }
    if (samples.size() < 2) {
        throw InputError("score_samples needs at least 2 samples, got " +
                         std::to_string(samples.size()));
    }
    require_finite(y, "observation");

    std::vector<double> sorted(samples.begin(), samples.end());
    for (double v : sorted) require_finite(v, "sample");
    std::sort(sorted.begin(), sorted.end());

    const auto n = static_cast<double>(sorted.size());
    double abs_to_obs = 0.0;
    double weighted = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        abs_to_obs += std::fabs(y - sorted[i]);
        // sum_{i<j} (x_(j) - x_(i)) = sum_j x_(j) (2j - n + 1)
        weighted += sorted[i] * (2.0 * static_cast<double>(i) - n + 1.0);
    }
    const double mean_abs = abs_to_obs / n;
    const double mean_pair = 2.0 * weighted / (n * (n - 1.0));

    if (kind.type() == ScoreType::CRPS) {
        return mean_abs - 0.5 * mean_pair;
    }
    if (!(mean_pair > 0.0)) {
        throw InputError("scrps undefined for a degenerate sample (E|eta - eta'| = 0)");
    }
    return mean_abs / mean_pair + 0.5 * std::log(mean_pair);
}

ProprietyResult propriety_check(const ScoreKind& kind, const GaussianPrediction& f,
                                const GaussianPrediction& g, std::size_t n_mc,
                                std::uint64_t seed) {
    if (n_mc < 10000) {
        throw InputError("propriety_check needs n_mc >= 1e4, got " + std::to_string(n_mc));
    }
    f.validate();
    g.validate();
    Rng rng(seed);
    double sum_f = 0.0;
    double sum_g = 0.0;
    // Welford on the paired difference
    double mean_diff = 0.0;
    double m2_diff = 0.0;
    for (std::size_t i = 0; i < n_mc; ++i) {
        const double y = f.mean + f.sd * rng.normal();
        const double sf = score(kind, f, y);
        const double sg = score(kind, g, y);
        sum_f += sf;
        sum_g += sg;
        const double diff = sg - sf;
        const double delta = diff - mean_diff;
        mean_diff += delta / static_cast<double>(i + 1);
        m2_diff += delta * (diff - mean_diff);
    }
    const auto n = static_cast<double>(n_mc);
    return {sum_f / n, sum_g / n, std::sqrt(m2_diff / (n - 1.0) / n)};
}

}  // namespace ipp
