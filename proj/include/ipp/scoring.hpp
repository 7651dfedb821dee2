#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace ipp {

/// A univariate normal predictive distribution.
struct GaussianPrediction {
    double mean = 0.0;
    double sd = 1.0;

    /// Throws InputError on non-finite fields and DomainError when sd <= 0.
    void validate() const;
};

enum class ScoreType { LogS, CRPS, SCRPS, QS, PseudoS, HyvS };

/// A strictly proper scoring rule, negatively oriented (smaller is better).
///
/// Conventions follow the usual table of Gaussian-closed-form scores:
///   LogS    -log g(y)
///   CRPS    E|y - eta| - E|eta - eta'| / 2
///   SCRPS   E|y - eta| / E|eta - eta'| + log(E|eta - eta'|) / 2
///   QS      -2 g(y) + int g^2
///   PseudoS -g(y)^(alpha-1) (int g^alpha)^(1/alpha - 1), alpha > 1
///   HyvS    2 g''(y)/g(y) - (g'(y)/g(y))^2
/// PseudoS is therefore negative everywhere; its minimum expected value is
/// -(int g^alpha)^(1/alpha).
class ScoreKind {
public:
    static constexpr double kDefaultPseudoAlpha = 2.0;

    constexpr ScoreKind(ScoreType type = ScoreType::LogS) : type_(type) {}  // NOLINT
    static ScoreKind pseudo(double alpha);

    ScoreType type() const noexcept { return type_; }
    double alpha() const noexcept { return alpha_; }

    /// Lowercase CLI name: logs, crps, scrps, qs, pseudos, hyvs.
    std::string name() const;
    static ScoreKind parse(std::string_view name);

    friend bool operator==(const ScoreKind&, const ScoreKind&) = default;

private:
    ScoreType type_;
    double alpha_ = kDefaultPseudoAlpha;
};

/// Location-scale representation of a Gaussian closed-form score:
///   S(N(mu, sigma^2), y) = sigma^k * q(z) + a * log(sigma),  z = (y - mu) / sigma.
/// `standard` is q(z) and `slope` is q'(z).
struct StandardizedScore {
    double standard;
    double slope;
};

/// Score value with partial derivatives in (mean, log sd).
struct ScoreDerivatives {
    double value;
    double d_mean;
    double d_log_sd;
};

/// Closed-form score of a Gaussian prediction.
double score(const ScoreKind& kind, const GaussianPrediction& pred, double y);

/// Closed-form score and its gradient in (mean, log sd); no input validation
/// beyond what `score` does.
ScoreDerivatives score_with_derivatives(const ScoreKind& kind, const GaussianPrediction& pred,
                                        double y);

/// Exponent k and log-scale coefficient a of the location-scale form.
double scale_exponent(const ScoreKind& kind) noexcept;
double log_scale_coefficient(const ScoreKind& kind) noexcept;

/// q(z) and q'(z); unchecked, for hot loops that already validated inputs.
StandardizedScore standardized_score(const ScoreKind& kind, double z) noexcept;

/// Plug-in CRPS / SCRPS from a predictive sample. E|eta - eta'| averages over
/// all distinct unordered pairs, computed exactly after sorting.
double score_samples(const ScoreKind& kind, std::span<const double> samples, double y);

/// Monte Carlo estimate of both sides of the propriety inequality with Y ~ f.
struct ProprietyResult {
    double risk_f;
    double risk_g;
    double se_diff;  ///< standard error of mean(S(g,Y) - S(f,Y))
};

ProprietyResult propriety_check(const ScoreKind& kind, const GaussianPrediction& f,
                                const GaussianPrediction& g, std::size_t n_mc,
                                std::uint64_t seed);

}  // namespace ipp
