#pragma once

namespace ipp {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrtPi = 1.77245385090551602730;
inline constexpr double kLogTwoPi = 1.83787706640934548356;
inline constexpr double kInvSqrtTwoPi = 0.39894228040143267794;

/// Standard normal density.
double normal_pdf(double z) noexcept;

/// Standard normal CDF, W. J. Cody's rational Chebyshev approximation
/// (Math. Comp. 1969), the algorithm behind R's pnorm. Absolute error is
/// below 1e-15 over the real line; the upper tail is computed without
/// cancellation so normal_cdf(-z) is accurate for large z.
double normal_cdf(double z) noexcept;

/// Standard normal quantile, Wichura's AS 241 (PPND16), relative accuracy
/// about 1e-16. Requires 0 < p < 1; returns +-infinity at the endpoints and
/// NaN outside [0, 1].
double normal_quantile(double p) noexcept;

}  // namespace ipp
