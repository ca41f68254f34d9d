#pragma once

namespace fde::normal {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;
inline constexpr double kPi = 3.14159265358979323846;

double pdf(double z) noexcept;
double cdf(double z) noexcept;
/// log Phi(z), accurate far into the lower tail.
double log_cdf(double z) noexcept;
/// Inverse standard-normal CDF; u must lie in (0, 1).
double quantile(double u);

/// Density of N(mean, var) at x.
double density(double x, double mean, double var) noexcept;
double log_density(double x, double mean, double var) noexcept;

}  // namespace fde::normal
