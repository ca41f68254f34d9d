#include "fde/normal.hpp"

#include <cmath>

#include <boost/math/special_functions/erf.hpp>

#include "fde/error.hpp"

namespace fde::normal {

double pdf(double z) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double cdf(double z) noexcept { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double log_cdf(double z) noexcept {
    if (z > -30.0) return std::log(cdf(z));
    // Mills-ratio asymptotic series.
    const double z2 = z * z;
    const double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
    return -0.5 * z2 - std::log(-z) - 0.5 * std::log(2.0 * kPi) + std::log(series);
}

double quantile(double u) {
    if (!(u > 0.0 && u < 1.0)) throw InvalidInput("normal quantile requires u in (0,1)");
    return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * u);
}

double density(double x, double mean, double var) noexcept {
    const double d = x - mean;
    return std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * kPi * var);
}

double log_density(double x, double mean, double var) noexcept {
    const double d = x - mean;
    return -0.5 * d * d / var - 0.5 * std::log(2.0 * kPi * var);
}

}  // namespace fde::normal
