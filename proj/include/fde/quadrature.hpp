#pragma once

#include <cstddef>
#include <vector>

namespace fde {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre rule of the given order mapped to the open interval (0, 1).
QuadratureRule gauss_legendre_unit(std::size_t order);

/// Cached 4096-point rule used for quantile-coupling integrals.
const QuadratureRule& quantile_grid();

inline constexpr std::size_t kQuantileGridOrder = 4096;

}  // namespace fde
