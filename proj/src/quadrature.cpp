#include "fde/quadrature.hpp"

#include <cmath>

#include "fde/error.hpp"
#include "fde/normal.hpp"

namespace fde {

QuadratureRule gauss_legendre_unit(std::size_t order) {
    if (order == 0) throw InvalidInput("quadrature order must be positive");
    QuadratureRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const std::size_t half = (order + 1) / 2;
    const double n = static_cast<double>(order);
    for (std::size_t i = 0; i < half; ++i) {
        // Tricomi initial guess, then Newton on P_n.
        double x = std::cos(normal::kPi * (static_cast<double>(i) + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= order; ++k) {
                const double kk = static_cast<double>(k);
                const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
                p0 = p1;
                p1 = p2;
            }
            const double pn = order == 1 ? x : p1;
            const double pn1 = order == 1 ? 1.0 : p0;
            dp = n * (x * pn - pn1) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Map [-1,1] to (0,1); x is descending in i.
        rule.nodes[i] = 0.5 * (1.0 - x);
        rule.weights[i] = 0.5 * w;
        rule.nodes[order - 1 - i] = 0.5 * (1.0 + x);
        rule.weights[order - 1 - i] = 0.5 * w;
    }
    return rule;
}

const QuadratureRule& quantile_grid() {
    static const QuadratureRule rule = gauss_legendre_unit(kQuantileGridOrder);
    return rule;
}

}  // namespace fde
