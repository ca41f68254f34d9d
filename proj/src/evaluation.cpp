#include "fde/evaluation.hpp"

#include <cmath>

#include "fde/error.hpp"
#include "fde/metrics.hpp"

namespace fde {

double lqr_inaccuracy(const LQRTheta& theta, const LQRTheta& theta_star, const std::vector<StateAction>& dpi,
                      double p) {
    if (dpi.empty()) throw InvalidInput("lqr_inaccuracy needs a nonempty d_pi sample");
    if (!(p >= 1.0)) throw InvalidInput("lqr_inaccuracy needs p >= 1");
    const double e = 2.0 * p;
    const double w = 1.0 / static_cast<double>(dpi.size());
    double acc = 0.0;
    for (const auto& sa : dpi) acc += w * std::pow(std::abs(theta.mean(sa.x, sa.a) - theta_star.mean(sa.x, sa.a)), e);
    return std::pow(acc, 1.0 / e);
}

double tabular_inaccuracy(const ReturnTable& u_hat, const ReturnTable& u_true, const std::vector<double>& dpi_weights,
                          double p, double q) {
    if (u_hat.n_states != u_true.n_states || u_hat.n_actions != u_true.n_actions)
        throw InvalidInput("tabular_inaccuracy: tables have different index sets");
    return metric_extension(MetricSpec::wasserstein(p), ExtensionSpec::expectation(q, dpi_weights), u_hat.entries,
                            u_true.entries);
}

}  // namespace fde
