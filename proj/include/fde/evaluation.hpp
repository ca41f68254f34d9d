#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fde/bellman.hpp"
#include "fde/envs.hpp"

namespace fde {

struct InaccuracyReport {
    std::string method;
    std::size_t n = 0;
    std::size_t rep = 0;
    std::uint64_t seed = 0;
    std::size_t T_used = 0;
    double inaccuracy = 0.0;
    double runtime_ms = 0.0;
    bool failed = false;
};

/// Expectation-extended W_p with q = p over a uniformly weighted (x, a) sample.
/// Model and truth share the return variance, so per-point W_p is |mu - mu*|.
double lqr_inaccuracy(const LQRTheta& theta, const LQRTheta& theta_star, const std::vector<StateAction>& dpi,
                      double p = 1.0);

/// metric_extension with wasserstein(p) and expectation(q, dpi_weights).
double tabular_inaccuracy(const ReturnTable& u_hat, const ReturnTable& u_true, const std::vector<double>& dpi_weights,
                          double p = 1.0, double q = 1.0);

}  // namespace fde
