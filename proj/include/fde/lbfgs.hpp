#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace fde {

/// Value and, when `grad` is non-null, gradient at x.
using Objective = std::function<double(const std::vector<double>& x, std::vector<double>* grad)>;

struct LbfgsOptions {
    std::size_t memory = 10;
    std::size_t max_evals = 2000; ///< counts value+gradient evaluations
    double grad_tol = 1e-8;       ///< stop when the max-norm of the gradient falls below this
    /// Stop when (f_k - f_{k+1}) / max(|f_k|, |f_{k+1}|, 1) falls below this; 0 disables.
    double f_rel_tol = 0.0;
    double c1 = 1e-4;             ///< sufficient decrease
    double c2 = 0.9;              ///< curvature (strong Wolfe)
    std::size_t max_line_search = 40;
};

enum class LbfgsStatus { gradient_converged, function_converged, max_evals, line_search_stalled, non_finite_start };

struct LbfgsResult {
    std::vector<double> x;
    double f = 0.0;
    double grad_norm = 0.0;
    std::size_t evals = 0;
    std::size_t iterations = 0;
    LbfgsStatus status = LbfgsStatus::gradient_converged;
};

std::string to_string(LbfgsStatus s);

/// Limited-memory BFGS with a strong-Wolfe line search (bracketing and cubic
/// zoom). Only steps that decrease f are taken, so f(result.x) <= f(x0).
LbfgsResult lbfgs_minimize(const Objective& f, std::vector<double> x0, const LbfgsOptions& opts = {});

/// Wraps a value-only function with central differences of step h.
Objective central_difference(std::function<double(const std::vector<double>&)> value, double h = 1e-5);

}  // namespace fde
