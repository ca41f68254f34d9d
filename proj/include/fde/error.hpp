#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fde {

/// Precondition or contract violation on caller-supplied data.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Operation is well defined but not implemented for this representation.
class Unsupported : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Input on which the quantity is infinite or undefined (e.g. coincident points under a singular kernel).
class DegenerateInput : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class NonConvergence : public std::runtime_error {
public:
    NonConvergence(const std::string& what, double last_residual)
        : std::runtime_error(what + " (last residual " + std::to_string(last_residual) + ")"),
          residual_(last_residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class OptimizationFailure : public std::runtime_error {
public:
    OptimizationFailure(const std::string& what, std::size_t iteration)
        : std::runtime_error(what + " at iteration " + std::to_string(iteration)),
          iteration_(iteration) {}
    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

}  // namespace fde
