#pragma once

#include <cstddef>
#include <vector>

#include "fde/distributions.hpp"

namespace fde {

struct Outcome {
    double prob;
    double reward;
    std::size_t next;
};

/// Finite MDP with a finite list of (prob, reward, next state) outcomes per (s, a).
/// Rows are stored at index s * n_actions + a.
struct TabularMDP {
    std::size_t n_states = 0;
    std::size_t n_actions = 0;
    double gamma = 0.0;
    std::vector<std::vector<Outcome>> rows;

    /// Checked constructor: probabilities nonnegative summing to 1 within 1e-12, next states in range.
    static TabularMDP make(std::size_t n_states, std::size_t n_actions, double gamma,
                           std::vector<std::vector<Outcome>> rows);

    std::size_t index(std::size_t s, std::size_t a) const noexcept { return s * n_actions + a; }
    const std::vector<Outcome>& row(std::size_t s, std::size_t a) const noexcept { return rows[index(s, a)]; }
    double reward_min() const noexcept;
    double reward_max() const noexcept;
};

/// Stationary tabular policy; probs[s * n_actions + a] = pi(a | s).
struct Policy {
    std::size_t n_states = 0;
    std::size_t n_actions = 0;
    std::vector<double> probs;

    static Policy make(std::size_t n_states, std::size_t n_actions, std::vector<double> probs);
    static Policy uniform(std::size_t n_states, std::size_t n_actions);
    static Policy deterministic(std::size_t n_actions, const std::vector<std::size_t>& choice);

    double operator()(std::size_t s, std::size_t a) const noexcept { return probs[s * n_actions + a]; }
};

/// One atomic return law per (s, a), same indexing as TabularMDP rows.
struct ReturnTable {
    std::size_t n_states = 0;
    std::size_t n_actions = 0;
    std::vector<Atomic> entries;

    /// Point mass at `value` everywhere.
    static ReturnTable constant(std::size_t n_states, std::size_t n_actions, double value = 0.0);

    Atomic& at(std::size_t s, std::size_t a) noexcept { return entries[s * n_actions + a]; }
    const Atomic& at(std::size_t s, std::size_t a) const noexcept { return entries[s * n_actions + a]; }
    std::size_t size() const noexcept { return entries.size(); }
};

/// Psi(r, s') = sum_a' pi(a'|s') (r + gamma U(s', a')), as a single uncompacted Atomic.
Atomic bellman_backup(double r, std::size_t s_next, const ReturnTable& u, const Policy& pi, double gamma);

struct BellmanOptions {
    bool merge = true;              ///< merge atoms closer than merge_tol after the update
    double merge_tol = 1e-12;
    double grid_resolution = 0.0;   ///< > 0 projects onto a uniform grid with this spacing
    double grid_origin = 0.0;
};

/// (T^pi U)(s, a) = sum over outcomes of prob * Psi(r, s'); entries computed in parallel.
ReturnTable apply_bellman(const ReturnTable& u, const TabularMDP& mdp, const Policy& pi,
                          const BellmanOptions& opts = {});

/// Mean-preserving projection: each atom's mass is split between its two
/// neighbouring grid points. Result is merged and sorted.
Atomic project_to_grid(const Atomic& a, double origin, double resolution);

struct FixedPointOptions {
    bool project = false;
    double resolution_fraction = 1e-4; ///< grid spacing as a fraction of the return range
};

struct FixedPointResult {
    ReturnTable table;
    std::vector<double> residuals;         ///< sup-W1 between consecutive iterates
    std::vector<double> projection_errors; ///< sup-W1 moved by projection at each step (0 without projection)
    std::size_t iterations = 0;
};

/// Iterates apply_bellman from the zero table until the sup-W1 change is <= tol.
/// Throws NonConvergence after max_iters.
FixedPointResult solve_return_fixed_point(const TabularMDP& mdp, const Policy& pi, double tol, std::size_t max_iters,
                                          const FixedPointOptions& opts = {});

/// Per-(s, a) means of a table, and the scalar policy-evaluation update of a mean table.
std::vector<double> table_means(const ReturnTable& u);
std::vector<double> scalar_bellman(const std::vector<double>& q, const TabularMDP& mdp, const Policy& pi);

}  // namespace fde
