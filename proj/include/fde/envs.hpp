#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "fde/bellman.hpp"
#include "fde/random.hpp"

namespace fde {

using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;

struct LQREnv {
    Mat2 A, B, Q, R, K;
    double sigma0 = 1.0;
    double gamma = 0.99;

    /// A = diag(0.6, 0.8), B = diag(0.2, 0.1), Q = [[4,1],[1,4]], R = [[2,1],[1,2]], K = I, sigma0 = 1, gamma = 0.99.
    static LQREnv standard();

    /// sigma0^2 / (1 - gamma^2), the fixed variance of every model and target law.
    double return_variance() const noexcept { return sigma0 * sigma0 / (1.0 - gamma * gamma); }
    Vec2 step(const Vec2& x, const Vec2& a) const { return A * x + B * a; }
    double mean_reward(const Vec2& x, const Vec2& a) const { return x.dot(Q * x) + a.dot(R * a); }
};

/// Quadratic mean model mu(x, a) = x'M1x + a'M2x + a'M3a.
struct LQRTheta {
    Mat2 M1 = Mat2::Zero();
    Mat2 M2 = Mat2::Zero();
    Mat2 M3 = Mat2::Zero();

    static constexpr std::size_t kSize = 12;

    double mean(const Vec2& x, const Vec2& a) const { return x.dot(M1 * x) + a.dot(M2 * x) + a.dot(M3 * a); }
    /// Row-major M1, M2, M3.
    std::array<double, kSize> flatten() const;
    static LQRTheta unflatten(const double* v);
    bool finite() const { return M1.allFinite() && M2.allFinite() && M3.allFinite(); }
    double max_abs_diff(const LQRTheta& o) const;
};

/// Expected one-step backup of the model under the target a' = Kx':
/// E[r + gamma mu_theta(x', Kx')] is again quadratic with these blocks.
LQRTheta lqr_param_map(const LQREnv& env, const LQRTheta& theta);

/// Fixed point of lqr_param_map, iterated from `start` until the max-entry change
/// is <= tol. Throws NonConvergence if gamma * rho(A + BK)^2 >= 1 or max_iters runs out.
LQRTheta lqr_true_params(const LQREnv& env, double tol = 1e-12, std::size_t max_iters = 100000,
                         const LQRTheta& start = {});

struct LQRTransition {
    Vec2 s, a;
    double r;
    Vec2 sp;
};

struct LQRDataset {
    std::vector<LQRTransition> records;
    std::size_t size() const noexcept { return records.size(); }
};

struct TabularTransition {
    std::size_t s, a;
    double r;
    std::size_t sp;
};

struct TabularDataset {
    std::vector<TabularTransition> records;
    std::size_t size() const noexcept { return records.size(); }
};

/// Behaviour-policy sample from the start law: x uniform radius and angle on the
/// unit disk, a = Rot(theta_a) x with theta_a uniform on the five angles 2 pi k / 5.
void lqr_sample_start(Rng& rng, Vec2& x, Vec2& a, double max_radius = 1.0);

/// n transitions under the behaviour policy. Each record uses its own sub-stream
/// of the generator, so collection is parallel and reproducible.
LQRDataset lqr_collect(const LQREnv& env, std::size_t n, Rng& rng, double max_radius = 1.0);

struct MonteCarloEstimate {
    double mean;
    double std_error;
};

/// Mean discounted return from (x0, a0), then following a = Kx, over n_traj
/// simulated trajectories of `horizon` steps.
MonteCarloEstimate lqr_mc_return(const LQREnv& env, const Vec2& x0, const Vec2& a0, std::size_t n_traj,
                                 std::size_t horizon, Rng& rng);

/// Horizon after which the discounted tail is below tol: ceil(log(tol (1 - gamma)) / log gamma).
std::size_t rollout_horizon(double gamma, double tol);

/// Random MDP: a shared reward support of `reward_support_size` values drawn
/// uniform on [0, 1], each row Dirichlet(1) over (reward, next state) pairs.
TabularMDP tabular_make_random(std::size_t n_states, std::size_t n_actions, std::size_t reward_support_size, Rng& rng,
                               double gamma = 0.9);

/// Random episodic MDP: states only move forward and the last state absorbs
/// with reward 0, so every return law has finite support.
TabularMDP tabular_make_episodic(std::size_t n_states, std::size_t n_actions, std::size_t reward_support_size,
                                 Rng& rng, double gamma = 0.9);

/// Start law rho = uniform state x behaviour action, as a flat (s, a) weight vector.
std::vector<double> tabular_rho(const TabularMDP& mdp, const Policy& behavior);

TabularDataset tabular_collect(const TabularMDP& mdp, const Policy& behavior, std::size_t n, Rng& rng);

/// H ~ Geometric with P(H = h) = (1 - gamma) gamma^(h-1), h >= 1.
std::size_t sample_horizon(double gamma, Rng& rng);

struct StateAction {
    Vec2 x, a;
};

/// n_points draws from d_pi: start from the behaviour law, draw H, follow K for
/// H - 1 steps. Weights are uniform.
std::vector<StateAction> estimate_dpi(const LQREnv& env, std::size_t n_points, Rng& rng);

/// Empirical d_pi frequencies over the flat (s, a) index from n_points draws.
std::vector<double> estimate_dpi(const TabularMDP& mdp, const Policy& behavior, const Policy& pi,
                                 std::size_t n_points, Rng& rng);

/// Exact d_pi = (1 - gamma) rho (I - gamma P_pi)^-1 over the flat (s, a) index.
std::vector<double> exact_dpi(const TabularMDP& mdp, const std::vector<double>& rho, const Policy& pi);

void write_csv(std::ostream& os, const LQRDataset& d);
void write_csv(std::ostream& os, const TabularDataset& d);

/// FNV-1a over the raw bytes of every record; used to check that methods saw the same data.
std::uint64_t checksum(const LQRDataset& d);
std::uint64_t checksum(const TabularDataset& d);

}  // namespace fde
