#include "fde/bellman.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "fde/error.hpp"
#include "fde/metrics.hpp"

namespace fde {

TabularMDP TabularMDP::make(std::size_t n_states, std::size_t n_actions, double gamma,
                            std::vector<std::vector<Outcome>> rows) {
    if (n_states == 0 || n_actions == 0) throw InvalidInput("TabularMDP needs at least one state and action");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidInput("TabularMDP gamma must lie in [0,1)");
    if (rows.size() != n_states * n_actions) throw InvalidInput("TabularMDP needs one row per (s,a)");
    for (const auto& row : rows) {
        if (row.empty()) throw InvalidInput("TabularMDP row has no outcomes");
        double total = 0.0;
        for (const auto& o : row) {
            if (!(o.prob >= 0.0)) throw InvalidInput("TabularMDP probabilities must be nonnegative");
            if (o.next >= n_states) throw InvalidInput("TabularMDP next state out of range");
            if (!std::isfinite(o.reward)) throw InvalidInput("TabularMDP reward must be finite");
            total += o.prob;
        }
        if (std::abs(total - 1.0) > 1e-12) throw InvalidInput("TabularMDP row probabilities must sum to 1");
    }
    return {n_states, n_actions, gamma, std::move(rows)};
}

double TabularMDP::reward_min() const noexcept {
    double m = rows.front().front().reward;
    for (const auto& row : rows)
        for (const auto& o : row) m = std::min(m, o.reward);
    return m;
}

double TabularMDP::reward_max() const noexcept {
    double m = rows.front().front().reward;
    for (const auto& row : rows)
        for (const auto& o : row) m = std::max(m, o.reward);
    return m;
}

Policy Policy::make(std::size_t n_states, std::size_t n_actions, std::vector<double> probs) {
    if (probs.size() != n_states * n_actions) throw InvalidInput("Policy table has the wrong size");
    for (std::size_t s = 0; s < n_states; ++s) {
        double total = 0.0;
        for (std::size_t a = 0; a < n_actions; ++a) {
            const double p = probs[s * n_actions + a];
            if (!(p >= 0.0)) throw InvalidInput("Policy probabilities must be nonnegative");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-12) throw InvalidInput("Policy rows must sum to 1");
    }
    return {n_states, n_actions, std::move(probs)};
}

Policy Policy::uniform(std::size_t n_states, std::size_t n_actions) {
    return make(n_states, n_actions,
                std::vector<double>(n_states * n_actions, 1.0 / static_cast<double>(n_actions)));
}

Policy Policy::deterministic(std::size_t n_actions, const std::vector<std::size_t>& choice) {
    std::vector<double> probs(choice.size() * n_actions, 0.0);
    for (std::size_t s = 0; s < choice.size(); ++s) {
        if (choice[s] >= n_actions) throw InvalidInput("Policy action out of range");
        probs[s * n_actions + choice[s]] = 1.0;
    }
    return make(choice.size(), n_actions, std::move(probs));
}

ReturnTable ReturnTable::constant(std::size_t n_states, std::size_t n_actions, double value) {
    return {n_states, n_actions, std::vector<Atomic>(n_states * n_actions, Atomic::point_mass(value))};
}

Atomic bellman_backup(double r, std::size_t s_next, const ReturnTable& u, const Policy& pi, double gamma) {
    if (s_next >= u.n_states) throw InvalidInput("bellman_backup: next state out of range");
    Atomic out{1, {}, {}};
    for (std::size_t a = 0; a < u.n_actions; ++a) {
        const double w = pi(s_next, a);
        if (w == 0.0) continue;
        const Atomic& next = u.at(s_next, a);
        for (std::size_t i = 0; i < next.size(); ++i) {
            out.locations.push_back(r + gamma * next.locations[i]);
            out.masses.push_back(w * next.masses[i]);
        }
    }
    return out;
}

Atomic project_to_grid(const Atomic& a, double origin, double resolution) {
    if (!(resolution > 0.0)) throw InvalidInput("grid resolution must be > 0");
    std::map<long long, double> mass;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double t = (a.locations[i] - origin) / resolution;
        const double k = std::floor(t);
        const double frac = t - k;
        const auto ki = static_cast<long long>(k);
        mass[ki] += (1.0 - frac) * a.masses[i];
        if (frac > 0.0) mass[ki + 1] += frac * a.masses[i];
    }
    Atomic out{1, {}, {}};
    for (auto [k, m] : mass) {
        if (m == 0.0) continue;
        out.locations.push_back(origin + static_cast<double>(k) * resolution);
        out.masses.push_back(m);
    }
    return out;
}

ReturnTable apply_bellman(const ReturnTable& u, const TabularMDP& mdp, const Policy& pi, const BellmanOptions& opts) {
    if (u.n_states != mdp.n_states || u.n_actions != mdp.n_actions || pi.n_states != mdp.n_states ||
        pi.n_actions != mdp.n_actions)
        throw InvalidInput("apply_bellman: table, MDP and policy disagree on the index set");
    ReturnTable out{u.n_states, u.n_actions, std::vector<Atomic>(u.size())};
    const auto n = static_cast<std::ptrdiff_t>(u.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t idx = 0; idx < n; ++idx) {
        const auto& row = mdp.rows[static_cast<std::size_t>(idx)];
        Atomic acc{1, {}, {}};
        for (const auto& o : row) {
            if (o.prob == 0.0) continue;
            const Atomic b = bellman_backup(o.reward, o.next, u, pi, mdp.gamma);
            acc.locations.insert(acc.locations.end(), b.locations.begin(), b.locations.end());
            for (double m : b.masses) acc.masses.push_back(o.prob * m);
        }
        if (opts.grid_resolution > 0.0)
            acc = project_to_grid(acc, opts.grid_origin, opts.grid_resolution);
        else if (opts.merge)
            acc = merge_atoms(std::move(acc), opts.merge_tol);
        out.entries[static_cast<std::size_t>(idx)] = std::move(acc);
    }
    return out;
}

FixedPointResult solve_return_fixed_point(const TabularMDP& mdp, const Policy& pi, double tol, std::size_t max_iters,
                                          const FixedPointOptions& opts) {
    if (!(tol > 0.0)) throw InvalidInput("solve_return_fixed_point requires tol > 0");
    const double scale = 1.0 / (1.0 - mdp.gamma);
    const double lo = std::min(0.0, mdp.reward_min()) * scale;
    const double hi = std::max(0.0, mdp.reward_max()) * scale;
    const double range = hi > lo ? hi - lo : 1.0;

    BellmanOptions exact;
    const MetricSpec w1 = MetricSpec::wasserstein(1.0);
    const ExtensionSpec sup = ExtensionSpec::supremum();

    FixedPointResult res;
    res.table = ReturnTable::constant(mdp.n_states, mdp.n_actions, 0.0);
    for (std::size_t k = 1; k <= max_iters; ++k) {
        ReturnTable next = apply_bellman(res.table, mdp, pi, exact);
        double proj_err = 0.0;
        if (opts.project) {
            ReturnTable projected = next;
            for (auto& e : projected.entries) e = project_to_grid(e, lo, opts.resolution_fraction * range);
            proj_err = metric_extension(w1, sup, next.entries, projected.entries);
            next = std::move(projected);
        }
        const double r = metric_extension(w1, sup, next.entries, res.table.entries);
        res.residuals.push_back(r);
        res.projection_errors.push_back(proj_err);
        res.table = std::move(next);
        res.iterations = k;
        if (r <= tol) return res;
    }
    throw NonConvergence("solve_return_fixed_point did not reach tolerance",
                         res.residuals.empty() ? 0.0 : res.residuals.back());
}

std::vector<double> table_means(const ReturnTable& u) {
    std::vector<double> m(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) m[i] = mean(Distribution{u.entries[i]});
    return m;
}

std::vector<double> scalar_bellman(const std::vector<double>& q, const TabularMDP& mdp, const Policy& pi) {
    std::vector<double> out(q.size(), 0.0);
    for (std::size_t s = 0; s < mdp.n_states; ++s)
        for (std::size_t a = 0; a < mdp.n_actions; ++a) {
            double v = 0.0;
            for (const auto& o : mdp.row(s, a)) {
                double next = 0.0;
                for (std::size_t b = 0; b < mdp.n_actions; ++b) next += pi(o.next, b) * q[mdp.index(o.next, b)];
                v += o.prob * (o.reward + mdp.gamma * next);
            }
            out[mdp.index(s, a)] = v;
        }
    return out;
}

}  // namespace fde
