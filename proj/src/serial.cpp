#include "fde/serial.hpp"

#include <vector>

#include "fde/error.hpp"
#include "fde/fde.hpp"

namespace fde::serial {

double mmd_squared_mc(const KernelSpec& kernel, const EmpiricalSample& x, const EmpiricalSample& y) {
    if (x.size() < 2 || y.size() < 2) throw InvalidInput("mmd_squared_mc needs at least two points per sample");
    if (x.dim != y.dim) throw InvalidInput("mmd_squared_mc: dimension mismatch");
    std::vector<double> diff(x.dim);
    auto k = [&](std::span<const double> a, std::span<const double> b) {
        for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = a[i] - b[i];
        return kernel.k0(diff);
    };
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j)
            if (i != j) sxx += k(x.point(i), x.point(j));
    for (std::size_t i = 0; i < y.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j)
            if (i != j) syy += k(y.point(i), y.point(j));
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j) sxy += k(x.point(i), y.point(j));
    const double n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
    return sxx / (n * (n - 1.0)) + syy / (m * (m - 1.0)) - 2.0 * sxy / (n * m);
}

ReturnTable apply_bellman(const ReturnTable& u, const TabularMDP& mdp, const Policy& pi, const BellmanOptions& opts) {
    if (u.n_states != mdp.n_states || u.n_actions != mdp.n_actions) throw InvalidInput("table/MDP shape mismatch");
    ReturnTable out{u.n_states, u.n_actions, std::vector<Atomic>(u.size())};
    for (std::size_t s = 0; s < mdp.n_states; ++s)
        for (std::size_t a = 0; a < mdp.n_actions; ++a) {
            Atomic acc{1, {}, {}};
            for (const auto& o : mdp.row(s, a)) {
                if (o.prob == 0.0) continue;
                const Atomic b = bellman_backup(o.reward, o.next, u, pi, mdp.gamma);
                acc.locations.insert(acc.locations.end(), b.locations.begin(), b.locations.end());
                for (double m : b.masses) acc.masses.push_back(o.prob * m);
            }
            if (opts.grid_resolution > 0.0)
                acc = project_to_grid(acc, opts.grid_origin, opts.grid_resolution);
            else if (opts.merge)
                acc = merge_atoms(std::move(acc), opts.merge_tol);
            out.at(s, a) = std::move(acc);
        }
    return out;
}

double fde_objective(const LQRDataset& fold, const LQRTheta& theta, const LQRTheta& theta_prev, const LQREnv& env,
                     const DivergenceSpec& spec) {
    if (fold.size() == 0) throw InvalidInput("fde_objective on an empty fold");
    const double var = env.return_variance();
    double sum = 0.0;
    for (const auto& t : fold.records)
        sum += divergence_gaussian(spec, Gaussian1D{theta.mean(t.s, t.a), var},
                                   Gaussian1D{backup_mean(t, theta_prev, env), env.gamma * env.gamma * var});
    return sum / static_cast<double>(fold.size());
}

}  // namespace fde::serial
