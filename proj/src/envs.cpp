#include "fde/envs.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <ostream>
#include <random>

#include "fde/error.hpp"
#include "fde/normal.hpp"

namespace fde {

namespace {

constexpr double kTwoPi = 2.0 * normal::kPi;

std::size_t pick(const std::vector<double>& weights, double u) {
    double c = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        c += weights[i];
        if (u < c) return i;
    }
    // Rounding left u above the last partial sum; take the last positive weight.
    for (std::size_t i = weights.size(); i-- > 0;)
        if (weights[i] > 0.0) return i;
    return weights.size() - 1;
}

std::vector<double> dirichlet_ones(std::size_t k, Rng& rng) {
    std::vector<double> w(k);
    double total = 0.0;
    for (auto& x : w) total += (x = -std::log1p(-rng.uniform()));
    for (auto& x : w) x /= total;
    return w;
}

std::vector<Outcome> dirichlet_row(const std::vector<double>& support, const std::vector<std::size_t>& targets,
                                   Rng& rng) {
    const auto w = dirichlet_ones(support.size() * targets.size(), rng);
    std::vector<Outcome> row;
    row.reserve(w.size());
    for (std::size_t i = 0; i < support.size(); ++i)
        for (std::size_t j = 0; j < targets.size(); ++j)
            row.push_back({w[i * targets.size() + j], support[i], targets[j]});
    // Absorb rounding so the row sums to 1 to machine precision.
    double total = 0.0;
    for (const auto& o : row) total += o.prob;
    row.back().prob += 1.0 - total;
    if (row.back().prob < 0.0) row.back().prob = 0.0;
    return row;
}

std::vector<double> reward_support(std::size_t k, Rng& rng) {
    std::vector<double> s(k);
    for (auto& v : s) v = rng.uniform();
    return s;
}

struct Fnv {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    void add(const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) h = (h ^ b[i]) * 0x100000001b3ULL;
    }
    void add(double v) { add(&v, sizeof v); }
    void add(std::uint64_t v) { add(&v, sizeof v); }
};

}  // namespace

LQREnv LQREnv::standard() {
    LQREnv e;
    e.A << 0.6, 0.0, 0.0, 0.8;
    e.B << 0.2, 0.0, 0.0, 0.1;
    e.Q << 4.0, 1.0, 1.0, 4.0;
    e.R << 2.0, 1.0, 1.0, 2.0;
    e.K = Mat2::Identity();
    return e;
}

std::array<double, LQRTheta::kSize> LQRTheta::flatten() const {
    std::array<double, kSize> v{};
    const Mat2* ms[] = {&M1, &M2, &M3};
    for (int m = 0; m < 3; ++m)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) v[static_cast<std::size_t>(4 * m + 2 * i + j)] = (*ms[m])(i, j);
    return v;
}

LQRTheta LQRTheta::unflatten(const double* v) {
    LQRTheta t;
    Mat2* ms[] = {&t.M1, &t.M2, &t.M3};
    for (int m = 0; m < 3; ++m)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) (*ms[m])(i, j) = v[4 * m + 2 * i + j];
    return t;
}

double LQRTheta::max_abs_diff(const LQRTheta& o) const {
    return std::max({(M1 - o.M1).cwiseAbs().maxCoeff(), (M2 - o.M2).cwiseAbs().maxCoeff(),
                     (M3 - o.M3).cwiseAbs().maxCoeff()});
}

LQRTheta lqr_param_map(const LQREnv& env, const LQRTheta& t) {
    const Mat2 N = t.M1 + env.K.transpose() * t.M2 + env.K.transpose() * t.M3 * env.K;
    LQRTheta out;
    out.M1 = env.Q + env.gamma * env.A.transpose() * N * env.A;
    out.M2 = env.gamma * env.B.transpose() * (N + N.transpose()) * env.A;
    out.M3 = env.R + env.gamma * env.B.transpose() * N * env.B;
    return out;
}

LQRTheta lqr_true_params(const LQREnv& env, double tol, std::size_t max_iters, const LQRTheta& start) {
    if (!(tol > 0.0)) throw InvalidInput("lqr_true_params requires tol > 0");
    const Mat2 closed = env.A + env.B * env.K;
    const double rho = closed.eigenvalues().cwiseAbs().maxCoeff();
    if (env.gamma * rho * rho >= 1.0)
        throw NonConvergence("parameter map is not a contraction: gamma * rho(A + BK)^2 >= 1", env.gamma * rho * rho);
    LQRTheta t = start;
    double change = 0.0;
    for (std::size_t k = 0; k < max_iters; ++k) {
        LQRTheta next = lqr_param_map(env, t);
        change = next.max_abs_diff(t);
        t = next;
        if (!t.finite()) throw NonConvergence("parameter iteration diverged", change);
        if (change <= tol) return t;
    }
    throw NonConvergence("lqr_true_params reached max_iters", change);
}

void lqr_sample_start(Rng& rng, Vec2& x, Vec2& a, double max_radius) {
    const double r = max_radius * rng.uniform();
    const double th = kTwoPi * rng.uniform();
    x << r * std::cos(th), r * std::sin(th);
    const auto k = static_cast<double>(rng() % 5);
    const double phi = kTwoPi * k / 5.0;
    Mat2 rot;
    rot << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
    a = rot * x;
}

LQRDataset lqr_collect(const LQREnv& env, std::size_t n, Rng& rng, double max_radius) {
    if (n == 0) throw InvalidInput("lqr_collect needs n >= 1");
    const std::uint64_t base = rng();
    LQRDataset d;
    d.records.resize(n);
    const auto len = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < len; ++i) {
        Rng local(derive_seed(base, {static_cast<std::uint64_t>(i)}));
        auto& rec = d.records[static_cast<std::size_t>(i)];
        lqr_sample_start(local, rec.s, rec.a, max_radius);
        std::normal_distribution<double> noise(0.0, env.sigma0);
        rec.r = env.mean_reward(rec.s, rec.a) + noise(local);
        rec.sp = env.step(rec.s, rec.a);
    }
    return d;
}

std::size_t rollout_horizon(double gamma, double tol) {
    if (!(gamma > 0.0 && gamma < 1.0) || !(tol > 0.0)) throw InvalidInput("rollout_horizon needs gamma in (0,1), tol > 0");
    return static_cast<std::size_t>(std::ceil(std::log(tol * (1.0 - gamma)) / std::log(gamma)));
}

MonteCarloEstimate lqr_mc_return(const LQREnv& env, const Vec2& x0, const Vec2& a0, std::size_t n_traj,
                                 std::size_t horizon, Rng& rng) {
    if (n_traj < 2) throw InvalidInput("lqr_mc_return needs at least two trajectories");
    const std::uint64_t base = rng();
    std::vector<double> g(n_traj);
    const auto len = static_cast<std::ptrdiff_t>(n_traj);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < len; ++i) {
        Rng local(derive_seed(base, {static_cast<std::uint64_t>(i)}));
        std::normal_distribution<double> noise(0.0, env.sigma0);
        Vec2 x = x0, a = a0;
        double disc = 1.0, total = 0.0;
        for (std::size_t t = 0; t < horizon; ++t) {
            total += disc * (env.mean_reward(x, a) + noise(local));
            disc *= env.gamma;
            x = env.step(x, a);
            a = env.K * x;
        }
        g[static_cast<std::size_t>(i)] = total;
    }
    double m = 0.0;
    for (double v : g) m += v;
    m /= static_cast<double>(n_traj);
    double ss = 0.0;
    for (double v : g) ss += (v - m) * (v - m);
    const double var = ss / static_cast<double>(n_traj - 1);
    return {m, std::sqrt(var / static_cast<double>(n_traj))};
}

TabularMDP tabular_make_random(std::size_t n_states, std::size_t n_actions, std::size_t reward_support_size, Rng& rng,
                               double gamma) {
    if (n_states == 0 || n_actions == 0 || reward_support_size == 0)
        throw InvalidInput("tabular_make_random needs positive counts");
    const auto support = reward_support(reward_support_size, rng);
    std::vector<std::size_t> all(n_states);
    for (std::size_t s = 0; s < n_states; ++s) all[s] = s;
    std::vector<std::vector<Outcome>> rows;
    rows.reserve(n_states * n_actions);
    for (std::size_t i = 0; i < n_states * n_actions; ++i) rows.push_back(dirichlet_row(support, all, rng));
    return TabularMDP::make(n_states, n_actions, gamma, std::move(rows));
}

TabularMDP tabular_make_episodic(std::size_t n_states, std::size_t n_actions, std::size_t reward_support_size, Rng& rng,
                                 double gamma) {
    if (n_states < 2 || n_actions == 0 || reward_support_size == 0)
        throw InvalidInput("tabular_make_episodic needs >= 2 states and positive counts");
    const auto support = reward_support(reward_support_size, rng);
    const std::size_t terminal = n_states - 1;
    std::vector<std::vector<Outcome>> rows;
    for (std::size_t s = 0; s < n_states; ++s) {
        std::vector<std::size_t> later;
        for (std::size_t t = s + 1; t < n_states; ++t) later.push_back(t);
        for (std::size_t a = 0; a < n_actions; ++a) {
            if (s == terminal)
                rows.push_back({{1.0, 0.0, terminal}});
            else
                rows.push_back(dirichlet_row(support, later, rng));
        }
    }
    return TabularMDP::make(n_states, n_actions, gamma, std::move(rows));
}

std::vector<double> tabular_rho(const TabularMDP& mdp, const Policy& behavior) {
    std::vector<double> rho(mdp.n_states * mdp.n_actions);
    const double ps = 1.0 / static_cast<double>(mdp.n_states);
    for (std::size_t s = 0; s < mdp.n_states; ++s)
        for (std::size_t a = 0; a < mdp.n_actions; ++a) rho[mdp.index(s, a)] = ps * behavior(s, a);
    return rho;
}

namespace {

std::size_t draw_action(const Policy& pi, std::size_t s, Rng& rng) {
    std::vector<double> w(pi.probs.begin() + static_cast<std::ptrdiff_t>(s * pi.n_actions),
                          pi.probs.begin() + static_cast<std::ptrdiff_t>((s + 1) * pi.n_actions));
    return pick(w, rng.uniform());
}

const Outcome& draw_outcome(const std::vector<Outcome>& row, Rng& rng) {
    std::vector<double> w;
    w.reserve(row.size());
    for (const auto& o : row) w.push_back(o.prob);
    return row[pick(w, rng.uniform())];
}

}  // namespace

TabularDataset tabular_collect(const TabularMDP& mdp, const Policy& behavior, std::size_t n, Rng& rng) {
    if (n == 0) throw InvalidInput("tabular_collect needs n >= 1");
    if (behavior.n_states != mdp.n_states || behavior.n_actions != mdp.n_actions)
        throw InvalidInput("behaviour policy does not match the MDP");
    const std::uint64_t base = rng();
    TabularDataset d;
    d.records.resize(n);
    const auto len = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < len; ++i) {
        Rng local(derive_seed(base, {static_cast<std::uint64_t>(i)}));
        const std::size_t s = static_cast<std::size_t>(local() % mdp.n_states);
        const std::size_t a = draw_action(behavior, s, local);
        const Outcome& o = draw_outcome(mdp.row(s, a), local);
        d.records[static_cast<std::size_t>(i)] = {s, a, o.reward, o.next};
    }
    return d;
}

std::size_t sample_horizon(double gamma, Rng& rng) {
    if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidInput("sample_horizon needs gamma in [0,1)");
    if (gamma == 0.0) return 1;
    std::geometric_distribution<std::size_t> geo(1.0 - gamma);
    return geo(rng) + 1;
}

std::vector<StateAction> estimate_dpi(const LQREnv& env, std::size_t n_points, Rng& rng) {
    if (n_points == 0) throw InvalidInput("estimate_dpi needs n_points >= 1");
    std::vector<StateAction> out(n_points);
    for (auto& p : out) {
        lqr_sample_start(rng, p.x, p.a);
        const std::size_t h = sample_horizon(env.gamma, rng);
        for (std::size_t t = 1; t < h; ++t) {
            p.x = env.step(p.x, p.a);
            p.a = env.K * p.x;
        }
    }
    return out;
}

std::vector<double> estimate_dpi(const TabularMDP& mdp, const Policy& behavior, const Policy& pi,
                                 std::size_t n_points, Rng& rng) {
    if (n_points == 0) throw InvalidInput("estimate_dpi needs n_points >= 1");
    std::vector<double> freq(mdp.n_states * mdp.n_actions, 0.0);
    const double w = 1.0 / static_cast<double>(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        std::size_t s = static_cast<std::size_t>(rng() % mdp.n_states);
        std::size_t a = draw_action(behavior, s, rng);
        const std::size_t h = sample_horizon(mdp.gamma, rng);
        for (std::size_t t = 1; t < h; ++t) {
            s = draw_outcome(mdp.row(s, a), rng).next;
            a = draw_action(pi, s, rng);
        }
        freq[mdp.index(s, a)] += w;
    }
    return freq;
}

std::vector<double> exact_dpi(const TabularMDP& mdp, const std::vector<double>& rho, const Policy& pi) {
    const auto n = static_cast<Eigen::Index>(mdp.n_states * mdp.n_actions);
    if (static_cast<Eigen::Index>(rho.size()) != n) throw InvalidInput("exact_dpi: rho has the wrong size");
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t s = 0; s < mdp.n_states; ++s)
        for (std::size_t a = 0; a < mdp.n_actions; ++a)
            for (const auto& o : mdp.row(s, a))
                for (std::size_t b = 0; b < mdp.n_actions; ++b)
                    P(static_cast<Eigen::Index>(mdp.index(s, a)), static_cast<Eigen::Index>(mdp.index(o.next, b))) +=
                        o.prob * pi(o.next, b);
    const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n) - mdp.gamma * P;
    const Eigen::VectorXd r = Eigen::Map<const Eigen::VectorXd>(rho.data(), n);
    // d M = (1 - gamma) rho  <=>  M' d' = (1 - gamma) rho'
    const Eigen::VectorXd d = M.transpose().partialPivLu().solve((1.0 - mdp.gamma) * r);
    std::vector<double> out(d.data(), d.data() + n);
    for (double& v : out) v = std::max(v, 0.0);
    return out;
}

void write_csv(std::ostream& os, const LQRDataset& d) {
    const auto old = os.precision(17);
    os << "s_0,s_1,a_0,a_1,r,sp_0,sp_1\n";
    for (const auto& t : d.records)
        os << t.s(0) << ',' << t.s(1) << ',' << t.a(0) << ',' << t.a(1) << ',' << t.r << ',' << t.sp(0) << ','
           << t.sp(1) << '\n';
    os.precision(old);
}

void write_csv(std::ostream& os, const TabularDataset& d) {
    const auto old = os.precision(17);
    os << "s,a,r,sp\n";
    for (const auto& t : d.records) os << t.s << ',' << t.a << ',' << t.r << ',' << t.sp << '\n';
    os.precision(old);
}

std::uint64_t checksum(const LQRDataset& d) {
    Fnv f;
    for (const auto& t : d.records) {
        f.add(t.s(0));
        f.add(t.s(1));
        f.add(t.a(0));
        f.add(t.a(1));
        f.add(t.r);
        f.add(t.sp(0));
        f.add(t.sp(1));
    }
    return f.h;
}

std::uint64_t checksum(const TabularDataset& d) {
    Fnv f;
    for (const auto& t : d.records) {
        f.add(static_cast<std::uint64_t>(t.s));
        f.add(static_cast<std::uint64_t>(t.a));
        f.add(t.r);
        f.add(static_cast<std::uint64_t>(t.sp));
    }
    return f.h;
}

}  // namespace fde
