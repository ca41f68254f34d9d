// Parallel kernels against their serial references.
#include <benchmark/benchmark.h>

#include <random>

#include "fde/bellman.hpp"
#include "fde/divergences.hpp"
#include "fde/envs.hpp"
#include "fde/fde.hpp"
#include "fde/serial.hpp"

namespace {

fde::EmpiricalSample normal_sample(std::size_t n, double shift, std::uint64_t seed) {
    fde::Rng rng(seed);
    std::normal_distribution<double> z(shift, 1.0);
    std::vector<double> pts(n);
    for (auto& v : pts) v = z(rng);
    return fde::EmpiricalSample::make(1, std::move(pts));
}

void BM_mmd_rbf_parallel(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    const auto x = normal_sample(n, 0.0, 1), y = normal_sample(n, 0.5, 2);
    for (auto _ : st) benchmark::DoNotOptimize(fde::mmd_squared_mc(fde::KernelSpec::rbf(1.0), x, y));
}

void BM_mmd_rbf_serial(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    const auto x = normal_sample(n, 0.0, 1), y = normal_sample(n, 0.5, 2);
    for (auto _ : st) benchmark::DoNotOptimize(fde::serial::mmd_squared_mc(fde::KernelSpec::rbf(1.0), x, y));
}

void BM_mmd_energy_sorted(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    const auto x = normal_sample(n, 0.0, 1), y = normal_sample(n, 0.5, 2);
    for (auto _ : st) benchmark::DoNotOptimize(fde::mmd_squared_mc(fde::KernelSpec::energy(1.0), x, y));
}

void BM_mmd_energy_serial(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    const auto x = normal_sample(n, 0.0, 1), y = normal_sample(n, 0.5, 2);
    for (auto _ : st) benchmark::DoNotOptimize(fde::serial::mmd_squared_mc(fde::KernelSpec::energy(1.0), x, y));
}

struct BellmanCase {
    fde::TabularMDP mdp;
    fde::Policy pi;
    fde::ReturnTable table;
};

BellmanCase bellman_case(std::size_t n_states) {
    fde::Rng rng(3);
    auto mdp = fde::tabular_make_random(n_states, 3, 3, rng, 0.9);
    auto pi = fde::Policy::uniform(n_states, 3);
    fde::ReturnTable u = fde::ReturnTable::constant(n_states, 3);
    for (int i = 0; i < 2; ++i) u = fde::apply_bellman(u, mdp, pi);
    return {std::move(mdp), std::move(pi), std::move(u)};
}

void BM_bellman_parallel(benchmark::State& st) {
    const auto c = bellman_case(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(fde::apply_bellman(c.table, c.mdp, c.pi));
}

void BM_bellman_serial(benchmark::State& st) {
    const auto c = bellman_case(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(fde::serial::apply_bellman(c.table, c.mdp, c.pi));
}

struct LqrCase {
    fde::LQREnv env = fde::LQREnv::standard();
    fde::LQRDataset data;
    fde::LQRTheta theta, prev;
};

LqrCase lqr_case(std::size_t n) {
    LqrCase c;
    fde::Rng rng(4);
    c.data = fde::lqr_collect(c.env, n, rng);
    c.prev = fde::lqr_true_params(c.env);
    c.theta = fde::lqr_param_map(c.env, c.prev);
    return c;
}

void BM_objective_parallel(benchmark::State& st) {
    const auto c = lqr_case(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st)
        benchmark::DoNotOptimize(
            fde::fde_objective(c.data, c.theta, c.prev, c.env, fde::DivergenceSpec::mmd(fde::KernelSpec::rbf(1.0))));
}

void BM_objective_serial(benchmark::State& st) {
    const auto c = lqr_case(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st)
        benchmark::DoNotOptimize(fde::serial::fde_objective(c.data, c.theta, c.prev, c.env,
                                                            fde::DivergenceSpec::mmd(fde::KernelSpec::rbf(1.0))));
}

}  // namespace

BENCHMARK(BM_mmd_rbf_parallel)->Arg(500)->Arg(2000);
BENCHMARK(BM_mmd_rbf_serial)->Arg(500)->Arg(2000);
BENCHMARK(BM_mmd_energy_sorted)->Arg(2000)->Arg(20000);
BENCHMARK(BM_mmd_energy_serial)->Arg(2000);
BENCHMARK(BM_bellman_parallel)->Arg(8)->Arg(32);
BENCHMARK(BM_bellman_serial)->Arg(8)->Arg(32);
BENCHMARK(BM_objective_parallel)->Arg(1000)->Arg(10000);
BENCHMARK(BM_objective_serial)->Arg(1000)->Arg(10000);

BENCHMARK_MAIN();
