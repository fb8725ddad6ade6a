#include <benchmark/benchmark.h>

#include "fluxq/eigensolver.hpp"
#include "fluxq/landscape.hpp"

using namespace fluxq;

static void BM_BuildHamiltonian(benchmark::State& state) {
    const auto p = device_preset("sample_A");
    const int cutoff = int(state.range(0));
    for (auto _ : state) {
        auto h = build_hamiltonian(p, {0.13, 0.71}, cutoff);
        benchmark::DoNotOptimize(h.entries.data());
    }
}
BENCHMARK(BM_BuildHamiltonian)->Arg(30)->Arg(60)->Arg(120);

static void BM_EigensolveFixedCutoff(benchmark::State& state) {
    const auto p = device_preset("sample_A");
    const auto h = build_hamiltonian(p, {0.13, 0.71}, int(state.range(0)));
    for (auto _ : state) {
        auto spec = eigensolve(h, 5);
        benchmark::DoNotOptimize(spec.levels.data());
    }
}
BENCHMARK(BM_EigensolveFixedCutoff)->Arg(15)->Arg(30)->Arg(60);

static void BM_SolveQubitConverged(benchmark::State& state) {
    const auto p = device_preset("sample_A");
    for (auto _ : state) {
        auto spec = solve_qubit(p, {0.13, 0.71});
        benchmark::DoNotOptimize(spec.levels.data());
    }
}
BENCHMARK(BM_SolveQubitConverged);

static void BM_SweepFrequency(benchmark::State& state) {
    const auto p = device_preset("sample_A");
    SolveOptions opts;
    opts.f01_rel_tol = 1e-6;
    const int n = int(state.range(0));
    const Axis tx{"phi_t", -0.5, 0.5, n};
    const Axis bx{"phi_b", 0.0, 2.0, n};
    for (auto _ : state) {
        auto map = sweep_frequency(p, tx, bx, opts);
        benchmark::DoNotOptimize(map.values.data());
    }
}
BENCHMARK(BM_SweepFrequency)->Arg(11)->Arg(21)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
