#include "gpid/gpid.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

gpid::WhitenedSystem doubled_gain_sweep(int k) {
    return gpid::whiten(gpid::canonical::doubling(gpid::canonical::build(gpid::canonical::GainSweep{2.0}), k));
}

gpid::Matrix random_matrix(int d, std::uint64_t seed, double scale) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    return gpid::Matrix::NullaryExpr(d, d, [&] { return scale * normal(rng); });
}

void bm_decompose(benchmark::State& state) {
    const gpid::GaussianSystem sys =
        gpid::canonical::doubling(gpid::canonical::build(gpid::canonical::GainSweep{2.0}),
                                  static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(gpid::decompose(sys));
    }
    state.counters["d"] = static_cast<double>(sys.dims().d_m);
}
BENCHMARK(bm_decompose)->DenseRange(0, 5)->Unit(benchmark::kMillisecond);

void bm_evaluate(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    const gpid::WhitenedSystem w = doubled_gain_sweep(k);
    const gpid::Matrix s = gpid::project(random_matrix(w.dims.d_x, 1, 0.1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(gpid::evaluate(s, w, 1e-7));
    }
    state.counters["d"] = static_cast<double>(w.dims.d_x);
}
BENCHMARK(bm_evaluate)->DenseRange(0, 6)->Unit(benchmark::kMicrosecond);

void bm_project_infeasible(benchmark::State& state) {
    const gpid::Matrix a = random_matrix(static_cast<int>(state.range(0)), 2, 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gpid::project(a));
    }
}
BENCHMARK(bm_project_infeasible)->RangeMultiplier(2)->Range(2, 128)->Unit(benchmark::kMicrosecond);

void bm_project_feasible(benchmark::State& state) {
    const gpid::Matrix a = random_matrix(static_cast<int>(state.range(0)), 3, 0.01);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gpid::project(a));
    }
}
BENCHMARK(bm_project_feasible)->RangeMultiplier(2)->Range(2, 128)->Unit(benchmark::kMicrosecond);

void bm_estimate(benchmark::State& state) {
    const gpid::GaussianSystem sys = gpid::canonical::build(gpid::canonical::BitOfAll{10, 0});
    const gpid::Dataset ds = gpid::sample_gaussian(sys, state.range(0), 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gpid::estimate_pid(ds, gpid::SolverConfig{}, true));
    }
}
BENCHMARK(bm_estimate)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
