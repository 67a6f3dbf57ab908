#include "probstrat/fixpoint.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace probstrat;

namespace {

PolySystem make_system(int n) {
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> var(0, n - 1);
    PolySystem sys;
    sys.equations.resize(n);
    for (auto& eq : sys.equations) {
        double a = u(rng), b = u(rng), c = u(rng), s = (a + b + c) / 0.9;
        eq.push_back(Term{a / s, {var(rng), var(rng)}});
        eq.push_back(Term{b / s, {var(rng)}});
        eq.push_back(Term{c / s, {}});
    }
    return sys;
}

void sweep(benchmark::State& state, bool parallel) {
    PolySystem sys = make_system(static_cast<int>(state.range(0)));
    std::vector<double> in(sys.size(), 0.5), out(sys.size());
    for (auto _ : state) {
        double d = parallel ? jacobi_sweep_parallel(sys, in, out) : jacobi_sweep_serial(sys, in, out);
        benchmark::DoNotOptimize(d);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SweepSerial(benchmark::State& s) { sweep(s, false); }
void BM_SweepParallel(benchmark::State& s) { sweep(s, true); }

void BM_FixpointSerial(benchmark::State& state) {
    PolySystem sys = make_system(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(least_fixpoint(sys, 1e-12, 100000, false).iterations);
}
void BM_FixpointParallel(benchmark::State& state) {
    PolySystem sys = make_system(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(least_fixpoint(sys, 1e-12, 100000, true).iterations);
}

} // namespace

BENCHMARK(BM_SweepSerial)->Range(1 << 8, 1 << 16);
BENCHMARK(BM_SweepParallel)->Range(1 << 8, 1 << 16);
BENCHMARK(BM_FixpointSerial)->Arg(1 << 12);
BENCHMARK(BM_FixpointParallel)->Arg(1 << 12);

BENCHMARK_MAIN();
