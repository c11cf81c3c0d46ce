#include <benchmark/benchmark.h>

#include <nhsr/ensemble.hpp>
#include <nhsr/exceptional_points.hpp>
#include <nhsr/open_system.hpp>
#include <nhsr/quasispin.hpp>
#include <nhsr/sweep.hpp>

using namespace nhsr;

static void BM_BuildInitialPT2(benchmark::State& state) {
    const double j = (state.range(0) - 1) / 2.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_initial(Model::PT2, j));
    }
}
BENCHMARK(BM_BuildInitialPT2)->Arg(16)->Arg(64)->Arg(256)->Arg(1024);

static void BM_SampleSubspace(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    std::uint64_t index = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_subspace(d, d / 2, 1, index++));
    }
}
BENCHMARK(BM_SampleSubspace)->Arg(16)->Arg(64)->Arg(256)->Arg(1024);

static void BM_ComplexEig(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const auto h0 = build_initial(Model::HO, (d - 1) / 2.0);
    const auto sub = sample_subspace(d, d / 2, 1, 0);
    const auto h = assemble(h0, sub, 0.0, 16.0 * d);
    for (auto _ : state) {
        benchmark::DoNotOptimize(eig(h, false));
    }
}
BENCHMARK(BM_ComplexEig)->Arg(16)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_ComplexEigVectors(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const auto h0 = build_initial(Model::HO, (d - 1) / 2.0);
    const auto sub = sample_subspace(d, d / 2, 1, 0);
    const auto h = assemble(h0, sub, 1.0, 4.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(eig(h, true));
    }
}
BENCHMARK(BM_ComplexEigVectors)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_Sweep(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const auto h0 = build_initial(Model::HO, (d - 1) / 2.0);
    const auto sub = sample_subspace(d, d / 2, 1, 0);
    GammaGrid grid{1e-2, 1e2, 50, GammaGrid::Spacing::Log};
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_sweep(h0, sub, 0.0, grid));
    }
}
BENCHMARK(BM_Sweep)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_FindEps(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const auto h0 = build_initial(Model::HO, (d - 1) / 2.0);
    std::uint64_t index = 0;
    for (auto _ : state) {
        const auto sub = sample_subspace(d, d / 2, 1, index++);
        try {
            benchmark::DoNotOptimize(find_eps(h0, sub));
        } catch (const EpCountError&) {
        }
    }
}
BENCHMARK(BM_FindEps)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
