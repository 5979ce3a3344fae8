#include <benchmark/benchmark.h>

#include "peellab/layers.hpp"
#include "peellab/peel_engine.hpp"
#include "peellab/perco.hpp"
#include "peellab/sampling.hpp"
#include "peellab/step_law.hpp"

namespace {

using namespace peellab;

const StepLaw& bench_law() {
    static const StepLaw law = [] {
        try {
            return StepLaw::load("peellab_test_law.tsv");
        } catch (...) {
            return calibrate();
        }
    }();
    return law;
}

const NuSampler& bench_nu() {
    static const NuSampler nu(bench_law());
    return nu;
}

void BM_HUp(benchmark::State& state) {
    std::int64_t l = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(h_up(l));
        l = l % 5000000 + 1;
    }
}
BENCHMARK(BM_HUp);

void BM_SampleNu(benchmark::State& state) {
    RngStream rng(1, 0);
    const NuSampler& nu = bench_nu();
    for (auto _ : state) benchmark::DoNotOptimize(nu.sample(rng));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SampleNu);

// The advisory throughput budget is >= 1e7 conditioned draws/s/core at
// l ~ 1e3; watch items_per_second here.
void BM_SampleConditioned(benchmark::State& state) {
    RngStream rng(2, 0);
    ConditionedSampler cs(bench_law(), bench_nu());
    const std::int64_t l = state.range(0);
    for (auto _ : state) benchmark::DoNotOptimize(cs.sample(l, rng));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SampleConditioned)->Arg(10)->Arg(1000)->Arg(100000);

void BM_SampleFinite(benchmark::State& state) {
    RngStream rng(3, 0);
    FiniteSampler fs(bench_law(), bench_nu());
    const std::int64_t m = state.range(0);
    for (auto _ : state) benchmark::DoNotOptimize(fs.sample(m, rng));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SampleFinite)->Arg(1)->Arg(30)->Arg(2000);

void BM_PeelStep(benchmark::State& state) {
    RngStream rng(4, 0);
    PeelEngine engine(bench_law(), bench_nu());
    ExplorationState st = PeelEngine::initial_state(PeelMode::plane);
    for (auto _ : state) {
        engine.step(st, rng);
        if (st.n >= 10000000) st = PeelEngine::initial_state(PeelMode::plane);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PeelStep);

void BM_FillHole(benchmark::State& state) {
    RngStream rng(5, 0);
    PeelEngine engine(bench_law(), bench_nu());
    const std::int64_t l = state.range(0);
    std::uint64_t pops = 0;
    for (auto _ : state) {
        const FillResult f = engine.fill_hole(l, rng);
        pops += f.peel_steps;
        benchmark::DoNotOptimize(f.vertices);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(pops));
}
BENCHMARK(BM_FillHole)->Arg(1)->Arg(100);

void BM_LayerStep(benchmark::State& state) {
    RngStream rng(6, 0);
    EngineOptions opts;
    opts.track_volume = false;
    PeelEngine engine(bench_law(), bench_nu(), opts);
    LayerPeeler peeler(engine);
    LayeredState st = LayerPeeler::initial_state();
    for (auto _ : state) {
        peeler.layer_step(st, rng);
        if (st.es.n >= 10000000) st = LayerPeeler::initial_state();
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_LayerStep);

void BM_PercoStep(benchmark::State& state) {
    RngStream rng(7, 0);
    const PercoWalk walk(bench_law(), bench_nu(), 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(walk.step(rng).X);
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PercoStep);

} // namespace

BENCHMARK_MAIN();
