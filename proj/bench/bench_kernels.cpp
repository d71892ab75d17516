#include "deform/dgla_families.hpp"
#include "deform/hochschild_families.hpp"
#include "deform/stacks.hpp"

#include <benchmark/benchmark.h>

using namespace deform;

static DglaInstance nontrivial_instance(Rng& rng) {
    while (true) {
        DglaInstance inst = random_dgla_instance(rng);
        if (inst.g.dim_or_zero(0) > 0 && inst.g.dim_or_zero(1) > 0) return inst;
    }
}

static void BM_bch(benchmark::State& state) {
    Rng rng(1);
    DglaInstance inst = nontrivial_instance(rng);
    int order = static_cast<int>(state.range(0));
    DglaElement x = random_element(inst.g, rng, 0, order), y = random_element(inst.g, rng, 0, order);
    for (auto _ : state) benchmark::DoNotOptimize(bch_plain(inst.g, x, y));
}
BENCHMARK(BM_bch)->DenseRange(2, 4);

static void BM_gauge(benchmark::State& state) {
    Rng rng(2);
    DglaInstance inst = nontrivial_instance(rng);
    int order = static_cast<int>(state.range(0));
    DglaElement gamma = inst.random_mc(rng, order);
    GaugeTransform x{random_element(inst.g, rng, 0, order)};
    for (auto _ : state) benchmark::DoNotOptimize(gauge_act(inst.g, x, gamma, false));
}
BENCHMARK(BM_gauge)->DenseRange(2, 4);

static void BM_hochschild(benchmark::State& state) {
    FinAlgebra a = algebra_matrices2();
    for (auto _ : state) benchmark::DoNotOptimize(hochschild_cohomology(a, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_hochschild)->DenseRange(1, 2);

static void BM_homotopy(benchmark::State& state) {
    Rng rng(3);
    CosimplicialVS v = random_cosimplicial(rng, 3, 3);
    std::vector<DeltaSimplex> all;
    for_each_simplex(2, 3, [&](const DeltaSimplex& l) { all.push_back(l); });
    for (auto _ : state) {
        HatCochain hd = homotopy_h(hat_differential(random_hat_cochain(v, 2, 3, 4)));
        for (const auto& l : all) benchmark::DoNotOptimize(hd.compute(l));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(all.size()));
}
BENCHMARK(BM_homotopy)->Unit(benchmark::kMillisecond);

static void BM_strictify(benchmark::State& state) {
    const CosimplicialG g(trivial_datum(pseudocircle_cover()), GCaps{3, 1, 3});
    Rng rng(5);
    GStack s = random_gstack(g, 3, rng).stack;
    for (auto _ : state) benchmark::DoNotOptimize(strictify(g, s));
}
BENCHMARK(BM_strictify)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
