#include <benchmark/benchmark.h>

#include "sforest/graph.hpp"
#include "sforest/gw_forest.hpp"
#include "sforest/instance_gen.hpp"
#include "sforest/sp_exact.hpp"
#include "sforest/tw_ptas.hpp"

using namespace sforest;

namespace {

GeneratedInstance sized(int n) { return gen_random(n, 3 * n, 4, 42, 100); }

void BM_ApspSerial(benchmark::State& state) {
    auto inst = sized(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(all_pairs_distances_serial(inst.graph));
    state.SetComplexityN(state.range(0));
}

void BM_ApspParallel(benchmark::State& state) {
    auto inst = sized(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(all_pairs_distances(inst.graph));
    state.SetComplexityN(state.range(0));
}

void BM_GwForest(benchmark::State& state) {
    auto inst = gen_random(static_cast<int>(state.range(0)), 3 * static_cast<int>(state.range(0)), 8, 7, 100);
    for (auto _ : state) benchmark::DoNotOptimize(gw_steiner_forest(inst.graph, inst.demands));
}

void BM_SpSolve(benchmark::State& state) {
    auto inst = gen_random_sp(static_cast<int>(state.range(0)), 11, 4);
    for (auto _ : state) benchmark::DoNotOptimize(sp_solve_with_tree(inst.graph, inst.tree, inst.demands));
}

void BM_TwPtas(benchmark::State& state) {
    auto k = gen_partial_ktree(static_cast<int>(state.range(0)), 2, 3, 5);
    for (auto _ : state) benchmark::DoNotOptimize(tw_ptas(k.graph, k.demands, Rational(1, 2), k.td));
}

}  // namespace

BENCHMARK(BM_ApspSerial)->RangeMultiplier(2)->Range(64, 512)->Complexity();
BENCHMARK(BM_ApspParallel)->RangeMultiplier(2)->Range(64, 512)->Complexity();
BENCHMARK(BM_GwForest)->Arg(50)->Arg(200);
BENCHMARK(BM_SpSolve)->Arg(20)->Arg(60);
BENCHMARK(BM_TwPtas)->Arg(10)->Arg(20);

BENCHMARK_MAIN();
