#include <benchmark/benchmark.h>

#include "wbst/aggregates.hpp"
#include "wbst/experiments.hpp"
#include "wbst/records.hpp"
#include "wbst/tree.hpp"

using namespace wbst;

static void bm_insert_keys(benchmark::State& state) {
  const auto keys = iid_keys(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(insert_keys(keys, KeyModel::iid));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_insert_keys)->RangeMultiplier(10)->Range(1000, 100000)->Complexity();

static void bm_cartesian_keys(benchmark::State& state) {
  const auto keys = iid_keys(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(cartesian_keys(keys, KeyModel::iid));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_cartesian_keys)->RangeMultiplier(10)->Range(1000, 100000)->Complexity();

static void bm_functionals(benchmark::State& state) {
  const auto tree = build_iid(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(functionals_recursive(tree));
}
BENCHMARK(bm_functionals)->Arg(10000);

static void bm_label_path_records(benchmark::State& state) {
  std::uint64_t r = 0;
  for (auto _ : state) {
    CounterRng rng(3, r++);
    benchmark::DoNotOptimize(sample_label_path(state.range(0), state.range(0) / 2, rng));
  }
}
BENCHMARK(bm_label_path_records)->Arg(100000);

static ExperimentSpec whole_tree_spec() {
  ExperimentSpec spec;
  spec.id = "bench";
  spec.model = KeyModel::iid;
  spec.n = {2000};
  spec.k_rule.kind = KRuleKind::whole_tree;
  spec.replicates = 200;
  return spec;
}

static void bm_replicates(benchmark::State& state) {
  const auto exec = state.range(0) == 0 ? Execution::serial : Execution::parallel;
  const auto spec = whole_tree_spec();
  for (auto _ : state) benchmark::DoNotOptimize(simulate(spec, 2000, exec));
  state.SetLabel(exec == Execution::serial ? "serial" : "parallel");
}
BENCHMARK(bm_replicates)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
