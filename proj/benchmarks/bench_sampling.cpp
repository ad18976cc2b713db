#include <benchmark/benchmark.h>

#include "mg2v/alias.hpp"
#include "mg2v/pair_table.hpp"
#include "mg2v/trainer.hpp"

namespace {

using namespace mg2v;

std::vector<double> zipf_weights(size_t n) {
  std::vector<double> w(n);
  for (size_t i = 0; i < n; ++i) w[i] = 1.0 / static_cast<double>(i + 1);
  return w;
}

void BM_AliasBuild(benchmark::State& state) {
  auto weights = zipf_weights(static_cast<size_t>(state.range(0)));
  for (auto _ : state) {
    AliasTable table(weights);
    benchmark::DoNotOptimize(table);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AliasBuild)->Arg(1 << 10)->Arg(1 << 16)->Arg(1 << 20);

void BM_AliasSample(benchmark::State& state) {
  AliasTable table(zipf_weights(static_cast<size_t>(state.range(0))));
  Pcg32 rng(1, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(table.sample(rng));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_AliasSample)->Arg(1 << 10)->Arg(1 << 20);

void BM_NegativeSample(benchmark::State& state) {
  const NodeId n = 1 << 16;
  PairFrequencyTable table;
  table.window = 5;
  table.num_nodes = n;
  table.context_count.assign(n, 0);
  Pcg32 fill(3, 3);
  for (NodeId v = 0; v < n; ++v) {
    NodeId ctx = (v + 1) % n;
    uint32_t count = 1 + fill.bounded(100);
    table.keys.push_back(PairFrequencyTable::key(v, ctx));
    table.counts.push_back(count);
    table.context_count[ctx] += count;
    table.total += count;
  }
  NegativeSampler sampler(table, SkipGramMode::homogeneous, {}, 0, 0.75);
  Pcg32 rng(7, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sampler.sample(kNoType, rng));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_NegativeSample);

}  // namespace
