#include <benchmark/benchmark.h>

#include "mg2v/pair_table.hpp"
#include "mg2v/trainer.hpp"

namespace {

using namespace mg2v;

WalkCorpus random_corpus(NodeId nodes, int walks, int length, uint64_t seed) {
  WalkCorpus corpus;
  Pcg32 rng(seed, 1);
  for (int w = 0; w < walks; ++w) {
    std::vector<NodeId> walk(length);
    for (int i = 0; i < length; ++i) walk[i] = rng.bounded(static_cast<uint32_t>(nodes));
    corpus.walks.push_back(std::move(walk));
  }
  return corpus;
}

void BM_CountPairs(benchmark::State& state) {
  const NodeId n = 5000;
  WalkCorpus corpus = random_corpus(n, static_cast<int>(state.range(0)), 100, 3);
  for (auto _ : state) {
    PairFrequencyTable table = count_pairs(corpus, 5, n);
    benchmark::DoNotOptimize(table.total);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 100 * 10);
}
BENCHMARK(BM_CountPairs)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_SgdUpdate(benchmark::State& state) {
  const NodeId n = 10000;
  const int d = static_cast<int>(state.range(0));
  EmbeddingModel model = EmbeddingModel::init(n, d, 7);
  Pcg32 rng(5, 5);
  std::vector<NodeId> negatives(5);
  for (auto _ : state) {
    NodeId center = rng.bounded(n);
    NodeId context = rng.bounded(n);
    for (NodeId& neg : negatives) neg = rng.bounded(n);
    sgd_update(model, center, context, negatives, 0.025);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SgdUpdate)->Arg(64)->Arg(128);

void BM_Train(benchmark::State& state) {
  const NodeId n = 2000;
  WalkCorpus corpus = random_corpus(n, 2000, 80, 11);
  PairFrequencyTable table = count_pairs(corpus, 5, n);
  TrainConfig config;
  config.dim = 64;
  config.max_iterations = state.range(0);
  config.seed = 3;
  for (auto _ : state) {
    EmbeddingModel model = train(table, config, n, {}, 0);
    benchmark::DoNotOptimize(model.input[0]);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Train)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace
