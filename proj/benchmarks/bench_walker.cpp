#include <benchmark/benchmark.h>

#include "mg2v/metagraph.hpp"
#include "mg2v/synth.hpp"
#include "mg2v/walker.hpp"

namespace {

using namespace mg2v;

const char* kMetagraph =
    "metagraph bench\n"
    "layers 5\n"
    "node a1 : A @ 1\nnode p1 : P @ 2\nnode v : V @ 3\nnode a2 : A @ 3\n"
    "node p2 : P @ 4\nnode a3 : A @ 5\n"
    "edge a1 -> p1\nedge p1 -> v\nedge p1 -> a2\nedge v -> p2\n"
    "edge a2 -> p2\nedge p2 -> a3\n";

TypedGraph bench_graph() {
  SynthConfig cfg;
  cfg.communities = 4;
  cfg.authors_per_community = 250;
  cfg.papers_per_community = 400;
  cfg.venues_per_community = 5;
  cfg.cross_community_prob = 0.05;
  cfg.seed = 9;
  return sparsify_venues(generate_hin(cfg), 0.2, 10);
}

void BM_GuidedStep(benchmark::State& state) {
  TypedGraph g = bench_graph();
  RecursiveMetagraph rmg(parse_metagraph(kMetagraph), g.schema());
  NodeId start = g.nodes_of_type(g.schema().type_id("A"))[0];
  Pcg32 rng(1, 1);
  WalkState s{start, 1, 0};
  for (auto _ : state) {
    if (!step(g, rmg, s, rng)) s = {start, 1, 0};
    benchmark::DoNotOptimize(s.node);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_GuidedStep);

void BM_CorpusGeneration(benchmark::State& state) {
  TypedGraph g = bench_graph();
  RecursiveMetagraph rmg(parse_metagraph(kMetagraph), g.schema());
  WalkPolicy policy = WalkPolicy::metagraph(rmg);
  int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    WalkCorpus corpus = generate_corpus(g, policy, 100, 2, 5, threads);
    benchmark::DoNotOptimize(corpus.walks.size());
  }
  state.SetItemsProcessed(state.iterations() * 2 * 1000 * 100);  // ~nodes emitted
}
BENCHMARK(BM_CorpusGeneration)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace
