#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mg2v/metagraph.hpp"
#include "mg2v/rng.hpp"
#include "mg2v/typed_graph.hpp"

namespace mg2v {

struct WalkState {
  NodeId node = kNoNode;
  int layer = 1;  // recursive layer index, 1-based
  int steps = 0;
};

enum class WalkPolicyKind { metagraph, metapath, uniform };

struct WalkPolicy {
  WalkPolicyKind kind = WalkPolicyKind::uniform;
  const RecursiveMetagraph* rmg = nullptr;  // required for metagraph/metapath

  static WalkPolicy metagraph(const RecursiveMetagraph& rmg) {
    return {WalkPolicyKind::metagraph, &rmg};
  }
  static WalkPolicy metapath(const RecursiveMetagraph& chain) {
    return {WalkPolicyKind::metapath, &chain};
  }
  static WalkPolicy uniform() { return {WalkPolicyKind::uniform, nullptr}; }

  const char* name() const {
    switch (kind) {
      case WalkPolicyKind::metagraph: return "metagraph";
      case WalkPolicyKind::metapath: return "metapath";
      default: return "uniform";
    }
  }
};

struct WalkCorpus {
  std::vector<std::vector<NodeId>> walks;
  std::string policy;
  int length = 0;          // max walk length L, in nodes
  int walks_per_node = 0;  // gamma
  uint64_t seed = 0;
};

// Transition probabilities out of `state` (Pr of each qualified neighbor).
// Among the qualified (type, next layer) options the walk picks a realized
// option uniformly, then a neighbor of that type uniformly, so a neighbor u
// of qualified type t gets 1/T * 1/|neighbors_by_type(node, t)|. Empty result
// means dead end. Throws on a state whose node type cannot occupy its layer.
std::vector<std::pair<NodeId, double>> transition_distribution(const TypedGraph& g,
                                                               const RecursiveMetagraph& rmg,
                                                               const WalkState& state);

// One two-stage sampling step; returns false on dead end (state untouched).
bool step(const TypedGraph& g, const RecursiveMetagraph& rmg, WalkState& state, Pcg32& rng);

// Walk of at most max_length nodes starting at `start` (must have the
// metagraph's source type). Terminates early when no edge qualifies.
std::vector<NodeId> generate_walk(const TypedGraph& g, const RecursiveMetagraph& rmg,
                                  NodeId start, int max_length, Pcg32& rng);

// Uniform baseline: each step picks uniformly over all out-neighbors.
std::vector<NodeId> generate_uniform_walk(const TypedGraph& g, NodeId start, int max_length,
                                          Pcg32& rng);

// gamma walks from every start node (nodes of the source type for guided
// policies, every node for uniform). Walk (s, w) is driven by RNG substream
// s * gamma + w of `seed`, so the corpus is identical for any thread count.
WalkCorpus generate_corpus(const TypedGraph& g, const WalkPolicy& policy, int max_length,
                           int walks_per_node, uint64_t seed, int threads = 1);

// One walk per line, space-separated external node ids; '#' header comments
// record policy, length, walks-per-node and seed.
void save_corpus(const WalkCorpus& corpus, const TypedGraph& g, const std::string& path);
WalkCorpus load_corpus(const std::string& path, const TypedGraph& g);

}  // namespace mg2v
