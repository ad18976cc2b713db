#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mg2v/typed_graph.hpp"
#include "mg2v/walker.hpp"

namespace mg2v {

// Co-occurrence counts of (center, context) pairs within a window. Stored as
// parallel arrays sorted by packed key, which is what the alias-table build
// and the binary cache want anyway.
struct PairFrequencyTable {
  int window = 0;
  NodeId num_nodes = 0;
  std::vector<uint64_t> keys;    // (center << 32) | context, ascending
  std::vector<uint32_t> counts;  // parallel to keys, all >= 1
  uint64_t total = 0;            // sum of counts
  std::vector<uint64_t> context_count;  // per node: occurrences as context

  static uint64_t key(NodeId center, NodeId context) {
    return (static_cast<uint64_t>(static_cast<uint32_t>(center)) << 32) |
           static_cast<uint32_t>(context);
  }
  static NodeId center_of(uint64_t k) { return static_cast<NodeId>(k >> 32); }
  static NodeId context_of(uint64_t k) { return static_cast<NodeId>(k & 0xffffffffULL); }

  size_t size() const { return keys.size(); }
  bool empty() const { return keys.empty(); }
  uint32_t count(NodeId center, NodeId context) const;

  // Context-count marginals accumulated per node type.
  std::vector<uint64_t> context_count_by_type(const std::vector<TypeId>& types,
                                              size_t num_types) const;
};

// For each walk position i, every j != i with |j - i| <= window contributes
// one (v_i, v_j) pair. Memory-bounded: keys are accumulated in chunks of
// chunk_hint entries, sorted and merged.
PairFrequencyTable count_pairs(const WalkCorpus& corpus, int window, NodeId num_nodes,
                               size_t chunk_hint = size_t(1) << 23);

// Versioned binary cache of (center, context, count) triples.
void save_pair_table(const PairFrequencyTable& table, const std::string& path);
PairFrequencyTable load_pair_table(const std::string& path);

}  // namespace mg2v
