#pragma once

// Independent oracle for walk-constraint checks. Instead of layer arithmetic
// it literally unrolls the metagraph: copies are chained tail-to-head, the
// sink of one copy serving as the source of the next, and a type sequence is
// accepted iff a path through the unrolled instance DAG spells it. Kept free
// of RecursiveMetagraph/RecursiveLayerMap on purpose.

#include <algorithm>
#include <string>
#include <vector>

#include "mg2v/metagraph.hpp"
#include "mg2v/schema.hpp"

namespace mg2v::tests {

class UnrolledAutomaton {
 public:
  struct Instance {
    std::string type;    // node type name
    int recursive_layer; // position in the concatenation, 1-based
  };

  // copies >= max walk length is always enough: every step leaves the current
  // copy at most once.
  UnrolledAutomaton(const MetaGraph& mg, int copies) {
    const int d = mg.layers;
    std::vector<std::vector<int>> ids(copies, std::vector<int>(mg.nodes.size(), -1));
    for (int c = 0; c < copies; ++c) {
      for (size_t n = 0; n < mg.nodes.size(); ++n) {
        if (c > 0 && static_cast<int>(n) == mg.source) {
          // The source of copy c is the sink of copy c-1.
          ids[c][n] = ids[c - 1][mg.target];
          continue;
        }
        ids[c][n] = static_cast<int>(instances_.size());
        instances_.push_back({mg.nodes[n].type, c * (d - 1) + mg.nodes[n].layer});
      }
    }
    out_.resize(instances_.size());
    for (int c = 0; c < copies; ++c) {
      for (const MetaEdge& e : mg.edges) {
        out_[ids[c][e.src]].push_back(ids[c][e.dst]);
      }
    }
    start_ = ids[0][mg.source];
  }

  const std::vector<Instance>& instances() const { return instances_; }
  const std::vector<int>& successors(int instance) const { return out_[instance]; }
  int start_instance() const { return start_; }

  // Nondeterministic set simulation over instances.
  bool accepts(const std::vector<std::string>& type_sequence) const {
    if (type_sequence.empty()) return false;
    std::vector<int> frontier;
    if (instances_[start_].type == type_sequence[0]) frontier.push_back(start_);
    for (size_t i = 1; i < type_sequence.size() && !frontier.empty(); ++i) {
      std::vector<int> next;
      for (int inst : frontier) {
        for (int succ : out_[inst]) {
          if (instances_[succ].type != type_sequence[i]) continue;
          if (std::find(next.begin(), next.end(), succ) == next.end()) next.push_back(succ);
        }
      }
      frontier = std::move(next);
    }
    return !frontier.empty();
  }

 private:
  std::vector<Instance> instances_;
  std::vector<std::vector<int>> out_;
  int start_ = -1;
};

}  // namespace mg2v::tests
