#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mg2v/schema.hpp"

namespace mg2v {

struct MetaNode {
  std::string alias;
  std::string type;  // node type name, resolved against a Schema at validation
  int layer = 0;     // 1-based

  bool operator==(const MetaNode&) const = default;
};

struct MetaEdge {
  int src = -1;  // indices into MetaGraph::nodes
  int dst = -1;
  std::optional<std::string> label;  // when absent, qualification is by node type only

  bool operator==(const MetaEdge&) const = default;
};

// Layered DAG over node types with a single source (layer 1) and a single
// target (layer d) of equal type. Every edge goes from a lower to a strictly
// higher layer.
struct MetaGraph {
  std::string name;
  int layers = 0;
  std::vector<MetaNode> nodes;
  std::vector<MetaEdge> edges;
  int source = -1;  // index into nodes
  int target = -1;

  const MetaNode& node(int i) const { return nodes.at(i); }

  bool operator==(const MetaGraph&) const = default;
};

// DSL, line oriented, '#' comments:
//   metagraph <name>
//   layers <d>
//   node <alias> : <node_type> @ <layer>
//   edge <alias> -> <alias> [: <relation_label>]
// Structural invariants (single source/sink, increasing layers, source/target
// type equality, per-layer type uniqueness, determinism condition) are checked
// here; schema conformance is checked by validate().
MetaGraph parse_metagraph(const std::string& text);
MetaGraph load_metagraph(const std::string& path);
std::string serialize_metagraph(const MetaGraph& mg);  // parse(serialize(mg)) == mg

// Every meta-edge's (src type, dst type) and, when given, relation label must
// match a schema relation. Returns all violations, not just the first.
std::vector<std::string> validate(const MetaGraph& mg, const Schema& schema);

// Chain metagraph for a metapath type sequence, e.g. {A,P,V,P,A}. First and
// last type must agree; consecutive pairs must be schema relations.
MetaGraph chain_from_metapath(const std::vector<std::string>& types, const Schema& schema);

// Layer arithmetic of the infinite tail-head concatenation of a d-layer
// metagraph. Copies repeat with period d-1: layer d of one copy is the same
// position as layer 1 of the next.
struct RecursiveLayerMap {
  int d = 0;

  int period() const { return d - 1; }

  int base_layer(int i) const {
    if (i < 1) throw Error("recursive layer index must be >= 1, got " + std::to_string(i));
    if (i <= d) return i;
    return (i - 2) % (d - 1) + 2;
  }
};

struct TransitionOption {
  TypeId type = kNoType;  // node type of the next hop
  int next_layer = 0;     // recursive layer reached
  RelId rel = kNoRel;     // kNoRel when the meta-edge is unlabeled

  bool operator==(const TransitionOption&) const = default;
};

// The recursive metagraph 'automaton': the walkable view of a MetaGraph bound
// to a Schema. Immutable after construction; concurrent reads are safe.
class RecursiveMetagraph {
 public:
  RecursiveMetagraph(const MetaGraph& mg, const Schema& schema);

  int layers() const { return map_.d; }
  const RecursiveLayerMap& layer_map() const { return map_; }
  TypeId source_type() const { return source_type_; }
  const std::string& name() const { return name_; }

  // True if a node of type t can occupy recursive layer i.
  bool occupiable(int recursive_layer, TypeId t) const;

  // Transitions out of the meta-node of type src_type at recursive layer i.
  // At the seam (base layer d) the occupied target doubles as the next copy's
  // source, so its out-transitions are those of layer 1.
  std::vector<TransitionOption> allowed_transitions(int recursive_layer, TypeId src_type) const;

  // Zero-allocation variant used in walk inner loops: options relative to the
  // base layer; next_layer fields hold layer deltas to add to the current
  // recursive layer. Returns empty span for unoccupiable states.
  std::span<const TransitionOption> options_at(int recursive_layer, TypeId src_type) const;

 private:
  std::string name_;
  RecursiveLayerMap map_;
  TypeId source_type_ = kNoType;
  size_t num_types_ = 0;
  std::vector<int> slot_;  // (base_layer-1)*num_types + type -> meta node slot or -1
  std::vector<std::vector<TransitionOption>> deltas_;  // per slot, next_layer = delta
};

}  // namespace mg2v
