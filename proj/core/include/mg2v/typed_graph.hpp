#pragma once

#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "mg2v/schema.hpp"

namespace mg2v {

// One adjacency bucket: all out-neighbors of a node sharing one node type.
struct NeighborBucket {
  TypeId type = kNoType;
  std::vector<NodeId> ids;                        // distinct neighbors, ascending
  std::vector<std::pair<NodeId, RelId>> edges;    // every typed edge into the bucket
};

struct EdgeRec {
  NodeId src;
  NodeId dst;
  RelId rel;
};

struct LoadStats {
  size_t nodes = 0;
  size_t edges = 0;               // forward edges kept
  size_t duplicates_dropped = 0;  // repeated (src, dst, label) lines
};

// Immutable multi-typed graph. Reverse edges are materialized at build time
// and adjacency is bucketed by neighbor node type, so walk-time lookups never
// need to consult the schema.
class TypedGraph {
 public:
  size_t num_nodes() const { return types_.size(); }
  size_t num_forward_edges() const { return forward_.size(); }
  const Schema& schema() const { return schema_; }
  const LoadStats& load_stats() const { return stats_; }

  TypeId node_type(NodeId v) const { return types_.at(v); }
  const std::string& node_name(NodeId v) const { return names_.at(v); }
  std::optional<NodeId> find_node(const std::string& name) const;
  NodeId node_id(const std::string& name) const;  // throws on unknown name

  // Out-neighbors of v with type t, ascending by id; empty span if none.
  std::span<const NodeId> neighbors_by_type(NodeId v, TypeId t) const;
  const std::vector<NeighborBucket>& buckets(NodeId v) const { return adjacency_.at(v); }
  size_t out_degree(NodeId v) const;  // distinct out-neighbors over all types

  const std::vector<EdgeRec>& forward_edges() const { return forward_; }
  std::vector<NodeId> nodes_of_type(TypeId t) const;
  size_t count_of_type(TypeId t) const;

  // Optional per-node class labels, evaluation only. -1 = unlabeled.
  bool has_labels() const { return !labels_.empty(); }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<std::string>& label_names() const { return label_names_; }
  void set_labels(std::vector<int> labels, std::vector<std::string> names);

  friend TypedGraph build_graph(
      Schema schema, const std::vector<std::pair<std::string, std::string>>& nodes,
      const std::vector<std::tuple<std::string, std::string, std::string>>& edges);

 private:
  Schema schema_;
  std::vector<std::string> names_;
  std::vector<TypeId> types_;
  std::unordered_map<std::string, NodeId> index_;
  std::vector<std::vector<NeighborBucket>> adjacency_;
  std::vector<EdgeRec> forward_;
  std::vector<int> labels_;
  std::vector<std::string> label_names_;
  LoadStats stats_;
};

// Node file: "<node_id> TAB <node_type>". Edge file: "<src> TAB <dst> TAB
// <label>", forward direction only; reverse edges are generated. '#' lines
// are comments.
TypedGraph load_graph(const std::string& node_file, const std::string& edge_file,
                      const Schema& schema);

// In-memory construction with (name, type name) nodes and (src, dst, label)
// edges; same validation as load_graph.
TypedGraph build_graph(Schema schema,
                       const std::vector<std::pair<std::string, std::string>>& nodes,
                       const std::vector<std::tuple<std::string, std::string, std::string>>& edges);

void save_graph(const TypedGraph& g, const std::string& node_file, const std::string& edge_file);

// Label file: "<node_id> TAB <label>". Unlisted nodes stay unlabeled.
void load_labels(TypedGraph& g, const std::string& path);
void save_labels(const TypedGraph& g, const std::string& path);

}  // namespace mg2v
