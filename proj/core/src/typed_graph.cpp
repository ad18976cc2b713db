#include "mg2v/typed_graph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace mg2v {

namespace {

// Splits a data line on tabs (falling back to runs of spaces so hand-written
// fixtures work too). Returns empty for blank and '#' comment lines.
std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  size_t i = 0;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  if (i >= line.size() || line[i] == '#') return fields;
  std::string cur;
  for (; i < line.size(); ++i) {
    char c = line[i];
    if (c == '\t' || c == ' ' || c == '\r') {
      if (!cur.empty()) fields.push_back(std::move(cur)), cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) fields.push_back(std::move(cur));
  return fields;
}

}  // namespace

std::optional<NodeId> TypedGraph::find_node(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NodeId TypedGraph::node_id(const std::string& name) const {
  auto v = find_node(name);
  if (!v) throw Error("unknown node id '" + name + "'");
  return *v;
}

std::span<const NodeId> TypedGraph::neighbors_by_type(NodeId v, TypeId t) const {
  if (v < 0 || static_cast<size_t>(v) >= num_nodes()) {
    throw Error("node id out of range: " + std::to_string(v));
  }
  if (t < 0 || static_cast<size_t>(t) >= schema_.num_types()) {
    throw Error("node type id out of range: " + std::to_string(t));
  }
  for (const NeighborBucket& b : adjacency_[v]) {
    if (b.type == t) return {b.ids.data(), b.ids.size()};
  }
  return {};
}

size_t TypedGraph::out_degree(NodeId v) const {
  size_t n = 0;
  for (const NeighborBucket& b : adjacency_.at(v)) n += b.ids.size();
  return n;
}

std::vector<NodeId> TypedGraph::nodes_of_type(TypeId t) const {
  std::vector<NodeId> out;
  for (size_t v = 0; v < types_.size(); ++v) {
    if (types_[v] == t) out.push_back(static_cast<NodeId>(v));
  }
  return out;
}

size_t TypedGraph::count_of_type(TypeId t) const {
  return static_cast<size_t>(std::count(types_.begin(), types_.end(), t));
}

void TypedGraph::set_labels(std::vector<int> labels, std::vector<std::string> names) {
  if (labels.size() != types_.size()) {
    throw Error("label vector size " + std::to_string(labels.size()) + " != node count " +
                std::to_string(types_.size()));
  }
  labels_ = std::move(labels);
  label_names_ = std::move(names);
}

TypedGraph build_graph(Schema schema,
                       const std::vector<std::pair<std::string, std::string>>& nodes,
                       const std::vector<std::tuple<std::string, std::string, std::string>>& edges) {
  TypedGraph g;
  g.schema_ = std::move(schema);

  g.names_.reserve(nodes.size());
  g.types_.reserve(nodes.size());
  for (const auto& [name, type_name] : nodes) {
    auto t = g.schema_.find_type(type_name);
    if (!t) throw Error("node '" + name + "' has unknown type '" + type_name + "'");
    auto [it, inserted] = g.index_.emplace(name, static_cast<NodeId>(g.names_.size()));
    if (!inserted) throw Error("duplicate node id '" + name + "'");
    g.names_.push_back(name);
    g.types_.push_back(*t);
  }

  // Directed (neighbor, relation) pairs per node, reverses included.
  std::vector<std::vector<std::pair<NodeId, RelId>>> adj(g.names_.size());
  std::vector<uint64_t> seen;
  seen.reserve(edges.size());
  g.forward_.reserve(edges.size());

  for (const auto& [src_name, dst_name, label] : edges) {
    auto src = g.find_node(src_name);
    if (!src) throw Error("edge references undeclared node id '" + src_name + "'");
    auto dst = g.find_node(dst_name);
    if (!dst) throw Error("edge references undeclared node id '" + dst_name + "'");
    if (*src == *dst) {
      throw Error("self-loop rejected: " + src_name + " -" + label + "-> " + dst_name);
    }
    auto rel = g.schema_.find_relation(g.types_[*src], label, g.types_[*dst]);
    if (!rel) {
      throw Error("edge " + src_name + " -" + label + "-> " + dst_name +
                  " does not match any schema relation for types " +
                  g.schema_.type_name(g.types_[*src]) + " -> " +
                  g.schema_.type_name(g.types_[*dst]));
    }
    // Reverse directions are materialized automatically and may not be
    // declared in the input.
    if (g.schema_.is_reverse(*rel)) {
      throw Error("edge " + src_name + " -" + label + "-> " + dst_name +
                  " uses the generated reverse relation; declare " + dst_name + " -" +
                  Schema::reverse_label(label) + "-> " + src_name + " instead");
    }
    g.forward_.push_back({*src, *dst, *rel});
  }

  // Collapse duplicate (src, dst, rel) triples; the walk distribution is over
  // neighbor sets, not multisets.
  std::sort(g.forward_.begin(), g.forward_.end(), [](const EdgeRec& a, const EdgeRec& b) {
    return std::tie(a.src, a.dst, a.rel) < std::tie(b.src, b.dst, b.rel);
  });
  size_t before = g.forward_.size();
  g.forward_.erase(std::unique(g.forward_.begin(), g.forward_.end(),
                               [](const EdgeRec& a, const EdgeRec& b) {
                                 return a.src == b.src && a.dst == b.dst && a.rel == b.rel;
                               }),
                   g.forward_.end());
  g.stats_.duplicates_dropped = before - g.forward_.size();

  for (const EdgeRec& e : g.forward_) {
    adj[e.src].emplace_back(e.dst, e.rel);
    adj[e.dst].emplace_back(e.src, g.schema_.reverse(e.rel));
  }

  g.adjacency_.resize(g.names_.size());
  for (size_t v = 0; v < adj.size(); ++v) {
    auto& pairs = adj[v];
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    std::vector<NeighborBucket>& buckets = g.adjacency_[v];
    for (const auto& [nbr, rel] : pairs) {
      TypeId t = g.types_[nbr];
      auto it = std::find_if(buckets.begin(), buckets.end(),
                             [t](const NeighborBucket& b) { return b.type == t; });
      if (it == buckets.end()) {
        buckets.push_back({t, {}, {}});
        it = buckets.end() - 1;
      }
      if (it->ids.empty() || it->ids.back() != nbr) it->ids.push_back(nbr);
      it->edges.emplace_back(nbr, rel);
    }
    std::sort(buckets.begin(), buckets.end(),
              [](const NeighborBucket& a, const NeighborBucket& b) { return a.type < b.type; });
  }

  g.stats_.nodes = g.names_.size();
  g.stats_.edges = g.forward_.size();
  return g;
}

TypedGraph load_graph(const std::string& node_file, const std::string& edge_file,
                      const Schema& schema) {
  std::ifstream nin(node_file);
  if (!nin) throw Error("cannot open node file: " + node_file);
  std::vector<std::pair<std::string, std::string>> nodes;
  std::string line;
  int lineno = 0;
  while (std::getline(nin, line)) {
    ++lineno;
    auto f = split_fields(line);
    if (f.empty()) continue;
    if (f.size() != 2) {
      throw ParseError(lineno, 1, "node line needs '<node_id> TAB <node_type>'");
    }
    nodes.emplace_back(f[0], f[1]);
  }

  std::ifstream ein(edge_file);
  if (!ein) throw Error("cannot open edge file: " + edge_file);
  std::vector<std::tuple<std::string, std::string, std::string>> edges;
  lineno = 0;
  while (std::getline(ein, line)) {
    ++lineno;
    auto f = split_fields(line);
    if (f.empty()) continue;
    if (f.size() != 3) {
      throw ParseError(lineno, 1, "edge line needs '<src_id> TAB <dst_id> TAB <label>'");
    }
    edges.emplace_back(f[0], f[1], f[2]);
  }

  return build_graph(schema, nodes, edges);
}

void save_graph(const TypedGraph& g, const std::string& node_file, const std::string& edge_file) {
  std::ofstream nout(node_file);
  if (!nout) throw Error("cannot write node file: " + node_file);
  for (size_t v = 0; v < g.num_nodes(); ++v) {
    nout << g.node_name(static_cast<NodeId>(v)) << "\t"
         << g.schema().type_name(g.node_type(static_cast<NodeId>(v))) << "\n";
  }
  std::ofstream eout(edge_file);
  if (!eout) throw Error("cannot write edge file: " + edge_file);
  for (const EdgeRec& e : g.forward_edges()) {
    eout << g.node_name(e.src) << "\t" << g.node_name(e.dst) << "\t"
         << g.schema().relation(e.rel).label << "\n";
  }
}

void load_labels(TypedGraph& g, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open label file: " + path);
  std::vector<int> labels(g.num_nodes(), -1);
  std::vector<std::string> names;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto f = split_fields(line);
    if (f.empty()) continue;
    if (f.size() != 2) throw ParseError(lineno, 1, "label line needs '<node_id> TAB <label>'");
    auto v = g.find_node(f[0]);
    if (!v) throw Error("label file references unknown node '" + f[0] + "'");
    auto it = std::find(names.begin(), names.end(), f[1]);
    int lab;
    if (it == names.end()) {
      lab = static_cast<int>(names.size());
      names.push_back(f[1]);
    } else {
      lab = static_cast<int>(it - names.begin());
    }
    labels[*v] = lab;
  }
  g.set_labels(std::move(labels), std::move(names));
}

void save_labels(const TypedGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write label file: " + path);
  if (!g.has_labels()) return;
  for (size_t v = 0; v < g.num_nodes(); ++v) {
    int lab = g.labels()[v];
    if (lab < 0) continue;
    const std::string& name = static_cast<size_t>(lab) < g.label_names().size()
                                  ? g.label_names()[lab]
                                  : std::to_string(lab);
    out << g.node_name(static_cast<NodeId>(v)) << "\t" << name << "\n";
  }
}

}  // namespace mg2v
