#include "mg2v/metagraph.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace mg2v {

namespace {

// Whitespace-separated tokens of one DSL line, with their 1-based columns.
struct Line {
  int number = 0;
  std::vector<std::pair<std::string, int>> tokens;
};

std::vector<Line> tokenize(const std::string& text) {
  std::vector<Line> out;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    Line line{lineno, {}};
    std::string cur;
    int col = 0;
    for (size_t i = 0; i <= raw.size(); ++i) {
      char c = i < raw.size() ? raw[i] : ' ';
      if (c == '#') break;
      if (c == ' ' || c == '\t' || c == '\r') {
        if (!cur.empty()) {
          line.tokens.emplace_back(cur, col);
          cur.clear();
        }
      } else {
        if (cur.empty()) col = static_cast<int>(i) + 1;
        cur.push_back(c);
      }
    }
    if (!line.tokens.empty()) out.push_back(std::move(line));
  }
  return out;
}

int parse_int(const Line& line, size_t idx, const char* what) {
  const auto& [tok, col] = line.tokens[idx];
  try {
    size_t pos = 0;
    int v = std::stoi(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line.number, col, std::string(what) + " must be an integer, got '" + tok +
                                           "'");
  }
}

void expect_token(const Line& line, size_t idx, const std::string& want) {
  if (idx >= line.tokens.size()) {
    throw ParseError(line.number, 1, "expected '" + want + "'");
  }
  if (line.tokens[idx].first != want) {
    throw ParseError(line.number, line.tokens[idx].second,
                     "expected '" + want + "', got '" + line.tokens[idx].first + "'");
  }
}

// Structural invariants shared by the parser and chain_from_metapath. decl
// maps node/edge index to the declaring source line (0 when synthesized).
void check_structure(const MetaGraph& mg, const std::vector<int>& node_line,
                     const std::vector<int>& edge_line) {
  auto fail = [](int line, const std::string& msg) -> void {
    throw ParseError(line, 1, msg);
  };

  if (mg.layers < 2) fail(0, "metagraph needs at least 2 layers");
  if (mg.nodes.empty()) fail(0, "metagraph has no nodes");

  std::vector<bool> layer_used(static_cast<size_t>(mg.layers) + 1, false);
  for (size_t i = 0; i < mg.nodes.size(); ++i) {
    const MetaNode& n = mg.nodes[i];
    if (n.layer < 1 || n.layer > mg.layers) {
      fail(node_line[i], "node '" + n.alias + "' layer " + std::to_string(n.layer) +
                             " outside 1.." + std::to_string(mg.layers));
    }
    layer_used[n.layer] = true;
  }
  for (int l = 1; l <= mg.layers; ++l) {
    if (!layer_used[l]) fail(0, "layer " + std::to_string(l) + " has no nodes");
  }

  // Within a layer, node types must be distinct: (layer, observed node type)
  // has to identify the occupied meta-node.
  for (size_t i = 0; i < mg.nodes.size(); ++i) {
    for (size_t j = i + 1; j < mg.nodes.size(); ++j) {
      if (mg.nodes[i].layer == mg.nodes[j].layer && mg.nodes[i].type == mg.nodes[j].type) {
        fail(node_line[j], "duplicate type '" + mg.nodes[j].type + "' within layer " +
                               std::to_string(mg.nodes[j].layer));
      }
    }
  }

  std::vector<int> indeg(mg.nodes.size(), 0), outdeg(mg.nodes.size(), 0);
  for (size_t e = 0; e < mg.edges.size(); ++e) {
    const MetaEdge& m = mg.edges[e];
    const MetaNode& s = mg.nodes[m.src];
    const MetaNode& d = mg.nodes[m.dst];
    if (s.layer >= d.layer) {
      fail(edge_line[e], "edge " + s.alias + " -> " + d.alias + " must increase layer (" +
                             std::to_string(s.layer) + " -> " + std::to_string(d.layer) + ")");
    }
    ++outdeg[m.src];
    ++indeg[m.dst];
  }

  int source = -1, target = -1;
  for (size_t i = 0; i < mg.nodes.size(); ++i) {
    if (indeg[i] == 0) {
      if (source >= 0) {
        fail(node_line[i], "second source node '" + mg.nodes[i].alias + "' (also '" +
                               mg.nodes[source].alias + "')");
      }
      source = static_cast<int>(i);
    }
    if (outdeg[i] == 0) {
      if (target >= 0) {
        fail(node_line[i], "second sink node '" + mg.nodes[i].alias + "' (also '" +
                               mg.nodes[target].alias + "')");
      }
      target = static_cast<int>(i);
    }
  }
  if (source < 0) fail(0, "metagraph has no source node");  // unreachable given DAG layers
  if (target < 0) fail(0, "metagraph has no sink node");
  if (mg.nodes[source].layer != 1) {
    fail(node_line[source], "source node '" + mg.nodes[source].alias + "' must be at layer 1");
  }
  if (mg.nodes[target].layer != mg.layers) {
    fail(node_line[target], "sink node '" + mg.nodes[target].alias + "' must be at layer " +
                                std::to_string(mg.layers));
  }
  if (mg.nodes[source].type != mg.nodes[target].type) {
    fail(node_line[target], "source type '" + mg.nodes[source].type + "' and target type '" +
                                mg.nodes[target].type +
                                "' differ; recursion needs equal endpoint types");
  }
  if (source != mg.source || target != mg.target) {
    throw Error("metagraph source/target indices inconsistent");
  }

  // Determinism: a sampled neighbor's type must determine the next layer, so
  // the out-edges of one meta-node may not lead to two targets of equal type.
  for (size_t i = 0; i < mg.nodes.size(); ++i) {
    std::map<std::string, int> seen;  // target type -> edge index
    for (size_t e = 0; e < mg.edges.size(); ++e) {
      if (mg.edges[e].src != static_cast<int>(i)) continue;
      const std::string& t = mg.nodes[mg.edges[e].dst].type;
      auto [it, inserted] = seen.emplace(t, static_cast<int>(e));
      if (!inserted) {
        fail(edge_line[e], "determinism violation: node '" + mg.nodes[i].alias +
                               "' has two out-edges to targets of type '" + t + "'");
      }
    }
  }
}

}  // namespace

MetaGraph parse_metagraph(const std::string& text) {
  MetaGraph mg;
  std::vector<int> node_line, edge_line;
  std::map<std::string, int> alias_index;
  bool saw_header = false, saw_layers = false;

  for (const Line& line : tokenize(text)) {
    const std::string& kw = line.tokens[0].first;
    if (kw == "metagraph") {
      if (saw_header) throw ParseError(line.number, 1, "duplicate 'metagraph' line");
      if (line.tokens.size() != 2) throw ParseError(line.number, 1, "metagraph needs a name");
      mg.name = line.tokens[1].first;
      saw_header = true;
    } else if (kw == "layers") {
      if (!saw_header) throw ParseError(line.number, 1, "'layers' before 'metagraph' header");
      if (saw_layers) throw ParseError(line.number, 1, "duplicate 'layers' line");
      if (line.tokens.size() != 2) throw ParseError(line.number, 1, "layers needs a count");
      mg.layers = parse_int(line, 1, "layer count");
      saw_layers = true;
    } else if (kw == "node") {
      // node <alias> : <node_type> @ <layer>
      if (!saw_layers) throw ParseError(line.number, 1, "'node' before 'layers' line");
      if (line.tokens.size() != 6) {
        throw ParseError(line.number, 1, "node line needs 'node <alias> : <type> @ <layer>'");
      }
      expect_token(line, 2, ":");
      expect_token(line, 4, "@");
      MetaNode n{line.tokens[1].first, line.tokens[3].first, parse_int(line, 5, "layer")};
      auto [it, inserted] = alias_index.emplace(n.alias, static_cast<int>(mg.nodes.size()));
      if (!inserted) {
        throw ParseError(line.number, line.tokens[1].second,
                         "duplicate alias '" + n.alias + "'");
      }
      mg.nodes.push_back(std::move(n));
      node_line.push_back(line.number);
    } else if (kw == "edge") {
      // edge <alias> -> <alias> [: <label>]
      if (!saw_layers) throw ParseError(line.number, 1, "'edge' before 'layers' line");
      if (line.tokens.size() != 4 && line.tokens.size() != 6) {
        throw ParseError(line.number, 1,
                         "edge line needs 'edge <alias> -> <alias> [: <label>]'");
      }
      expect_token(line, 2, "->");
      MetaEdge e;
      auto src = alias_index.find(line.tokens[1].first);
      if (src == alias_index.end()) {
        throw ParseError(line.number, line.tokens[1].second,
                         "undeclared alias '" + line.tokens[1].first + "'");
      }
      auto dst = alias_index.find(line.tokens[3].first);
      if (dst == alias_index.end()) {
        throw ParseError(line.number, line.tokens[3].second,
                         "undeclared alias '" + line.tokens[3].first + "'");
      }
      e.src = src->second;
      e.dst = dst->second;
      if (line.tokens.size() == 6) {
        expect_token(line, 4, ":");
        e.label = line.tokens[5].first;
      }
      mg.edges.push_back(std::move(e));
      edge_line.push_back(line.number);
    } else {
      throw ParseError(line.number, line.tokens[0].second, "unknown keyword '" + kw + "'");
    }
  }

  if (!saw_header) throw ParseError(0, 1, "missing 'metagraph <name>' header");
  if (!saw_layers) throw ParseError(0, 1, "missing 'layers <d>' line");

  for (size_t i = 0; i < mg.nodes.size(); ++i) {
    bool has_in = false, has_out = false;
    for (const MetaEdge& e : mg.edges) {
      has_in |= e.dst == static_cast<int>(i);
      has_out |= e.src == static_cast<int>(i);
    }
    if (!has_in && mg.source < 0 && mg.nodes[i].layer == 1) mg.source = static_cast<int>(i);
    if (!has_out && mg.nodes[i].layer == mg.layers) mg.target = static_cast<int>(i);
  }
  // check_structure re-derives source/target and reports the precise error;
  // the assignments above just seed the fields it cross-checks.
  {
    int src = -1, tgt = -1;
    std::vector<int> indeg(mg.nodes.size(), 0), outdeg(mg.nodes.size(), 0);
    for (const MetaEdge& e : mg.edges) ++indeg[e.dst], ++outdeg[e.src];
    for (size_t i = 0; i < mg.nodes.size(); ++i) {
      if (indeg[i] == 0 && src < 0) src = static_cast<int>(i);
      if (outdeg[i] == 0) tgt = static_cast<int>(i);
    }
    mg.source = src;
    mg.target = tgt;
  }
  check_structure(mg, node_line, edge_line);
  return mg;
}

MetaGraph load_metagraph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open metagraph file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_metagraph(buf.str());
  } catch (const ParseError& e) {
    throw Error(path + ":" + e.what());
  }
}

std::string serialize_metagraph(const MetaGraph& mg) {
  std::ostringstream out;
  out << "metagraph " << mg.name << "\n";
  out << "layers " << mg.layers << "\n";
  std::vector<int> order(mg.nodes.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::tie(mg.nodes[a].layer, mg.nodes[a].type, mg.nodes[a].alias) <
           std::tie(mg.nodes[b].layer, mg.nodes[b].type, mg.nodes[b].alias);
  });
  for (int i : order) {
    const MetaNode& n = mg.nodes[i];
    out << "node " << n.alias << " : " << n.type << " @ " << n.layer << "\n";
  }
  std::vector<int> pos(mg.nodes.size());
  for (size_t i = 0; i < order.size(); ++i) pos[order[i]] = static_cast<int>(i);
  std::vector<int> eorder(mg.edges.size());
  for (size_t i = 0; i < eorder.size(); ++i) eorder[i] = static_cast<int>(i);
  std::sort(eorder.begin(), eorder.end(), [&](int a, int b) {
    return std::tie(pos[mg.edges[a].src], pos[mg.edges[a].dst]) <
           std::tie(pos[mg.edges[b].src], pos[mg.edges[b].dst]);
  });
  for (int i : eorder) {
    const MetaEdge& e = mg.edges[i];
    out << "edge " << mg.nodes[e.src].alias << " -> " << mg.nodes[e.dst].alias;
    if (e.label) out << " : " << *e.label;
    out << "\n";
  }
  return out.str();
}

std::vector<std::string> validate(const MetaGraph& mg, const Schema& schema) {
  std::vector<std::string> errors;
  for (const MetaNode& n : mg.nodes) {
    if (!schema.find_type(n.type)) {
      errors.push_back("node '" + n.alias + "': unknown node type '" + n.type + "'");
    }
  }
  for (const MetaEdge& e : mg.edges) {
    const MetaNode& s = mg.nodes[e.src];
    const MetaNode& d = mg.nodes[e.dst];
    auto st = schema.find_type(s.type);
    auto dt = schema.find_type(d.type);
    if (!st || !dt) continue;  // reported above
    if (e.label) {
      if (!schema.find_relation(*st, *e.label, *dt)) {
        errors.push_back("edge " + s.alias + " -> " + d.alias + ": no schema relation " +
                         s.type + " -" + *e.label + "-> " + d.type);
      }
    } else if (!schema.has_relation_between(*st, *dt)) {
      errors.push_back("edge " + s.alias + " -> " + d.alias + ": no schema relation between " +
                       s.type + " and " + d.type);
    }
  }
  return errors;
}

MetaGraph chain_from_metapath(const std::vector<std::string>& types, const Schema& schema) {
  if (types.size() < 3) {
    throw Error("metapath needs at least 3 node types, got " + std::to_string(types.size()));
  }
  if (types.front() != types.back()) {
    throw Error("metapath endpoints must have equal type for recursion, got '" + types.front() +
                "' and '" + types.back() + "'");
  }
  MetaGraph mg;
  mg.name = "metapath";
  mg.layers = static_cast<int>(types.size());
  for (size_t i = 0; i < types.size(); ++i) {
    schema.type_id(types[i]);  // throws on unknown type
    mg.nodes.push_back({"n" + std::to_string(i + 1), types[i], static_cast<int>(i + 1)});
    if (i > 0) {
      if (!schema.has_relation_between(schema.type_id(types[i - 1]), schema.type_id(types[i]))) {
        throw Error("metapath pair " + types[i - 1] + " -> " + types[i] +
                    " matches no schema relation");
      }
      mg.edges.push_back({static_cast<int>(i - 1), static_cast<int>(i), std::nullopt});
    }
  }
  mg.source = 0;
  mg.target = static_cast<int>(mg.nodes.size()) - 1;
  check_structure(mg, std::vector<int>(mg.nodes.size(), 0),
                  std::vector<int>(mg.edges.size(), 0));
  return mg;
}

RecursiveMetagraph::RecursiveMetagraph(const MetaGraph& mg, const Schema& schema)
    : name_(mg.name), map_{mg.layers} {
  auto errs = validate(mg, schema);
  if (!errs.empty()) {
    std::string msg = "metagraph '" + mg.name + "' does not fit the schema:";
    for (const auto& e : errs) msg += "\n  - " + e;
    throw Error(msg);
  }
  num_types_ = schema.num_types();
  source_type_ = schema.type_id(mg.nodes.at(mg.source).type);

  slot_.assign(static_cast<size_t>(mg.layers) * num_types_, -1);
  deltas_.resize(mg.nodes.size());
  for (size_t i = 0; i < mg.nodes.size(); ++i) {
    const MetaNode& n = mg.nodes[i];
    slot_[(n.layer - 1) * num_types_ + schema.type_id(n.type)] = static_cast<int>(i);
  }

  auto resolve_rel = [&](const MetaEdge& e) -> RelId {
    if (!e.label) return kNoRel;
    TypeId st = schema.type_id(mg.nodes[e.src].type);
    TypeId dt = schema.type_id(mg.nodes[e.dst].type);
    return *schema.find_relation(st, *e.label, dt);  // validated above
  };

  for (const MetaEdge& e : mg.edges) {
    const MetaNode& s = mg.nodes[e.src];
    const MetaNode& d = mg.nodes[e.dst];
    deltas_[e.src].push_back(
        {schema.type_id(d.type), d.layer - s.layer, resolve_rel(e)});
  }
  // Seam: the target doubles as the next copy's source. A source edge to base
  // layer t has delta t - 1, which is also the recursive-layer delta when
  // leaving the seam.
  for (const TransitionOption& opt : deltas_[mg.source]) {
    deltas_[mg.target].push_back(opt);
  }
}

bool RecursiveMetagraph::occupiable(int recursive_layer, TypeId t) const {
  int b = map_.base_layer(recursive_layer);
  if (t < 0 || static_cast<size_t>(t) >= num_types_) return false;
  return slot_[(b - 1) * num_types_ + t] >= 0;
}

std::span<const TransitionOption> RecursiveMetagraph::options_at(int recursive_layer,
                                                                 TypeId t) const {
  int b = map_.base_layer(recursive_layer);
  if (t < 0 || static_cast<size_t>(t) >= num_types_) return {};
  int slot = slot_[(b - 1) * num_types_ + t];
  if (slot < 0) return {};
  return {deltas_[slot].data(), deltas_[slot].size()};
}

std::vector<TransitionOption> RecursiveMetagraph::allowed_transitions(int recursive_layer,
                                                                      TypeId src_type) const {
  std::vector<TransitionOption> out;
  for (const TransitionOption& opt : options_at(recursive_layer, src_type)) {
    out.push_back({opt.type, recursive_layer + opt.next_layer, opt.rel});
  }
  return out;
}

}  // namespace mg2v
