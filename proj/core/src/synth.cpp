#include "mg2v/synth.hpp"

#include <algorithm>

#include "mg2v/rng.hpp"

namespace mg2v {

void SynthConfig::validate() const {
  if (communities < 1) throw Error("synth: need at least one community");
  if (authors_per_community < 1 || papers_per_community < 1 || venues_per_community < 1) {
    throw Error("synth: per-community counts must be >= 1");
  }
  if (min_authors_per_paper < 1 || max_authors_per_paper < min_authors_per_paper) {
    throw Error("synth: authors-per-paper range invalid");
  }
  if (venue_retention < 0.0 || venue_retention > 1.0) {
    throw Error("synth: venue retention must be in [0,1]");
  }
  if (cross_community_prob < 0.0 || cross_community_prob > 1.0) {
    throw Error("synth: cross-community probability must be in [0,1]");
  }
  if (cross_community_prob > 0.0 && communities < 2) {
    throw Error("synth: cross-community edges need at least 2 communities");
  }
  if (max_authors_per_paper > authors_per_community) {
    throw Error("synth: max authors per paper exceeds community author count");
  }
}

TypedGraph generate_hin(const SynthConfig& config) {
  config.validate();
  Pcg32 rng = substream(config.seed, 0x73796e74);

  Schema schema;
  schema.add_node_type("A");
  schema.add_node_type("P");
  schema.add_node_type("V");
  schema.add_relation("A", "write", "P");
  schema.add_relation("V", "publish", "P");
  if (config.cite_edges) schema.add_relation("P", "cite", "P");

  const int C = config.communities;
  const int nA = config.authors_per_community;
  const int nP = config.papers_per_community;
  const int nV = config.venues_per_community;

  std::vector<std::pair<std::string, std::string>> nodes;
  nodes.reserve(static_cast<size_t>(C) * (nA + nP + nV));
  std::vector<int> labels;
  auto author_name = [&](int c, int i) { return "a_" + std::to_string(c * nA + i); };
  auto paper_name = [&](int c, int i) { return "p_" + std::to_string(c * nP + i); };
  auto venue_name = [&](int c, int i) { return "v_" + std::to_string(c * nV + i); };

  for (int c = 0; c < C; ++c) {
    for (int i = 0; i < nA; ++i) nodes.emplace_back(author_name(c, i), "A");
  }
  for (int c = 0; c < C; ++c) {
    for (int i = 0; i < nP; ++i) nodes.emplace_back(paper_name(c, i), "P");
  }
  for (int c = 0; c < C; ++c) {
    for (int i = 0; i < nV; ++i) nodes.emplace_back(venue_name(c, i), "V");
  }

  auto pick_community = [&](int own) {
    if (config.cross_community_prob > 0.0 && rng.uniform() < config.cross_community_prob) {
      int other = static_cast<int>(rng.bounded(static_cast<uint32_t>(C - 1)));
      return other >= own ? other + 1 : other;
    }
    return own;
  };

  std::vector<std::tuple<std::string, std::string, std::string>> edges;
  std::vector<int> chosen;
  for (int c = 0; c < C; ++c) {
    for (int p = 0; p < nP; ++p) {
      int span = config.max_authors_per_paper - config.min_authors_per_paper + 1;
      int n_authors = config.min_authors_per_paper +
                      static_cast<int>(rng.bounded(static_cast<uint32_t>(span)));
      chosen.clear();
      for (int a = 0; a < n_authors; ++a) {
        int ac = pick_community(c);
        int global = ac * nA + static_cast<int>(rng.bounded(static_cast<uint32_t>(nA)));
        if (std::find(chosen.begin(), chosen.end(), global) != chosen.end()) continue;
        chosen.push_back(global);
        edges.emplace_back("a_" + std::to_string(global), paper_name(c, p), "write");
      }
      if (rng.uniform() < config.venue_retention) {
        int vc = pick_community(c);
        int v = static_cast<int>(rng.bounded(static_cast<uint32_t>(nV)));
        edges.emplace_back(venue_name(vc, v), paper_name(c, p), "publish");
      }
      if (config.cite_edges && p > 0 && rng.uniform() < 0.3) {
        int q = static_cast<int>(rng.bounded(static_cast<uint32_t>(p)));
        edges.emplace_back(paper_name(c, p), paper_name(c, q), "cite");
      }
    }
  }

  TypedGraph g = build_graph(std::move(schema), nodes, edges);
  labels.assign(g.num_nodes(), -1);
  std::vector<std::string> label_names;
  for (int c = 0; c < C; ++c) label_names.push_back("community_" + std::to_string(c));
  for (int c = 0; c < C; ++c) {
    for (int i = 0; i < nA; ++i) labels[g.node_id(author_name(c, i))] = c;
  }
  g.set_labels(std::move(labels), std::move(label_names));
  return g;
}

TypedGraph sparsify_venues(const TypedGraph& g, double fraction, uint64_t seed) {
  if (fraction < 0.0 || fraction > 1.0) throw Error("sparsify fraction must be in [0,1]");
  auto ptype = g.schema().find_type("P");
  if (!ptype) throw Error("sparsify_venues: graph has no node type 'P'");

  std::vector<NodeId> papers = g.nodes_of_type(*ptype);
  size_t n_remove = static_cast<size_t>(fraction * static_cast<double>(papers.size()));
  Pcg32 rng = substream(seed, 0x73707273);
  for (size_t i = 0; i < n_remove; ++i) {
    size_t j = i + rng.bounded(static_cast<uint32_t>(papers.size() - i));
    std::swap(papers[i], papers[j]);
  }
  std::vector<char> venueless(g.num_nodes(), 0);
  for (size_t i = 0; i < n_remove; ++i) venueless[papers[i]] = 1;

  std::vector<std::pair<std::string, std::string>> nodes;
  nodes.reserve(g.num_nodes());
  for (size_t v = 0; v < g.num_nodes(); ++v) {
    nodes.emplace_back(g.node_name(static_cast<NodeId>(v)),
                       g.schema().type_name(g.node_type(static_cast<NodeId>(v))));
  }
  std::vector<std::tuple<std::string, std::string, std::string>> edges;
  edges.reserve(g.num_forward_edges());
  for (const EdgeRec& e : g.forward_edges()) {
    const Relation& rel = g.schema().relation(e.rel);
    bool is_publish = rel.label == "publish" || rel.label == "publish^-1";
    if (is_publish && (venueless[e.src] || venueless[e.dst])) continue;
    edges.emplace_back(g.node_name(e.src), g.node_name(e.dst), rel.label);
  }

  TypedGraph out = build_graph(g.schema(), nodes, edges);
  if (g.has_labels()) {
    // Node order is preserved, labels carry over directly.
    out.set_labels(g.labels(), g.label_names());
  }
  return out;
}

void save_hin_files(const TypedGraph& g, const std::string& prefix) {
  save_graph(g, prefix + ".nodes", prefix + ".edges");
  g.schema().save(prefix + ".schema");
  save_labels(g, prefix + ".labels");
}

}  // namespace mg2v
