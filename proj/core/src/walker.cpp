#include "mg2v/walker.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <thread>

namespace mg2v {

namespace {

constexpr size_t kMaxOptions = 64;  // metagraph layers are small

// Realized transition options out of a state: for each allowed (type, layer)
// whose neighbor set is non-empty, the neighbor ids to draw from. Label-
// restricted options filter the bucket's typed edges first.
struct RealizedOption {
  TransitionOption opt;
  std::span<const NodeId> neighbors;        // used when opt.rel == kNoRel
  std::vector<NodeId> filtered;             // storage for label-filtered neighbors
};

void check_state(const TypedGraph& g, const RecursiveMetagraph& rmg, const WalkState& state) {
  if (state.node < 0 || static_cast<size_t>(state.node) >= g.num_nodes()) {
    throw Error("walk state: node id out of range: " + std::to_string(state.node));
  }
  if (!rmg.occupiable(state.layer, g.node_type(state.node))) {
    throw Error("walk state: node '" + g.node_name(state.node) + "' of type '" +
                g.schema().type_name(g.node_type(state.node)) +
                "' cannot occupy recursive layer " + std::to_string(state.layer));
  }
}

size_t realize_options(const TypedGraph& g, const RecursiveMetagraph& rmg,
                       const WalkState& state, RealizedOption* out) {
  size_t n = 0;
  for (const TransitionOption& opt : rmg.options_at(state.layer, g.node_type(state.node))) {
    std::span<const NodeId> ids = g.neighbors_by_type(state.node, opt.type);
    if (ids.empty()) continue;
    RealizedOption& r = out[n];
    r.opt = {opt.type, state.layer + opt.next_layer, opt.rel};
    r.filtered.clear();
    if (opt.rel == kNoRel) {
      r.neighbors = ids;
    } else {
      for (const NeighborBucket& b : g.buckets(state.node)) {
        if (b.type != opt.type) continue;
        for (const auto& [nbr, rel] : b.edges) {
          if (rel == opt.rel) r.filtered.push_back(nbr);
        }
        break;
      }
      if (r.filtered.empty()) continue;
      r.neighbors = {r.filtered.data(), r.filtered.size()};
    }
    if (++n == kMaxOptions) break;
  }
  return n;
}

}  // namespace

std::vector<std::pair<NodeId, double>> transition_distribution(const TypedGraph& g,
                                                               const RecursiveMetagraph& rmg,
                                                               const WalkState& state) {
  check_state(g, rmg, state);
  RealizedOption options[kMaxOptions];
  size_t n_opts = realize_options(g, rmg, state, options);
  std::vector<std::pair<NodeId, double>> dist;
  if (n_opts == 0) return dist;
  for (size_t i = 0; i < n_opts; ++i) {
    double p = 1.0 / (static_cast<double>(n_opts) * static_cast<double>(options[i].neighbors.size()));
    for (NodeId u : options[i].neighbors) dist.emplace_back(u, p);
  }
  std::sort(dist.begin(), dist.end());
  return dist;
}

bool step(const TypedGraph& g, const RecursiveMetagraph& rmg, WalkState& state, Pcg32& rng) {
  check_state(g, rmg, state);
  RealizedOption options[kMaxOptions];
  size_t n_opts = realize_options(g, rmg, state, options);
  if (n_opts == 0) return false;
  // Two-stage sampling: a qualified edge type uniformly, then an edge of that
  // type uniformly.
  const RealizedOption& pick = options[rng.bounded(static_cast<uint32_t>(n_opts))];
  NodeId next = pick.neighbors[rng.bounded(static_cast<uint32_t>(pick.neighbors.size()))];
  state.node = next;
  state.layer = pick.opt.next_layer;
  state.steps += 1;
  return true;
}

std::vector<NodeId> generate_walk(const TypedGraph& g, const RecursiveMetagraph& rmg,
                                  NodeId start, int max_length, Pcg32& rng) {
  if (g.node_type(start) != rmg.source_type()) {
    throw Error("walk start node '" + g.node_name(start) + "' must have source type '" +
                g.schema().type_name(rmg.source_type()) + "'");
  }
  std::vector<NodeId> walk;
  if (max_length < 1) return walk;
  walk.reserve(max_length);
  walk.push_back(start);
  WalkState state{start, 1, 0};
  while (static_cast<int>(walk.size()) < max_length && step(g, rmg, state, rng)) {
    walk.push_back(state.node);
  }
  return walk;
}

std::vector<NodeId> generate_uniform_walk(const TypedGraph& g, NodeId start, int max_length,
                                          Pcg32& rng) {
  std::vector<NodeId> walk;
  if (max_length < 1) return walk;
  walk.reserve(max_length);
  walk.push_back(start);
  NodeId cur = start;
  while (static_cast<int>(walk.size()) < max_length) {
    const auto& buckets = g.buckets(cur);
    size_t degree = 0;
    for (const NeighborBucket& b : buckets) degree += b.ids.size();
    if (degree == 0) break;
    size_t pick = rng.bounded(static_cast<uint32_t>(degree));
    for (const NeighborBucket& b : buckets) {
      if (pick < b.ids.size()) {
        cur = b.ids[pick];
        break;
      }
      pick -= b.ids.size();
    }
    walk.push_back(cur);
  }
  return walk;
}

WalkCorpus generate_corpus(const TypedGraph& g, const WalkPolicy& policy, int max_length,
                           int walks_per_node, uint64_t seed, int threads) {
  if (max_length < 1) throw Error("walk length must be >= 1");
  if (walks_per_node < 0) throw Error("walks per node must be >= 0");
  const bool guided = policy.kind != WalkPolicyKind::uniform;
  if (guided && policy.rmg == nullptr) throw Error("guided walk policy needs a metagraph");

  std::vector<NodeId> starts;
  if (guided) {
    starts = g.nodes_of_type(policy.rmg->source_type());
    if (starts.empty()) {
      throw Error("no start nodes: graph has no node of source type '" +
                  g.schema().type_name(policy.rmg->source_type()) + "'");
    }
  } else {
    starts.resize(g.num_nodes());
    for (size_t v = 0; v < starts.size(); ++v) starts[v] = static_cast<NodeId>(v);
  }

  WalkCorpus corpus;
  corpus.policy = policy.name();
  corpus.length = max_length;
  corpus.walks_per_node = walks_per_node;
  corpus.seed = seed;
  corpus.walks.resize(starts.size() * static_cast<size_t>(walks_per_node));

  // Walk (s, w) fills slot s * gamma + w from its own RNG substream, so the
  // corpus does not depend on how start nodes are divided among workers.
  auto work = [&](size_t begin, size_t end) {
    for (size_t s = begin; s < end; ++s) {
      for (int w = 0; w < walks_per_node; ++w) {
        size_t slot = s * static_cast<size_t>(walks_per_node) + w;
        Pcg32 rng = substream(seed, slot);
        corpus.walks[slot] = guided
                                 ? generate_walk(g, *policy.rmg, starts[s], max_length, rng)
                                 : generate_uniform_walk(g, starts[s], max_length, rng);
      }
    }
  };

  int n_threads = std::max(1, threads);
  if (n_threads == 1 || starts.size() < 2) {
    work(0, starts.size());
  } else {
    std::vector<std::thread> pool;
    size_t chunk = (starts.size() + n_threads - 1) / n_threads;
    for (int t = 0; t < n_threads; ++t) {
      size_t begin = std::min(starts.size(), t * chunk);
      size_t end = std::min(starts.size(), begin + chunk);
      if (begin < end) pool.emplace_back(work, begin, end);
    }
    for (auto& th : pool) th.join();
  }
  return corpus;
}

void save_corpus(const WalkCorpus& corpus, const TypedGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write corpus file: " + path);
  out << "# policy: " << corpus.policy << "\n";
  out << "# length: " << corpus.length << "\n";
  out << "# walks-per-node: " << corpus.walks_per_node << "\n";
  out << "# seed: " << corpus.seed << "\n";
  for (const auto& walk : corpus.walks) {
    for (size_t i = 0; i < walk.size(); ++i) {
      if (i) out << ' ';
      out << g.node_name(walk[i]);
    }
    out << '\n';
  }
}

WalkCorpus load_corpus(const std::string& path, const TypedGraph& g) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file: " + path);
  WalkCorpus corpus;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string key;
      hs >> key;
      if (key == "policy:") hs >> corpus.policy;
      else if (key == "length:") hs >> corpus.length;
      else if (key == "walks-per-node:") hs >> corpus.walks_per_node;
      else if (key == "seed:") hs >> corpus.seed;
      continue;
    }
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<NodeId> walk;
    std::string name;
    while (ls >> name) walk.push_back(g.node_id(name));
    if (!walk.empty()) corpus.walks.push_back(std::move(walk));
  }
  return corpus;
}

}  // namespace mg2v
