// Acceptance suite: end-to-end checks with pinned tolerances, one PASS/FAIL
// line per criterion. Exit code is the number of failed criteria.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>
#include <vector>

#include "commands.hpp"
#include "mg2v/eval.hpp"
#include "mg2v/metagraph.hpp"
#include "mg2v/pair_table.hpp"
#include "mg2v/synth.hpp"
#include "mg2v/trainer.hpp"
#include "mg2v/walker.hpp"
#include "support/reference_automaton.hpp"

// oracles.hpp uses doctest's REQUIRE; map it to a plain check here
#define REQUIRE(cond) \
  do {                \
    if (!(cond)) throw mg2v::Error("internal oracle failure: " #cond); \
  } while (0)
#include "support/oracles.hpp"
#undef REQUIRE
#include "support/toys.hpp"

using namespace mg2v;
using namespace mg2v::tests;

namespace {

struct Runner {
  int failures = 0;

  void criterion(int id, const std::string& name, double budget_seconds,
                 const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool ok = false;
    auto start = std::chrono::steady_clock::now();
    try {
      ok = body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
      ok = false;
    }
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                         .count();
    bool in_budget = budget_seconds <= 0.0 || elapsed < budget_seconds;
    if (!in_budget) {
      detail += (detail.empty() ? "" : "; ") + std::string("over time budget");
      ok = false;
    }
    std::printf("[%s] %2d. %s: %s [%.2fs", ok ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str(), elapsed);
    if (budget_seconds > 0.0) std::printf(" < %.0fs", budget_seconds);
    std::printf("]\n");
    std::fflush(stdout);
    if (!ok) ++failures;
  }
};

// The ordering-experiment HIN: 4 communities, 2000 authors, 3000 papers, 20
// venues, venue links removed for 20% of papers.
TypedGraph ordering_graph() {
  SynthConfig cfg;
  cfg.communities = 4;
  cfg.authors_per_community = 500;
  cfg.papers_per_community = 750;
  cfg.venues_per_community = 5;
  cfg.min_authors_per_paper = 1;
  cfg.max_authors_per_paper = 3;
  cfg.venue_retention = 1.0;
  cfg.cross_community_prob = 0.05;
  cfg.seed = 42;
  return sparsify_venues(generate_hin(cfg), 0.2, 43);
}

std::vector<TypeId> types_of(const TypedGraph& g) {
  std::vector<TypeId> types(g.num_nodes());
  for (size_t v = 0; v < g.num_nodes(); ++v) types[v] = g.node_type(static_cast<NodeId>(v));
  return types;
}

double classify_accuracy(const EmbeddingModel& model, const TypedGraph& g, uint64_t seed) {
  MatrixView view{model.input.data(), static_cast<size_t>(model.num_nodes),
                  static_cast<size_t>(model.dim)};
  EvalReport report = classify(view, g.labels(), 0.05, 5, seed);
  return report.mean("accuracy");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main() {
  std::printf("acceptance suite\n----------------\n");
  Runner runner;

  TypedGraph synth = ordering_graph();
  Schema schema = synth.schema();
  MetaGraph mg = venue_or_coauthor_mg();
  RecursiveMetagraph rmg(mg, schema);

  // 1. Non-empty transition distributions sum to 1 within 1e-12.
  runner.criterion(1, "transition normalization", 1.0, [&](std::string& detail) {
    Pcg32 rng(2024, 1);
    auto authors = synth.nodes_of_type(schema.type_id("A"));
    int checked = 0;
    double worst = 0.0;
    while (checked < 1000) {
      WalkState state{authors[rng.bounded(static_cast<uint32_t>(authors.size()))], 1, 0};
      int hops = static_cast<int>(rng.bounded(12));
      for (int h = 0; h < hops; ++h) {
        if (!step(synth, rmg, state, rng)) break;
      }
      auto dist = transition_distribution(synth, rmg, state);
      if (dist.empty()) continue;
      double sum = 0.0;
      for (const auto& [u, p] : dist) sum += p;
      worst = std::max(worst, std::abs(sum - 1.0));
      ++checked;
    }
    std::ostringstream os;
    os << checked << " states, max |sum-1| = " << worst;
    detail = os.str();
    return worst <= 1e-12;
  });

  // 2. Empirical step frequencies match brute-forced transition probabilities.
  runner.criterion(2, "transition probability oracle agreement", 10.0,
                   [&](std::string& detail) {
    TypedGraph toy = twelve_node_graph();
    UnrolledAutomaton automaton(mg, 8);
    auto states = reachable_states(toy, automaton, 3 * (mg.layers - 1) + 1);
    const int samples = 100000;
    double worst_tv = 0.0;
    int live_states = 0;
    for (const auto& [node, inst] : states) {
      auto oracle = oracle_transitions(toy, automaton, node, inst);
      if (oracle.empty()) continue;
      ++live_states;
      int layer = automaton.instances()[inst].recursive_layer;
      std::map<NodeId, int> hits;
      Pcg32 rng(55, static_cast<uint64_t>(node) * 1000 + inst);
      for (int i = 0; i < samples; ++i) {
        WalkState state{node, layer, 0};
        if (!step(toy, rmg, state, rng)) throw Error("oracle says live, walker says dead");
        hits[state.node] += 1;
      }
      double tv = 0.0;
      for (const auto& [u, po] : oracle) {
        tv += std::abs(static_cast<double>(hits[u]) / samples - po.first);
      }
      for (const auto& [u, h] : hits) {
        if (!oracle.count(u)) tv += static_cast<double>(h) / samples;
      }
      worst_tv = std::max(worst_tv, tv / 2.0);
    }
    std::ostringstream os;
    os << live_states << " live states, worst TV = " << worst_tv;
    detail = os.str();
    return live_states >= 10 && worst_tv <= 0.01;
  });

  // 3. Every generated walk is accepted by the independent unrolled automaton.
  runner.criterion(3, "constraint soundness of 10^4 walks", 10.0, [&](std::string& detail) {
    WalkCorpus corpus = generate_corpus(synth, WalkPolicy::metagraph(rmg), 100, 5, 7, 2);
    UnrolledAutomaton automaton(mg, 101);
    size_t violations = 0, checked = 0;
    for (const auto& walk : corpus.walks) {
      if (checked == 10000) break;
      ++checked;
      std::vector<std::string> names;
      names.reserve(walk.size());
      for (NodeId v : walk) names.push_back(schema.type_name(synth.node_type(v)));
      if (!automaton.accepts(names)) ++violations;
    }
    std::ostringstream os;
    os << checked << " walks, " << violations << " violations";
    detail = os.str();
    return checked == 10000 && violations == 0;
  });

  // 4. The broken-venue detour has positive probability only under the
  //    metagraph.
  runner.criterion(4, "metagraph-only detour walk", 0.0, [&](std::string& detail) {
    TypedGraph g = broken_venue_graph();
    std::vector<std::string> detour = {"a1", "p1", "a2", "p2", "a3", "p4", "v2", "p5", "a4"};

    auto probability = [&](const MetaGraph& meta) {
      RecursiveMetagraph r(meta, g.schema());
      if (g.node_type(g.node_id(detour[0])) != r.source_type()) return 0.0;
      int layer = 1;
      double prob = 1.0;
      for (size_t i = 1; i < detour.size(); ++i) {
        NodeId prev = g.node_id(detour[i - 1]);
        NodeId next = g.node_id(detour[i]);
        double p = 0.0;
        for (const auto& [u, pu] : transition_distribution(g, r, {prev, layer, 0})) {
          if (u == next) p = pu;
        }
        if (p == 0.0) return 0.0;
        prob *= p;
        for (const TransitionOption& o : r.allowed_transitions(layer, g.node_type(prev))) {
          if (o.type == g.node_type(next)) layer = o.next_layer;
        }
      }
      return prob;
    };

    double p_mg = probability(mg);
    double p_chain1 = probability(venue_chain(g.schema()));
    double p_chain2 = probability(coauthor_chain(g.schema()));
    std::ostringstream os;
    os << "Pr(metagraph) = " << p_mg << ", Pr(venue chain) = " << p_chain1
       << ", Pr(coauthor chain) = " << p_chain2;
    detail = os.str();
    return p_mg > 0.0 && p_chain1 == 0.0 && p_chain2 == 0.0;
  });

  // 5. Analytic gradients vs central finite differences, both modes.
  runner.criterion(5, "gradient check (d=16, K=5, 100 configs/mode)", 5.0,
                   [&](std::string& detail) {
    TypedGraph toy = twelve_node_graph();
    RecursiveMetagraph toy_rmg(mg, toy.schema());
    WalkCorpus corpus = generate_corpus(toy, WalkPolicy::metagraph(toy_rmg), 30, 30, 3);
    PairFrequencyTable table = count_pairs(corpus, 5, static_cast<NodeId>(toy.num_nodes()));
    auto types = types_of(toy);

    double worst = 0.0;
    for (SkipGramMode mode : {SkipGramMode::homogeneous, SkipGramMode::heterogeneous}) {
      Samplers samplers =
          build_samplers(table, mode, types, toy.schema().num_types(), 0.75);
      Pcg32 rng(99, mode == SkipGramMode::homogeneous ? 0 : 1);
      for (int config = 0; config < 100; ++config) {
        EmbeddingModel model = EmbeddingModel::init(static_cast<NodeId>(toy.num_nodes()), 16,
                                                    1000 + config);
        Pcg32 fill(config, 3);
        for (double& v : model.input) v = fill.uniform() * 2 - 1;
        for (double& v : model.context) v = fill.uniform() * 2 - 1;

        auto [center, context] = samplers.pairs.sample(rng);
        std::vector<NodeId> negatives;
        for (int k = 0; k < 5; ++k) {
          negatives.push_back(samplers.negatives.sample(types[context], rng));
        }

        // analytic gradient = one unit-step update difference
        EmbeddingModel stepped = model;
        sgd_update(stepped, center, context, negatives, 1.0);

        const double h = 1e-6;
        auto fd = [&](bool phi_side, NodeId row, int coord) {
          EmbeddingModel plus = model, minus = model;
          (phi_side ? plus.phi(row) : plus.psi(row))[coord] += h;
          (phi_side ? minus.phi(row) : minus.psi(row))[coord] -= h;
          return (objective_value(plus, center, context, negatives) -
                  objective_value(minus, center, context, negatives)) /
                 (2 * h);
        };
        auto rel = [](double a, double b) {
          return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
        };
        for (int c = 0; c < 16; ++c) {
          worst = std::max(worst, rel(model.phi(center)[c] - stepped.phi(center)[c],
                                      fd(true, center, c)));
        }
        std::vector<NodeId> rows{context};
        rows.insert(rows.end(), negatives.begin(), negatives.end());
        std::sort(rows.begin(), rows.end());
        rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
        for (NodeId row : rows) {
          for (int c = 0; c < 16; ++c) {
            worst = std::max(worst, rel(model.psi(row)[c] - stepped.psi(row)[c],
                                        fd(false, row, c)));
          }
        }
      }
    }
    std::ostringstream os;
    os << "max relative error = " << worst;
    detail = os.str();
    return worst < 1e-5;
  });

  // 6. Heterogeneous negatives always share the context node's type.
  runner.criterion(6, "heterogeneous type purity over 10^6 draws", 0.0,
                   [&](std::string& detail) {
    RecursiveMetagraph r(mg, schema);
    WalkCorpus corpus = generate_corpus(synth, WalkPolicy::metagraph(r), 40, 1, 11, 2);
    PairFrequencyTable table = count_pairs(corpus, 5, static_cast<NodeId>(synth.num_nodes()));
    auto types = types_of(synth);
    Samplers samplers = build_samplers(table, SkipGramMode::heterogeneous, types,
                                       schema.num_types(), 0.75);
    Pcg32 rng(321, 5);
    size_t mismatches = 0;
    const int draws = 1000000;
    for (int i = 0; i < draws; ++i) {
      auto [center, context] = samplers.pairs.sample(rng);
      NodeId neg = samplers.negatives.sample(types[context], rng);
      if (types[neg] != types[context]) ++mismatches;
    }
    std::ostringstream os;
    os << draws << " draws, " << mismatches << " type mismatches";
    detail = os.str();
    return mismatches == 0;
  });

  // 7. embed --seed 1 --deterministic twice: byte-identical corpus and
  //    embeddings, through the real CLI path.
  runner.criterion(7, "deterministic embed reproducibility", 0.0, [&](std::string& detail) {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "mg2v-acceptance-embed";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::string prefix = (dir / "g").string();
    auto run = [&](std::initializer_list<std::string> args) {
      return mg2v::cli::run(std::vector<std::string>(args));
    };
    if (run({"generate", "--authors", "200", "--papers", "300", "--venues", "20",
             "--communities", "4", "--sparsify", "0.2", "--seed", "1", "--out", prefix}) != 0) {
      detail = "generate failed";
      return false;
    }
    std::string mg_path = (dir / "G.mg").string();
    std::ofstream(mg_path) << venue_or_coauthor_dsl();
    for (const char* out : {"one", "two"}) {
      int code = run({"embed", "--graph", prefix, "--policy", "metagraph", "--metagraph",
                      mg_path, "--length", "50", "--walks-per-node", "5", "--dim", "16",
                      "--iterations", "100000", "--seed", "1", "--deterministic", "--out",
                      (dir / out).string()});
      if (code != 0) {
        detail = std::string("embed run '") + out + "' failed";
        return false;
      }
    }
    bool emb_equal = read_file((dir / "one").string()) == read_file((dir / "two").string());
    bool corpus_equal = read_file((dir / "one.corpus").string()) ==
                        read_file((dir / "two.corpus").string());
    fs::remove_all(dir);
    std::ostringstream os;
    os << "embeddings " << (emb_equal ? "identical" : "DIFFER") << ", corpora "
       << (corpus_equal ? "identical" : "DIFFER");
    detail = os.str();
    return emb_equal && corpus_equal;
  });

  // 8. Ordering experiment: metagraph embeddings classify at >= 0.85 and beat
  //    the venue-chain baseline in >= 8 of 10 seeds.
  runner.criterion(8, "ordering experiment (10 seeds)", 300.0, [&](std::string& detail) {
    MetaGraph chain = venue_chain(schema);
    RecursiveMetagraph chain_rmg(chain, schema);
    auto types = types_of(synth);

    struct Job {
      const RecursiveMetagraph* policy;
      uint64_t seed;
      double accuracy = 0.0;
    };
    std::vector<Job> jobs;
    for (uint64_t seed = 1; seed <= 10; ++seed) {
      jobs.push_back({&rmg, seed});
      jobs.push_back({&chain_rmg, seed});
    }

    std::atomic<size_t> next{0};
    auto worker = [&] {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= jobs.size()) return;
        Job& job = jobs[i];
        WalkCorpus corpus =
            generate_corpus(synth, WalkPolicy::metagraph(*job.policy), 100, 20, job.seed, 1);
        PairFrequencyTable table =
            count_pairs(corpus, 5, static_cast<NodeId>(synth.num_nodes()));
        TrainConfig config;
        config.mode = SkipGramMode::homogeneous;
        config.dim = 64;
        config.negatives = 5;
        config.max_iterations = 2'000'000;
        config.seed = job.seed;
        config.deterministic = true;
        EmbeddingModel model = train(table, config, static_cast<NodeId>(synth.num_nodes()),
                                     types, schema.num_types());
        job.accuracy = classify_accuracy(model, synth, job.seed);
      }
    };
    std::thread t1(worker), t2(worker);
    t1.join();
    t2.join();

    double mg_sum = 0.0;
    int wins = 0;
    std::ostringstream os;
    os.precision(4);
    for (uint64_t seed = 1; seed <= 10; ++seed) {
      double mg_acc = 0.0, chain_acc = 0.0;
      for (const Job& job : jobs) {
        if (job.seed != seed) continue;
        (job.policy == &rmg ? mg_acc : chain_acc) = job.accuracy;
      }
      mg_sum += mg_acc;
      if (mg_acc >= chain_acc) ++wins;
      os << (seed == 1 ? "" : " ") << mg_acc << "/" << chain_acc;
    }
    double mg_mean = mg_sum / 10.0;
    std::ostringstream head;
    head.precision(4);
    head << "metagraph mean acc = " << mg_mean << ", wins vs venue chain = " << wins
         << "/10; per seed (mg/chain): " << os.str();
    detail = head.str();
    return mg_mean >= 0.85 && wins >= 8;
  });

  // 9. Clustering metric correctness.
  runner.criterion(9, "clustering metric correctness", 5.0, [&](std::string& detail) {
    Pcg32 rng(17, 17);
    std::vector<int> a(1000), b(1000);
    for (int i = 0; i < 1000; ++i) {
      a[i] = rng.bounded(4);
      b[i] = rng.bounded(4);
    }
    double self_nmi = nmi(a, a);
    double indep_nmi = nmi(a, b);
    int perm[4] = {2, 3, 1, 0};
    std::vector<int> renamed(a.size());
    for (size_t i = 0; i < a.size(); ++i) renamed[i] = perm[a[i]];
    double perm_acc = hungarian_accuracy(a, renamed);
    std::ostringstream os;
    os << "NMI(a,a) = " << self_nmi << ", NMI(indep) = " << indep_nmi
       << ", permuted accuracy = " << perm_acc;
    detail = os.str();
    return std::abs(self_nmi - 1.0) <= 1e-12 && indep_nmi < 0.05 &&
           std::abs(perm_acc - 1.0) <= 1e-12;
  });

  // 10. Expected negative-sampling update direction agrees with the exact
  //     softmax gradient.
  runner.criterion(10, "negative sampling vs exact softmax gradient", 30.0,
                   [&](std::string& detail) {
    const NodeId n = 30;
    const int d = 8;
    int agreements = 0;
    for (int config = 0; config < 100; ++config) {
      Pcg32 rng(5000 + config, 9);
      // random context-count table over all 30 nodes
      PairFrequencyTable table;
      table.window = 5;
      table.num_nodes = n;
      table.context_count.assign(n, 0);
      for (NodeId ctx = 0; ctx < n; ++ctx) {
        NodeId center = (ctx + 1 + static_cast<NodeId>(rng.bounded(n - 1))) % n;
        uint32_t count = 1 + rng.bounded(20);
        table.keys.push_back(PairFrequencyTable::key(center, ctx));
        table.counts.push_back(count);
        table.context_count[ctx] += count;
        table.total += count;
      }
      std::sort(table.keys.begin(), table.keys.end());
      NegativeSampler negatives(table, SkipGramMode::homogeneous, {}, 0, 0.75);

      EmbeddingModel model = EmbeddingModel::init(n, d, 100 + config);
      Pcg32 fill(config, 7);
      for (double& v : model.input) v = fill.uniform() - 0.5;
      for (double& v : model.context) v = fill.uniform() - 0.5;
      NodeId center = rng.bounded(n);
      NodeId context = rng.bounded(n);

      // exact full-softmax gradient for Phi(center)
      std::vector<double> softmax(n);
      double zmax = -1e300;
      for (NodeId u = 0; u < n; ++u) {
        double s = 0;
        for (int c = 0; c < d; ++c) s += model.psi(u)[c] * model.phi(center)[c];
        softmax[u] = s;
        zmax = std::max(zmax, s);
      }
      double z = 0;
      for (NodeId u = 0; u < n; ++u) z += std::exp(softmax[u] - zmax);
      std::vector<double> exact_grad(d, 0.0);
      for (NodeId u = 0; u < n; ++u) {
        double p = std::exp(softmax[u] - zmax) / z;
        for (int c = 0; c < d; ++c) exact_grad[c] += p * model.psi(u)[c];
      }
      for (int c = 0; c < d; ++c) exact_grad[c] -= model.psi(context)[c];

      // expected negative-sampling gradient for Phi(center), 10^4 draws
      std::vector<double> ns_grad(d, 0.0);
      auto sigmoid = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
      double pos = sigmoid(softmax[context]) - 1.0;
      const int draws = 10000;
      const int K = 5;
      for (int i = 0; i < draws; ++i) {
        for (int k = 0; k < K; ++k) {
          NodeId neg = negatives.sample(kNoType, rng);
          double g = sigmoid(softmax[neg]);
          for (int c = 0; c < d; ++c) ns_grad[c] += g * model.psi(neg)[c] / draws;
        }
      }
      for (int c = 0; c < d; ++c) ns_grad[c] += pos * model.psi(context)[c];

      // descent directions agree when the gradients' inner product is positive
      double dot = 0;
      for (int c = 0; c < d; ++c) dot += ns_grad[c] * exact_grad[c];
      if (dot > 0) ++agreements;
    }
    std::ostringstream os;
    os << agreements << "/100 configurations with positive inner product";
    detail = os.str();
    return agreements >= 95;
  });

  std::printf("----------------\n%d of 10 criteria passed\n", 10 - runner.failures);
  return runner.failures;
}
