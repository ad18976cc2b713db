#include "commands.hpp"

#include <algorithm>
#include <cctype>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "manifest.hpp"
#include "mg2v/eval.hpp"
#include "mg2v/metagraph.hpp"
#include "mg2v/pair_table.hpp"
#include "mg2v/synth.hpp"
#include "mg2v/trainer.hpp"
#include "mg2v/typed_graph.hpp"
#include "mg2v/walker.hpp"

namespace mg2v::cli {

namespace {

struct UsageError : Error {
  using Error::Error;
};

// Every flag can be overridden via MG2V_<FLAG> in the environment.
std::string env_name(const std::string& flag) {
  std::string out = "MG2V_";
  for (char c : flag) {
    if (c == '-') {
      if (!out.empty() && out.back() != '_') out.push_back('_');
    } else {
      out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

template <typename Opt>
Opt* with_env(Opt* opt) {
  std::string name = opt->get_name(false, true);
  while (!name.empty() && name.front() == '-') name.erase(name.begin());
  return opt->envname(env_name(name));
}

struct GraphArgs {
  std::string prefix;  // expands to <prefix>.nodes/.edges/.schema
  std::string nodes, edges, schema;

  void resolve() {
    if (!prefix.empty()) {
      if (nodes.empty()) nodes = prefix + ".nodes";
      if (edges.empty()) edges = prefix + ".edges";
      if (schema.empty()) schema = prefix + ".schema";
    }
    if (nodes.empty() || edges.empty() || schema.empty()) {
      throw UsageError("graph input requires --graph <prefix> or --nodes/--edges/--schema");
    }
  }
};

void add_graph_options(CLI::App* cmd, GraphArgs& args) {
  with_env(cmd->add_option("--graph", args.prefix,
                           "graph file prefix (expects <prefix>.nodes/.edges/.schema)"));
  with_env(cmd->add_option("--nodes", args.nodes, "node file (<id> TAB <type>)"));
  with_env(cmd->add_option("--edges", args.edges, "edge file (<src> TAB <dst> TAB <label>)"));
  with_env(cmd->add_option("--schema", args.schema, "schema file"));
}

TypedGraph load_graph_from(GraphArgs& args, RunManifest& manifest) {
  args.resolve();
  manifest.add_input(args.schema);
  manifest.add_input(args.nodes);
  manifest.add_input(args.edges);
  Schema schema = Schema::load(args.schema);
  TypedGraph g = load_graph(args.nodes, args.edges, schema);
  std::cerr << "loaded graph: " << g.num_nodes() << " nodes, " << g.num_forward_edges()
            << " edges";
  if (g.load_stats().duplicates_dropped > 0) {
    std::cerr << " (" << g.load_stats().duplicates_dropped << " duplicate edges collapsed)";
  }
  std::cerr << "\n";
  return g;
}

struct PolicyArgs {
  std::string policy = "metagraph";
  std::string metagraph_file;
  std::string metapath;
};

void add_policy_options(CLI::App* cmd, PolicyArgs& args) {
  with_env(cmd->add_option("--policy", args.policy, "walk policy")
               ->check(CLI::IsMember({"metagraph", "metapath", "uniform"})));
  with_env(cmd->add_option("--metagraph", args.metagraph_file, "metagraph DSL file"));
  with_env(cmd->add_option("--metapath", args.metapath,
                           "comma-separated node type chain, e.g. A,P,V,P,A"));
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// Owns the parsed/derived metagraph so the WalkPolicy's pointer stays valid.
struct ResolvedPolicy {
  std::optional<RecursiveMetagraph> rmg;
  WalkPolicy policy;
};

ResolvedPolicy resolve_policy(const PolicyArgs& args, const Schema& schema,
                              RunManifest& manifest) {
  ResolvedPolicy out;
  if (args.policy == "uniform") {
    out.policy = WalkPolicy::uniform();
    return out;
  }
  if (args.policy == "metapath") {
    if (args.metapath.empty()) throw UsageError("--policy metapath requires --metapath");
    MetaGraph chain = chain_from_metapath(split_csv(args.metapath), schema);
    out.rmg.emplace(chain, schema);
    out.policy = WalkPolicy::metapath(*out.rmg);
    return out;
  }
  if (args.metagraph_file.empty()) throw UsageError("--policy metagraph requires --metagraph");
  manifest.add_input(args.metagraph_file);
  MetaGraph mg = load_metagraph(args.metagraph_file);
  out.rmg.emplace(mg, schema);
  out.policy = WalkPolicy::metagraph(*out.rmg);
  return out;
}

struct TrainArgs {
  int window = 5;
  int dim = 128;
  int negatives = 5;
  long long iterations = 10'000'000;
  bool paper_scale = false;
  double alpha = 0.025;
  double noise_exponent = 0.75;
  std::string mode = "homogeneous";
  bool parallel = false;
  bool deterministic = false;
};

void add_train_options(CLI::App* cmd, TrainArgs& args) {
  with_env(cmd->add_option("--window", args.window, "context window size w")
               ->capture_default_str());
  with_env(cmd->add_option("--dim", args.dim, "embedding dimension d")->capture_default_str());
  with_env(cmd->add_option("--negatives", args.negatives, "negative samples K per positive")
               ->capture_default_str());
  with_env(cmd->add_option("--iterations", args.iterations, "SGD samples")
               ->capture_default_str());
  with_env(cmd->add_flag("--paper-scale", args.paper_scale, "use 100M iterations"));
  with_env(
      cmd->add_option("--alpha", args.alpha, "initial learning rate")->capture_default_str());
  with_env(cmd->add_option("--noise-exponent", args.noise_exponent,
                           "negative sampling distortion exponent")
               ->capture_default_str());
  with_env(cmd->add_option("--mode", args.mode, "skip-gram mode")
               ->check(CLI::IsMember({"homogeneous", "heterogeneous"}))
               ->capture_default_str());
  auto* par = with_env(cmd->add_flag(
      "--parallel", args.parallel, "lock-free parallel updates (not bit-reproducible)"));
  with_env(cmd->add_flag("--deterministic", args.deterministic,
                         "single update stream, bit-reproducible (default)"))
      ->excludes(par);
}

TrainConfig to_config(const TrainArgs& args, uint64_t seed, int threads) {
  TrainConfig config;
  config.mode = skip_gram_mode_from_string(args.mode);
  config.dim = args.dim;
  config.negatives = args.negatives;
  config.alpha0 = args.alpha;
  config.max_iterations = args.paper_scale ? 100'000'000LL : args.iterations;
  config.noise_exponent = args.noise_exponent;
  config.seed = seed;
  config.deterministic = !args.parallel;
  config.threads = threads;
  return config;
}

std::string default_manifest_path(const std::string& out, const std::string& sub) {
  return out.empty() ? "mg2v-" + sub + ".manifest.json" : out + ".manifest.json";
}

void record_params(RunManifest& manifest, const CLI::App* cmd) {
  for (const CLI::Option* opt : cmd->get_options()) {
    std::string name = opt->get_name(false, true);
    if (name.empty() || name == "--help") continue;
    while (!name.empty() && name.front() == '-') name.erase(name.begin());
    if (opt->get_items_expected_max() == 0) {
      manifest.params[name] = opt->count() > 0 ? "true" : "false";
    } else if (opt->count() > 0) {
      manifest.params[name] = opt->as<std::string>();
    } else if (!opt->get_default_str().empty()) {
      manifest.params[name] = opt->get_default_str();
    }
  }
}

std::vector<TypeId> node_types_of(const TypedGraph& g) {
  std::vector<TypeId> types(g.num_nodes());
  for (size_t v = 0; v < g.num_nodes(); ++v) types[v] = g.node_type(static_cast<NodeId>(v));
  return types;
}

std::vector<std::string> node_names_of(const TypedGraph& g) {
  std::vector<std::string> names(g.num_nodes());
  for (size_t v = 0; v < g.num_nodes(); ++v) names[v] = g.node_name(static_cast<NodeId>(v));
  return names;
}

// ---- subcommand bodies ----

// Line-oriented "key = value" file, '#' comments. Keys use the flag spelling
// without the leading dashes.
std::map<std::string, std::string> read_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      size_t a = s.find_first_not_of(" \t\r");
      size_t b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    if (trim(line).empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw Error(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    kv[key] = value;
  }
  return kv;
}

int cmd_generate(const CLI::App* cmd, const std::string& config_file, int communities,
                 int authors, int papers, int venues, int min_app, int max_app,
                 double retention, double cross, double sparsify, bool cite, uint64_t seed,
                 const std::string& out, const std::string& manifest_path) {
  StopWatch watch;
  RunManifest manifest;
  manifest.subcommand = "generate";

  if (!config_file.empty()) {
    // explicit flags override config-file values
    auto kv = read_kv_file(config_file);
    manifest.add_input(config_file);
    auto given = [&](const std::string& flag) {
      const CLI::Option* opt = cmd->get_option("--" + flag);
      return opt->count() > 0;
    };
    auto take = [&](const std::string& key, auto& slot) {
      auto it = kv.find(key);
      if (it == kv.end()) return;
      if (!given(key)) {
        std::istringstream vs(it->second);
        if (!(vs >> slot)) throw Error("config file: bad value for '" + key + "'");
      }
      kv.erase(it);
    };
    take("communities", communities);
    take("authors", authors);
    take("papers", papers);
    take("venues", venues);
    take("min-authors-per-paper", min_app);
    take("max-authors-per-paper", max_app);
    take("venue-retention", retention);
    take("cross-prob", cross);
    take("sparsify", sparsify);
    take("seed", seed);
    if (auto it = kv.find("cite-edges"); it != kv.end()) {
      if (!given("cite-edges")) cite = it->second == "true" || it->second == "1";
      kv.erase(it);
    }
    if (!kv.empty()) throw Error("config file: unknown key '" + kv.begin()->first + "'");
  }

  manifest.seed = seed;
  record_params(manifest, cmd);
  // resolved values win over whatever record_params captured
  manifest.params["communities"] = std::to_string(communities);
  manifest.params["authors"] = std::to_string(authors);
  manifest.params["papers"] = std::to_string(papers);
  manifest.params["venues"] = std::to_string(venues);
  manifest.params["venue-retention"] = std::to_string(retention);
  manifest.params["cross-prob"] = std::to_string(cross);
  manifest.params["sparsify"] = std::to_string(sparsify);
  manifest.params["seed"] = std::to_string(seed);

  auto per_community = [&](int total, const char* what) {
    if (total < communities || total % communities != 0) {
      throw UsageError(std::string(what) + " count " + std::to_string(total) +
                       " must be a positive multiple of --communities " +
                       std::to_string(communities));
    }
    return total / communities;
  };

  SynthConfig config;
  config.communities = communities;
  config.authors_per_community = per_community(authors, "author");
  config.papers_per_community = per_community(papers, "paper");
  config.venues_per_community = per_community(venues, "venue");
  config.min_authors_per_paper = min_app;
  config.max_authors_per_paper = max_app;
  config.venue_retention = retention;
  config.cross_community_prob = cross;
  config.cite_edges = cite;
  config.seed = seed;

  TypedGraph g = generate_hin(config);
  if (sparsify > 0.0) g = sparsify_venues(g, sparsify, seed);
  save_hin_files(g, out);
  std::cerr << "generated " << g.num_nodes() << " nodes, " << g.num_forward_edges()
            << " edges -> " << out << ".{nodes,edges,schema,labels}\n";

  manifest.duration_seconds = watch.seconds();
  manifest.write(manifest_path.empty() ? default_manifest_path(out, "generate")
                                       : manifest_path);
  return 0;
}

int cmd_walk(const CLI::App* cmd, GraphArgs& graph_args, PolicyArgs& policy_args, int length,
             int walks_per_node, uint64_t seed, int threads, const std::string& out,
             const std::string& manifest_path) {
  StopWatch watch;
  RunManifest manifest;
  manifest.subcommand = "walk";
  manifest.seed = seed;
  record_params(manifest, cmd);

  TypedGraph g = load_graph_from(graph_args, manifest);
  ResolvedPolicy policy = resolve_policy(policy_args, g.schema(), manifest);
  WalkCorpus corpus = generate_corpus(g, policy.policy, length, walks_per_node, seed, threads);
  save_corpus(corpus, g, out);
  size_t total_nodes = 0;
  for (const auto& w : corpus.walks) total_nodes += w.size();
  std::cerr << "wrote " << corpus.walks.size() << " walks (" << total_nodes << " nodes) -> "
            << out << "\n";

  manifest.duration_seconds = watch.seconds();
  manifest.write(manifest_path.empty() ? default_manifest_path(out, "walk") : manifest_path);
  return 0;
}

int cmd_train(const CLI::App* cmd, GraphArgs& graph_args, const std::string& corpus_path,
              const std::string& pairs_in, const std::string& pairs_out, TrainArgs& train_args,
              uint64_t seed, int threads, bool binary, const std::string& out,
              const std::string& manifest_path) {
  StopWatch watch;
  RunManifest manifest;
  manifest.subcommand = "train";
  manifest.seed = seed;
  record_params(manifest, cmd);

  TypedGraph g = load_graph_from(graph_args, manifest);
  PairFrequencyTable table;
  if (!pairs_in.empty()) {
    manifest.add_input(pairs_in);
    table = load_pair_table(pairs_in);
    if (table.num_nodes != static_cast<NodeId>(g.num_nodes())) {
      throw Error("pair table was built for a different graph (node count mismatch)");
    }
  } else {
    if (corpus_path.empty()) throw UsageError("train requires --corpus or --pairs");
    manifest.add_input(corpus_path);
    WalkCorpus corpus = load_corpus(corpus_path, g);
    table = count_pairs(corpus, train_args.window, static_cast<NodeId>(g.num_nodes()));
  }
  std::cerr << "pair table: " << table.size() << " distinct pairs, " << table.total
            << " total\n";
  if (!pairs_out.empty()) save_pair_table(table, pairs_out);

  TrainConfig config = to_config(train_args, seed, threads);
  EmbeddingModel model =
      train(table, config, static_cast<NodeId>(g.num_nodes()), node_types_of(g),
            g.schema().num_types());
  auto names = node_names_of(g);
  if (binary) {
    save_embeddings_binary(model, names, out);
  } else {
    save_embeddings_text(model, names, out);
  }
  std::cerr << "wrote " << model.num_nodes << " x " << model.dim << " embeddings -> " << out
            << "\n";

  manifest.duration_seconds = watch.seconds();
  manifest.write(manifest_path.empty() ? default_manifest_path(out, "train") : manifest_path);
  return 0;
}

int cmd_embed(const CLI::App* cmd, GraphArgs& graph_args, PolicyArgs& policy_args, int length,
              int walks_per_node, TrainArgs& train_args, uint64_t seed, int threads,
              bool binary, const std::string& out, std::string corpus_out,
              const std::string& manifest_path) {
  StopWatch watch;
  RunManifest manifest;
  manifest.subcommand = "embed";
  manifest.seed = seed;
  record_params(manifest, cmd);

  TypedGraph g = load_graph_from(graph_args, manifest);
  ResolvedPolicy policy = resolve_policy(policy_args, g.schema(), manifest);
  WalkCorpus corpus = generate_corpus(g, policy.policy, length, walks_per_node, seed, threads);
  if (corpus_out.empty()) corpus_out = out + ".corpus";
  save_corpus(corpus, g, corpus_out);
  std::cerr << "corpus: " << corpus.walks.size() << " walks -> " << corpus_out << "\n";

  PairFrequencyTable table =
      count_pairs(corpus, train_args.window, static_cast<NodeId>(g.num_nodes()));
  std::cerr << "pair table: " << table.size() << " distinct pairs, " << table.total
            << " total\n";

  TrainConfig config = to_config(train_args, seed, threads);
  EmbeddingModel model =
      train(table, config, static_cast<NodeId>(g.num_nodes()), node_types_of(g),
            g.schema().num_types());
  auto names = node_names_of(g);
  if (binary) {
    save_embeddings_binary(model, names, out);
  } else {
    save_embeddings_text(model, names, out);
  }
  std::cerr << "wrote " << model.num_nodes << " x " << model.dim << " embeddings -> " << out
            << "\n";

  manifest.duration_seconds = watch.seconds();
  manifest.write(manifest_path.empty() ? default_manifest_path(out, "embed") : manifest_path);
  return 0;
}

std::vector<int> align_labels(const EmbeddingFile& emb, const std::string& label_path) {
  std::ifstream in(label_path);
  if (!in) throw Error("cannot open label file: " + label_path);
  std::map<std::string, std::string> raw;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string node, label;
    if (ls >> node >> label) raw[node] = label;
  }
  std::vector<std::string> label_values;
  for (const auto& [node, label] : raw) label_values.push_back(label);
  std::sort(label_values.begin(), label_values.end());
  label_values.erase(std::unique(label_values.begin(), label_values.end()),
                     label_values.end());
  std::vector<int> labels(emb.names.size(), -1);
  for (size_t i = 0; i < emb.names.size(); ++i) {
    auto it = raw.find(emb.names[i]);
    if (it == raw.end()) continue;
    labels[i] = static_cast<int>(
        std::lower_bound(label_values.begin(), label_values.end(), it->second) -
        label_values.begin());
  }
  return labels;
}

int cmd_eval(const CLI::App* cmd, const std::string& task, const std::string& embeddings_path,
             const std::string& labels_path, double train_ratio, int repetitions, int k,
             const std::string& k_list_csv, int queries, uint64_t seed,
             const std::string& manifest_path) {
  StopWatch watch;
  RunManifest manifest;
  manifest.subcommand = "eval " + task;
  manifest.seed = seed;
  record_params(manifest, cmd);
  manifest.add_input(embeddings_path);
  manifest.add_input(labels_path);

  EmbeddingFile emb = load_embeddings(embeddings_path);
  std::vector<int> labels = align_labels(emb, labels_path);
  MatrixView view{emb.rows.data(), emb.names.size(), static_cast<size_t>(emb.dim)};

  EvalReport report;
  if (task == "classify") {
    report = classify(view, labels, train_ratio, repetitions, seed);
  } else if (task == "cluster") {
    report = cluster(view, labels, k, seed);
  } else {
    std::vector<int> k_list;
    for (const std::string& s : split_csv(k_list_csv)) k_list.push_back(std::stoi(s));
    report = search_precision(view, labels, k_list, queries, seed);
  }
  report.print_table(std::cout);
  std::cout << "\n";
  report.print_kv(std::cout);

  manifest.duration_seconds = watch.seconds();
  manifest.write(manifest_path.empty() ? default_manifest_path("", "eval-" + task)
                                       : manifest_path);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"metagraph-guided heterogeneous network embedding"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  uint64_t seed = 1;
  int threads = 1;
  std::string manifest_path;

  auto add_common = [&](CLI::App* cmd) {
    with_env(cmd->add_option("--seed", seed, "RNG seed")->capture_default_str());
    with_env(cmd->add_option("--manifest", manifest_path, "manifest output path"));
  };

  // generate
  auto* gen = app.add_subcommand("generate", "generate a labeled synthetic HIN");
  int communities = 4, authors = 2000, papers = 3000, venues = 20;
  int min_app = 1, max_app = 3;
  double retention = 1.0, cross = 0.05, sparsify = 0.0;
  bool cite = false;
  std::string gen_out, gen_config;
  with_env(gen->add_option("--config", gen_config,
                           "key = value config file (flags override it)"));
  with_env(gen->add_option("--communities", communities)->capture_default_str());
  with_env(gen->add_option("--authors", authors, "total authors")->capture_default_str());
  with_env(gen->add_option("--papers", papers, "total papers")->capture_default_str());
  with_env(gen->add_option("--venues", venues, "total venues")->capture_default_str());
  with_env(gen->add_option("--min-authors-per-paper", min_app)->capture_default_str());
  with_env(gen->add_option("--max-authors-per-paper", max_app)->capture_default_str());
  with_env(gen->add_option("--venue-retention", retention)->capture_default_str());
  with_env(gen->add_option("--cross-prob", cross, "cross-community edge probability")
               ->capture_default_str());
  with_env(gen->add_option("--sparsify", sparsify,
                           "fraction of papers stripped of venue edges after generation")
               ->capture_default_str());
  with_env(gen->add_flag("--cite-edges", cite, "add P->P cite edges"));
  with_env(gen->add_option("--out", gen_out, "output file prefix")->required());
  add_common(gen);

  // walk
  auto* walk = app.add_subcommand("walk", "generate a random-walk corpus");
  GraphArgs walk_graph;
  PolicyArgs walk_policy;
  int length = 100, walks_per_node = 80;
  std::string walk_out;
  add_graph_options(walk, walk_graph);
  add_policy_options(walk, walk_policy);
  with_env(walk->add_option("--length", length, "max walk length L in nodes")
               ->capture_default_str());
  with_env(walk->add_option("--walks-per-node", walks_per_node, "walks per start node gamma")
               ->capture_default_str());
  with_env(walk->add_option("--threads", threads)->capture_default_str());
  with_env(walk->add_option("--out", walk_out, "corpus output path")->required());
  add_common(walk);

  // train
  auto* tr = app.add_subcommand("train", "train embeddings from a corpus");
  GraphArgs train_graph;
  TrainArgs train_args;
  std::string corpus_path, pairs_in, pairs_out, train_out;
  bool binary = false;
  add_graph_options(tr, train_graph);
  with_env(tr->add_option("--corpus", corpus_path, "walk corpus file"));
  with_env(tr->add_option("--pairs", pairs_in, "pre-counted pair table cache"));
  with_env(tr->add_option("--save-pairs", pairs_out, "write the pair table cache"));
  add_train_options(tr, train_args);
  with_env(tr->add_option("--threads", threads)->capture_default_str());
  with_env(tr->add_flag("--binary", binary, "write binary embeddings"));
  with_env(tr->add_option("--out", train_out, "embedding output path")->required());
  add_common(tr);

  // embed = walk + count + train
  auto* em = app.add_subcommand("embed", "walk, count pairs and train in one run");
  GraphArgs embed_graph;
  PolicyArgs embed_policy;
  TrainArgs embed_train;
  std::string embed_out, corpus_out;
  bool embed_binary = false;
  add_graph_options(em, embed_graph);
  add_policy_options(em, embed_policy);
  with_env(em->add_option("--length", length, "max walk length L in nodes")
               ->capture_default_str());
  with_env(em->add_option("--walks-per-node", walks_per_node, "walks per start node gamma")
               ->capture_default_str());
  add_train_options(em, embed_train);
  with_env(em->add_option("--threads", threads)->capture_default_str());
  with_env(em->add_flag("--binary", embed_binary, "write binary embeddings"));
  with_env(em->add_option("--corpus-out", corpus_out, "corpus output (default <out>.corpus)"));
  with_env(em->add_option("--out", embed_out, "embedding output path")->required());
  add_common(em);

  // eval
  auto* ev = app.add_subcommand("eval", "evaluate embeddings");
  ev->require_subcommand(1);
  std::string emb_path, labels_path, k_list_csv = "100";
  double train_ratio = 0.05;
  int repetitions = 10, k = 4, queries = 1000;
  std::vector<CLI::App*> eval_cmds;
  for (const char* task : {"classify", "cluster", "search"}) {
    auto* sub = ev->add_subcommand(task);
    with_env(sub->add_option("--embeddings", emb_path)->required());
    with_env(sub->add_option("--labels", labels_path)->required());
    add_common(sub);
    eval_cmds.push_back(sub);
  }
  with_env(eval_cmds[0]->add_option("--train-ratio", train_ratio)->capture_default_str());
  with_env(eval_cmds[0]->add_option("--repetitions", repetitions)->capture_default_str());
  with_env(eval_cmds[1]->add_option("--k", k, "number of clusters")->capture_default_str());
  with_env(eval_cmds[2]->add_option("--k", k_list_csv, "comma-separated precision@k list")
               ->capture_default_str());
  with_env(eval_cmds[2]->add_option("--queries", queries)->capture_default_str());

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) {
      return cmd_generate(gen, gen_config, communities, authors, papers, venues, min_app,
                          max_app, retention, cross, sparsify, cite, seed, gen_out,
                          manifest_path);
    }
    if (walk->parsed()) {
      return cmd_walk(walk, walk_graph, walk_policy, length, walks_per_node, seed, threads,
                      walk_out, manifest_path);
    }
    if (tr->parsed()) {
      return cmd_train(tr, train_graph, corpus_path, pairs_in, pairs_out, train_args, seed,
                       threads, binary, train_out, manifest_path);
    }
    if (em->parsed()) {
      return cmd_embed(em, embed_graph, embed_policy, length, walks_per_node, embed_train, seed,
                       threads, embed_binary, embed_out, corpus_out, manifest_path);
    }
    if (ev->parsed()) {
      for (size_t i = 0; i < eval_cmds.size(); ++i) {
        if (eval_cmds[i]->parsed()) {
          const char* tasks[] = {"classify", "cluster", "search"};
          return cmd_eval(eval_cmds[i], tasks[i], emb_path, labels_path, train_ratio,
                          repetitions, k, k_list_csv, queries, seed, manifest_path);
        }
      }
    }
    throw UsageError("no subcommand given");
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace mg2v::cli
