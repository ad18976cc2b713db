#include "mg2v/trainer.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <thread>

namespace mg2v {

const char* to_string(SkipGramMode mode) {
  return mode == SkipGramMode::homogeneous ? "homogeneous" : "heterogeneous";
}

SkipGramMode skip_gram_mode_from_string(const std::string& s) {
  if (s == "homogeneous") return SkipGramMode::homogeneous;
  if (s == "heterogeneous") return SkipGramMode::heterogeneous;
  throw Error("unknown skip-gram mode '" + s + "' (homogeneous|heterogeneous)");
}

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double log_sigmoid(double x) {
  // log(1/(1+e^-x)) without overflow on either tail.
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

constexpr uint64_t kInitStream = 0x696e6974;   // model initialization
constexpr uint64_t kTrainStream = 0x73676400;  // update sampling, +thread id in parallel mode

}  // namespace

bool EmbeddingModel::all_finite() const {
  for (double v : input) {
    if (!std::isfinite(v)) return false;
  }
  for (double v : context) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

EmbeddingModel EmbeddingModel::init(NodeId num_nodes, int dim, uint64_t seed) {
  if (num_nodes < 1) throw Error("embedding model needs at least one node");
  if (dim < 1) throw Error("embedding dimension must be >= 1");
  EmbeddingModel m;
  m.num_nodes = num_nodes;
  m.dim = dim;
  m.input.resize(static_cast<size_t>(num_nodes) * dim);
  m.context.assign(static_cast<size_t>(num_nodes) * dim, 0.0);
  Pcg32 rng = substream(seed, kInitStream);
  for (double& v : m.input) v = (rng.uniform() - 0.5) / dim;
  return m;
}

NegativeSampler::NegativeSampler(const PairFrequencyTable& table, SkipGramMode mode,
                                 const std::vector<TypeId>& types, size_t num_types,
                                 double noise_exponent)
    : mode_(mode) {
  if (table.empty()) throw Error("cannot build negative sampler from an empty pair table");
  size_t n_tables = mode == SkipGramMode::homogeneous ? 1 : num_types;
  if (mode == SkipGramMode::heterogeneous) {
    if (num_types == 0 || types.size() != static_cast<size_t>(table.num_nodes)) {
      throw Error("heterogeneous negative sampling needs a node type map");
    }
  }
  std::vector<std::vector<double>> weights(n_tables);
  members_.resize(n_tables);
  for (NodeId v = 0; v < table.num_nodes; ++v) {
    uint64_t c = table.context_count[v];
    if (c == 0) continue;  // never a context, never a negative
    size_t slot = mode == SkipGramMode::homogeneous ? 0 : static_cast<size_t>(types[v]);
    members_[slot].push_back(v);
    weights[slot].push_back(std::pow(static_cast<double>(c), noise_exponent));
  }
  tables_.resize(n_tables);
  for (size_t s = 0; s < n_tables; ++s) {
    if (!members_[s].empty()) tables_[s] = AliasTable(weights[s]);
  }
}

NodeId NegativeSampler::sample(TypeId context_type, Pcg32& rng) const {
  size_t slot = mode_ == SkipGramMode::homogeneous ? 0 : static_cast<size_t>(context_type);
  if (slot >= tables_.size() || tables_[slot].empty()) {
    throw Error("no negative candidates for type slot " + std::to_string(slot));
  }
  return members_[slot][tables_[slot].sample(rng)];
}

PairSampler::PairSampler(const PairFrequencyTable& table) : table_(&table) {
  if (table.empty()) throw Error("cannot build pair sampler from an empty pair table");
  std::vector<double> weights(table.size());
  for (size_t i = 0; i < table.size(); ++i) weights[i] = static_cast<double>(table.counts[i]);
  alias_ = AliasTable(weights);
}

std::pair<NodeId, NodeId> PairSampler::sample(Pcg32& rng) const {
  uint64_t k = table_->keys[alias_.sample(rng)];
  return {PairFrequencyTable::center_of(k), PairFrequencyTable::context_of(k)};
}

Samplers build_samplers(const PairFrequencyTable& table, SkipGramMode mode,
                        const std::vector<TypeId>& types, size_t num_types,
                        double noise_exponent) {
  return {PairSampler(table), NegativeSampler(table, mode, types, num_types, noise_exponent)};
}

double objective_value(const EmbeddingModel& model, NodeId center, NodeId context,
                       std::span<const NodeId> negatives) {
  auto phi = model.phi(center);
  double value = -log_sigmoid(dot(model.psi(context), phi));
  for (NodeId n : negatives) value -= log_sigmoid(-dot(model.psi(n), phi));
  return value;
}

void sgd_update(EmbeddingModel& model, NodeId center, NodeId context,
                std::span<const NodeId> negatives, double alpha) {
  const int d = model.dim;
  auto phi = model.phi(center);

  // Scalar factors at the pre-update point; repeated rows accumulate.
  double g_pos = sigmoid(dot(model.psi(context), phi)) - 1.0;
  thread_local std::vector<double> g_neg;
  g_neg.resize(negatives.size());
  for (size_t k = 0; k < negatives.size(); ++k) {
    g_neg[k] = sigmoid(dot(model.psi(negatives[k]), phi));
  }

  thread_local std::vector<double> phi_grad;
  phi_grad.assign(d, 0.0);
  auto psi_c = model.psi(context);
  for (int c = 0; c < d; ++c) phi_grad[c] += g_pos * psi_c[c];
  for (size_t k = 0; k < negatives.size(); ++k) {
    auto psi_n = model.psi(negatives[k]);
    for (int c = 0; c < d; ++c) phi_grad[c] += g_neg[k] * psi_n[c];
  }

  for (int c = 0; c < d; ++c) psi_c[c] -= alpha * g_pos * phi[c];
  for (size_t k = 0; k < negatives.size(); ++k) {
    auto psi_n = model.psi(negatives[k]);
    for (int c = 0; c < d; ++c) psi_n[c] -= alpha * g_neg[k] * phi[c];
  }
  for (int c = 0; c < d; ++c) phi[c] -= alpha * phi_grad[c];
}

namespace {

void train_stream(EmbeddingModel& model, const Samplers& samplers,
                  const std::vector<TypeId>& types, const TrainConfig& config,
                  long long iterations, Pcg32 rng, const std::atomic<long long>* global_done,
                  std::atomic<long long>* progress) {
  std::vector<NodeId> negatives;
  negatives.reserve(config.negatives);
  const long long total = std::max<long long>(1, config.max_iterations);
  long long local_done = 0;
  double alpha = config.alpha0;

  for (long long it = 0; it < iterations; ++it) {
    if ((it & 1023) == 0) {
      long long done = global_done ? global_done->load(std::memory_order_relaxed) + local_done
                                   : it;
      double remain = 1.0 - static_cast<double>(done) / static_cast<double>(total);
      alpha = config.alpha0 * std::max(remain, 1e-4);
    }
    auto [center, context] = samplers.pairs.sample(rng);
    TypeId ctx_type = types.empty() ? kNoType : types[context];
    negatives.clear();
    for (int k = 0; k < config.negatives; ++k) {
      NodeId n = samplers.negatives.sample(ctx_type, rng);
      if (n == context) continue;  // skip the positive itself, word2vec style
      negatives.push_back(n);
    }
    sgd_update(model, center, context, negatives, alpha);
    ++local_done;
    if (progress && (it & 8191) == 8191) {
      progress->fetch_add(local_done, std::memory_order_relaxed);
      local_done = 0;
    }
    if ((it & ((1 << 22) - 1)) == (1 << 22) - 1) {
      auto row = model.phi(center);
      if (!std::isfinite(row[0])) {
        throw Error("training diverged: non-finite embedding values at iteration " +
                    std::to_string(it));
      }
    }
  }
  if (progress) progress->fetch_add(local_done, std::memory_order_relaxed);
}

}  // namespace

EmbeddingModel train(const PairFrequencyTable& table, const TrainConfig& config,
                     NodeId num_nodes, const std::vector<TypeId>& types, size_t num_types) {
  if (table.empty()) throw Error("cannot train on an empty pair table");
  if (config.negatives < 1) throw Error("negative sample count must be >= 1");
  if (config.alpha0 <= 0.0) throw Error("initial learning rate must be > 0");
  if (config.max_iterations < 0) throw Error("iteration count must be >= 0");

  EmbeddingModel model = EmbeddingModel::init(num_nodes, config.dim, config.seed);
  if (config.max_iterations == 0) return model;

  Samplers samplers = build_samplers(table, config.mode, types, num_types, config.noise_exponent);

  if (config.deterministic || config.threads <= 1) {
    train_stream(model, samplers, types, config, config.max_iterations,
                 substream(config.seed, kTrainStream), nullptr, nullptr);
  } else {
    // Lock-free parallel mode: workers update the shared matrices without
    // synchronization; races only perturb low-order bits.
    std::atomic<long long> progress{0};
    int n_threads = config.threads;
    std::vector<std::thread> pool;
    long long per = config.max_iterations / n_threads;
    long long extra = config.max_iterations % n_threads;
    std::vector<std::exception_ptr> errors(n_threads);
    for (int t = 0; t < n_threads; ++t) {
      long long iters = per + (t < extra ? 1 : 0);
      pool.emplace_back([&, t, iters] {
        try {
          train_stream(model, samplers, types, config, iters,
                       substream(config.seed, kTrainStream + 1 + t), &progress, &progress);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  if (!model.all_finite()) {
    throw Error("training produced non-finite embedding values");
  }
  return model;
}

namespace {
constexpr char kEmbMagic[8] = {'M', 'G', '2', 'V', 'E', 'M', 'B', '1'};
}

void save_embeddings_text(const EmbeddingModel& model, const std::vector<std::string>& names,
                          const std::string& path) {
  if (names.size() != static_cast<size_t>(model.num_nodes)) {
    throw Error("name count does not match embedding rows");
  }
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw Error("cannot write embedding file: " + path);
  std::fprintf(f, "%d %d\n", model.num_nodes, model.dim);
  for (NodeId v = 0; v < model.num_nodes; ++v) {
    std::fputs(names[v].c_str(), f);
    auto row = model.phi(v);
    for (double x : row) std::fprintf(f, " %.9g", x);
    std::fputc('\n', f);
  }
  if (std::fclose(f) != 0) throw Error("short write to embedding file: " + path);
}

void save_embeddings_binary(const EmbeddingModel& model, const std::vector<std::string>& names,
                            const std::string& path) {
  if (names.size() != static_cast<size_t>(model.num_nodes)) {
    throw Error("name count does not match embedding rows");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write embedding file: " + path);
  out.write(kEmbMagic, sizeof(kEmbMagic));
  uint32_t n = static_cast<uint32_t>(model.num_nodes);
  uint32_t d = static_cast<uint32_t>(model.dim);
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(reinterpret_cast<const char*>(&d), sizeof(d));
  for (NodeId v = 0; v < model.num_nodes; ++v) {
    uint32_t len = static_cast<uint32_t>(names[v].size());
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(names[v].data(), len);
    for (double x : model.phi(v)) {
      float fx = static_cast<float>(x);
      out.write(reinterpret_cast<const char*>(&fx), sizeof(fx));
    }
  }
  if (!out) throw Error("short write to embedding file: " + path);
}

EmbeddingFile load_embeddings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open embedding file: " + path);
  char magic[sizeof(kEmbMagic)] = {};
  in.read(magic, sizeof(magic));
  EmbeddingFile file;
  if (in && std::memcmp(magic, kEmbMagic, sizeof(magic)) == 0) {
    uint32_t n = 0, d = 0;
    in.read(reinterpret_cast<char*>(&n), sizeof(n));
    in.read(reinterpret_cast<char*>(&d), sizeof(d));
    if (!in) throw Error("truncated embedding header: " + path);
    file.dim = static_cast<int>(d);
    file.names.reserve(n);
    file.rows.reserve(static_cast<size_t>(n) * d);
    for (uint32_t v = 0; v < n; ++v) {
      uint32_t len = 0;
      in.read(reinterpret_cast<char*>(&len), sizeof(len));
      std::string name(len, '\0');
      in.read(name.data(), len);
      if (!in) throw Error("truncated embedding body: " + path);
      file.names.push_back(std::move(name));
      for (uint32_t c = 0; c < d; ++c) {
        float fx = 0;
        in.read(reinterpret_cast<char*>(&fx), sizeof(fx));
        file.rows.push_back(static_cast<double>(fx));
      }
    }
    if (!in) throw Error("truncated embedding body: " + path);
    return file;
  }

  in.close();
  std::ifstream tin(path);
  size_t n = 0;
  int d = 0;
  if (!(tin >> n >> d) || d < 1) throw Error("bad embedding text header: " + path);
  file.dim = d;
  file.names.reserve(n);
  file.rows.reserve(n * d);
  for (size_t v = 0; v < n; ++v) {
    std::string name;
    if (!(tin >> name)) throw Error("truncated embedding file: " + path);
    file.names.push_back(name);
    for (int c = 0; c < d; ++c) {
      double x;
      if (!(tin >> x)) throw Error("truncated embedding row for '" + name + "': " + path);
      file.rows.push_back(x);
    }
  }
  return file;
}

}  // namespace mg2v
