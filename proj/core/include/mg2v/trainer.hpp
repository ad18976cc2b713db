#pragma once

#include <span>
#include <string>
#include <vector>

#include "mg2v/alias.hpp"
#include "mg2v/pair_table.hpp"

namespace mg2v {

enum class SkipGramMode { homogeneous, heterogeneous };

const char* to_string(SkipGramMode mode);
SkipGramMode skip_gram_mode_from_string(const std::string& s);

struct TrainConfig {
  SkipGramMode mode = SkipGramMode::homogeneous;
  int dim = 128;                 // embedding dimension d
  int negatives = 5;             // K
  double alpha0 = 0.025;         // initial learning rate, decays linearly to alpha0/1e4
  long long max_iterations = 1;  // SGD samples (positive pairs)
  double noise_exponent = 0.75;
  uint64_t seed = 1;
  bool deterministic = true;  // single update stream, bit-reproducible
  int threads = 1;            // used only when deterministic == false
};

// Input (Phi) and context (Psi) embeddings, row-major |V| x d.
struct EmbeddingModel {
  NodeId num_nodes = 0;
  int dim = 0;
  std::vector<double> input;    // Phi
  std::vector<double> context;  // Psi

  std::span<double> phi(NodeId v) { return {input.data() + size_t(v) * dim, size_t(dim)}; }
  std::span<const double> phi(NodeId v) const {
    return {input.data() + size_t(v) * dim, size_t(dim)};
  }
  std::span<double> psi(NodeId v) { return {context.data() + size_t(v) * dim, size_t(dim)}; }
  std::span<const double> psi(NodeId v) const {
    return {context.data() + size_t(v) * dim, size_t(dim)};
  }

  bool all_finite() const;

  // Phi ~ U[-0.5/d, 0.5/d] from the seed's init substream, Psi = 0.
  static EmbeddingModel init(NodeId num_nodes, int dim, uint64_t seed);
};

// Noise distribution: context counts raised to noise_exponent, normalized
// over all nodes (homogeneous) or within each node type (heterogeneous).
class NegativeSampler {
 public:
  NegativeSampler(const PairFrequencyTable& table, SkipGramMode mode,
                  const std::vector<TypeId>& types, size_t num_types, double noise_exponent);

  // context_type is ignored in homogeneous mode.
  NodeId sample(TypeId context_type, Pcg32& rng) const;
  SkipGramMode mode() const { return mode_; }

 private:
  SkipGramMode mode_;
  std::vector<AliasTable> tables_;            // [0] for homogeneous, per type otherwise
  std::vector<std::vector<NodeId>> members_;  // table slot -> node id
};

class PairSampler {
 public:
  explicit PairSampler(const PairFrequencyTable& table);
  std::pair<NodeId, NodeId> sample(Pcg32& rng) const;  // (center, context)

 private:
  const PairFrequencyTable* table_;
  AliasTable alias_;
};

struct Samplers {
  PairSampler pairs;
  NegativeSampler negatives;
};

Samplers build_samplers(const PairFrequencyTable& table, SkipGramMode mode,
                        const std::vector<TypeId>& types, size_t num_types,
                        double noise_exponent = 0.75);

// Negated negative-sampling objective for one positive pair, so that training
// minimizes it:  -[log sigmoid(Psi_j . Phi_i) + sum_k log sigmoid(-Psi_nk . Phi_i)].
double objective_value(const EmbeddingModel& model, NodeId center, NodeId context,
                       std::span<const NodeId> negatives);

// One SGD step on objective_value. Touches exactly Phi row `center` and Psi
// rows {context} + negatives.
void sgd_update(EmbeddingModel& model, NodeId center, NodeId context,
                std::span<const NodeId> negatives, double alpha);

// Samples config.max_iterations positive pairs from the table's frequency
// distribution and applies sgd_update with K negatives each. types/num_types
// are required for heterogeneous mode and may be empty otherwise.
EmbeddingModel train(const PairFrequencyTable& table, const TrainConfig& config,
                     NodeId num_nodes, const std::vector<TypeId>& types, size_t num_types);

// Text: "<node_count> <d>" header, then one line per node, external id plus d
// floats at 9 significant digits. Binary: magic header, little-endian float32.
void save_embeddings_text(const EmbeddingModel& model, const std::vector<std::string>& names,
                          const std::string& path);
void save_embeddings_binary(const EmbeddingModel& model, const std::vector<std::string>& names,
                            const std::string& path);

struct EmbeddingFile {
  int dim = 0;
  std::vector<std::string> names;
  std::vector<double> rows;  // row-major names.size() x dim

  std::span<const double> row(size_t i) const { return {rows.data() + i * dim, size_t(dim)}; }
};

EmbeddingFile load_embeddings(const std::string& path);  // detects text vs binary

}  // namespace mg2v
