#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mg2v/common.hpp"

namespace mg2v {

// Read-only view of a row-major matrix (embedding rows).
struct MatrixView {
  const double* data = nullptr;
  size_t rows = 0;
  size_t cols = 0;

  std::span<const double> row(size_t r) const { return {data + r * cols, cols}; }
};

struct EvalReport {
  std::string task;
  std::vector<std::pair<std::string, std::string>> params;
  std::map<std::string, std::vector<double>> samples;  // metric -> per-seed values

  void add_param(const std::string& k, const std::string& v) { params.emplace_back(k, v); }
  double mean(const std::string& metric) const;
  double stddev(const std::string& metric) const;

  void print_table(std::ostream& os) const;  // aligned columns
  void print_kv(std::ostream& os) const;     // machine-readable key=value lines
};

// Rows with label < 0 are ignored by every task below.

// One-vs-rest L2-regularized logistic regression on a random train split,
// repeated `repetitions` times; reports micro-accuracy per repetition.
EvalReport classify(MatrixView emb, const std::vector<int>& labels, double train_ratio,
                    int repetitions, uint64_t seed);

// K-means (k-means++ seeding, `restarts` restarts, best inertia), scored by
// Hungarian-matched accuracy, pairwise F1 and NMI against the labels.
EvalReport cluster(MatrixView emb, const std::vector<int>& labels, int k, uint64_t seed,
                   int restarts = 10);

// Cosine similarity search: precision@k over n_queries sampled labeled nodes,
// ties broken by ascending node id. Zero-norm rows are excluded (counted in
// the report params).
EvalReport search_precision(MatrixView emb, const std::vector<int>& labels,
                            const std::vector<int>& k_list, int n_queries, uint64_t seed);

// Building blocks, exposed for direct use and testing.
double nmi(const std::vector<int>& a, const std::vector<int>& b);
double pairwise_f1(const std::vector<int>& labels, const std::vector<int>& clusters);
double hungarian_accuracy(const std::vector<int>& labels, const std::vector<int>& clusters);
std::vector<int> kmeans(MatrixView points, int k, int restarts, uint64_t seed,
                        int max_iter = 100);

}  // namespace mg2v
