#include "mg2v/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "mg2v/rng.hpp"

namespace mg2v {

double EvalReport::mean(const std::string& metric) const {
  auto it = samples.find(metric);
  if (it == samples.end() || it->second.empty()) throw Error("no samples for metric " + metric);
  return std::accumulate(it->second.begin(), it->second.end(), 0.0) /
         static_cast<double>(it->second.size());
}

double EvalReport::stddev(const std::string& metric) const {
  auto it = samples.find(metric);
  if (it == samples.end() || it->second.empty()) throw Error("no samples for metric " + metric);
  double m = mean(metric);
  double ss = 0.0;
  for (double v : it->second) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(it->second.size()));
}

void EvalReport::print_table(std::ostream& os) const {
  os << "task: " << task << "\n";
  for (const auto& [k, v] : params) os << "  " << k << " = " << v << "\n";
  os << "  " << std::left << std::setw(18) << "metric" << std::right << std::setw(10) << "mean"
     << std::setw(10) << "std" << std::setw(8) << "n" << "\n";
  for (const auto& [metric, values] : samples) {
    os << "  " << std::left << std::setw(18) << metric << std::right << std::fixed
       << std::setprecision(4) << std::setw(10) << mean(metric) << std::setw(10)
       << stddev(metric) << std::setw(8) << values.size() << "\n";
    os.unsetf(std::ios::fixed);
    os << std::setprecision(6);
  }
}

void EvalReport::print_kv(std::ostream& os) const {
  os << "task=" << task << "\n";
  for (const auto& [k, v] : params) os << k << "=" << v << "\n";
  for (const auto& [metric, values] : samples) {
    os << metric << ".mean=" << mean(metric) << "\n";
    os << metric << ".std=" << stddev(metric) << "\n";
    os << metric << ".n=" << values.size() << "\n";
  }
}

namespace {

// Contingency table between two labelings over the same items, with labels
// compacted to 0..k-1.
struct Contingency {
  std::vector<std::vector<int64_t>> cells;  // [a][b]
  std::vector<int64_t> row_sum, col_sum;
  int64_t n = 0;
};

int compact(std::vector<int>& v) {
  std::vector<int> uniq(v);
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  for (int& x : v) {
    x = static_cast<int>(std::lower_bound(uniq.begin(), uniq.end(), x) - uniq.begin());
  }
  return static_cast<int>(uniq.size());
}

Contingency contingency(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw Error("labelings must have equal length");
  if (a.empty()) throw Error("labelings are empty");
  std::vector<int> ca(a), cb(b);
  int na = compact(ca), nb = compact(cb);
  Contingency t;
  t.cells.assign(na, std::vector<int64_t>(nb, 0));
  t.row_sum.assign(na, 0);
  t.col_sum.assign(nb, 0);
  t.n = static_cast<int64_t>(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    t.cells[ca[i]][cb[i]] += 1;
    t.row_sum[ca[i]] += 1;
    t.col_sum[cb[i]] += 1;
  }
  return t;
}

double entropy(const std::vector<int64_t>& counts, int64_t n) {
  double h = 0.0;
  for (int64_t c : counts) {
    if (c > 0) {
      double p = static_cast<double>(c) / static_cast<double>(n);
      h -= p * std::log(p);
    }
  }
  return h;
}

// Minimum-cost perfect assignment on a square matrix (shortest augmenting
// paths with potentials). Returns row -> column.
std::vector<int> assignment_min(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

double nmi(const std::vector<int>& a, const std::vector<int>& b) {
  Contingency t = contingency(a, b);
  double ha = entropy(t.row_sum, t.n);
  double hb = entropy(t.col_sum, t.n);
  if (ha == 0.0 && hb == 0.0) return 1.0;  // both trivial partitions, identical
  if (ha == 0.0 || hb == 0.0) return 0.0;
  double mi = 0.0;
  const double n = static_cast<double>(t.n);
  for (size_t i = 0; i < t.cells.size(); ++i) {
    for (size_t j = 0; j < t.cells[i].size(); ++j) {
      int64_t c = t.cells[i][j];
      if (c == 0) continue;
      double pij = static_cast<double>(c) / n;
      mi += pij * std::log(pij * n * n / (static_cast<double>(t.row_sum[i]) *
                                          static_cast<double>(t.col_sum[j])));
    }
  }
  return mi / (0.5 * (ha + hb));
}

double pairwise_f1(const std::vector<int>& labels, const std::vector<int>& clusters) {
  Contingency t = contingency(labels, clusters);
  auto pairs2 = [](int64_t m) { return m * (m - 1) / 2; };
  int64_t tp = 0;
  for (const auto& row : t.cells) {
    for (int64_t c : row) tp += pairs2(c);
  }
  int64_t same_class = 0, same_cluster = 0;
  for (int64_t r : t.row_sum) same_class += pairs2(r);
  for (int64_t c : t.col_sum) same_cluster += pairs2(c);
  if (same_class == 0 || same_cluster == 0) return same_class == same_cluster ? 1.0 : 0.0;
  double precision = static_cast<double>(tp) / static_cast<double>(same_cluster);
  double recall = static_cast<double>(tp) / static_cast<double>(same_class);
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double hungarian_accuracy(const std::vector<int>& labels, const std::vector<int>& clusters) {
  Contingency t = contingency(labels, clusters);
  size_t m = std::max(t.cells.size(), t.cells.empty() ? 0 : t.cells[0].size());
  m = std::max(m, t.col_sum.size());
  std::vector<std::vector<double>> cost(m, std::vector<double>(m, 0.0));
  for (size_t i = 0; i < t.cells.size(); ++i) {
    for (size_t j = 0; j < t.cells[i].size(); ++j) {
      cost[i][j] = -static_cast<double>(t.cells[i][j]);
    }
  }
  auto match = assignment_min(cost);
  int64_t hit = 0;
  for (size_t i = 0; i < t.cells.size(); ++i) {
    int j = match[i];
    if (j >= 0 && static_cast<size_t>(j) < t.cells[i].size()) hit += t.cells[i][j];
  }
  return static_cast<double>(hit) / static_cast<double>(t.n);
}

std::vector<int> kmeans(MatrixView points, int k, int restarts, uint64_t seed, int max_iter) {
  const size_t n = points.rows, d = points.cols;
  if (k < 1) throw Error("k must be >= 1");
  if (n < static_cast<size_t>(k)) {
    throw Error("k=" + std::to_string(k) + " exceeds point count " + std::to_string(n));
  }

  auto dist2 = [&](std::span<const double> p, const double* c) {
    double s = 0.0;
    for (size_t j = 0; j < d; ++j) {
      double diff = p[j] - c[j];
      s += diff * diff;
    }
    return s;
  };

  std::vector<int> best_assign(n, 0);
  double best_inertia = std::numeric_limits<double>::infinity();

  for (int restart = 0; restart < std::max(1, restarts); ++restart) {
    Pcg32 rng = substream(seed, 0x6b6d0000ULL + restart);
    std::vector<double> centers(static_cast<size_t>(k) * d);
    std::vector<double> mind(n, std::numeric_limits<double>::infinity());

    // k-means++ seeding
    size_t first = rng.bounded(static_cast<uint32_t>(n));
    std::copy_n(points.row(first).data(), d, centers.begin());
    for (int c = 1; c < k; ++c) {
      double total = 0.0;
      for (size_t i = 0; i < n; ++i) {
        double dd = dist2(points.row(i), &centers[(c - 1) * d]);
        if (dd < mind[i]) mind[i] = dd;
        total += mind[i];
      }
      size_t pick = 0;
      if (total > 0.0) {
        double r = rng.uniform() * total;
        double acc = 0.0;
        for (size_t i = 0; i < n; ++i) {
          acc += mind[i];
          if (acc >= r) {
            pick = i;
            break;
          }
        }
      } else {
        pick = rng.bounded(static_cast<uint32_t>(n));
      }
      std::copy_n(points.row(pick).data(), d, centers.begin() + c * d);
    }

    std::vector<int> assign(n, -1);
    std::vector<double> sums(static_cast<size_t>(k) * d);
    std::vector<int64_t> sizes(k);
    double inertia = 0.0;
    for (int iter = 0; iter < max_iter; ++iter) {
      bool changed = false;
      inertia = 0.0;
      for (size_t i = 0; i < n; ++i) {
        int arg = 0;
        double best = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
          double dd = dist2(points.row(i), &centers[c * d]);
          if (dd < best) {
            best = dd;
            arg = c;
          }
        }
        if (assign[i] != arg) {
          assign[i] = arg;
          changed = true;
        }
        inertia += best;
      }
      if (!changed && iter > 0) break;
      std::fill(sums.begin(), sums.end(), 0.0);
      std::fill(sizes.begin(), sizes.end(), 0);
      for (size_t i = 0; i < n; ++i) {
        auto row = points.row(i);
        for (size_t j = 0; j < d; ++j) sums[assign[i] * d + j] += row[j];
        sizes[assign[i]] += 1;
      }
      for (int c = 0; c < k; ++c) {
        if (sizes[c] == 0) {
          // Re-seed an empty cluster at the point farthest from its center.
          size_t far = 0;
          double fd = -1.0;
          for (size_t i = 0; i < n; ++i) {
            double dd = dist2(points.row(i), &centers[assign[i] * d]);
            if (dd > fd) {
              fd = dd;
              far = i;
            }
          }
          std::copy_n(points.row(far).data(), d, centers.begin() + c * d);
        } else {
          for (size_t j = 0; j < d; ++j) {
            centers[c * d + j] = sums[c * d + j] / static_cast<double>(sizes[c]);
          }
        }
      }
    }
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best_assign = assign;
    }
  }
  return best_assign;
}

namespace {

// One-vs-rest L2-regularized logistic regression trained by plain gradient
// descent with a Lipschitz step size; deterministic by construction.
struct LogisticOvR {
  int n_classes = 0;
  int dim = 0;
  std::vector<double> w;  // n_classes x (dim + 1), last column is the bias

  static LogisticOvR fit(MatrixView x, const std::vector<int>& y,
                         const std::vector<size_t>& train_idx, int n_classes,
                         double lambda = 1e-4, int iterations = 1000) {
    LogisticOvR m;
    m.n_classes = n_classes;
    m.dim = static_cast<int>(x.cols);
    const int dp1 = m.dim + 1;
    m.w.assign(static_cast<size_t>(n_classes) * dp1, 0.0);

    double max_norm2 = 1.0;
    for (size_t i : train_idx) {
      double s = 1.0;  // bias feature
      for (double v : x.row(i)) s += v * v;
      max_norm2 = std::max(max_norm2, s);
    }
    const double step = 1.0 / (0.25 * max_norm2 + lambda);
    const double inv_n = 1.0 / static_cast<double>(train_idx.size());

    std::vector<double> grad(dp1);
    for (int c = 0; c < n_classes; ++c) {
      double* wc = &m.w[static_cast<size_t>(c) * dp1];
      for (int it = 0; it < iterations; ++it) {
        std::fill(grad.begin(), grad.end(), 0.0);
        for (size_t i : train_idx) {
          auto row = x.row(i);
          double s = wc[m.dim];
          for (int j = 0; j < m.dim; ++j) s += wc[j] * row[j];
          double target = y[i] == c ? 1.0 : 0.0;
          double err = 1.0 / (1.0 + std::exp(-s)) - target;
          for (int j = 0; j < m.dim; ++j) grad[j] += err * row[j];
          grad[m.dim] += err;
        }
        for (int j = 0; j < m.dim; ++j) {
          wc[j] -= step * (grad[j] * inv_n + lambda * wc[j]);
        }
        wc[m.dim] -= step * grad[m.dim] * inv_n;
      }
    }
    return m;
  }

  int predict(std::span<const double> row) const {
    const int dp1 = dim + 1;
    int arg = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < n_classes; ++c) {
      const double* wc = &w[static_cast<size_t>(c) * dp1];
      double s = wc[dim];
      for (int j = 0; j < dim; ++j) s += wc[j] * row[j];
      if (s > best) {
        best = s;
        arg = c;
      }
    }
    return arg;
  }
};

std::vector<size_t> labeled_indices(const std::vector<int>& labels) {
  std::vector<size_t> idx;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= 0) idx.push_back(i);
  }
  return idx;
}

}  // namespace

EvalReport classify(MatrixView emb, const std::vector<int>& labels, double train_ratio,
                    int repetitions, uint64_t seed) {
  if (labels.size() != emb.rows) throw Error("label vector does not match embedding rows");
  if (train_ratio <= 0.0 || train_ratio >= 1.0) throw Error("train ratio must be in (0,1)");
  if (repetitions < 1) throw Error("repetitions must be >= 1");

  std::vector<size_t> idx = labeled_indices(labels);
  if (idx.size() < 2) throw Error("classification needs at least 2 labeled nodes");
  int n_classes = 0;
  for (size_t i : idx) n_classes = std::max(n_classes, labels[i] + 1);
  {
    std::vector<char> present(n_classes, 0);
    int distinct = 0;
    for (size_t i : idx) {
      if (!present[labels[i]]) {
        present[labels[i]] = 1;
        ++distinct;
      }
    }
    if (distinct < 2) throw Error("classification needs at least 2 classes");
  }

  size_t n_train = std::max<size_t>(1, static_cast<size_t>(std::llround(
                                           train_ratio * static_cast<double>(idx.size()))));
  n_train = std::min(n_train, idx.size() - 1);

  EvalReport report;
  report.task = "classify";
  report.add_param("train_ratio", std::to_string(train_ratio));
  report.add_param("repetitions", std::to_string(repetitions));
  report.add_param("seed", std::to_string(seed));
  report.add_param("labeled_nodes", std::to_string(idx.size()));
  report.add_param("classes", std::to_string(n_classes));

  for (int rep = 0; rep < repetitions; ++rep) {
    std::vector<size_t> shuffled = idx;
    bool ok = false;
    // Resample the split until every class has a training instance.
    for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
      Pcg32 rng = substream(seed, (static_cast<uint64_t>(rep) << 16) + attempt);
      for (size_t i = shuffled.size() - 1; i > 0; --i) {
        size_t j = rng.bounded(static_cast<uint32_t>(i + 1));
        std::swap(shuffled[i], shuffled[j]);
      }
      std::vector<char> present(n_classes, 0);
      for (size_t i = 0; i < n_train; ++i) present[labels[shuffled[i]]] = 1;
      ok = true;
      for (size_t i : idx) {
        if (!present[labels[i]]) {
          ok = false;
          break;
        }
      }
    }
    if (!ok) {
      throw Error("degenerate split: some class never appears in " + std::to_string(n_train) +
                  " training samples");
    }
    std::vector<size_t> train_idx(shuffled.begin(), shuffled.begin() + n_train);
    LogisticOvR model = LogisticOvR::fit(emb, labels, train_idx, n_classes);
    size_t hit = 0, total = 0;
    for (size_t i = n_train; i < shuffled.size(); ++i) {
      hit += model.predict(emb.row(shuffled[i])) == labels[shuffled[i]] ? 1 : 0;
      ++total;
    }
    report.samples["accuracy"].push_back(static_cast<double>(hit) /
                                         static_cast<double>(total));
  }
  return report;
}

EvalReport cluster(MatrixView emb, const std::vector<int>& labels, int k, uint64_t seed,
                   int restarts) {
  if (labels.size() != emb.rows) throw Error("label vector does not match embedding rows");
  if (k < 2) throw Error("k must be >= 2");
  std::vector<size_t> idx = labeled_indices(labels);
  if (idx.size() < static_cast<size_t>(k)) throw Error("fewer labeled nodes than clusters");

  std::vector<double> pts(idx.size() * emb.cols);
  std::vector<int> truth(idx.size());
  for (size_t r = 0; r < idx.size(); ++r) {
    auto row = emb.row(idx[r]);
    std::copy(row.begin(), row.end(), pts.begin() + r * emb.cols);
    truth[r] = labels[idx[r]];
  }
  MatrixView view{pts.data(), idx.size(), emb.cols};
  std::vector<int> assign = kmeans(view, k, restarts, seed);

  EvalReport report;
  report.task = "cluster";
  report.add_param("k", std::to_string(k));
  report.add_param("restarts", std::to_string(restarts));
  report.add_param("seed", std::to_string(seed));
  report.add_param("labeled_nodes", std::to_string(idx.size()));
  report.samples["accuracy"].push_back(hungarian_accuracy(truth, assign));
  report.samples["f_score"].push_back(pairwise_f1(truth, assign));
  report.samples["nmi"].push_back(nmi(truth, assign));
  return report;
}

EvalReport search_precision(MatrixView emb, const std::vector<int>& labels,
                            const std::vector<int>& k_list, int n_queries, uint64_t seed) {
  if (labels.size() != emb.rows) throw Error("label vector does not match embedding rows");
  if (k_list.empty()) throw Error("k list is empty");

  std::vector<size_t> valid;
  size_t zero_norm = 0;
  std::vector<double> norms(emb.rows, 0.0);
  for (size_t i = 0; i < emb.rows; ++i) {
    if (labels[i] < 0) continue;
    double s = 0.0;
    for (double v : emb.row(i)) s += v * v;
    if (s <= 0.0) {
      ++zero_norm;
      continue;
    }
    norms[i] = std::sqrt(s);
    valid.push_back(i);
  }
  if (valid.size() < 2) throw Error("similarity search needs at least 2 usable rows");
  for (int k : k_list) {
    if (k < 1 || static_cast<size_t>(k) >= valid.size()) {
      throw Error("k=" + std::to_string(k) + " must be in [1, #nodes)");
    }
  }
  size_t nq = std::min<size_t>(static_cast<size_t>(std::max(1, n_queries)), valid.size());

  std::vector<size_t> queries = valid;
  Pcg32 rng = substream(seed, 0x71756572);
  for (size_t i = 0; i < nq; ++i) {
    size_t j = i + rng.bounded(static_cast<uint32_t>(queries.size() - i));
    std::swap(queries[i], queries[j]);
  }
  queries.resize(nq);

  EvalReport report;
  report.task = "search";
  report.add_param("queries", std::to_string(nq));
  report.add_param("seed", std::to_string(seed));
  report.add_param("candidates", std::to_string(valid.size()));
  report.add_param("excluded_zero_norm", std::to_string(zero_norm));

  const int max_k = *std::max_element(k_list.begin(), k_list.end());
  std::vector<std::pair<double, size_t>> ranked;
  for (size_t q : queries) {
    ranked.clear();
    auto qrow = emb.row(q);
    for (size_t c : valid) {
      if (c == q) continue;
      auto crow = emb.row(c);
      double dp = 0.0;
      for (size_t j = 0; j < emb.cols; ++j) dp += qrow[j] * crow[j];
      // Negated similarity so that ascending sort puts best first; ties break
      // toward the smaller node id.
      ranked.emplace_back(-dp / (norms[q] * norms[c]), c);
    }
    std::partial_sort(ranked.begin(), ranked.begin() + max_k, ranked.end());
    for (int k : k_list) {
      int hit = 0;
      for (int r = 0; r < k; ++r) hit += labels[ranked[r].second] == labels[q] ? 1 : 0;
      report.samples["precision@" + std::to_string(k)].push_back(
          static_cast<double>(hit) / static_cast<double>(k));
    }
  }
  return report;
}

}  // namespace mg2v
