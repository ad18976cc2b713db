#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mg2v/common.hpp"
#include "mg2v/rng.hpp"

namespace mg2v {

// Walker's alias method: O(n) construction, O(1) sampling from a fixed
// discrete distribution.
class AliasTable {
 public:
  AliasTable() = default;

  explicit AliasTable(std::span<const double> weights) {
    const size_t n = weights.size();
    if (n == 0) throw Error("alias table needs at least one weight");
    double sum = 0.0;
    for (double w : weights) {
      if (w < 0.0) throw Error("alias table weights must be non-negative");
      sum += w;
    }
    if (sum <= 0.0) throw Error("alias table weights sum to zero");

    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    std::vector<uint32_t> small, large;
    small.reserve(n);
    large.reserve(n);
    std::vector<double> scaled(n);
    for (size_t i = 0; i < n; ++i) {
      scaled[i] = weights[i] * static_cast<double>(n) / sum;
      (scaled[i] < 1.0 ? small : large).push_back(static_cast<uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
      uint32_t s = small.back();
      uint32_t l = large.back();
      small.pop_back();
      large.pop_back();
      prob_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] -= 1.0 - scaled[s];
      (scaled[l] < 1.0 ? small : large).push_back(l);
    }
    // Leftovers are 1.0 up to rounding.
    for (uint32_t i : small) prob_[i] = 1.0, alias_[i] = i;
    for (uint32_t i : large) prob_[i] = 1.0, alias_[i] = i;
  }

  uint32_t sample(Pcg32& rng) const {
    uint32_t i = rng.bounded(static_cast<uint32_t>(prob_.size()));
    return rng.uniform() < prob_[i] ? i : alias_[i];
  }

  size_t size() const { return prob_.size(); }
  bool empty() const { return prob_.empty(); }

 private:
  std::vector<double> prob_;
  std::vector<uint32_t> alias_;
};

}  // namespace mg2v
