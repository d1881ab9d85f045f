// Reduction of the m-bag ranking problem to m-1 surrogate binary labels:
// label vectors, per-label mixing fractions p_k, implied pair weights r_ijk
// and z_ij, and head-score aggregation.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "umauc/aucmetrics.hpp"

namespace umauc {

// Bits for labels k = 1..m-1; bit k is 1 iff the instance's bag id <= k,
// so every vector is (bag_id - 1) zeros followed by ones.
std::vector<std::uint8_t> surrogate_labels(int bag_id, int m);

class ReductionPlan {
 public:
  explicit ReductionPlan(std::span<const std::int64_t> sizes);

  int m() const { return m_; }
  const std::vector<std::int64_t>& sizes() const { return sizes_; }
  std::int64_t total() const { return prefix_.back(); }

  // Mixing fraction of label k: share of the pooled sample in bags 1..k.
  double p(int k) const;

  // r_ijk = n_i n_j / (sum_{i<=k} n_i * sum_{j>k} n_j), for i <= k < j.
  double r(int i, int j, int k) const;

  // Implied Um weights z_ij = sum_{k: i<=k<j} r_ijk / (m-1).
  PairWeights um_weights() const;

  std::string to_json() const;  // keys m, sizes, p, z_pairs

 private:
  int m_;
  std::vector<std::int64_t> sizes_;
  std::vector<std::int64_t> prefix_;  // prefix_[k] = sum_{i<=k} n_i, prefix_[0] = 0
};

inline ReductionPlan build_plan(std::span<const std::int64_t> sizes) {
  return ReductionPlan(sizes);
}

// Final ranking score: arithmetic mean of the m-1 head scores.
double aggregate_scores(std::span<const double> head_scores);

}  // namespace umauc
