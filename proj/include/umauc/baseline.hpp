// Naive pairwise square-loss solver: gradient descent on the exact weighted
// cross-bag pair objective. Quadratic in the pool size by construction, so
// it is capped to small problems; it exists as the reference the O(n)
// min-max trainer is validated against.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "umauc/aucmetrics.hpp"
#include "umauc/bagdata.hpp"
#include "umauc/scorer.hpp"

namespace umauc {

struct PairwiseConfig {
  std::optional<PairWeights> weights;  // default: reduction-implied z_ij
  int epochs = 200;
  double lr = 0.1;
  bool full_batch = true;
  int batch_pairs = 4096;  // sampled pairs per step when full_batch is off
  std::int64_t pair_cap = 4'000'000;
  std::uint64_t seed = 1;

  void validate() const;
};

struct PairwiseResult {
  // epoch_risk[t] is the exact weighted pairwise risk after t epochs
  // (entry 0 is the untouched initial model), recomputed from a full pair
  // pass at every boundary.
  std::vector<double> epoch_risk;

  std::string to_csv() const;  // epoch,risk
};

// Trains a single-head model in place. Throws when the cross-bag pair count
// exceeds cfg.pair_cap.
PairwiseResult train_pairwise(const BagCollection& bags, Scorer& model,
                              const PairwiseConfig& cfg);

}  // namespace umauc
