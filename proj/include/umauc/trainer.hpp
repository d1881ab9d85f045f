// Stochastic min-max training loop: pools the bag collection, assigns each
// instance its surrogate label bits, and alternates descent on the scorer
// and the per-label centers (a_k, b_k) with ascent on the dual variables
// (alpha_k). Cost per epoch is O(n * (m-1)) loss evaluations.
//
// Training consumes only features and bag membership; prior values are
// never read, so runs are invariant to metadata rewrites that keep the
// bag order fixed.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "umauc/bagdata.hpp"
#include "umauc/minmax.hpp"
#include "umauc/scorer.hpp"

namespace umauc {

struct TrainConfig {
  int epochs = 50;
  int batch_size = 256;
  double lr_primal = 0.1;
  double lr_dual = 0.1;
  double momentum = 0.0;
  double weight_decay = 0.0;
  double margin = 1.0;
  bool constrained_alpha = false;  // clamp alpha >= 0; enables margin != 1
  std::uint64_t seed = 1;
  int eval_every = 10;       // log every k epochs (final epoch always logged)
  int lr_decay_every = 20;   // halve both rates on this epoch period
  bool batch_exact = false;  // recompute a/b/alpha exactly at each epoch start
  bool per_label_sampling = false;  // one sampled label per instance
  std::string abort_checkpoint_path;  // written if the loss turns non-finite

  void validate() const;
};

struct TrainLogRow {
  int epoch = 0;
  double train_macro_auc = 0.0;
  double test_auc = 0.0;  // NaN when no test set was supplied
  std::vector<double> label_losses;  // epoch-mean h per surrogate label
  double seconds = 0.0;              // cumulative wall time
};

struct TrainLog {
  int num_labels = 0;
  std::vector<TrainLogRow> rows;

  // Header: epoch,train_macro_auc,test_auc,loss_k1..loss_kL,seconds.
  // Timing can be excluded to make logs byte-comparable across runs.
  std::string to_csv(bool include_timing = true) const;
};

struct TrainResult {
  TrainLog log;
  MinMaxState state;
};

// Seeded permutation of [0, pool_size) split into ceil(pool/batch) chunks;
// every index appears exactly once per epoch.
std::vector<std::vector<std::size_t>> minibatch_iter(std::size_t pool_size,
                                                     int batch_size,
                                                     std::uint64_t seed,
                                                     int epoch);

// Mean of the model's head scores (the aggregate scorer f).
double aggregate_score(const Scorer& model, std::span<const double> x);

// AUC of the aggregate score against hidden labels; all instances must be
// labeled.
double labeled_auc(const Scorer& model, const std::vector<Instance>& data);

// Runs the full training loop, updating the model in place.
TrainResult train(const BagCollection& bags, Scorer& model,
                  const TrainConfig& cfg,
                  const std::vector<Instance>* test = nullptr);

}  // namespace umauc
