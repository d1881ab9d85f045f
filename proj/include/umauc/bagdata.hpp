// Um data model: bags of unlabeled instances whose class priors are known
// only by relative order, plus synthesis from a labeled pool and (de)serialization.
//
// Hidden labels and true priors are carried for synthesis and evaluation
// only. Training code consumes features and bag membership; the evaluation
// helpers that need labels take them explicitly.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace umauc {

struct Instance {
  std::vector<double> features;
  // +1 / -1 when the instance originates from a labeled pool, nullopt for NA.
  std::optional<int> hidden_label;
};

struct Bag {
  int id = 0;  // 1-based rank position within the collection
  std::vector<Instance> instances;
  std::optional<double> true_prior;  // prior used at synthesis time

  std::int64_t size() const { return static_cast<std::int64_t>(instances.size()); }
};

class BagCollection {
 public:
  BagCollection(std::vector<Bag> bags, int d, std::uint64_t seed = 0);

  int m() const { return static_cast<int>(bags_.size()); }
  int d() const { return d_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<Bag>& bags() const { return bags_; }
  const Bag& bag(int id) const { return bags_.at(static_cast<std::size_t>(id - 1)); }

  bool has_priors() const;
  std::vector<std::int64_t> sizes() const;
  std::int64_t total_instances() const;

 private:
  void validate() const;
  std::vector<Bag> bags_;  // sorted by rank, bags_[i].id == i + 1
  int d_;
  std::uint64_t seed_;
};

enum class PriorKind {
  uniform,               // Beta(1,1)
  biased,                // Beta(5,1)
  concentrated,          // Beta(5,5)
  biased_concentrated,   // Beta(5,2)
  explicit_list,
};

struct PriorSpec {
  PriorKind kind = PriorKind::uniform;
  int m = 2;
  std::vector<double> values;  // explicit_list only
};

const char* prior_kind_name(PriorKind kind);
PriorKind prior_kind_from_name(const std::string& name);

// Draws m priors under the spec, sorted descending. Sampled draws are
// rejected and redrawn (up to a cap) until pi_1 > pi_m; an explicit list
// with all-equal entries is a "degenerate priors" error.
std::vector<double> sample_priors(const PriorSpec& spec, std::uint64_t rng_seed);

enum class ImbalanceMode { none, size_reduction, random };

struct ImbalanceSpec {
  ImbalanceMode mode = ImbalanceMode::none;
  double tau = 1.0;  // size_reduction only, in (0, 1]
};

// Per-bag sizes under the imbalance regime. none: all ceil(n_train/m);
// size_reduction: ceil(m/2) randomly chosen bags get ceil(tau*(n_train/m));
// random: sizes >= 1 summing to n_train.
std::vector<std::int64_t> apply_imbalance(const ImbalanceSpec& spec, int m,
                                          std::int64_t n_train,
                                          std::uint64_t rng_seed);

// Draws each bag instance by flipping a pi_i coin for the class, then
// sampling uniformly with replacement from that class's pool partition.
// Output bags are sorted by descending prior and carry true_prior = pi_i.
BagCollection synthesize_bags(std::span<const Instance> pool,
                              std::span<const double> priors,
                              std::span<const std::int64_t> sizes,
                              std::uint64_t rng_seed);

struct GaussianPoolSpec {
  int d = 2;
  std::vector<double> mean_pos;  // defaults to (+1, ..., +1)
  std::vector<double> mean_neg;  // defaults to (-1, ..., -1)
  double sigma = 1.0;            // shared isotropic stddev
  std::int64_t n_train = 4000;
  std::int64_t n_test = 2000;
  double pos_fraction = 0.5;

  std::vector<double> effective_mean_pos() const;
  std::vector<double> effective_mean_neg() const;
};

struct LabeledPool {
  std::vector<Instance> train;
  std::vector<Instance> test;
};

LabeledPool generate_gaussian_pool(const GaussianPoolSpec& spec,
                                   std::uint64_t rng_seed);

double normal_cdf(double x);

// Best achievable AUC for the two-Gaussian pool: Phi(|mu+ - mu-| / (sigma * sqrt(2))).
double bayes_auc(const GaussianPoolSpec& spec);

// --- serialization ------------------------------------------------------
//
// Layout on disk: <dir>/manifest.json plus one headerless CSV per bag.
// Bag rows are d feature columns in decimal text then a hidden_label column
// in {+1,-1,NA}. The manifest carries m, d, bag_files (rank order),
// asserted_order, true_priors (or null), seed, format_version = 1.

void write_bags(const BagCollection& collection, const std::string& dir);
BagCollection read_bags(const std::string& dir);

// Labeled instance CSV (same row format, label required): used for test sets.
void write_labeled_csv(std::span<const Instance> instances,
                       const std::string& path);
std::vector<Instance> read_labeled_csv(const std::string& path);

}  // namespace umauc
