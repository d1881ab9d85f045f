#include "umauc/jsonconf.hpp"

#include <algorithm>
#include <stdexcept>

namespace umauc {

namespace {

using nlohmann::json;

// Pulls j[key] into out when present, marking the key as consumed.
template <typename T>
void take(const json& j, std::vector<std::string>& seen, const char* key,
          T& out) {
  seen.push_back(key);
  const auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw std::runtime_error(std::string("config: bad value for key '") + key + "'");
  }
}

void reject_unknown(const json& j, const std::vector<std::string>& seen,
                    const char* what) {
  for (const auto& [key, value] : j.items()) {
    if (std::find(seen.begin(), seen.end(), key) == seen.end())
      throw std::runtime_error(std::string("config: unknown ") + what +
                               " key '" + key + "'");
  }
}

}  // namespace

nlohmann::json train_config_to_json(const TrainConfig& cfg) {
  return {
      {"epochs", cfg.epochs},
      {"batch-size", cfg.batch_size},
      {"lr-primal", cfg.lr_primal},
      {"lr-dual", cfg.lr_dual},
      {"momentum", cfg.momentum},
      {"weight-decay", cfg.weight_decay},
      {"margin", cfg.margin},
      {"constrained-alpha", cfg.constrained_alpha},
      {"seed", cfg.seed},
      {"eval-every", cfg.eval_every},
      {"lr-decay-every", cfg.lr_decay_every},
      {"batch-exact", cfg.batch_exact},
      {"per-label-sampling", cfg.per_label_sampling},
  };
}

void train_config_from_json(const nlohmann::json& j, TrainConfig& cfg) {
  if (!j.is_object()) throw std::runtime_error("config: train section must be an object");
  std::vector<std::string> seen;
  take(j, seen, "epochs", cfg.epochs);
  take(j, seen, "batch-size", cfg.batch_size);
  take(j, seen, "lr-primal", cfg.lr_primal);
  take(j, seen, "lr-dual", cfg.lr_dual);
  take(j, seen, "momentum", cfg.momentum);
  take(j, seen, "weight-decay", cfg.weight_decay);
  take(j, seen, "margin", cfg.margin);
  take(j, seen, "constrained-alpha", cfg.constrained_alpha);
  take(j, seen, "seed", cfg.seed);
  take(j, seen, "eval-every", cfg.eval_every);
  take(j, seen, "lr-decay-every", cfg.lr_decay_every);
  take(j, seen, "batch-exact", cfg.batch_exact);
  take(j, seen, "per-label-sampling", cfg.per_label_sampling);
  reject_unknown(j, seen, "train config");
}

nlohmann::json pairwise_config_to_json(const PairwiseConfig& cfg) {
  return {
      {"epochs", cfg.epochs},
      {"lr", cfg.lr},
      {"full-batch", cfg.full_batch},
      {"batch-pairs", cfg.batch_pairs},
      {"pair-cap", cfg.pair_cap},
      {"seed", cfg.seed},
  };
}

void pairwise_config_from_json(const nlohmann::json& j, PairwiseConfig& cfg) {
  if (!j.is_object())
    throw std::runtime_error("config: pairwise section must be an object");
  std::vector<std::string> seen;
  take(j, seen, "epochs", cfg.epochs);
  take(j, seen, "lr", cfg.lr);
  take(j, seen, "full-batch", cfg.full_batch);
  take(j, seen, "batch-pairs", cfg.batch_pairs);
  take(j, seen, "pair-cap", cfg.pair_cap);
  take(j, seen, "seed", cfg.seed);
  reject_unknown(j, seen, "pairwise config");
}

nlohmann::json pool_spec_to_json(const GaussianPoolSpec& spec) {
  return {
      {"d", spec.d},
      {"mean-pos", spec.effective_mean_pos()},
      {"mean-neg", spec.effective_mean_neg()},
      {"sigma", spec.sigma},
      {"n-train", spec.n_train},
      {"n-test", spec.n_test},
      {"pos-fraction", spec.pos_fraction},
  };
}

void pool_spec_from_json(const nlohmann::json& j, GaussianPoolSpec& spec) {
  if (!j.is_object()) throw std::runtime_error("config: pool section must be an object");
  std::vector<std::string> seen;
  take(j, seen, "d", spec.d);
  take(j, seen, "mean-pos", spec.mean_pos);
  take(j, seen, "mean-neg", spec.mean_neg);
  take(j, seen, "sigma", spec.sigma);
  take(j, seen, "n-train", spec.n_train);
  take(j, seen, "n-test", spec.n_test);
  take(j, seen, "pos-fraction", spec.pos_fraction);
  reject_unknown(j, seen, "pool spec");
}

}  // namespace umauc
