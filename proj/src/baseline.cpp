#include "umauc/baseline.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "umauc/reduction.hpp"
#include "umauc/rng.hpp"
#include "umauc/textfmt.hpp"

namespace umauc {

namespace {

struct FlatPool {
  std::vector<const std::vector<double>*> x;  // bag order
  std::vector<std::size_t> offset;            // per bag, into x
  std::vector<std::int64_t> sizes;
};

FlatPool flatten(const BagCollection& bags) {
  FlatPool pool;
  pool.sizes = bags.sizes();
  pool.offset.reserve(bags.m());
  for (const Bag& bag : bags.bags()) {
    pool.offset.push_back(pool.x.size());
    for (const Instance& ins : bag.instances) pool.x.push_back(&ins.features);
  }
  return pool;
}

std::vector<double> score_all(const Scorer& model, const FlatPool& pool) {
  std::vector<double> scores(pool.x.size());
  double head = 0.0;
  for (std::size_t i = 0; i < pool.x.size(); ++i) {
    model.forward(*pool.x[i], std::span<double>(&head, 1));
    scores[i] = head;
  }
  return scores;
}

// One exact pass over every weighted cross-bag pair. Returns the risk and,
// when coef is given, accumulates dRisk/dscore per instance into it.
double pair_pass(const FlatPool& pool, const PairWeights& z,
                 const std::vector<double>& scores,
                 std::vector<double>* coef) {
  const int m = z.m();
  double risk = 0.0;
  for (int i = 1; i < m; ++i) {
    for (int j = i + 1; j <= m; ++j) {
      const double zij = z.at(i, j);
      if (zij == 0.0) continue;
      const std::size_t oi = pool.offset[static_cast<std::size_t>(i - 1)];
      const std::size_t oj = pool.offset[static_cast<std::size_t>(j - 1)];
      const std::int64_t ni = pool.sizes[static_cast<std::size_t>(i - 1)];
      const std::int64_t nj = pool.sizes[static_cast<std::size_t>(j - 1)];
      const double pair_w = zij / (static_cast<double>(ni) * static_cast<double>(nj));
      double sum = 0.0;
      for (std::int64_t a = 0; a < ni; ++a) {
        const double si = scores[oi + static_cast<std::size_t>(a)];
        for (std::int64_t b = 0; b < nj; ++b) {
          const double sj = scores[oj + static_cast<std::size_t>(b)];
          const double e = 1.0 - si + sj;
          sum += e * e;
          if (coef != nullptr) {
            (*coef)[oi + static_cast<std::size_t>(a)] -= 2.0 * e * pair_w;
            (*coef)[oj + static_cast<std::size_t>(b)] += 2.0 * e * pair_w;
          }
        }
      }
      risk += pair_w * sum;
    }
  }
  return risk;
}

void apply_coef_step(Scorer& model, const FlatPool& pool,
                     const std::vector<double>& coef, SgdState& state,
                     double lr) {
  GradientBuffer gbuf(model.num_params());
  for (std::size_t i = 0; i < pool.x.size(); ++i) {
    if (coef[i] == 0.0) continue;
    const double upstream = coef[i];
    model.backward(*pool.x[i], std::span<const double>(&upstream, 1), gbuf);
  }
  sgd_step(model, gbuf, state, lr, 0.0, 0.0);
}

}  // namespace

void PairwiseConfig::validate() const {
  if (epochs < 0) throw std::invalid_argument("pairwise config: epochs must be >= 0");
  if (!(lr > 0.0)) throw std::invalid_argument("pairwise config: lr must be positive");
  if (batch_pairs < 1)
    throw std::invalid_argument("pairwise config: batch_pairs must be >= 1");
  if (pair_cap < 1)
    throw std::invalid_argument("pairwise config: pair_cap must be >= 1");
}

std::string PairwiseResult::to_csv() const {
  std::ostringstream out;
  out << "epoch,risk\n";
  for (std::size_t t = 0; t < epoch_risk.size(); ++t)
    out << t << ',' << format_double(epoch_risk[t]) << '\n';
  return out.str();
}

PairwiseResult train_pairwise(const BagCollection& bags, Scorer& model,
                              const PairwiseConfig& cfg) {
  cfg.validate();
  if (model.num_heads() != 1)
    throw std::invalid_argument("pairwise trainer: model must have one head");
  if (model.input_dim() != bags.d())
    throw std::invalid_argument("pairwise trainer: model input dimension mismatch");

  PairWeights z = cfg.weights ? *cfg.weights
                              : ReductionPlan(bags.sizes()).um_weights();
  if (z.m() != bags.m())
    throw std::invalid_argument("pairwise trainer: weight matrix order mismatch");
  z.validate();

  const FlatPool pool = flatten(bags);
  std::int64_t pair_count = 0;
  for (int i = 1; i < bags.m(); ++i)
    for (int j = i + 1; j <= bags.m(); ++j)
      if (z.at(i, j) != 0.0)
        pair_count += pool.sizes[static_cast<std::size_t>(i - 1)] *
                      pool.sizes[static_cast<std::size_t>(j - 1)];
  if (pair_count > cfg.pair_cap)
    throw std::runtime_error("pairwise trainer: " + std::to_string(pair_count) +
                             " pairs exceed the cap of " +
                             std::to_string(cfg.pair_cap));

  // Enumerate positive-weight bag pairs once for the sampling mode.
  std::vector<std::pair<int, int>> live_pairs;
  for (int i = 1; i < bags.m(); ++i)
    for (int j = i + 1; j <= bags.m(); ++j)
      if (z.at(i, j) != 0.0) live_pairs.emplace_back(i, j);

  SgdState state(model.num_params());
  Rng rng(derive_seed(cfg.seed, 0x70616972));
  PairwiseResult result;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<double> scores = score_all(model, pool);
    if (cfg.full_batch) {
      std::vector<double> coef(pool.x.size(), 0.0);
      result.epoch_risk.push_back(pair_pass(pool, z, scores, &coef));
      apply_coef_step(model, pool, coef, state, cfg.lr);
    } else {
      result.epoch_risk.push_back(pair_pass(pool, z, scores, nullptr));
      const std::int64_t steps =
          (pair_count + cfg.batch_pairs - 1) / cfg.batch_pairs;
      const double scale =
          static_cast<double>(live_pairs.size()) / cfg.batch_pairs;
      for (std::int64_t step = 0; step < steps; ++step) {
        std::vector<double> coef(pool.x.size(), 0.0);
        for (int t = 0; t < cfg.batch_pairs; ++t) {
          const auto [i, j] = live_pairs[static_cast<std::size_t>(rng.uniform_int(
              0, static_cast<std::int64_t>(live_pairs.size()) - 1))];
          const std::size_t a =
              pool.offset[static_cast<std::size_t>(i - 1)] +
              static_cast<std::size_t>(rng.uniform_int(
                  0, pool.sizes[static_cast<std::size_t>(i - 1)] - 1));
          const std::size_t b =
              pool.offset[static_cast<std::size_t>(j - 1)] +
              static_cast<std::size_t>(rng.uniform_int(
                  0, pool.sizes[static_cast<std::size_t>(j - 1)] - 1));
          double sa = 0.0, sb = 0.0;
          model.forward(*pool.x[a], std::span<double>(&sa, 1));
          model.forward(*pool.x[b], std::span<double>(&sb, 1));
          const double e = 1.0 - sa + sb;
          coef[a] -= 2.0 * e * z.at(i, j) * scale;
          coef[b] += 2.0 * e * z.at(i, j) * scale;
        }
        apply_coef_step(model, pool, coef, state, cfg.lr);
      }
    }
  }
  result.epoch_risk.push_back(pair_pass(pool, z, score_all(model, pool), nullptr));
  return result;
}

}  // namespace umauc
