#include "umauc/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "umauc/aucmetrics.hpp"
#include "umauc/reduction.hpp"
#include "umauc/rng.hpp"
#include "umauc/textfmt.hpp"

namespace umauc {

namespace {

constexpr std::uint64_t kShuffleStream = 0x73687566;  // minibatch permutations
constexpr std::uint64_t kLabelStream = 0x6c616273;    // per-label sampling

struct PooledInstance {
  const std::vector<double>* x;
  int bag_id;
};

std::vector<PooledInstance> pool_collection(const BagCollection& bags) {
  std::vector<PooledInstance> pool;
  pool.reserve(bags.total_instances());
  for (const Bag& bag : bags.bags())
    for (const Instance& ins : bag.instances)
      pool.push_back({&ins.features, bag.id});
  return pool;
}

// Head scores for every pooled instance, row-major n x L.
std::vector<double> score_pool(const Scorer& model,
                               const std::vector<PooledInstance>& pool) {
  const std::size_t L = static_cast<std::size_t>(model.num_heads());
  std::vector<double> scores(pool.size() * L);
  std::vector<double> heads(L);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    model.forward(*pool[i].x, heads);
    std::copy(heads.begin(), heads.end(), scores.begin() + i * L);
  }
  return scores;
}

void exact_scalar_reset(const std::vector<PooledInstance>& pool,
                        const std::vector<double>& scores, MinMaxState& state) {
  const std::size_t L = state.labels.size();
  std::vector<double> pos_sum(L, 0.0), neg_sum(L, 0.0);
  std::vector<std::int64_t> pos_cnt(L, 0), neg_cnt(L, 0);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const int bag = pool[i].bag_id;
    for (std::size_t k = 0; k < L; ++k) {
      const double s = scores[i * L + k];
      if (bag <= static_cast<int>(k) + 1) {
        pos_sum[k] += s;
        ++pos_cnt[k];
      } else {
        neg_sum[k] += s;
        ++neg_cnt[k];
      }
    }
  }
  for (std::size_t k = 0; k < L; ++k) {
    LabelState& ls = state.labels[k];
    ls.a = pos_sum[k] / static_cast<double>(pos_cnt[k]);
    ls.b = neg_sum[k] / static_cast<double>(neg_cnt[k]);
    ls.alpha = optimal_alpha(ls.a, ls.b, state.margin, state.constrained);
  }
}

double pool_macro_auc(const std::vector<PooledInstance>& pool,
                      const std::vector<double>& scores, std::size_t L) {
  std::vector<std::vector<ScoredSample>> per_label(L);
  for (auto& v : per_label) v.reserve(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i)
    for (std::size_t k = 0; k < L; ++k) {
      const int y = pool[i].bag_id <= static_cast<int>(k) + 1 ? 1 : -1;
      per_label[k].push_back({scores[i * L + k], y});
    }
  return macro_auc(per_label);
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("train config: epochs must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("train config: batch_size must be >= 1");
  if (!(lr_primal > 0.0) || !(lr_dual > 0.0))
    throw std::invalid_argument("train config: learning rates must be positive");
  if (momentum < 0.0 || momentum >= 1.0)
    throw std::invalid_argument("train config: momentum must lie in [0, 1)");
  if (weight_decay < 0.0)
    throw std::invalid_argument("train config: weight_decay must be >= 0");
  if (!(margin > 0.0)) throw std::invalid_argument("train config: margin must be positive");
  if (!constrained_alpha && margin != 1.0)
    throw std::invalid_argument(
        "train config: margin != 1 requires constrained_alpha");
  if (eval_every < 1) throw std::invalid_argument("train config: eval_every must be >= 1");
  if (lr_decay_every < 1)
    throw std::invalid_argument("train config: lr_decay_every must be >= 1");
}

std::string TrainLog::to_csv(bool include_timing) const {
  std::ostringstream out;
  out << "epoch,train_macro_auc,test_auc";
  for (int k = 1; k <= num_labels; ++k) out << ",loss_k" << k;
  if (include_timing) out << ",seconds";
  out << '\n';
  for (const TrainLogRow& row : rows) {
    out << row.epoch << ',' << format_double(row.train_macro_auc) << ','
        << format_double(row.test_auc);
    for (double loss : row.label_losses) out << ',' << format_double(loss);
    if (include_timing) out << ',' << format_double(row.seconds);
    out << '\n';
  }
  return out.str();
}

std::vector<std::vector<std::size_t>> minibatch_iter(std::size_t pool_size,
                                                     int batch_size,
                                                     std::uint64_t seed,
                                                     int epoch) {
  if (batch_size < 1) throw std::invalid_argument("minibatch_iter: batch_size must be >= 1");
  std::vector<std::size_t> order(pool_size);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(derive_seed(seed, kShuffleStream),
                      static_cast<std::uint64_t>(epoch)));
  rng.shuffle(order);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t off = 0; off < pool_size; off += batch_size) {
    const std::size_t end = std::min(pool_size, off + batch_size);
    batches.emplace_back(order.begin() + off, order.begin() + end);
  }
  return batches;
}

double aggregate_score(const Scorer& model, std::span<const double> x) {
  std::vector<double> heads(static_cast<std::size_t>(model.num_heads()));
  model.forward(x, heads);
  double sum = 0.0;
  for (double h : heads) sum += h;
  return sum / static_cast<double>(heads.size());
}

double labeled_auc(const Scorer& model, const std::vector<Instance>& data) {
  std::vector<ScoredSample> scored;
  scored.reserve(data.size());
  for (const Instance& ins : data) {
    if (!ins.hidden_label)
      throw std::invalid_argument("labeled_auc: instance lacks a label");
    scored.push_back({aggregate_score(model, ins.features), *ins.hidden_label});
  }
  return auc_exact(scored);
}

TrainResult train(const BagCollection& bags, Scorer& model,
                  const TrainConfig& cfg, const std::vector<Instance>* test) {
  cfg.validate();
  if (model.input_dim() != bags.d())
    throw std::invalid_argument("train: model input dimension mismatch");
  const int L = bags.m() - 1;
  if (model.num_heads() != L)
    throw std::invalid_argument("train: model must have m-1 heads");
  const std::vector<PooledInstance> pool = pool_collection(bags);
  if (static_cast<std::size_t>(cfg.batch_size) > pool.size())
    throw std::invalid_argument("train: batch_size exceeds pool size");

  const ReductionPlan plan(bags.sizes());
  std::vector<double> p(static_cast<std::size_t>(L));
  for (int k = 1; k <= L; ++k) p[k - 1] = plan.p(k);

  MinMaxState state = MinMaxState::zeros(L, cfg.margin, cfg.constrained_alpha);
  GradientBuffer gbuf(model.num_params());
  SgdState velocity(model.num_params());
  Rng label_rng(derive_seed(cfg.seed, kLabelStream));

  TrainResult result;
  result.log.num_labels = L;

  const auto abort_nonfinite = [&]() {
    if (!cfg.abort_checkpoint_path.empty())
      save_checkpoint(cfg.abort_checkpoint_path, model, &state);
    throw std::runtime_error("train: non-finite loss, aborting");
  };

  std::vector<double> heads(static_cast<std::size_t>(L));
  std::vector<double> upstream(static_cast<std::size_t>(L));
  std::vector<double> grad_a(static_cast<std::size_t>(L));
  std::vector<double> grad_b(static_cast<std::size_t>(L));
  std::vector<double> grad_alpha(static_cast<std::size_t>(L));

  const auto start = std::chrono::steady_clock::now();
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const int decay_steps = (epoch - 1) / cfg.lr_decay_every;
    const double scale = std::pow(0.5, decay_steps);
    const double lr_p = cfg.lr_primal * scale;
    const double lr_d = cfg.lr_dual * scale;

    if (cfg.batch_exact)
      exact_scalar_reset(pool, score_pool(model, pool), state);

    std::vector<double> loss_sum(static_cast<std::size_t>(L), 0.0);
    std::vector<std::int64_t> loss_count(static_cast<std::size_t>(L), 0);

    for (const auto& batch : minibatch_iter(pool.size(), cfg.batch_size,
                                            cfg.seed, epoch)) {
      gbuf.zero();
      std::fill(grad_a.begin(), grad_a.end(), 0.0);
      std::fill(grad_b.begin(), grad_b.end(), 0.0);
      std::fill(grad_alpha.begin(), grad_alpha.end(), 0.0);
      const double inv_batch = 1.0 / static_cast<double>(batch.size());

      for (std::size_t idx : batch) {
        const PooledInstance& ins = pool[idx];
        model.forward(*ins.x, heads);
        std::fill(upstream.begin(), upstream.end(), 0.0);

        const auto touch_label = [&](int k, double model_scale,
                                     double dual_scale) {
          const PerSampleContext ctx{k + 1, ins.bag_id <= k + 1 ? 1 : -1,
                                     p[static_cast<std::size_t>(k)]};
          const LabelState& ls = state.labels[static_cast<std::size_t>(k)];
          const HGradients g = h_gradients(ctx, heads[k], ls, cfg.margin);
          const double h = h_sample(ctx, heads[k], ls, cfg.margin);
          if (!std::isfinite(h)) abort_nonfinite();
          loss_sum[static_cast<std::size_t>(k)] += h;
          ++loss_count[static_cast<std::size_t>(k)];
          upstream[static_cast<std::size_t>(k)] = g.d_score * model_scale;
          grad_a[static_cast<std::size_t>(k)] += g.d_a * dual_scale;
          grad_b[static_cast<std::size_t>(k)] += g.d_b * dual_scale;
          grad_alpha[static_cast<std::size_t>(k)] += g.d_alpha * dual_scale;
        };

        if (cfg.per_label_sampling) {
          const int k = static_cast<int>(label_rng.uniform_int(0, L - 1));
          touch_label(k, inv_batch, static_cast<double>(L));
        } else {
          for (int k = 0; k < L; ++k)
            touch_label(k, inv_batch / static_cast<double>(L), 1.0);
        }
        model.backward(*ins.x, upstream, gbuf);
      }

      try {
        sgd_step(model, gbuf, velocity, lr_p, cfg.momentum, cfg.weight_decay);
      } catch (const std::runtime_error&) {
        abort_nonfinite();
      }
      if (!cfg.batch_exact) {
        for (int k = 0; k < L; ++k) {
          LabelState& ls = state.labels[static_cast<std::size_t>(k)];
          ls.a -= lr_d * grad_a[static_cast<std::size_t>(k)] * inv_batch;
          ls.b -= lr_d * grad_b[static_cast<std::size_t>(k)] * inv_batch;
          ls.alpha += lr_d * grad_alpha[static_cast<std::size_t>(k)] * inv_batch;
          if (cfg.constrained_alpha && ls.alpha < 0.0) ls.alpha = 0.0;
          if (!std::isfinite(ls.a) || !std::isfinite(ls.b) ||
              !std::isfinite(ls.alpha))
            abort_nonfinite();
        }
      }
      ++state.steps;
    }

    // Dual reset keeps alpha on its closed-form optimum between epochs.
    if (!cfg.batch_exact)
      for (LabelState& ls : state.labels)
        ls.alpha = optimal_alpha(ls.a, ls.b, cfg.margin, cfg.constrained_alpha);

    if (epoch % cfg.eval_every == 0 || epoch == cfg.epochs) {
      TrainLogRow row;
      row.epoch = epoch;
      const std::vector<double> scores = score_pool(model, pool);
      row.train_macro_auc =
          pool_macro_auc(pool, scores, static_cast<std::size_t>(L));
      row.test_auc = test != nullptr
                         ? labeled_auc(model, *test)
                         : std::numeric_limits<double>::quiet_NaN();
      row.label_losses.resize(static_cast<std::size_t>(L));
      for (int k = 0; k < L; ++k)
        row.label_losses[static_cast<std::size_t>(k)] =
            loss_count[static_cast<std::size_t>(k)] > 0
                ? loss_sum[static_cast<std::size_t>(k)] /
                      static_cast<double>(loss_count[static_cast<std::size_t>(k)])
                : std::numeric_limits<double>::quiet_NaN();
      row.seconds = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - start)
                        .count();
      result.log.rows.push_back(std::move(row));
    }
  }

  result.state = std::move(state);
  return result;
}

}  // namespace umauc
