#include "umauc/bagdata.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "umauc/rng.hpp"

namespace umauc {

BagCollection::BagCollection(std::vector<Bag> bags, int d, std::uint64_t seed)
    : bags_(std::move(bags)), d_(d), seed_(seed) {
  validate();
}

void BagCollection::validate() const {
  if (bags_.size() < 2)
    throw std::invalid_argument("BagCollection: need at least 2 bags");
  for (std::size_t i = 0; i < bags_.size(); ++i) {
    const Bag& b = bags_[i];
    if (b.id != static_cast<int>(i) + 1)
      throw std::invalid_argument("BagCollection: bag ids must be 1..m in order");
    if (b.instances.empty())
      throw std::invalid_argument("BagCollection: empty bag");
    for (const Instance& ins : b.instances)
      if (static_cast<int>(ins.features.size()) != d_)
        throw std::invalid_argument("BagCollection: feature dimension mismatch");
  }
  const bool any_prior = bags_.front().true_prior.has_value();
  for (const Bag& b : bags_)
    if (b.true_prior.has_value() != any_prior)
      throw std::invalid_argument(
          "BagCollection: true priors must be present for all bags or none");
  if (any_prior) {
    for (std::size_t i = 1; i < bags_.size(); ++i)
      if (*bags_[i - 1].true_prior < *bags_[i].true_prior)
        throw std::invalid_argument(
            "BagCollection: asserted priors must be non-increasing in id");
    if (!(*bags_.front().true_prior > *bags_.back().true_prior))
      throw std::invalid_argument(
          "BagCollection: degenerate priors (pi_1 must exceed pi_m)");
  }
}

bool BagCollection::has_priors() const {
  return bags_.front().true_prior.has_value();
}

std::vector<std::int64_t> BagCollection::sizes() const {
  std::vector<std::int64_t> s;
  s.reserve(bags_.size());
  for (const Bag& b : bags_) s.push_back(b.size());
  return s;
}

std::int64_t BagCollection::total_instances() const {
  std::int64_t n = 0;
  for (const Bag& b : bags_) n += b.size();
  return n;
}

const char* prior_kind_name(PriorKind kind) {
  switch (kind) {
    case PriorKind::uniform: return "uniform";
    case PriorKind::biased: return "biased";
    case PriorKind::concentrated: return "concentrated";
    case PriorKind::biased_concentrated: return "biased_concentrated";
    case PriorKind::explicit_list: return "explicit";
  }
  return "?";
}

PriorKind prior_kind_from_name(const std::string& name) {
  if (name == "uniform" || name == "d_u") return PriorKind::uniform;
  if (name == "biased" || name == "d_b") return PriorKind::biased;
  if (name == "concentrated" || name == "d_c") return PriorKind::concentrated;
  if (name == "biased_concentrated" || name == "d_bc")
    return PriorKind::biased_concentrated;
  if (name == "explicit") return PriorKind::explicit_list;
  throw std::invalid_argument("unknown prior kind: " + name);
}

namespace {

struct BetaParams {
  double a, b;
};

BetaParams beta_params(PriorKind kind) {
  switch (kind) {
    case PriorKind::uniform: return {1.0, 1.0};
    case PriorKind::biased: return {5.0, 1.0};
    case PriorKind::concentrated: return {5.0, 5.0};
    case PriorKind::biased_concentrated: return {5.0, 2.0};
    case PriorKind::explicit_list: break;
  }
  throw std::invalid_argument("beta_params: explicit list has no distribution");
}

constexpr int kPriorResampleCap = 1000;

}  // namespace

std::vector<double> sample_priors(const PriorSpec& spec, std::uint64_t rng_seed) {
  if (spec.m < 2) throw std::invalid_argument("sample_priors: need m >= 2");

  if (spec.kind == PriorKind::explicit_list) {
    if (static_cast<int>(spec.values.size()) != spec.m)
      throw std::invalid_argument("sample_priors: explicit list length != m");
    for (double p : spec.values)
      if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("sample_priors: prior outside [0,1]");
    std::vector<double> out = spec.values;
    std::sort(out.begin(), out.end(), std::greater<double>());
    if (!(out.front() > out.back()))
      throw std::invalid_argument("sample_priors: degenerate priors");
    return out;
  }

  const BetaParams bp = beta_params(spec.kind);
  Rng rng(rng_seed);
  for (int attempt = 0; attempt < kPriorResampleCap; ++attempt) {
    std::vector<double> out(static_cast<std::size_t>(spec.m));
    for (double& p : out) p = rng.beta(bp.a, bp.b);
    std::sort(out.begin(), out.end(), std::greater<double>());
    if (out.front() > out.back()) return out;
  }
  throw std::runtime_error("sample_priors: degenerate priors after resample cap");
}

std::vector<std::int64_t> apply_imbalance(const ImbalanceSpec& spec, int m,
                                          std::int64_t n_train,
                                          std::uint64_t rng_seed) {
  if (m < 2) throw std::invalid_argument("apply_imbalance: need m >= 2");
  if (n_train < m)
    throw std::invalid_argument("apply_imbalance: need n_train >= m");

  const double per_bag = static_cast<double>(n_train) / m;
  const auto base = static_cast<std::int64_t>(std::ceil(per_bag));

  switch (spec.mode) {
    case ImbalanceMode::none:
      return std::vector<std::int64_t>(static_cast<std::size_t>(m), base);

    case ImbalanceMode::size_reduction: {
      if (!(spec.tau > 0.0 && spec.tau <= 1.0))
        throw std::invalid_argument("apply_imbalance: tau must be in (0,1]");
      const auto reduced = static_cast<std::int64_t>(std::ceil(spec.tau * per_bag));
      std::vector<std::int64_t> sizes(static_cast<std::size_t>(m), base);
      std::vector<int> ids(static_cast<std::size_t>(m));
      std::iota(ids.begin(), ids.end(), 0);
      Rng rng(rng_seed);
      rng.shuffle(ids);
      const int n_reduce = (m + 1) / 2;  // ceil(m/2)
      for (int k = 0; k < n_reduce; ++k)
        sizes[static_cast<std::size_t>(ids[static_cast<std::size_t>(k)])] = reduced;
      return sizes;
    }

    case ImbalanceMode::random: {
      // m-1 distinct cut points in [1, n_train-1] give sizes >= 1 summing
      // to n_train.
      Rng rng(rng_seed);
      std::vector<std::int64_t> cuts;
      cuts.reserve(static_cast<std::size_t>(m) + 1);
      while (static_cast<int>(cuts.size()) < m - 1) {
        const std::int64_t c = rng.uniform_int(1, n_train - 1);
        if (std::find(cuts.begin(), cuts.end(), c) == cuts.end())
          cuts.push_back(c);
      }
      cuts.push_back(0);
      cuts.push_back(n_train);
      std::sort(cuts.begin(), cuts.end());
      std::vector<std::int64_t> sizes;
      sizes.reserve(static_cast<std::size_t>(m));
      for (std::size_t i = 1; i < cuts.size(); ++i)
        sizes.push_back(cuts[i] - cuts[i - 1]);
      return sizes;
    }
  }
  throw std::invalid_argument("apply_imbalance: unknown mode");
}

BagCollection synthesize_bags(std::span<const Instance> pool,
                              std::span<const double> priors,
                              std::span<const std::int64_t> sizes,
                              std::uint64_t rng_seed) {
  if (priors.size() != sizes.size())
    throw std::invalid_argument("synthesize_bags: priors/sizes length mismatch");
  const int m = static_cast<int>(priors.size());
  if (m < 2) throw std::invalid_argument("synthesize_bags: need m >= 2");
  if (pool.empty()) throw std::invalid_argument("synthesize_bags: empty pool");

  std::vector<std::size_t> pos_idx, neg_idx;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (!pool[i].hidden_label)
      throw std::invalid_argument("synthesize_bags: pool instance lacks label");
    (*pool[i].hidden_label > 0 ? pos_idx : neg_idx).push_back(i);
  }
  if (pos_idx.empty() || neg_idx.empty())
    throw std::invalid_argument("synthesize_bags: single-class pool");

  const int d = static_cast<int>(pool.front().features.size());

  // Rank bags by descending prior; ties keep draw order.
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return priors[static_cast<std::size_t>(a)] >
                                              priors[static_cast<std::size_t>(b)]; });

  std::vector<Bag> bags;
  bags.reserve(static_cast<std::size_t>(m));
  for (int rank = 0; rank < m; ++rank) {
    const auto src = static_cast<std::size_t>(order[static_cast<std::size_t>(rank)]);
    const double pi = priors[src];
    const std::int64_t n_i = sizes[src];
    if (n_i < 1) throw std::invalid_argument("synthesize_bags: bag size < 1");

    // independent sub-stream per bag
    Rng rng(derive_seed(rng_seed, static_cast<std::uint64_t>(rank)));
    Bag bag;
    bag.id = rank + 1;
    bag.true_prior = pi;
    bag.instances.reserve(static_cast<std::size_t>(n_i));
    for (std::int64_t t = 0; t < n_i; ++t) {
      const bool positive = rng.uniform01() < pi;
      const auto& side = positive ? pos_idx : neg_idx;
      const auto pick = static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(side.size()) - 1));
      bag.instances.push_back(pool[side[pick]]);
    }
    bags.push_back(std::move(bag));
  }
  return BagCollection(std::move(bags), d, rng_seed);
}

std::vector<double> GaussianPoolSpec::effective_mean_pos() const {
  if (!mean_pos.empty()) return mean_pos;
  return std::vector<double>(static_cast<std::size_t>(d), 1.0);
}

std::vector<double> GaussianPoolSpec::effective_mean_neg() const {
  if (!mean_neg.empty()) return mean_neg;
  return std::vector<double>(static_cast<std::size_t>(d), -1.0);
}

namespace {

std::vector<Instance> draw_gaussian_split(const GaussianPoolSpec& spec,
                                          std::int64_t n, Rng& rng) {
  const std::vector<double> mp = spec.effective_mean_pos();
  const std::vector<double> mn = spec.effective_mean_neg();
  const auto n_pos = static_cast<std::int64_t>(
      std::llround(spec.pos_fraction * static_cast<double>(n)));

  std::vector<Instance> out;
  out.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    const bool positive = i < n_pos;
    const auto& mu = positive ? mp : mn;
    Instance ins;
    ins.hidden_label = positive ? +1 : -1;
    ins.features.resize(static_cast<std::size_t>(spec.d));
    for (int j = 0; j < spec.d; ++j)
      ins.features[static_cast<std::size_t>(j)] =
          mu[static_cast<std::size_t>(j)] + spec.sigma * rng.normal();
    out.push_back(std::move(ins));
  }
  // Shuffle so class blocks do not leak through instance order.
  rng.shuffle(out);
  return out;
}

}  // namespace

LabeledPool generate_gaussian_pool(const GaussianPoolSpec& spec,
                                   std::uint64_t rng_seed) {
  if (spec.d < 1) throw std::invalid_argument("gaussian pool: d must be >= 1");
  if (!(spec.sigma > 0.0))
    throw std::invalid_argument("gaussian pool: sigma must be > 0");
  if (!(spec.pos_fraction > 0.0 && spec.pos_fraction < 1.0))
    throw std::invalid_argument("gaussian pool: pos_fraction must be in (0,1)");
  if (static_cast<int>(spec.effective_mean_pos().size()) != spec.d ||
      static_cast<int>(spec.effective_mean_neg().size()) != spec.d)
    throw std::invalid_argument("gaussian pool: mean dimension mismatch");

  LabeledPool pool;
  Rng train_rng(derive_seed(rng_seed, 0x7261696eULL));  // "rain"
  Rng test_rng(derive_seed(rng_seed, 0x74657374ULL));   // "test"
  pool.train = draw_gaussian_split(spec, spec.n_train, train_rng);
  pool.test = draw_gaussian_split(spec, spec.n_test, test_rng);
  return pool;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double bayes_auc(const GaussianPoolSpec& spec) {
  const std::vector<double> mp = spec.effective_mean_pos();
  const std::vector<double> mn = spec.effective_mean_neg();
  double sq = 0.0;
  for (int j = 0; j < spec.d; ++j) {
    const double dj = mp[static_cast<std::size_t>(j)] - mn[static_cast<std::size_t>(j)];
    sq += dj * dj;
  }
  return normal_cdf(std::sqrt(sq) / (spec.sigma * std::numbers::sqrt2));
}

}  // namespace umauc
