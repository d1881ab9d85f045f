#include "umauc/aucmetrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace umauc {

PairWeights::PairWeights(int m) : m_(m) {
  if (m < 2) throw std::invalid_argument("PairWeights: need m >= 2");
  w_.assign(static_cast<std::size_t>(m) * (m - 1) / 2, 0.0);
}

namespace {
std::size_t pair_index(int m, int i, int j) {
  if (i < 1 || j <= i || j > m)
    throw std::invalid_argument("PairWeights: index (i,j) out of range");
  // row-major upper triangle, row i holds (m - i) entries
  const std::size_t row_start =
      static_cast<std::size_t>(i - 1) * (2 * m - i) / 2;
  return row_start + static_cast<std::size_t>(j - i - 1);
}
}  // namespace

double& PairWeights::at(int i, int j) { return w_[pair_index(m_, i, j)]; }
double PairWeights::at(int i, int j) const { return w_[pair_index(m_, i, j)]; }

void PairWeights::validate() const {
  bool any_positive = false;
  for (double z : w_) {
    if (z < 0.0) throw std::invalid_argument("PairWeights: negative weight");
    if (z > 0.0) any_positive = true;
  }
  if (!any_positive)
    throw std::invalid_argument("PairWeights: all weights are zero");
}

double auc_exact(std::span<const ScoredSample> samples) {
  std::size_t n_pos = 0, n_neg = 0;
  for (const auto& s : samples) {
    if (s.label > 0)
      ++n_pos;
    else
      ++n_neg;
  }
  if (n_pos == 0 || n_neg == 0)
    throw std::invalid_argument("auc_exact: undefined AUC, single-class input");

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return samples[a].score < samples[b].score;
  });

  // Average rank within each tie group; ranks are 1-based, so a group
  // spanning sorted positions [lo, hi) gets rank (lo + hi + 1) / 2.
  double pos_rank_sum = 0.0;
  std::size_t lo = 0;
  const std::size_t n = samples.size();
  while (lo < n) {
    std::size_t hi = lo + 1;
    while (hi < n && samples[order[hi]].score == samples[order[lo]].score) ++hi;
    const double rank = 0.5 * static_cast<double>(lo + hi + 1);
    for (std::size_t k = lo; k < hi; ++k)
      if (samples[order[k]].label > 0) pos_rank_sum += rank;
    lo = hi;
  }

  const double np = static_cast<double>(n_pos);
  const double u = pos_rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(n_neg));
}

double empirical_pn_risk(std::span<const ScoredSample> samples,
                         const SurrogateLoss& loss) {
  std::vector<double> pos, neg;
  for (const auto& s : samples) {
    if (s.label > 0)
      pos.push_back(s.score);
    else
      neg.push_back(s.score);
  }
  if (pos.empty() || neg.empty())
    throw std::invalid_argument("empirical_pn_risk: single-class input");
  return empirical_u2_risk(pos, neg, loss);
}

double empirical_u2_risk(std::span<const double> scores_i,
                         std::span<const double> scores_j,
                         const SurrogateLoss& loss) {
  if (scores_i.empty() || scores_j.empty())
    throw std::invalid_argument("empirical_u2_risk: empty bag");
  double sum = 0.0;
  for (double si : scores_i)
    for (double sj : scores_j) sum += loss(si - sj);
  return sum / (static_cast<double>(scores_i.size()) *
                static_cast<double>(scores_j.size()));
}

double empirical_um_risk(std::span<const std::vector<double>> bag_scores,
                         const PairWeights& weights, const SurrogateLoss& loss) {
  const int m = static_cast<int>(bag_scores.size());
  if (m < 2) throw std::invalid_argument("empirical_um_risk: need m >= 2 bags");
  if (weights.m() != m)
    throw std::invalid_argument("empirical_um_risk: weight/bag count mismatch");
  weights.validate();
  double total = 0.0;
  for (int i = 1; i < m; ++i) {
    for (int j = i + 1; j <= m; ++j) {
      const double z = weights.at(i, j);
      if (z == 0.0) continue;
      total += z * empirical_u2_risk(bag_scores[i - 1], bag_scores[j - 1], loss);
    }
  }
  return total;
}

double macro_auc(std::span<const std::vector<ScoredSample>> head_samples) {
  if (head_samples.empty())
    throw std::invalid_argument("macro_auc: no heads");
  double sum = 0.0;
  for (const auto& head : head_samples) sum += auc_exact(head);
  return sum / static_cast<double>(head_samples.size());
}

}  // namespace umauc
