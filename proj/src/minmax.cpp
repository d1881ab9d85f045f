#include "umauc/minmax.hpp"

#include <algorithm>
#include <stdexcept>

namespace umauc {

SquareLossDecomposition decompose_square_loss(
    std::span<const double> pos_scores, std::span<const double> neg_scores) {
  if (pos_scores.empty() || neg_scores.empty())
    throw std::invalid_argument("decompose_square_loss: empty side");

  SquareLossDecomposition d;
  for (double s : pos_scores) d.pos_mean += s;
  d.pos_mean /= static_cast<double>(pos_scores.size());
  for (double s : neg_scores) d.neg_mean += s;
  d.neg_mean /= static_cast<double>(neg_scores.size());

  for (double s : pos_scores) {
    const double t = s - d.pos_mean;
    d.a_term += t * t;
  }
  d.a_term /= static_cast<double>(pos_scores.size());
  for (double s : neg_scores) {
    const double t = s - d.neg_mean;
    d.b_term += t * t;
  }
  d.b_term /= static_cast<double>(neg_scores.size());

  const double c = 1.0 - d.pos_mean + d.neg_mean;
  d.c_term = c * c;
  d.total = d.a_term + d.b_term + d.c_term;
  return d;
}

double optimal_alpha(double a, double b, double margin, bool constrained) {
  if (!constrained) return 1.0 - a + b;
  if (!(margin > 0.0))
    throw std::invalid_argument("optimal_alpha: margin must be > 0");
  return std::max(0.0, margin - a + b);
}

MinMaxState MinMaxState::zeros(int num_labels, double margin, bool constrained) {
  if (num_labels < 1)
    throw std::invalid_argument("MinMaxState: need at least one label");
  MinMaxState st;
  st.labels.assign(static_cast<std::size_t>(num_labels), LabelState{});
  st.margin = margin;
  st.constrained = constrained;
  return st;
}

double h_sample(const PerSampleContext& ctx, double score, const LabelState& st,
                double margin) {
  const double p = ctx.p;
  const bool pos = ctx.y > 0;
  double h = -p * (1.0 - p) * st.alpha * st.alpha;
  double coupling = p * (1.0 - p) * margin;
  if (pos) {
    const double t = score - st.a;
    h += (1.0 - p) * t * t;
    coupling -= (1.0 - p) * score;
  } else {
    const double t = score - st.b;
    h += p * t * t;
    coupling += p * score;
  }
  return h + 2.0 * st.alpha * coupling;
}

HGradients h_gradients(const PerSampleContext& ctx, double score,
                       const LabelState& st, double margin) {
  const double p = ctx.p;
  const bool pos = ctx.y > 0;
  HGradients g;
  if (pos) {
    g.d_score = 2.0 * (1.0 - p) * (score - st.a) - 2.0 * st.alpha * (1.0 - p);
    g.d_a = -2.0 * (1.0 - p) * (score - st.a);
    g.d_b = 0.0;
    g.d_alpha = -2.0 * p * (1.0 - p) * st.alpha +
                2.0 * (p * (1.0 - p) * margin - (1.0 - p) * score);
  } else {
    g.d_score = 2.0 * p * (score - st.b) + 2.0 * st.alpha * p;
    g.d_a = 0.0;
    g.d_b = -2.0 * p * (score - st.b);
    g.d_alpha = -2.0 * p * (1.0 - p) * st.alpha +
                2.0 * (p * (1.0 - p) * margin + p * score);
  }
  return g;
}

}  // namespace umauc
