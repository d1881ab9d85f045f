// Saddle-point form of the square surrogate AUC loss: the A/B/C
// decomposition, the per-sample objective H with its analytic gradients,
// and the closed-form inner maximization over alpha (with optional margin
// clamp).
//
// With margin = 1 and the clamp off this is the exact pointwise objective;
// the margin variant only changes the constant in the C term and restricts
// alpha to be non-negative.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace umauc {

struct SquareLossDecomposition {
  double pos_mean = 0.0;  // a
  double neg_mean = 0.0;  // b
  double a_term = 0.0;    // mean (s+ - a)^2
  double b_term = 0.0;    // mean (s- - b)^2
  double c_term = 0.0;    // (1 - a + b)^2
  double total = 0.0;     // a_term + b_term + c_term
};

// total equals the exact pairwise mean of (1 - s+ + s-)^2.
SquareLossDecomposition decompose_square_loss(std::span<const double> pos_scores,
                                              std::span<const double> neg_scores);

// Maximizer of 2*alpha*(M - a + b) - alpha^2. Unconstrained mode is the
// exact objective with M = 1; constrained mode clamps at zero with the
// caller's margin.
double optimal_alpha(double a, double b, double margin, bool constrained);

struct PerSampleContext {
  int label_k = 1;    // 1..m-1
  int y = 1;          // surrogate bit as +1/-1
  double p = 0.5;     // mixing fraction of label k, in (0,1)
};

// Saddle-point scalars for one label.
struct LabelState {
  double a = 0.0;
  double b = 0.0;
  double alpha = 0.0;
};

struct MinMaxState {
  std::vector<LabelState> labels;  // k = 1..m-1
  double margin = 1.0;
  bool constrained = false;  // enforce alpha >= 0 (margin mode)
  std::int64_t steps = 0;

  static MinMaxState zeros(int num_labels, double margin, bool constrained);
};

// Per-sample objective:
//   H = (1-p)(s-a)^2 I[y=+1] + p(s-b)^2 I[y=-1] - p(1-p) alpha^2
//       + 2 alpha (p(1-p) margin + p s I[y=-1] - (1-p) s I[y=+1])
double h_sample(const PerSampleContext& ctx, double score, const LabelState& st,
                double margin);

struct HGradients {
  double d_score = 0.0;
  double d_a = 0.0;
  double d_b = 0.0;
  double d_alpha = 0.0;  // ascent direction for the dual variable
};

HGradients h_gradients(const PerSampleContext& ctx, double score,
                       const LabelState& st, double margin);

}  // namespace umauc
