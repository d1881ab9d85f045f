// Exact AUC computation and the empirical AUC risks (PN, U2, weighted Um,
// macro over surrogate labels).
//
// Convention note: auc_exact follows the usual Mann-Whitney statistic and
// credits tied pairs with 0.5. The zero-one *risk* instead treats a tie as
// zero loss (l01(z) = 1 iff z < 0), so for score sets with ties
// risk + auc != 1. The two behaviors are intentional and tested separately.
#pragma once

#include <span>
#include <vector>

namespace umauc {

struct ScoredSample {
  double score = 0.0;
  int label = 0;  // +1 or -1
};

enum class LossKind { zero_one, square, margin_square };

// Pointwise surrogate evaluated at the score difference z = f(x) - f(x').
class SurrogateLoss {
 public:
  static SurrogateLoss zero_one() { return SurrogateLoss(LossKind::zero_one, 1.0); }
  static SurrogateLoss square() { return SurrogateLoss(LossKind::square, 1.0); }
  static SurrogateLoss margin_square(double margin) {
    return SurrogateLoss(LossKind::margin_square, margin);
  }

  double operator()(double z) const {
    switch (kind_) {
      case LossKind::zero_one:
        return z < 0.0 ? 1.0 : 0.0;
      case LossKind::square: {
        const double t = 1.0 - z;
        return t * t;
      }
      case LossKind::margin_square: {
        const double t = margin_ - z;
        return t * t;
      }
    }
    return 0.0;
  }

  LossKind kind() const { return kind_; }
  double margin() const { return margin_; }

 private:
  SurrogateLoss(LossKind kind, double margin) : kind_(kind), margin_(margin) {}
  LossKind kind_;
  double margin_;
};

// Upper-triangular pair weights z_ij for 1 <= i < j <= m.
class PairWeights {
 public:
  explicit PairWeights(int m);

  double& at(int i, int j);              // 1-based, i < j
  double at(int i, int j) const;
  int m() const { return m_; }

  // Throws if any weight is negative or all weights are zero.
  void validate() const;

 private:
  int m_;
  std::vector<double> w_;
};

// Mann-Whitney AUC with average tie ranks; O(n log n).
// Throws std::invalid_argument when only one class is present.
double auc_exact(std::span<const ScoredSample> samples);

// (1 / (nP * nN)) sum over all positive/negative pairs of loss(s+ - s-).
double empirical_pn_risk(std::span<const ScoredSample> samples,
                         const SurrogateLoss& loss);

// Two-bag ranking risk; bag i is treated as pseudo-positive.
double empirical_u2_risk(std::span<const double> scores_i,
                         std::span<const double> scores_j,
                         const SurrogateLoss& loss);

// Weighted sum over all bag pairs i < j of z_ij * empirical_u2_risk(i, j).
double empirical_um_risk(std::span<const std::vector<double>> bag_scores,
                         const PairWeights& weights, const SurrogateLoss& loss);

// Mean of auc_exact over the m-1 surrogate-label heads.
double macro_auc(std::span<const std::vector<ScoredSample>> head_samples);

}  // namespace umauc
