// Differentiable scoring models with hand-written forward/backward passes:
// a linear scorer and a small MLP, both with m-1 output heads over a shared
// parameter block. Parameters live in one flat vector so gradient buffers,
// momentum state, finite-difference checks, and checkpoints all share the
// same layout.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "umauc/minmax.hpp"

namespace umauc {

struct GradientBuffer {
  std::vector<double> grad;
  std::int64_t samples = 0;  // accumulation count

  explicit GradientBuffer(std::size_t n) : grad(n, 0.0) {}
  void zero() {
    std::fill(grad.begin(), grad.end(), 0.0);
    samples = 0;
  }
};

class Scorer {
 public:
  virtual ~Scorer() = default;

  virtual int input_dim() const = 0;
  virtual int num_heads() const = 0;
  virtual std::string_view kind() const = 0;

  std::size_t num_params() const { return params_view().size(); }
  virtual std::span<double> params_view() = 0;
  virtual std::span<const double> params_view() const = 0;

  // Head scores for a single input; pure, no hidden state.
  virtual void forward(std::span<const double> x, std::span<double> heads) const = 0;

  // Accumulates the gradient of sum_k upstream[k] * g_k(x) w.r.t. all
  // parameters into the buffer (recomputes the forward pass internally).
  virtual void backward(std::span<const double> x,
                        std::span<const double> upstream,
                        GradientBuffer& gb) const = 0;

  virtual std::unique_ptr<Scorer> clone() const = 0;

  std::vector<double> forward_vec(std::span<const double> x) const {
    std::vector<double> out(static_cast<std::size_t>(num_heads()));
    forward(x, out);
    return out;
  }
};

class LinearScorer final : public Scorer {
 public:
  // Seeded uniform init in [-1/sqrt(d), +1/sqrt(d)].
  LinearScorer(int input_dim, int num_heads, std::uint64_t seed);

  int input_dim() const override { return d_; }
  int num_heads() const override { return heads_; }
  std::string_view kind() const override { return "linear"; }
  std::span<double> params_view() override { return params_; }
  std::span<const double> params_view() const override { return params_; }
  void forward(std::span<const double> x, std::span<double> heads) const override;
  void backward(std::span<const double> x, std::span<const double> upstream,
                GradientBuffer& gb) const override;
  std::unique_ptr<Scorer> clone() const override;

  double weight(int head, int col) const;
  void set_weight(int head, int col, double v);
  double bias(int head) const;
  void set_bias(int head, double v);

 private:
  int d_;
  int heads_;
  std::vector<double> params_;  // W row-major (heads x d), then bias (heads)
};

class MlpScorer final : public Scorer {
 public:
  // hidden gives the trunk widths (default two rectified layers of 64).
  MlpScorer(int input_dim, std::vector<int> hidden, int num_heads,
            std::uint64_t seed);

  int input_dim() const override { return d_; }
  int num_heads() const override { return heads_; }
  std::string_view kind() const override { return "mlp"; }
  std::span<double> params_view() override { return params_; }
  std::span<const double> params_view() const override { return params_; }
  void forward(std::span<const double> x, std::span<double> heads) const override;
  void backward(std::span<const double> x, std::span<const double> upstream,
                GradientBuffer& gb) const override;
  std::unique_ptr<Scorer> clone() const override;

  const std::vector<int>& hidden_widths() const { return hidden_; }

 private:
  struct LayerView {
    std::size_t w_off;  // out x in, row-major
    std::size_t b_off;
    int in, out;
  };
  void build_layout();
  void init_params(std::uint64_t seed);

  int d_;
  int heads_;
  std::vector<int> hidden_;
  std::vector<LayerView> layers_;  // trunk layers then the head layer
  std::vector<double> params_;
};

std::unique_ptr<Scorer> make_scorer(const std::string& kind, int input_dim,
                                    int num_heads, std::uint64_t seed,
                                    const std::vector<int>& hidden = {64, 64});

struct SgdState {
  std::vector<double> velocity;
  explicit SgdState(std::size_t n) : velocity(n, 0.0) {}
};

// Momentum update: v <- momentum*v + (g + weight_decay*p); p <- p - lr*v.
// Throws on non-finite gradients.
void sgd_step(Scorer& model, const GradientBuffer& gb, SgdState& state,
              double lr, double momentum, double weight_decay);

// --- checkpoints ---------------------------------------------------------
// Binary layout: magic "UMAUCCKP", u32 version, u32 model kind, shape
// table, little-endian f64 parameter payload, then an optional MinMaxState
// appendix (per-label a/b/alpha, margin, step counter).

struct Checkpoint {
  std::unique_ptr<Scorer> model;
  std::optional<MinMaxState> state;
};

void save_checkpoint(const std::string& path, const Scorer& model,
                     const MinMaxState* state);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace umauc
