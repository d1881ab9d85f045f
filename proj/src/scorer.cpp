#include "umauc/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "umauc/rng.hpp"

namespace umauc {

namespace {

void check_forward_args(const Scorer& s, std::span<const double> x,
                        std::span<const double> heads) {
  if (x.size() != static_cast<std::size_t>(s.input_dim()))
    throw std::invalid_argument("scorer: input dimension mismatch");
  if (heads.size() != static_cast<std::size_t>(s.num_heads()))
    throw std::invalid_argument("scorer: head buffer size mismatch");
}

double init_range(int fan_in) { return 1.0 / std::sqrt(static_cast<double>(fan_in)); }

}  // namespace

// --- LinearScorer ---------------------------------------------------------

LinearScorer::LinearScorer(int input_dim, int num_heads, std::uint64_t seed)
    : d_(input_dim), heads_(num_heads) {
  if (input_dim < 1) throw std::invalid_argument("scorer: input_dim must be >= 1");
  if (num_heads < 1) throw std::invalid_argument("scorer: num_heads must be >= 1");
  params_.resize(static_cast<std::size_t>(heads_) * d_ + heads_);
  Rng rng(seed);
  const double r = init_range(d_);
  for (double& p : params_) p = rng.uniform(-r, r);
}

double LinearScorer::weight(int head, int col) const {
  return params_[static_cast<std::size_t>(head) * d_ + col];
}
void LinearScorer::set_weight(int head, int col, double v) {
  params_[static_cast<std::size_t>(head) * d_ + col] = v;
}
double LinearScorer::bias(int head) const {
  return params_[static_cast<std::size_t>(heads_) * d_ + head];
}
void LinearScorer::set_bias(int head, double v) {
  params_[static_cast<std::size_t>(heads_) * d_ + head] = v;
}

void LinearScorer::forward(std::span<const double> x,
                           std::span<double> heads) const {
  check_forward_args(*this, x, heads);
  const double* w = params_.data();
  const double* b = params_.data() + static_cast<std::size_t>(heads_) * d_;
  for (int k = 0; k < heads_; ++k) {
    double acc = b[k];
    const double* row = w + static_cast<std::size_t>(k) * d_;
    for (int j = 0; j < d_; ++j) acc += row[j] * x[j];
    heads[k] = acc;
  }
}

void LinearScorer::backward(std::span<const double> x,
                            std::span<const double> upstream,
                            GradientBuffer& gb) const {
  check_forward_args(*this, x, upstream);
  if (gb.grad.size() != params_.size())
    throw std::invalid_argument("scorer: gradient buffer size mismatch");
  double* gw = gb.grad.data();
  double* gbias = gb.grad.data() + static_cast<std::size_t>(heads_) * d_;
  for (int k = 0; k < heads_; ++k) {
    const double u = upstream[k];
    if (u == 0.0) continue;
    double* row = gw + static_cast<std::size_t>(k) * d_;
    for (int j = 0; j < d_; ++j) row[j] += u * x[j];
    gbias[k] += u;
  }
  ++gb.samples;
}

std::unique_ptr<Scorer> LinearScorer::clone() const {
  return std::make_unique<LinearScorer>(*this);
}

// --- MlpScorer -------------------------------------------------------------

MlpScorer::MlpScorer(int input_dim, std::vector<int> hidden, int num_heads,
                     std::uint64_t seed)
    : d_(input_dim), heads_(num_heads), hidden_(std::move(hidden)) {
  if (input_dim < 1) throw std::invalid_argument("scorer: input_dim must be >= 1");
  if (num_heads < 1) throw std::invalid_argument("scorer: num_heads must be >= 1");
  if (hidden_.empty()) throw std::invalid_argument("scorer: mlp needs a hidden layer");
  for (int w : hidden_)
    if (w < 1) throw std::invalid_argument("scorer: hidden width must be >= 1");
  build_layout();
  init_params(seed);
}

void MlpScorer::build_layout() {
  std::size_t off = 0;
  int in = d_;
  for (int out : hidden_) {
    LayerView lv;
    lv.w_off = off;
    off += static_cast<std::size_t>(out) * in;
    lv.b_off = off;
    off += static_cast<std::size_t>(out);
    lv.in = in;
    lv.out = out;
    layers_.push_back(lv);
    in = out;
  }
  LayerView head;
  head.w_off = off;
  off += static_cast<std::size_t>(heads_) * in;
  head.b_off = off;
  off += static_cast<std::size_t>(heads_);
  head.in = in;
  head.out = heads_;
  layers_.push_back(head);
  params_.resize(off);
}

void MlpScorer::init_params(std::uint64_t seed) {
  Rng rng(seed);
  for (const LayerView& lv : layers_) {
    const double r = init_range(lv.in);
    for (std::size_t i = 0; i < static_cast<std::size_t>(lv.out) * lv.in; ++i)
      params_[lv.w_off + i] = rng.uniform(-r, r);
    for (int i = 0; i < lv.out; ++i) params_[lv.b_off + i] = rng.uniform(-r, r);
  }
}

void MlpScorer::forward(std::span<const double> x,
                        std::span<double> heads) const {
  check_forward_args(*this, x, heads);
  std::vector<double> cur(x.begin(), x.end());
  std::vector<double> next;
  const std::size_t trunk = layers_.size() - 1;
  for (std::size_t l = 0; l < trunk; ++l) {
    const LayerView& lv = layers_[l];
    next.assign(static_cast<std::size_t>(lv.out), 0.0);
    for (int i = 0; i < lv.out; ++i) {
      double acc = params_[lv.b_off + i];
      const double* row = params_.data() + lv.w_off + static_cast<std::size_t>(i) * lv.in;
      for (int j = 0; j < lv.in; ++j) acc += row[j] * cur[j];
      next[i] = acc > 0.0 ? acc : 0.0;  // ReLU
    }
    cur.swap(next);
  }
  const LayerView& hv = layers_.back();
  for (int k = 0; k < hv.out; ++k) {
    double acc = params_[hv.b_off + k];
    const double* row = params_.data() + hv.w_off + static_cast<std::size_t>(k) * hv.in;
    for (int j = 0; j < hv.in; ++j) acc += row[j] * cur[j];
    heads[k] = acc;
  }
}

void MlpScorer::backward(std::span<const double> x,
                         std::span<const double> upstream,
                         GradientBuffer& gb) const {
  check_forward_args(*this, x, upstream);
  if (gb.grad.size() != params_.size())
    throw std::invalid_argument("scorer: gradient buffer size mismatch");

  // Forward, keeping post-activation values per trunk layer.
  const std::size_t trunk = layers_.size() - 1;
  std::vector<std::vector<double>> acts;  // acts[0]=input, acts[l+1]=relu out
  acts.reserve(trunk + 1);
  acts.emplace_back(x.begin(), x.end());
  for (std::size_t l = 0; l < trunk; ++l) {
    const LayerView& lv = layers_[l];
    std::vector<double> out(static_cast<std::size_t>(lv.out));
    const std::vector<double>& in = acts.back();
    for (int i = 0; i < lv.out; ++i) {
      double acc = params_[lv.b_off + i];
      const double* row = params_.data() + lv.w_off + static_cast<std::size_t>(i) * lv.in;
      for (int j = 0; j < lv.in; ++j) acc += row[j] * in[j];
      out[i] = acc > 0.0 ? acc : 0.0;
    }
    acts.push_back(std::move(out));
  }

  // Head layer gradients and the delta entering the trunk.
  const LayerView& hv = layers_.back();
  const std::vector<double>& top = acts.back();
  std::vector<double> delta(static_cast<std::size_t>(hv.in), 0.0);
  for (int k = 0; k < hv.out; ++k) {
    const double u = upstream[k];
    if (u == 0.0) continue;
    double* grow = gb.grad.data() + hv.w_off + static_cast<std::size_t>(k) * hv.in;
    const double* wrow = params_.data() + hv.w_off + static_cast<std::size_t>(k) * hv.in;
    for (int j = 0; j < hv.in; ++j) {
      grow[j] += u * top[j];
      delta[j] += u * wrow[j];
    }
    gb.grad[hv.b_off + k] += u;
  }

  // Trunk backprop, masking by the stored ReLU outputs.
  for (std::size_t l = trunk; l-- > 0;) {
    const LayerView& lv = layers_[l];
    const std::vector<double>& out = acts[l + 1];
    const std::vector<double>& in = acts[l];
    std::vector<double> prev(static_cast<std::size_t>(lv.in), 0.0);
    for (int i = 0; i < lv.out; ++i) {
      if (out[i] <= 0.0) continue;  // ReLU gate
      const double d = delta[i];
      if (d == 0.0) continue;
      double* grow = gb.grad.data() + lv.w_off + static_cast<std::size_t>(i) * lv.in;
      const double* wrow = params_.data() + lv.w_off + static_cast<std::size_t>(i) * lv.in;
      for (int j = 0; j < lv.in; ++j) {
        grow[j] += d * in[j];
        prev[j] += d * wrow[j];
      }
      gb.grad[lv.b_off + i] += d;
    }
    delta.swap(prev);
  }
  ++gb.samples;
}

std::unique_ptr<Scorer> MlpScorer::clone() const {
  return std::make_unique<MlpScorer>(*this);
}

std::unique_ptr<Scorer> make_scorer(const std::string& kind, int input_dim,
                                    int num_heads, std::uint64_t seed,
                                    const std::vector<int>& hidden) {
  if (kind == "linear") return std::make_unique<LinearScorer>(input_dim, num_heads, seed);
  if (kind == "mlp") return std::make_unique<MlpScorer>(input_dim, hidden, num_heads, seed);
  throw std::invalid_argument("scorer: unknown kind '" + kind + "'");
}

// --- SGD -------------------------------------------------------------------

void sgd_step(Scorer& model, const GradientBuffer& gb, SgdState& state,
              double lr, double momentum, double weight_decay) {
  auto params = model.params_view();
  if (gb.grad.size() != params.size() || state.velocity.size() != params.size())
    throw std::invalid_argument("sgd_step: buffer size mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = gb.grad[i];
    if (!std::isfinite(g)) throw std::runtime_error("sgd_step: non-finite gradient");
    double v = momentum * state.velocity[i] + (g + weight_decay * params[i]);
    state.velocity[i] = v;
    params[i] -= lr * v;
  }
}

// --- checkpoints -----------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'U', 'M', 'A', 'U', 'C', 'C', 'K', 'P'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kKindLinear = 0;
constexpr std::uint32_t kKindMlp = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(os, bits);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw std::runtime_error("checkpoint: truncated file");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  if (!is) throw std::runtime_error("checkpoint: truncated file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& is) {
  std::uint64_t bits = get_u64(is);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const Scorer& model,
                     const MinMaxState* state) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("checkpoint: cannot open '" + path + "' for writing");
  os.write(kMagic, 8);
  put_u32(os, kVersion);

  if (model.kind() == "linear") {
    put_u32(os, kKindLinear);
    put_u32(os, static_cast<std::uint32_t>(model.input_dim()));
    put_u32(os, static_cast<std::uint32_t>(model.num_heads()));
    put_u32(os, 0);  // no hidden widths
  } else if (model.kind() == "mlp") {
    const auto& mlp = static_cast<const MlpScorer&>(model);
    put_u32(os, kKindMlp);
    put_u32(os, static_cast<std::uint32_t>(model.input_dim()));
    put_u32(os, static_cast<std::uint32_t>(model.num_heads()));
    put_u32(os, static_cast<std::uint32_t>(mlp.hidden_widths().size()));
    for (int w : mlp.hidden_widths()) put_u32(os, static_cast<std::uint32_t>(w));
  } else {
    throw std::runtime_error("checkpoint: unknown model kind");
  }

  auto params = model.params_view();
  put_u64(os, params.size());
  for (double p : params) put_f64(os, p);

  if (state != nullptr) {
    os.put(1);
    put_u32(os, static_cast<std::uint32_t>(state->labels.size()));
    put_f64(os, state->margin);
    os.put(state->constrained ? 1 : 0);
    put_u64(os, static_cast<std::uint64_t>(state->steps));
    for (const LabelState& ls : state->labels) {
      put_f64(os, ls.a);
      put_f64(os, ls.b);
      put_f64(os, ls.alpha);
    }
  } else {
    os.put(0);
  }
  if (!os) throw std::runtime_error("checkpoint: write failed for '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open '" + path + "'");
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("checkpoint: bad magic");
  const std::uint32_t version = get_u32(is);
  if (version != kVersion)
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));

  const std::uint32_t kind = get_u32(is);
  const int d = static_cast<int>(get_u32(is));
  const int heads = static_cast<int>(get_u32(is));
  const std::uint32_t n_hidden = get_u32(is);
  std::vector<int> hidden;
  for (std::uint32_t i = 0; i < n_hidden; ++i)
    hidden.push_back(static_cast<int>(get_u32(is)));

  Checkpoint ckpt;
  if (kind == kKindLinear) {
    ckpt.model = std::make_unique<LinearScorer>(d, heads, 0);
  } else if (kind == kKindMlp) {
    ckpt.model = std::make_unique<MlpScorer>(d, hidden, heads, 0);
  } else {
    throw std::runtime_error("checkpoint: unknown model kind id");
  }

  const std::uint64_t n_params = get_u64(is);
  auto params = ckpt.model->params_view();
  if (n_params != params.size())
    throw std::runtime_error("checkpoint: parameter count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) params[i] = get_f64(is);

  const int has_state = is.get();
  if (has_state == std::istream::traits_type::eof())
    throw std::runtime_error("checkpoint: truncated file");
  if (has_state == 1) {
    const std::uint32_t n_labels = get_u32(is);
    MinMaxState st;
    st.margin = get_f64(is);
    const int constrained = is.get();
    if (constrained == std::istream::traits_type::eof())
      throw std::runtime_error("checkpoint: truncated file");
    st.constrained = constrained != 0;
    st.steps = static_cast<std::int64_t>(get_u64(is));
    st.labels.resize(n_labels);
    for (LabelState& ls : st.labels) {
      ls.a = get_f64(is);
      ls.b = get_f64(is);
      ls.alpha = get_f64(is);
    }
    ckpt.state = std::move(st);
  } else if (has_state != 0) {
    throw std::runtime_error("checkpoint: corrupt state flag");
  }
  return ckpt;
}

}  // namespace umauc
