#include "core/mlp.hpp"

#include <cmath>

#include "json.hpp"

namespace don {

using nlohmann::json;

Mlp::Mlp(std::vector<int> widths, Activation act) : widths_(std::move(widths)), act_(act) {
  require(widths_.size() >= 2, "Mlp: need at least input and output widths");
  for (int w : widths_) require(w >= 1, "Mlp: widths must be positive");
  layers_.resize(widths_.size() - 1);
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    layers_[k].rows = widths_[k + 1];
    layers_[k].cols = widths_[k];
    layers_[k].W.assign(static_cast<std::size_t>(layers_[k].rows) * layers_[k].cols, 0.0);
    layers_[k].b.assign(layers_[k].rows, 0.0);
  }
}

Mlp Mlp::he_init(const std::vector<int>& widths, Rng& rng, Activation act) {
  Mlp net(widths, act);
  for (auto& L : net.layers_) {
    double scale = std::sqrt(2.0 / L.cols);
    for (auto& w : L.W) w = scale * rng.normal();
    for (auto& b : L.b) b = 0.0;
  }
  return net;
}

Mlp Mlp::affine(std::vector<double> W, std::vector<double> b, int rows, int cols) {
  require(W.size() == static_cast<std::size_t>(rows) * cols && b.size() ==
          static_cast<std::size_t>(rows), "Mlp::affine: bad shapes");
  Mlp net({cols, rows});
  net.layers_[0].W = std::move(W);
  net.layers_[0].b = std::move(b);
  return net;
}

std::size_t Mlp::size() const {
  std::size_t nz = 0;
  for (const auto& L : layers_) {
    std::size_t block = 0;
    for (double w : L.W) block += (w != 0.0);
    for (double b : L.b) block += (b != 0.0);
    nz += block * static_cast<std::size_t>(L.repeat);
  }
  return nz;
}

std::size_t Mlp::parameter_count() const {
  std::size_t c = 0;
  for (const auto& L : layers_)
    c += (L.W.size() + L.b.size()) * static_cast<std::size_t>(L.repeat);
  return c;
}

namespace {

inline void affine_apply(const Mlp::Layer& L, const std::vector<double>& x,
                         std::vector<double>& out) {
  out.assign(static_cast<std::size_t>(L.eff_rows()), 0.0);
  for (int g = 0; g < L.repeat; ++g) {
    const double* xin = x.data() + static_cast<std::size_t>(g) * L.cols;
    double* xout = out.data() + static_cast<std::size_t>(g) * L.rows;
    for (int i = 0; i < L.rows; ++i) {
      const double* row = &L.W[static_cast<std::size_t>(i) * L.cols];
      double s = L.b[i];
      for (int j = 0; j < L.cols; ++j) s += row[j] * xin[j];
      xout[i] = s;
    }
  }
}

inline double act_fwd(double z, Mlp::Activation a) {
  return a == Mlp::Activation::Relu ? (z > 0 ? z : 0.0) : z;
}

// ReLU subgradient at 0 fixed to 0
inline double act_bwd(double z, Mlp::Activation a) {
  return a == Mlp::Activation::Relu ? (z > 0 ? 1.0 : 0.0) : 1.0;
}

}  // namespace

std::vector<double> Mlp::forward(const std::vector<double>& x) const {
  require(static_cast<int>(x.size()) == input_dim(), "Mlp::forward: input length mismatch");
  std::vector<double> cur = x, next;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    affine_apply(layers_[k], cur, next);
    if (k + 1 < layers_.size())
      for (auto& v : next) v = act_fwd(v, act_);
    cur.swap(next);
  }
  return cur;
}

std::vector<double> Mlp::forward_tape(const std::vector<double>& x, Tape& tape) const {
  require(static_cast<int>(x.size()) == input_dim(), "Mlp::forward_tape: input length mismatch");
  tape.pre.assign(layers_.size(), {});
  tape.post.assign(layers_.size(), {});
  std::vector<double> cur = x;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    tape.post[k] = cur;
    affine_apply(layers_[k], cur, tape.pre[k]);
    cur = tape.pre[k];
    if (k + 1 < layers_.size())
      for (auto& v : cur) v = act_fwd(v, act_);
  }
  return cur;
}

std::vector<Mlp::Layer> Mlp::zero_grad() const {
  std::vector<Layer> g(layers_.size());
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    g[k].rows = layers_[k].rows;
    g[k].cols = layers_[k].cols;
    g[k].W.assign(layers_[k].W.size(), 0.0);
    g[k].b.assign(layers_[k].b.size(), 0.0);
  }
  return g;
}

std::vector<double> Mlp::backward(const Tape& tape, const std::vector<double>& dy,
                                  std::vector<Layer>& grad) const {
  require(grad.size() == layers_.size(), "Mlp::backward: gradient accumulator shape mismatch");
  std::vector<double> delta = dy;  // dL/d(pre-activation of current layer, starting at output)
  std::vector<double> dx;
  for (int k = static_cast<int>(layers_.size()) - 1; k >= 0; --k) {
    const Layer& L = layers_[k];
    // output layer is affine; hidden layers apply the activation derivative
    if (k != static_cast<int>(layers_.size()) - 1)
      for (int i = 0; i < L.eff_rows(); ++i) delta[i] *= act_bwd(tape.pre[k][i], act_);
    const std::vector<double>& input = tape.post[k];
    std::vector<double> prev(static_cast<std::size_t>(L.eff_cols()), 0.0);
    for (int g = 0; g < L.repeat; ++g) {
      const double* xin = input.data() + static_cast<std::size_t>(g) * L.cols;
      const double* d = delta.data() + static_cast<std::size_t>(g) * L.rows;
      double* pout = prev.data() + static_cast<std::size_t>(g) * L.cols;
      for (int i = 0; i < L.rows; ++i) {
        double di = d[i];
        grad[k].b[i] += di;  // shared weights accumulate across groups
        double* grow = &grad[k].W[static_cast<std::size_t>(i) * L.cols];
        const double* row = &L.W[static_cast<std::size_t>(i) * L.cols];
        for (int j = 0; j < L.cols; ++j) {
          grow[j] += di * xin[j];
          pout[j] += di * row[j];
        }
      }
    }
    if (k == 0) {
      dx = std::move(prev);
      break;
    }
    delta.swap(prev);
  }
  return dx;
}

double Mlp::mse_and_grad(const std::vector<std::vector<double>>& X,
                         const std::vector<std::vector<double>>& Y,
                         std::vector<Layer>& grad) const {
  require(!X.empty() && X.size() == Y.size(), "Mlp::mse_and_grad: bad batch");
  double loss = 0.0;
  Tape tape;
  double invB = 1.0 / static_cast<double>(X.size());
  for (std::size_t b = 0; b < X.size(); ++b) {
    auto out = forward_tape(X[b], tape);
    require(out.size() == Y[b].size(), "Mlp::mse_and_grad: target length mismatch");
    std::vector<double> dy(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      double r = out[i] - Y[b][i];
      loss += invB * r * r;
      dy[i] = 2.0 * invB * r;
    }
    backward(tape, dy, grad);
  }
  return loss;
}

AdamState AdamState::init(const Mlp& net, double lr) {
  AdamState s;
  s.lr = lr;
  s.m = net.zero_grad();
  s.v = net.zero_grad();
  return s;
}

void adam_step(Mlp& net, AdamState& state, const std::vector<Mlp::Layer>& grad) {
  require(grad.size() == net.layers().size(), "adam_step: gradient shape mismatch");
  state.step += 1;
  double b1t = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  double b2t = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < grad.size(); ++k) {
    auto& L = net.layers()[k];
    auto upd = [&](std::vector<double>& theta, const std::vector<double>& g,
                   std::vector<double>& m, std::vector<double>& v) {
      for (std::size_t i = 0; i < theta.size(); ++i) {
        m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
        v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
        double mhat = m[i] / b1t;
        double vhat = v[i] / b2t;
        theta[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
      }
    };
    upd(L.W, grad[k].W, state.m[k].W, state.v[k].W);
    upd(L.b, grad[k].b, state.m[k].b, state.v[k].b);
  }
}

std::string Mlp::to_json() const {
  json j;
  j["widths"] = widths_;
  j["activation"] = act_ == Activation::Relu ? "relu" : "linear";
  json layers = json::array();
  for (const auto& L : layers_) {
    json lj = {{"W", L.W}, {"b", L.b}};
    if (L.repeat != 1) lj["repeat"] = L.repeat;
    layers.push_back(lj);
  }
  j["layers"] = layers;
  return j.dump();
}

Mlp Mlp::from_json(const std::string& text) {
  json j = json::parse(text);
  std::vector<int> widths = j.at("widths").get<std::vector<int>>();
  std::string act = j.value("activation", "relu");
  Mlp net(widths, act == "linear" ? Activation::Linear : Activation::Relu);
  const auto& layers = j.at("layers");
  require(layers.size() == net.layers_.size(), "Mlp::from_json: layer count mismatch");
  for (std::size_t k = 0; k < net.layers_.size(); ++k) {
    auto W = layers[k].at("W").get<std::vector<double>>();
    auto b = layers[k].at("b").get<std::vector<double>>();
    int rep = layers[k].value("repeat", 1);
    auto& L = net.layers_[k];
    if (rep != 1) {
      require(widths[k + 1] % rep == 0 && widths[k] % rep == 0,
              "Mlp::from_json: repeat does not divide layer shape");
      L.repeat = rep;
      L.rows = widths[k + 1] / rep;
      L.cols = widths[k] / rep;
    }
    require(W.size() == static_cast<std::size_t>(L.rows) * L.cols &&
                b.size() == static_cast<std::size_t>(L.rows),
            "Mlp::from_json: layer shape mismatch");
    L.W = std::move(W);
    L.b = std::move(b);
  }
  return net;
}

Mlp::Layer layer_to_dense(const Mlp::Layer& L) {
  if (L.repeat == 1) return L;
  Mlp::Layer D;
  D.rows = L.eff_rows();
  D.cols = L.eff_cols();
  D.repeat = 1;
  D.W.assign(static_cast<std::size_t>(D.rows) * D.cols, 0.0);
  D.b.assign(D.rows, 0.0);
  for (int g = 0; g < L.repeat; ++g)
    for (int i = 0; i < L.rows; ++i) {
      D.b[static_cast<std::size_t>(g) * L.rows + i] = L.b[i];
      for (int j = 0; j < L.cols; ++j)
        D.W[(static_cast<std::size_t>(g) * L.rows + i) * D.cols + g * L.cols + j] = L.w(i, j);
    }
  return D;
}

namespace {

// B after A with no activation in between
Mlp::Layer merge_affine(const Mlp::Layer& A_in, const Mlp::Layer& B_in) {
  if (A_in.repeat > 1 && B_in.repeat == A_in.repeat) {
    // grouped-by-grouped: merge blockwise, keep the grouping
    Mlp::Layer M;
    M.repeat = A_in.repeat;
    M.rows = B_in.rows;
    M.cols = A_in.cols;
    M.W.assign(static_cast<std::size_t>(M.rows) * M.cols, 0.0);
    M.b.assign(M.rows, 0.0);
    for (int i = 0; i < B_in.rows; ++i) {
      for (int j = 0; j < A_in.cols; ++j) {
        double s = 0.0;
        for (int q = 0; q < A_in.rows; ++q) s += B_in.w(i, q) * A_in.w(q, j);
        M.W[static_cast<std::size_t>(i) * M.cols + j] = s;
      }
      double s = B_in.b[i];
      for (int q = 0; q < A_in.rows; ++q) s += B_in.w(i, q) * A_in.b[q];
      M.b[i] = s;
    }
    return M;
  }
  Mlp::Layer A = layer_to_dense(A_in);
  Mlp::Layer B = layer_to_dense(B_in);
  Mlp::Layer M;
  M.rows = B.rows;
  M.cols = A.cols;
  M.W.assign(static_cast<std::size_t>(M.rows) * M.cols, 0.0);
  M.b.assign(M.rows, 0.0);
  for (int i = 0; i < B.rows; ++i) {
    for (int j = 0; j < A.cols; ++j) {
      double s = 0.0;
      for (int q = 0; q < A.rows; ++q) s += B.w(i, q) * A.w(q, j);
      M.W[static_cast<std::size_t>(i) * M.cols + j] = s;
    }
    double s = B.b[i];
    for (int q = 0; q < A.rows; ++q) s += B.w(i, q) * A.b[q];
    M.b[i] = s;
  }
  return M;
}

}  // namespace

Mlp compose(const Mlp& f, const Mlp& g) {
  require(f.output_dim() == g.input_dim(), "compose: dimension mismatch");
  require(f.activation() == g.activation(), "compose: mixed activations");
  std::vector<int> widths(f.widths().begin(), f.widths().end() - 1);
  widths.insert(widths.end(), g.widths().begin() + 1, g.widths().end());
  Mlp out(widths, f.activation());
  int fk = f.layer_count();
  for (int k = 0; k + 1 < fk; ++k) out.layers()[k] = f.layers()[k];
  out.layers()[fk - 1] = merge_affine(f.layers()[fk - 1], g.layers()[0]);
  for (int k = 1; k < g.layer_count(); ++k) out.layers()[fk - 1 + k] = g.layers()[k];
  return out;
}

Mlp parallel(const std::vector<Mlp>& blocks) {
  require(!blocks.empty(), "parallel: no blocks");
  int K = blocks[0].layer_count();
  for (const auto& b : blocks) {
    require(b.layer_count() == K, "parallel: blocks must have equal depth");
    require(b.activation() == blocks[0].activation(), "parallel: mixed activations");
    for (const auto& L : b.layers()) require(L.repeat == 1, "parallel: grouped layers unsupported");
  }
  std::vector<int> widths(blocks[0].widths().size(), 0);
  for (const auto& b : blocks)
    for (std::size_t i = 0; i < widths.size(); ++i) widths[i] += b.widths()[i];
  Mlp out(widths, blocks[0].activation());
  for (int k = 0; k < K; ++k) {
    int ro = 0, co = 0;
    for (const auto& b : blocks) {
      const auto& L = b.layers()[k];
      auto& M = out.layers()[k];
      for (int i = 0; i < L.rows; ++i) {
        for (int j = 0; j < L.cols; ++j) M.w(ro + i, co + j) = L.w(i, j);
        M.b[ro + i] = L.b[i];
      }
      ro += L.rows;
      co += L.cols;
    }
  }
  return out;
}

Mlp replicate(const Mlp& block, int n) {
  require(n >= 1, "replicate: n >= 1");
  for (const auto& L : block.layers()) require(L.repeat == 1, "replicate: block already grouped");
  if (n == 1) return block;
  std::vector<int> widths = block.widths();
  for (auto& w : widths) w *= n;
  Mlp out(widths, block.activation());
  for (int k = 0; k < block.layer_count(); ++k) {
    auto& L = out.layers()[k];
    L = block.layers()[k];
    L.repeat = n;
  }
  return out;
}

Mlp relu_identity(int width, int hidden_layers) {
  require(width >= 1 && hidden_layers >= 0, "relu_identity: bad shape");
  if (hidden_layers == 0) {
    Mlp out({width, width});
    for (int i = 0; i < width; ++i) out.layers()[0].w(i, i) = 1.0;
    return out;
  }
  // each hidden layer carries [s(x); s(-x)]
  std::vector<int> widths(hidden_layers + 2, 2 * width);
  widths.front() = width;
  widths.back() = width;
  Mlp out(widths);
  auto& first = out.layers()[0];
  for (int i = 0; i < width; ++i) {
    first.w(2 * i, i) = 1.0;
    first.w(2 * i + 1, i) = -1.0;
  }
  for (int k = 1; k < hidden_layers; ++k) {
    auto& L = out.layers()[k];
    for (int i = 0; i < width; ++i) {
      L.w(2 * i, 2 * i) = 1.0;
      L.w(2 * i, 2 * i + 1) = -1.0;
      L.w(2 * i + 1, 2 * i) = -1.0;
      L.w(2 * i + 1, 2 * i + 1) = 1.0;
    }
  }
  auto& last = out.layers()[hidden_layers];
  for (int i = 0; i < width; ++i) {
    last.w(i, 2 * i) = 1.0;
    last.w(i, 2 * i + 1) = -1.0;
  }
  return out;
}

Mlp pad_depth(const Mlp& net, int target_layer_count) {
  require(target_layer_count >= net.layer_count(), "pad_depth: target too small");
  if (target_layer_count == net.layer_count()) return net;
  return compose(net, relu_identity(net.output_dim(), target_layer_count - net.layer_count()));
}

}  // namespace don
