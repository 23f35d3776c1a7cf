#pragma once

#include <string>
#include <vector>

#include "core/common.hpp"
#include "core/rng.hpp"

namespace don {

// Feedforward network: affine C_1, activation, ..., activation, affine C_K.
// depth = K-1 hidden layers; size = number of nonzero parameters.
class Mlp {
 public:
  enum class Activation { Relu, Linear };

  // One affine layer. repeat > 1 means the effective map is block-diagonal with
  // `repeat` copies of the stored (rows x cols) block sharing one set of weights
  // (used by the structured gadget constructions; trained nets keep repeat = 1).
  struct Layer {
    std::vector<double> W;  // rows x cols, row-major (one block)
    std::vector<double> b;  // rows (one block)
    int rows = 0, cols = 0;
    int repeat = 1;

    int eff_rows() const { return rows * repeat; }
    int eff_cols() const { return cols * repeat; }
    double& w(int i, int j) { return W[static_cast<std::size_t>(i) * cols + j]; }
    double w(int i, int j) const { return W[static_cast<std::size_t>(i) * cols + j]; }
  };

  Mlp() = default;
  Mlp(std::vector<int> widths, Activation act = Activation::Relu);

  static Mlp he_init(const std::vector<int>& widths, Rng& rng,
                     Activation act = Activation::Relu);
  // a bare affine map as a 0-hidden-layer network
  static Mlp affine(std::vector<double> W, std::vector<double> b, int rows, int cols);

  int input_dim() const { return widths_.front(); }
  int output_dim() const { return widths_.back(); }
  const std::vector<int>& widths() const { return widths_; }
  Activation activation() const { return act_; }
  int layer_count() const { return static_cast<int>(layers_.size()); }  // K
  int depth() const { return layer_count() - 1; }                       // hidden layers
  std::size_t size() const;                                            // nonzero parameters
  std::size_t parameter_count() const;

  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }

  std::vector<double> forward(const std::vector<double>& x) const;

  // Forward pass keeping pre-activations for backprop.
  struct Tape {
    std::vector<std::vector<double>> pre;   // z_k per layer (after affine)
    std::vector<std::vector<double>> post;  // activations entering each layer (post[0] = x)
  };
  std::vector<double> forward_tape(const std::vector<double>& x, Tape& tape) const;

  // Accumulates parameter gradients for output cotangent dL/dy; returns dL/dx.
  std::vector<double> backward(const Tape& tape, const std::vector<double>& dy,
                               std::vector<Layer>& grad) const;

  std::vector<Layer> zero_grad() const;

  // Mean-squared-error gradient over a batch: L = (1/B) sum_b ||f(x_b) - y_b||^2.
  double mse_and_grad(const std::vector<std::vector<double>>& X,
                      const std::vector<std::vector<double>>& Y,
                      std::vector<Layer>& grad) const;

  std::string to_json() const;
  static Mlp from_json(const std::string& text);

 private:
  std::vector<int> widths_;
  Activation act_ = Activation::Relu;
  std::vector<Layer> layers_;
};

// Standard Adam with bias correction.
struct AdamState {
  double lr = 1e-3, beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  long step = 0;
  std::vector<Mlp::Layer> m, v;

  static AdamState init(const Mlp& net, double lr = 1e-3);
};

// One optimizer step; zero gradient leaves the parameters unchanged.
void adam_step(Mlp& net, AdamState& state, const std::vector<Mlp::Layer>& grad);

// ---- structural composition (used by the gadget constructions) -------------

// g(f(x)): merges f's output affine with g's input affine into one layer.
Mlp compose(const Mlp& f, const Mlp& g);
// block-diagonal stack of equal-depth networks (repeat-1 layers only)
Mlp parallel(const std::vector<Mlp>& blocks);
// n weight-sharing copies of `block` acting on n disjoint input slices
Mlp replicate(const Mlp& block, int n);
// ReLU identity carrier of the given width and hidden-layer count: x = s(x) - s(-x)
Mlp relu_identity(int width, int hidden_layers);
// pads a network with identity layers on the output side to reach `target` affine layers
Mlp pad_depth(const Mlp& net, int target_layer_count);
// expands a grouped layer into its dense block-diagonal form
Mlp::Layer layer_to_dense(const Mlp::Layer& L);

}  // namespace don
