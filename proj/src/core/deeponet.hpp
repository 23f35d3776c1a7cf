#pragma once

#include <memory>
#include <optional>
#include <string>

#include "core/encdec.hpp"
#include "core/mlp.hpp"
#include "core/oracles.hpp"
#include "core/reconstruction.hpp"

namespace don {

// Ground-truth solution operator G with its input/output discretizations.
class Operator {
 public:
  virtual ~Operator() = default;
  virtual FieldSample apply(const FieldSample& u) const = 0;
  virtual Grid input_grid() const = 0;
  virtual Grid output_grid() const = 0;
  virtual std::string name() const = 0;
};

// u(t) forcing (carried on the torus grid, time-rescaled internally) -> angle v1 on [0,T]
class PendulumOperator : public Operator {
 public:
  PendulumOperator(double gamma, double T, int steps, int input_n);
  FieldSample apply(const FieldSample& u) const override;
  Grid input_grid() const override { return Grid::torus(input_n_, 1); }
  Grid output_grid() const override { return Grid::interval(steps_ + 1, T_); }
  std::string name() const override { return "pendulum"; }

 private:
  double gamma_, T_;
  int steps_, input_n_;
};

// coefficient a -> mean-zero solution u of -(a u')' = f on the periodic grid
class EllipticOperator : public Operator {
 public:
  EllipticOperator(FieldSample rhs, double tol = 1e-10);
  FieldSample apply(const FieldSample& a) const override;
  Grid input_grid() const override { return rhs_.grid; }
  Grid output_grid() const override { return rhs_.grid; }
  std::string name() const override { return "elliptic"; }

 private:
  FieldSample rhs_;
  double tol_;
};

// initial data -> Allen-Cahn solution at time T (IMEX scheme)
class AllenCahnOperator : public Operator {
 public:
  AllenCahnOperator(double T, double dt, int grid_n);
  FieldSample apply(const FieldSample& u) const override;
  Grid input_grid() const override { return Grid::torus(grid_n_, 1); }
  Grid output_grid() const override { return Grid::torus(grid_n_, 1); }
  std::string name() const override { return "allenCahn"; }
  double dt() const { return dt_; }
  int steps() const { return steps_; }

 private:
  double T_, dt_;
  int steps_, grid_n_;
};

// initial data -> entropy solution of Burgers at time T; exact characteristics
// for shifted-sine samples (latent shift), Lax-Friedrichs otherwise
class BurgersOperator : public Operator {
 public:
  BurgersOperator(double T, int grid_n, double cfl = 0.9, bool prefer_exact = true);
  FieldSample apply(const FieldSample& u) const override;
  Grid input_grid() const override { return Grid::torus(grid_n_, 1); }
  Grid output_grid() const override { return Grid::torus(grid_n_, 1); }
  std::string name() const override { return "burgers"; }

 private:
  double T_, cfl_;
  int grid_n_;
  bool prefer_exact_;
};

// 2-d field -> masked integral (scalar output on a Point grid)
class IntegralFunctionalOperator : public Operator {
 public:
  IntegralFunctionalOperator(Grid grid2d, std::vector<bool> mask);
  FieldSample apply(const FieldSample& u) const override;
  Grid input_grid() const override { return grid_; }
  Grid output_grid() const override { return Grid::point(); }
  std::string name() const override { return "integralFunctional"; }
  const std::vector<bool>& mask() const { return mask_; }

 private:
  Grid grid_;
  std::vector<bool> mask_;
};

// ---- the DeepONet ------------------------------------------------------------

// Trunk family: an analytic/PCA basis or a neural net y -> (tau_0..tau_p).
struct Trunk {
  enum class Kind { Analytic, Neural };
  Kind kind = Kind::Analytic;
  TrunkBasis basis;  // Analytic: the basis itself (with ygrid)
  Mlp net;           // Neural: R^1 -> R^{p+1}, input y / extent
  Grid ygrid;
  int p = 0;
  // evaluation caches for analytic sources
  std::vector<Wavenumber> fourier_modes;
  std::vector<TrigInterp1d> member_cache;  // PCA members on 1-d torus grids
  std::vector<TrigInterp1d> bias_cache;

  static Trunk analytic(TrunkBasis basis);
  static Trunk neural(Mlp net, const Grid& ygrid);

  // [tau_0(y), ..., tau_p(y)]
  std::vector<double> eval(double y) const;
  // trunk sampled on its output grid (for projections and reconstruction algebra)
  TrunkBasis materialize() const;
};

struct DeepOnet {
  SensorSet sensors;
  bool cell_average_encoder = false;
  Mlp branch;  // R^m -> R^p
  Trunk trunk;

  int p() const { return trunk.p; }
  std::vector<double> encode(const FieldSample& u) const;
  // N(u) on the trunk's output grid
  std::vector<double> eval_grid(const FieldSample& u) const;
  std::vector<double> eval_grid_encoded(const std::vector<double>& enc) const;
  double eval_at(const std::vector<double>& enc, double y) const;
};

// ---- datasets, loss, training -------------------------------------------------

enum class YSampling { RandomUniform, Quadrature };

struct TrainConfig {
  int n_samples = 128;  // N_u
  int n_y = 8;          // N_y
  YSampling y_sampling = YSampling::RandomUniform;
  int epochs = 200;
  int batch = 32;
  double lr = 1e-3;
  std::uint64_t seed = 0;
  bool train_trunk = true;  // ignored for analytic trunks
  double divergence_abort = 1e6;
};

struct DonDataset {
  std::vector<std::vector<double>> enc;      // N x m
  std::vector<std::vector<double>> ypts;     // N x n_y
  std::vector<std::vector<double>> targets;  // N x n_y: G(U_j)(Y^j_k)
  std::vector<std::vector<double>> weights;  // N x n_y: w^j_k
  double domain_measure = 0.0;

  int count() const { return static_cast<int>(enc.size()); }
};

DonDataset make_dataset(const Operator& op, const MeasureSpec& measure, const SensorSet& sensors,
                        bool cell_average, int n_samples, int n_y, YSampling ys,
                        std::uint64_t seed);

double empirical_loss(const DeepOnet& net, const DonDataset& data);

struct TrainHistory {
  std::vector<double> train_loss;  // per epoch
  std::vector<double> test_loss;   // per epoch (empty when no test set)
};

TrainHistory train(DeepOnet& net, const DonDataset& data, const TrainConfig& cfg,
                   const DonDataset* test_data = nullptr);

// Closed-form least-squares affine branch (p = 1): beta(u) = w . enc + b.
// Returns the trained coefficients; used for linear-functional experiments.
std::pair<std::vector<double>, double> fit_affine_branch_lsq(
    const std::vector<std::vector<double>>& enc, const std::vector<double>& targets);

// ---- error measurement --------------------------------------------------------

enum class ErrorNorm { L2, L1 };

McEstimate total_error_mc(const DeepOnet& net, const Operator& op, const MeasureSpec& measure,
                          int Nmc, std::uint64_t seed, ErrorNorm norm = ErrorNorm::L2);

struct ErrorReport {
  McEstimate total;          // E-hat (L2)
  McEstimate total_l1;       // E-hat_{L1}
  McEstimate encoding;       // E-hat_E
  McEstimate approximation;  // E-hat_A
  McEstimate reconstruction; // E-hat_R
  double spectral_lower = 0.0;
  double lip_g = 0.0;        // fitted surrogate
  double lip_r = 0.0;
  double lip_rp = 0.0;
  bool upper_bound_holds = false;
  int sample_count = 0;
};

ErrorReport error_decomposition(const DeepOnet& net, const Operator& op,
                                const MeasureSpec& measure, const EncDecPair& pair, int Nmc,
                                std::uint64_t seed);

// Generalization study: for each N train with (N_u=N, N_y=1, random y) and
// report the gap between the trained net's population loss (estimated on a
// fresh test set) and a reference large-N run, median over seeds.
struct GenGapRow {
  int n_train;
  double median_gap;
  std::vector<double> gaps;  // per seed
};

struct GenGapConfig {
  std::vector<int> n_values = {128, 512, 2048};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  int ref_multiple = 4;    // reference run trains on ref_multiple * max(N)
  int test_multiple = 10;  // test set has test_multiple * max(N) samples
  int epochs = 120;
  int batch = 64;
  double lr = 2e-3;
  int branch_width = 64;
  int trunk_width = 64;
  int p = 8;
  int sensor_count = 9;
};

std::vector<GenGapRow> generalization_gap(const Operator& op, const MeasureSpec& measure,
                                          const GenGapConfig& cfg, std::uint64_t master_seed);

}  // namespace don
