#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "core/measures.hpp"
#include "core/stats.hpp"

namespace don {

// Anything evaluable at domain points: analytic callables or grid samples
// (grid samples go through the interpolation rules of eval_field).
using FieldFn = std::function<double(const std::array<double, 2>&)>;

FieldFn as_field_fn(const FieldSample& f);

// Sensor locations for the encoders.
struct SensorSet {
  enum class Kind { Equispaced, Random, CellCenters };
  Kind kind = Kind::Equispaced;
  int dim = 1;
  std::vector<std::array<double, 2>> locations;
  double dx = 0.0;  // cell width for CellCenters

  int count() const { return static_cast<int>(locations.size()); }

  // m equispaced points on [0,2pi]^d (d=1: x_j = 2pi j/m)
  static SensorSet equispaced(int m, int dim = 1);
  // m iid uniform points on [0,2pi]^d
  static SensorSet random(int m, int dim, Rng& rng);
  // m cells [x_j - dx/2, x_j + dx/2] partitioning [0,2pi], centers equispaced
  static SensorSet cell_centers(int m);
};

// E(u) = (u(x_1), ..., u(x_m))
std::vector<double> encode_pointwise(const FieldFn& u, const SensorSet& sensors);
std::vector<double> encode_pointwise(const FieldSample& u, const SensorSet& sensors);

// Ebar(u)_j = (1/dx) int_{C_j} u dx, composite midpoint rule with >= 8 subpoints.
std::vector<double> encode_cell_average(const FieldFn& u, const SensorSet& cells,
                                        int subpoints = 16);

// DFT decoder for m = 2K+1 equispaced sensors: the unique trigonometric
// interpolant with modes |k| <= K. Returns the interpolant; E o D = Id on R^m.
TrigInterp1d decode_dft(const std::vector<double>& encoded);

// An eigenpair family (lambda_j, phi_j) the pseudoinverse decoder projects onto.
// Analytic families evaluate anywhere; empirical ones interpolate their grid.
class EigenBasis {
 public:
  virtual ~EigenBasis() = default;
  virtual int count() const = 0;
  virtual double eigenvalue(int j) const = 0;
  virtual double eval(int j, const std::array<double, 2>& x) const = 0;
};

// Eigenpairs of the periodized quadratic-exponential kernel: phi_j = e_{kappa(j)},
// lambda by gaussian_kernel_eigenvalue. Enumeration order is nonincreasing in lambda.
class GaussianKernelBasis : public EigenBasis {
 public:
  GaussianKernelBasis(double ell, int K, int dim = 1);
  int count() const override { return static_cast<int>(modes_.size()); }
  double eigenvalue(int j) const override { return lambda_[j]; }
  double eval(int j, const std::array<double, 2>& x) const override {
    return fourier_basis(modes_[j], x);
  }

 private:
  std::vector<Wavenumber> modes_;
  std::vector<double> lambda_;
};

class SpectrumBasis : public EigenBasis {
 public:
  explicit SpectrumBasis(const SpectrumEstimate& s) : s_(s) {}
  int count() const override { return static_cast<int>(s_.eigenvalues.size()); }
  double eigenvalue(int j) const override { return s_.eigenvalues[j]; }
  double eval(int j, const std::array<double, 2>& x) const override {
    return eval_field(FieldSample(s_.mean_field.grid, s_.eigenvectors[j]), x);
  }

 private:
  SpectrumEstimate s_;
};

// Decoder (eq. pair E, D over sensors X): coefficients c = PhiM^+ u(X), field
// sum_k c_k phi_k. Construction fails when sigma_min((|D|/M) PhiM PhiM^T) < 1e-8.
class PseudoinverseDecoder {
 public:
  static PseudoinverseDecoder make(const EigenBasis& basis, int m_eig, const SensorSet& sensors,
                                   double sigma_min_threshold = 1e-8);

  // coefficients of the projection onto span(phi_1..phi_m)
  std::vector<double> coefficients(const std::vector<double>& sensor_values) const;
  // pseudoinverse row application to an arbitrary sensor-sampled vector
  std::vector<double> apply_pinv(const std::vector<double>& sensor_values) const;
  double sigma_min() const { return sigma_min_; }
  int mode_count() const { return m_; }
  int sensor_count() const { return M_; }

 private:
  int m_ = 0, M_ = 0;
  double sigma_min_ = 0.0;
  std::vector<double> pinv_;  // m x M row-major: (Phi Phi^T)^{-1} Phi
};

// sqrt( sum_{l>m} lambda_l || PhiM^+ phi_l(X) ||^2 ), tail truncated at
// lambda_l / lambda_1 < tail_rtol (and by the basis length).
double aliasing_error(const EigenBasis& basis, const PseudoinverseDecoder& dec,
                      const SensorSet& sensors, double tail_rtol = 1e-12);

// Monte-Carlo encoding error: RMS of ||D(E(u)) - u||_{L2} over Nmc fresh samples,
// jackknife stderr; norms on `ref_grid` (>= 4x finer than the decoder band limit).
struct EncDecPair {
  // evaluate D(E(u)) on the reference grid given the encoded vector
  std::function<std::vector<double>(const std::vector<double>&, const Grid&)> decode_on;
  SensorSet sensors;
  bool cell_average = false;
};

EncDecPair dft_pair(int m);
EncDecPair pseudoinverse_pair(const std::shared_ptr<const EigenBasis>& basis, int m_eig,
                              const SensorSet& sensors);

McEstimate encoding_error_mc(const MeasureSpec& spec, const EncDecPair& pair, int Nmc,
                             std::uint64_t seed, const Grid& ref_grid);
// Squared-error version (mean of ||.||^2 with jackknife stderr of the mean).
McEstimate encoding_error_sq_mc(const MeasureSpec& spec, const EncDecPair& pair, int Nmc,
                                std::uint64_t seed, const Grid& ref_grid);

// Shrink-based decoder for ParamFourier measures on the regular grid m = 2N+1:
// recovers Yhat = shrink(DFT coefficient / alpha_k) and rebuilds u(.; Yhat).
struct ShrinkDecodeResult {
  std::vector<double> y_hat;   // aligned with kl_modes(spec) up to |k|_inf <= N
  FieldSample decoded;         // u(.; Yhat) on the requested output grid
};

ShrinkDecodeResult decode_shrink(const std::vector<double>& encoded, const MeasureSpec& spec,
                                 const Grid& output_grid);

double shrink(double y);

}  // namespace don
