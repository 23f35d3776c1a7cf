#pragma once

#include <string>
#include <vector>

#include "core/fourier.hpp"
#include "core/grid.hpp"
#include "core/rng.hpp"

namespace don {

// Probability measures on function space the library can sample from.
//   GaussianKernel — Gaussian field, periodized quadratic-exponential kernel,
//                    KL expansion in the Fourier basis truncated at |k|_inf <= K
//   ParamFourier   — u = mean + sum Y_k alpha_k e_k, Y_k iid Uniform[-1,1],
//                    alpha_k = alpha_c * exp(-alpha_ell * |k|_inf), |k|_inf <= modes
//   ShiftedSine    — u(x) = -sin(x - xhat), xhat ~ Uniform[0,2pi)   (d = 1)
struct MeasureSpec {
  enum class Family { GaussianKernel, ParamFourier, ShiftedSine };
  Family family = Family::GaussianKernel;
  int dim = 1;
  double ell = 0.5;        // GaussianKernel length scale
  int truncation = -1;     // GaussianKernel K; -1 picks default with lambda_K/lambda_0 < 1e-14
  double alpha_c = 1.0;    // ParamFourier decay constants
  double alpha_ell = 1.0;
  int modes = 8;           // ParamFourier |k|_inf cutoff
  double mean_const = 0.0;

  int effective_truncation() const;

  std::string to_json() const;
  static MeasureSpec from_json(const std::string& text);
  void validate() const;
};

// lambda_k of the periodized quadratic-exponential covariance kernel:
// sqrt(2pi) ell exp(-(ell k)^2 / 2) per 1-d wavenumber; tensor product across axes.
double gaussian_kernel_eigenvalue(double ell, const Wavenumber& k);
// Map |k| <= K (1-d): index i in [0, 2K] follows the enumeration order.
std::vector<double> gaussian_kernel_eigenvalues(double ell, int K);

// One KL/parametric mode: coefficient scale applied to the latent draw.
struct KlMode {
  Wavenumber k;
  double scale;  // sqrt(lambda_k) (Gaussian) or alpha_k (ParamFourier)
};

// The expansion backing a MeasureSpec (empty for ShiftedSine).
std::vector<KlMode> kl_modes(const MeasureSpec& spec);

// Draws the latent coefficient vector: Z ~ N(0,1) iid (GaussianKernel),
// Y ~ Uniform[-1,1] iid (ParamFourier), or {xhat} (ShiftedSine).
std::vector<double> sample_latent(const MeasureSpec& spec, Rng& rng);

// Field values at arbitrary points for given latent coefficients.
std::vector<double> eval_measure_at(const MeasureSpec& spec, const std::vector<double>& latent,
                                    const std::vector<std::array<double, 2>>& points);

// Sample on a grid; latent coefficients stored in the result.
FieldSample sample(const MeasureSpec& spec, const Grid& grid, Rng& rng);
FieldSample field_from_latent(const MeasureSpec& spec, const std::vector<double>& latent,
                              const Grid& grid);

// Empirical covariance spectrum of a sample set (divide-by-N estimator).
struct SpectrumEstimate {
  std::vector<double> eigenvalues;          // leading p, nonincreasing, clipped at 0
  std::vector<std::vector<double>> eigenvectors;  // orthonormal under grid quadrature
  FieldSample mean_field;
  double trace = 0.0;  // (1/N) sum ||u_i - mean||^2, full trace of the empirical covariance
  int sample_count = 0;

  // sum_{k>p} lambda_k of the full empirical spectrum (tail through the trace)
  double tail_sum(int p) const;
};

SpectrumEstimate empirical_spectrum(const std::vector<FieldSample>& samples, int p);

}  // namespace don
