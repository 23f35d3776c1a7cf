#pragma once

#include <array>
#include <complex>
#include <vector>

#include "core/grid.hpp"

namespace don {

// Wavenumber k in Z^d, d in {1,2}.
struct Wavenumber {
  std::array<int, 2> k = {0, 0};
  int dim = 1;

  int inf_norm() const {
    int a = std::abs(k[0]), b = dim == 2 ? std::abs(k[1]) : 0;
    return a > b ? a : b;
  }
  double sq_norm() const {
    double a = k[0], b = dim == 2 ? k[1] : 0;
    return a * a + b * b;
  }
  bool is_zero() const { return k[0] == 0 && (dim == 1 || k[1] == 0); }
};

// First `count` wavenumbers of the enumeration kappa: |kappa(j)|_inf nondecreasing,
// ties broken lexicographically on (k_1, ..., k_d).
std::vector<Wavenumber> enumerate_wavenumbers(int count, int dim);

// Normalized real Fourier basis e_k on [0,2pi]^d: ||e_k||_{L2} = 1.
// cos(k.x) when the first nonzero component of k is positive (and for k = 0),
// sin(k.x) otherwise; normalization 1/sqrt((2pi)^d) for k=0, sqrt(2/(2pi)^d) else.
double fourier_basis(const Wavenumber& k, const std::array<double, 2>& x);
double fourier_norm_const(const Wavenumber& k);
// sup norm of e_k over the torus
double fourier_sup(const Wavenumber& k);

// ---- discrete transforms --------------------------------------------------

// In-place complex FFT (forward: sign=-1) for power-of-two n; general n falls
// back to the direct O(n^2) transform. No normalization applied.
void dft(std::vector<std::complex<double>>& data, int sign);

// Real trigonometric interpolant on [0,2pi): p(x) = a0 + sum_k (a_k cos kx + b_k sin kx).
// From m equispaced samples: K = (m-1)/2 for odd m; for even m the mode K = m/2
// keeps only the cosine term with the standard halved coefficient.
class TrigInterp1d {
 public:
  TrigInterp1d() = default;
  explicit TrigInterp1d(const std::vector<double>& samples);

  double operator()(double x) const;
  int max_mode() const { return static_cast<int>(a_.size()) - 1; }
  // a_k, b_k with b_0 = 0
  const std::vector<double>& cos_coeffs() const { return a_; }
  const std::vector<double>& sin_coeffs() const { return b_; }

  std::vector<double> on_grid(const Grid& g) const;

 private:
  std::vector<double> a_, b_;
};

// 2-d tensor trigonometric interpolant on [0,2pi)^2 from an n-by-n sample grid
// (row-major, index i*n + j with x1 = coord(i), x2 = coord(j)).
class TrigInterp2d {
 public:
  TrigInterp2d() = default;
  explicit TrigInterp2d(const std::vector<double>& samples, int n);
  double operator()(double x1, double x2) const;

 private:
  int n_ = 0;
  std::vector<std::complex<double>> coef_;  // size n^2, mode order as produced by dft rows/cols
  std::vector<int> modes_;                  // signed mode for index 0..n-1
};

}  // namespace don
