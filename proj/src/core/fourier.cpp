#include "core/fourier.hpp"

#include <algorithm>
#include <cmath>

namespace don {

std::vector<Wavenumber> enumerate_wavenumbers(int count, int dim) {
  require(count >= 1, "enumerate_wavenumbers: count must be >= 1");
  require(dim == 1 || dim == 2, "enumerate_wavenumbers: dim must be 1 or 2");
  std::vector<Wavenumber> out;
  out.reserve(count);
  for (int shell = 0; static_cast<int>(out.size()) < count; ++shell) {
    std::vector<Wavenumber> ring;
    if (dim == 1) {
      if (shell == 0) {
        ring.push_back({{0, 0}, 1});
      } else {
        ring.push_back({{-shell, 0}, 1});
        ring.push_back({{shell, 0}, 1});
      }
    } else {
      for (int k1 = -shell; k1 <= shell; ++k1)
        for (int k2 = -shell; k2 <= shell; ++k2) {
          if (std::max(std::abs(k1), std::abs(k2)) == shell) ring.push_back({{k1, k2}, 2});
        }
      std::sort(ring.begin(), ring.end(), [](const Wavenumber& a, const Wavenumber& b) {
        if (a.k[0] != b.k[0]) return a.k[0] < b.k[0];
        return a.k[1] < b.k[1];
      });
    }
    for (const auto& k : ring) {
      out.push_back(k);
      if (static_cast<int>(out.size()) == count) break;
    }
  }
  return out;
}

double fourier_norm_const(const Wavenumber& k) {
  double vol = k.dim == 2 ? kTwoPi * kTwoPi : kTwoPi;
  return k.is_zero() ? std::sqrt(1.0 / vol) : std::sqrt(2.0 / vol);
}

double fourier_sup(const Wavenumber& k) { return fourier_norm_const(k); }

double fourier_basis(const Wavenumber& k, const std::array<double, 2>& x) {
  double phase = k.k[0] * x[0];
  if (k.dim == 2) phase += k.k[1] * x[1];
  // sign of the first nonzero component decides cos vs sin; k=0 is the constant
  int lead = k.k[0] != 0 ? k.k[0] : (k.dim == 2 ? k.k[1] : 0);
  double c = fourier_norm_const(k);
  if (k.is_zero() || lead > 0) return c * std::cos(phase);
  return c * std::sin(phase);
}

namespace {

void fft_pow2(std::vector<std::complex<double>>& a, int sign) {
  std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double ang = sign * kTwoPi / static_cast<double>(len);
    std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        std::complex<double> u = a[i + j];
        std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

void dft_direct(std::vector<std::complex<double>>& a, int sign) {
  std::size_t n = a.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> s(0.0, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      double ang = sign * kTwoPi * static_cast<double>(k * j % n) / static_cast<double>(n);
      s += a[j] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = s;
  }
  a = std::move(out);
}

}  // namespace

void dft(std::vector<std::complex<double>>& data, int sign) {
  std::size_t n = data.size();
  if (n <= 1) return;
  if ((n & (n - 1)) == 0)
    fft_pow2(data, sign);
  else
    dft_direct(data, sign);
}

TrigInterp1d::TrigInterp1d(const std::vector<double>& samples) {
  int m = static_cast<int>(samples.size());
  require(m >= 1, "TrigInterp1d: empty sample vector");
  int K = m / 2;  // (m-1)/2 modes for odd m plus the halved cosine mode for even m
  a_.assign(K + 1, 0.0);
  b_.assign(K + 1, 0.0);
  std::vector<std::complex<double>> c(samples.begin(), samples.end());
  dft(c, -1);
  a_[0] = c[0].real() / m;
  for (int k = 1; k <= K; ++k) {
    // c[k] = sum_j v_j e^{-2pi i jk/m}
    a_[k] = 2.0 * c[k].real() / m;
    b_[k] = -2.0 * c[k].imag() / m;
  }
  if (m % 2 == 0) {
    a_[K] = c[K].real() / m;  // Nyquist cosine, no sine partner
    b_[K] = 0.0;
  }
}

double TrigInterp1d::operator()(double x) const {
  double s = a_[0];
  for (std::size_t k = 1; k < a_.size(); ++k) {
    double kk = static_cast<double>(k);
    s += a_[k] * std::cos(kk * x) + b_[k] * std::sin(kk * x);
  }
  return s;
}

std::vector<double> TrigInterp1d::on_grid(const Grid& g) const {
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (*this)(g.point_at(i)[0]);
  return out;
}

TrigInterp2d::TrigInterp2d(const std::vector<double>& samples, int n) : n_(n) {
  require(n >= 1 && samples.size() == static_cast<std::size_t>(n) * n,
          "TrigInterp2d: bad sample shape");
  coef_.assign(samples.begin(), samples.end());
  // row transforms then column transforms
  std::vector<std::complex<double>> line(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) line[j] = coef_[i * n + j];
    dft(line, -1);
    for (int j = 0; j < n; ++j) coef_[i * n + j] = line[j];
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) line[i] = coef_[i * n + j];
    dft(line, -1);
    for (int i = 0; i < n; ++i) coef_[i * n + j] = line[i];
  }
  double inv = 1.0 / (static_cast<double>(n) * n);
  for (auto& c : coef_) c *= inv;
  modes_.resize(n);
  for (int q = 0; q < n; ++q) modes_[q] = q <= (n - 1) / 2 ? q : q - n;
}

double TrigInterp2d::operator()(double x1, double x2) const {
  // sum over modes of coef * e^{i(k1 x1 + k2 x2)}; input was real so take real part
  std::vector<std::complex<double>> e1(n_), e2(n_);
  for (int q = 0; q < n_; ++q) {
    e1[q] = std::complex<double>(std::cos(modes_[q] * x1), std::sin(modes_[q] * x1));
    e2[q] = std::complex<double>(std::cos(modes_[q] * x2), std::sin(modes_[q] * x2));
  }
  std::complex<double> s(0.0, 0.0);
  for (int i = 0; i < n_; ++i) {
    std::complex<double> row(0.0, 0.0);
    const std::complex<double>* base = &coef_[static_cast<std::size_t>(i) * n_];
    for (int j = 0; j < n_; ++j) row += base[j] * e2[j];
    s += e1[i] * row;
  }
  return s.real();
}

}  // namespace don
