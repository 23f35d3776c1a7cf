#include <cmath>

#include "core/measures.hpp"
#include "doctest.h"

using namespace don;

TEST_CASE("gaussian kernel eigenvalues") {
  // lambda_0 = sqrt(2 pi) * ell
  CHECK(gaussian_kernel_eigenvalue(0.1, {{0, 0}, 1}) ==
        doctest::Approx(std::sqrt(kTwoPi) * 0.1).epsilon(1e-12));
  // even in k
  CHECK(gaussian_kernel_eigenvalue(0.7, {{3, 0}, 1}) ==
        doctest::Approx(gaussian_kernel_eigenvalue(0.7, {{-3, 0}, 1})).epsilon(1e-15));
  // ratio of k=2 to k=1 at ell=1 is e^{-3/2}
  double r = gaussian_kernel_eigenvalue(1.0, {{2, 0}, 1}) /
             gaussian_kernel_eigenvalue(1.0, {{1, 0}, 1});
  CHECK(r == doctest::Approx(std::exp(-1.5)).epsilon(1e-12));
}

TEST_CASE("param-fourier with zero coefficients returns the mean") {
  MeasureSpec spec;
  spec.family = MeasureSpec::Family::ParamFourier;
  spec.alpha_c = 0.0;
  spec.modes = 4;
  spec.mean_const = 2.5;
  Rng rng(7);
  FieldSample f = sample(spec, Grid::torus(16, 1), rng);
  for (double v : f.values) CHECK(v == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("shifted sine samples: bounded, zero mean") {
  MeasureSpec spec;
  spec.family = MeasureSpec::Family::ShiftedSine;
  Grid g = Grid::torus(64, 1);
  for (int i = 0; i < 20; ++i) {
    Rng rng(11, i);
    FieldSample f = sample(spec, g, rng);
    double maxabs = 0.0;
    for (double v : f.values) maxabs = std::max(maxabs, std::abs(v));
    CHECK(maxabs <= 1.0 + 1e-12);
    CHECK(std::abs(integrate(g, f.values)) < 1e-12);
  }
}

TEST_CASE("gaussian kernel second moment matches the eigenvalue trace") {
  MeasureSpec spec;  // GaussianKernel ell = 0.5
  spec.ell = 0.5;
  int K = spec.effective_truncation();
  double trace = 0.0;
  for (const auto& m : kl_modes(spec)) trace += m.scale * m.scale;
  double closed = 0.0;
  for (int k = -K; k <= K; ++k)
    closed += gaussian_kernel_eigenvalue(spec.ell, {{k, 0}, 1});
  CHECK(trace == doctest::Approx(closed).epsilon(1e-12));

  Grid g = Grid::torus(128, 1);
  int N = 2000;
  std::vector<double> sq(N);
  double mean = 0.0;
  for (int i = 0; i < N; ++i) {
    Rng rng(42, i);
    FieldSample f = sample(spec, g, rng);
    double s = inner(g, f.values, f.values);
    sq[i] = s;
    mean += s / N;
  }
  double var = 0.0;
  for (double s : sq) var += (s - mean) * (s - mean) / (N - 1.0);
  double se = std::sqrt(var / N);
  CHECK(std::abs(mean - trace) <= 4.0 * se);
}

TEST_CASE("empirical spectrum of a two-point set {+phi, -phi}") {
  Grid g = Grid::torus(32, 1);
  std::vector<double> phi(g.size());
  for (std::size_t q = 0; q < g.size(); ++q) phi[q] = std::cos(g.point_at(q)[0]);
  double nrm = norm_l2(g, phi);
  for (auto& v : phi) v /= nrm;
  std::vector<FieldSample> samples;
  samples.emplace_back(g, phi);
  std::vector<double> neg(phi);
  for (auto& v : neg) v = -v;
  samples.emplace_back(g, neg);

  SpectrumEstimate s = empirical_spectrum(samples, 2);
  CHECK(s.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(s.eigenvalues[1]) < 1e-10);
  // eigenvector is +-phi
  double ip = inner(g, s.eigenvectors[0], phi);
  CHECK(std::abs(std::abs(ip) - 1.0) < 1e-8);
}

TEST_CASE("empirical spectrum of the shifted-sine law: double eigenvalue pi/2") {
  MeasureSpec spec;
  spec.family = MeasureSpec::Family::ShiftedSine;
  Grid g = Grid::torus(64, 1);
  std::vector<FieldSample> samples;
  int N = 2000;
  samples.reserve(N);
  for (int i = 0; i < N; ++i) {
    Rng rng(5, i);
    samples.push_back(sample(spec, g, rng));
  }
  SpectrumEstimate s = empirical_spectrum(samples, 4);
  // analytic kernel (1/2) cos(x-x') has the double eigenvalue pi/2 on span{sin, cos}
  double target = kTwoPi / 4.0;
  CHECK(std::abs(s.eigenvalues[0] - target) / target < 0.10);
  CHECK(std::abs(s.eigenvalues[1] - target) / target < 0.10);
  CHECK(s.eigenvalues[2] < 1e-8);
  CHECK(s.eigenvalues[3] < 1e-8);
  // leading eigenvectors span {sin, cos}: project onto that plane
  for (int j = 0; j < 2; ++j) {
    std::vector<double> sinv(g.size()), cosv(g.size());
    for (std::size_t q = 0; q < g.size(); ++q) {
      sinv[q] = std::sin(g.point_at(q)[0]) / std::sqrt(kTwoPi / 2.0);
      cosv[q] = std::cos(g.point_at(q)[0]) / std::sqrt(kTwoPi / 2.0);
    }
    double a = inner(g, s.eigenvectors[j], sinv);
    double b = inner(g, s.eigenvectors[j], cosv);
    CHECK(a * a + b * b == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("spectrum invariants: ordering, orthonormality, trace bound, mean decay") {
  MeasureSpec spec;
  spec.ell = 0.5;
  Grid g = Grid::torus(64, 1);
  int N = 400;
  std::vector<FieldSample> samples;
  samples.reserve(N);
  for (int i = 0; i < N; ++i) {
    Rng rng(9, i);
    samples.push_back(sample(spec, g, rng));
  }
  int p = 10;
  SpectrumEstimate s = empirical_spectrum(samples, p);
  double head = 0.0;
  for (int k = 0; k < p; ++k) {
    CHECK(s.eigenvalues[k] >= 0.0);
    if (k > 0) CHECK(s.eigenvalues[k] <= s.eigenvalues[k - 1] + 1e-14);
    head += s.eigenvalues[k];
  }
  CHECK(head <= s.trace * (1.0 + 1e-12));
  for (int a = 0; a < p; ++a)
    for (int b = 0; b <= a; ++b) {
      double ip = inner(g, s.eigenvectors[a], s.eigenvectors[b]);
      CHECK(std::abs(ip - (a == b ? 1.0 : 0.0)) <= 1e-8);
    }
  // mean-zero family: componentwise mean within 5 stderr
  const auto& mean = s.mean_field.values;
  for (std::size_t q = 0; q < mean.size(); q += 7) {
    double var = 0.0;
    for (const auto& f : samples) {
      double d = f.values[q] - mean[q];
      var += d * d;
    }
    var /= (N - 1.0);
    double se = std::sqrt(var / N);
    CHECK(std::abs(mean[q]) <= 5.0 * se + 1e-12);
  }
}

TEST_CASE("gaussian-kernel empirical eigenvalues match the closed form") {
  MeasureSpec spec;
  spec.ell = 0.5;
  Grid g = Grid::torus(64, 1);
  int N = 5000;
  std::vector<FieldSample> samples;
  samples.reserve(N);
  for (int i = 0; i < N; ++i) {
    Rng rng(123, i);
    samples.push_back(sample(spec, g, rng));
  }
  SpectrumEstimate s = empirical_spectrum(samples, 5);
  // enumeration-ordered eigenvalues of the kernel
  auto modes = enumerate_wavenumbers(5, 1);
  for (int k = 0; k < 5; ++k) {
    double lam = gaussian_kernel_eigenvalue(spec.ell, modes[k]);
    CHECK(std::abs(s.eigenvalues[k] - lam) / lam < 0.15);
  }
}

TEST_CASE("2-d gaussian kernel sampler reproduces the periodized product kernel") {
  MeasureSpec spec;
  spec.ell = 0.8;
  spec.dim = 2;
  // covariance at a few point pairs vs the periodized kernel
  // k((x1,x2),(y1,y2)) = kp(x1-y1) kp(x2-y2), kp(d) = sum_h exp(-(d-2pi h)^2/(2 ell^2))
  auto kp1 = [&](double d) {
    double s = 0.0;
    for (int h = -3; h <= 3; ++h) {
      double u = d - kTwoPi * h;
      s += std::exp(-u * u / (2.0 * spec.ell * spec.ell));
    }
    return s;
  };
  std::vector<std::array<double, 2>> pts = {
      {0.0, 0.0}, {1.0, 2.0}, {3.5, 0.7}, {5.0, 5.5}};
  int N = 4000;
  std::vector<std::vector<double>> vals(N);
  for (int i = 0; i < N; ++i) {
    Rng rng(2718, i);
    auto latent = sample_latent(spec, rng);
    vals[i] = eval_measure_at(spec, latent, pts);
  }
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a; b < pts.size(); ++b) {
      double cov = 0.0;
      for (int i = 0; i < N; ++i) cov += vals[i][a] * vals[i][b] / N;
      double truth = kp1(pts[a][0] - pts[b][0]) * kp1(pts[a][1] - pts[b][1]);
      double var_est = 0.0;
      for (int i = 0; i < N; ++i) {
        double d = vals[i][a] * vals[i][b] - cov;
        var_est += d * d / (N - 1.0);
      }
      double se = std::sqrt(var_est / N);
      CHECK(std::abs(cov - truth) <= 5.0 * se + 1e-12);
    }
}

TEST_CASE("measure spec json round trip") {
  MeasureSpec spec;
  spec.family = MeasureSpec::Family::ParamFourier;
  spec.alpha_c = 0.3;
  spec.alpha_ell = 1.5;
  spec.modes = 6;
  spec.dim = 1;
  MeasureSpec back = MeasureSpec::from_json(spec.to_json());
  CHECK(back.family == MeasureSpec::Family::ParamFourier);
  CHECK(back.alpha_c == doctest::Approx(0.3));
  CHECK(back.alpha_ell == doctest::Approx(1.5));
  CHECK(back.modes == 6);
}

TEST_CASE("empirical spectrum rejects degenerate input") {
  Grid g = Grid::torus(8, 1);
  std::vector<FieldSample> one;
  one.emplace_back(g, std::vector<double>(8, 1.0));
  CHECK_THROWS_AS(empirical_spectrum(one, 1), InvalidArgument);
}
