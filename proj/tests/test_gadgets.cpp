#include <cmath>

#include "core/gadgets.hpp"
#include "core/oracles.hpp"
#include "doctest.h"

using namespace don;

TEST_CASE("shrink net computes the exact clamp") {
  GadgetNet s = shrink_net();
  CHECK(s.eval1(0.3) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(s.eval1(5.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.eval1(-2.0) == doctest::Approx(-1.0).epsilon(1e-15));
  for (double x = -3.0; x <= 3.0; x += 0.01) {
    double want = x < -1.0 ? -1.0 : (x > 1.0 ? 1.0 : x);
    CHECK(s.eval1(x) == doctest::Approx(want).epsilon(1e-14));
  }
}

TEST_CASE("indicator net: exact plateau, support and L1 error") {
  double a = 0.5, b = 2.0, eps = 0.3;
  GadgetNet chi = indicator_net(a, b, eps);
  CHECK(chi.eval1(0.5 * (a + b)) == doctest::Approx(1.0).epsilon(1e-14));
  // identically zero outside [a,b]; to the right the four terms cancel in
  // exact arithmetic, leaving only roundoff
  CHECK(chi.eval1(a - 0.01) == 0.0);
  CHECK(chi.eval1(a - 5.0) == 0.0);
  CHECK(std::abs(chi.eval1(b + 0.01)) < 1e-13);
  CHECK(std::abs(chi.eval1(b + 5.0)) < 1e-13);

  // exact piecewise-linear integration of |chi - 1_{[a,b]}|: two triangles of
  // area eps/2 meeting the bound with equality
  auto l1_exact = [&]() {
    // deficit on the two ramps: integral of (1 - ramp) over width-eps intervals
    return 2.0 * (0.5 * eps);
  };
  // numerical check against a fine Riemann sum
  double acc = 0.0;
  int n = 400000;
  double lo = a - 1.0, hi = b + 1.0;
  double h = (hi - lo) / n;
  for (int i = 0; i < n; ++i) {
    double x = lo + (i + 0.5) * h;
    double ind = (x >= a && x <= b) ? 1.0 : 0.0;
    acc += std::abs(chi.eval1(x) - ind) * h;
  }
  CHECK(acc == doctest::Approx(l1_exact()).epsilon(1e-3));
  CHECK(acc <= eps * (1.0 + 1e-3));

  CHECK_THROWS_AS(indicator_net(0.0, 1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(indicator_net(0.0, 1.0, 0.0), InvalidArgument);
}

TEST_CASE("cubic net approximates v - v^3 with certificate tolerance") {
  for (double eps : {1e-2, 1e-3}) {
    GadgetNet g = cubic_net(eps);
    CHECK(std::abs(g.eval1(0.0)) <= eps);
    double sup = 0.0;
    for (int i = 0; i <= 10000; ++i) {
      double eta = -1.0 + 2.0 * i / 10000.0;
      double val = g.eval1(eta);
      CHECK(val <= 1.0 + 1e-12);
      CHECK(val >= -1.0 - 1e-12);
      sup = std::max(sup, std::abs(val - (eta - eta * eta * eta)));
    }
    CHECK(sup <= eps);
  }
}

TEST_CASE("cubic net: measured lipschitz constant uniformly bounded in eps") {
  double M = 0.0;
  std::vector<double> lips;
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
    GadgetNet g = cubic_net(eps);
    double lip = 0.0;
    int n = 20000;
    double prev = g.eval1(-1.0);
    for (int i = 1; i <= n; ++i) {
      double eta = -1.0 + 2.0 * i / n;
      double cur = g.eval1(eta);
      lip = std::max(lip, std::abs(cur - prev) / (2.0 / n));
      prev = cur;
    }
    lips.push_back(lip);
    M = std::max(M, lip);
  }
  // a single constant M works across the eps sweep; f' = 1 - 3v^2 has sup 2
  CHECK(M <= 4.0);
  for (double l : lips) CHECK(l <= M);
}

TEST_CASE("cubic net size and depth grow like |log eps|") {
  auto size_at = [](double eps) { return static_cast<double>(cubic_net(eps).net.size()); };
  auto depth_at = [](double eps) { return static_cast<double>(cubic_net(eps).net.depth()); };
  // ratios of consecutive dyadic eps stay bounded (linear in |log eps|)
  double s1 = size_at(1e-2), s2 = size_at(1e-4);
  double d1 = depth_at(1e-2), d2 = depth_at(1e-4);
  CHECK(s2 / s1 < 3.0);
  CHECK(d2 / d1 < 3.0);
}

TEST_CASE("ac emulator reproduces the reference recursion to 1e-12") {
  int m = 33, n = 10;
  double dt = 0.05, eps = 1e-3;
  GadgetNet em = ac_emulator_net(m, n, dt, eps);
  GadgetNet cubic = cubic_net(eps);
  for (int t = 0; t < 20; ++t) {
    Rng rng(40 + t);
    std::vector<double> u0(m);
    for (auto& v : u0) v = rng.uniform(-1.0, 1.0);
    auto out = em.net.forward(u0);
    auto ref = ac_emulator_reference(cubic, m, n, dt, u0);
    for (int i = 0; i < m; ++i) CHECK(std::abs(out[i] - ref[i]) <= 1e-12);
  }
}

TEST_CASE("ac emulator stays within T e^{MT} eps of the true scheme") {
  int m = 33;
  double dt = 0.05, eps = 1e-3;
  double T = 0.5;
  int n = static_cast<int>(std::lround(T / dt));
  GadgetNet em = ac_emulator_net(m, n, dt, eps);

  // measured Lipschitz constant of the gadget on [-1,1]
  GadgetNet cubic = cubic_net(eps);
  double M = 0.0;
  {
    int grid = 20000;
    double prev = cubic.eval1(-1.0);
    for (int i = 1; i <= grid; ++i) {
      double eta = -1.0 + 2.0 * i / grid;
      double cur = cubic.eval1(eta);
      M = std::max(M, std::abs(cur - prev) / (2.0 / grid));
      prev = cur;
    }
  }
  for (int t = 0; t < 10; ++t) {
    Rng rng(90 + t);
    std::vector<double> u0(m);
    for (auto& v : u0) v = rng.uniform(-1.0, 1.0);
    auto out = em.net.forward(u0);
    auto exact = solve_allen_cahn(u0, dt, n);
    double dev = 0.0;
    for (int i = 0; i < m; ++i) dev = std::max(dev, std::abs(out[i] - exact[i]));
    CHECK(dev <= T * std::exp(M * T) * eps);
  }
}

TEST_CASE("ac emulator size accounting: one constant across configurations") {
  // size(N) <= C n (m^2 + m |log eps|) with a single fitted C
  double cmax = 0.0, cmin = 1e300;
  for (int m : {17, 33})
    for (int n : {5, 10})
      for (double eps : {1e-2, 1e-3}) {
        GadgetNet em = ac_emulator_net(m, n, 0.05, eps);
        double denom = n * (static_cast<double>(m) * m + m * std::abs(std::log(eps)));
        double c = static_cast<double>(em.net.size()) / denom;
        cmax = std::max(cmax, c);
        cmin = std::min(cmin, c);
      }
  CHECK(cmax < 40.0);
  CHECK(cmax / cmin < 8.0);  // the fitted constant is stable across the sweep
}
