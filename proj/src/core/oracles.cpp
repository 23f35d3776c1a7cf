#include "core/oracles.hpp"

#include <cmath>
#include <complex>

#include "core/common.hpp"
#include "core/fourier.hpp"

namespace don {

PendulumTrajectory solve_pendulum(const std::function<double(double)>& forcing, double gamma,
                                  double T, int steps) {
  require(steps >= 2, "solve_pendulum: steps >= 2");
  require(T > 0, "solve_pendulum: T > 0");
  double h = T / steps;
  PendulumTrajectory out;
  out.time = Grid::interval(steps + 1, T);
  out.v1.resize(steps + 1);
  out.v2.resize(steps + 1);
  double v1 = 0.0, v2 = 0.0;
  out.v1[0] = v1;
  out.v2[0] = v2;
  auto f1 = [](double, double b) { return b; };
  auto f2 = [&](double a, double t) { return -gamma * std::sin(a) + forcing(t); };
  for (int n = 0; n < steps; ++n) {
    double t = n * h;
    double k1a = f1(v1, v2), k1b = f2(v1, t);
    double k2a = f1(v1 + 0.5 * h * k1a, v2 + 0.5 * h * k1b),
           k2b = f2(v1 + 0.5 * h * k1a, t + 0.5 * h);
    double k3a = f1(v1 + 0.5 * h * k2a, v2 + 0.5 * h * k2b),
           k3b = f2(v1 + 0.5 * h * k2a, t + 0.5 * h);
    double k4a = f1(v1 + h * k3a, v2 + h * k3b), k4b = f2(v1 + h * k3a, t + h);
    v1 += h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
    v2 += h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
    out.v1[n + 1] = v1;
    out.v2[n + 1] = v2;
  }
  return out;
}

FieldSample solve_elliptic(const FieldSample& a, const FieldSample& f, double tol, int max_iter) {
  const Grid& g = a.grid;
  require(g.kind == DomainKind::Torus && g.dim == 1, "solve_elliptic: 1-d periodic grid");
  require(f.grid.same_shape(g), "solve_elliptic: a and f on different grids");
  int n = g.n;
  double h = g.spacing();

  double amin = a.values[0];
  for (double v : a.values) amin = std::min(amin, v);
  if (!(amin > 0))
    throw NumericalError("solve_elliptic: non-coercive coefficient, min a = " +
                         std::to_string(amin));

  // subtract the right-hand side mean (compatibility on the torus)
  std::vector<double> rhs = f.values;
  double fmean = 0.0;
  for (double v : rhs) fmean += v;
  fmean /= n;
  for (auto& v : rhs) v -= fmean;

  // A u = -( a_{i+1/2} (u_{i+1}-u_i) - a_{i-1/2} (u_i - u_{i-1}) ) / h^2
  std::vector<double> ahalf(n);  // a_{i+1/2}
  for (int i = 0; i < n; ++i) ahalf[i] = 0.5 * (a.values[i] + a.values[(i + 1) % n]);
  auto apply = [&](const std::vector<double>& u, std::vector<double>& out) {
    for (int i = 0; i < n; ++i) {
      double up = u[(i + 1) % n], um = u[(i + n - 1) % n];
      out[i] = -(ahalf[i] * (up - u[i]) - ahalf[(i + n - 1) % n] * (u[i] - um)) / (h * h);
    }
  };
  auto project0 = [&](std::vector<double>& u) {
    double m = 0.0;
    for (double v : u) m += v;
    m /= n;
    for (auto& v : u) v -= m;
  };

  if (max_iter <= 0) max_iter = 20 * n + 200;
  std::vector<double> u(n, 0.0), r = rhs, p = rhs, Ap(n);
  project0(r);
  p = r;
  double rr = 0.0;
  for (double v : r) rr += v * v;
  double b2 = std::sqrt(rr);
  if (b2 == 0.0) return FieldSample(g, u);
  int it = 0;
  for (; it < max_iter; ++it) {
    if (std::sqrt(rr) <= tol * std::max(1.0, b2)) break;
    apply(p, Ap);
    project0(Ap);
    double pAp = 0.0;
    for (int i = 0; i < n; ++i) pAp += p[i] * Ap[i];
    if (pAp <= 0) throw NumericalError("solve_elliptic: CG breakdown (operator not SPD?)");
    double alpha = rr / pAp;
    for (int i = 0; i < n; ++i) {
      u[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
    }
    double rr_new = 0.0;
    for (double v : r) rr_new += v * v;
    double beta = rr_new / rr;
    rr = rr_new;
    for (int i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }
  if (it >= max_iter)
    throw NumericalError("solve_elliptic: CG did not converge in " + std::to_string(max_iter) +
                         " iterations");
  project0(u);
  return FieldSample(g, u);
}

namespace {

// symbol of the periodic second-difference operator: (2 cos(2pi k/m) - 2)/h^2
double laplacian_symbol(int k, int m, double h) {
  return (2.0 * std::cos(kTwoPi * k / m) - 2.0) / (h * h);
}

}  // namespace

std::vector<double> solve_allen_cahn(const std::vector<double>& u0, double dt, int steps,
                                     const std::function<void(const std::vector<double>&)>& on_step) {
  int m = static_cast<int>(u0.size());
  require(m >= 3, "solve_allen_cahn: need at least 3 grid points");
  require(dt > 0 && dt <= 0.5, "solve_allen_cahn: 0 < dt <= 1/2");
  double sup = 0.0;
  for (double v : u0) sup = std::max(sup, std::abs(v));
  require(sup <= 1.0 + 1e-12, "solve_allen_cahn: ||U0||_inf must be <= 1");

  double h = kTwoPi / m;
  std::vector<double> resolvent(m);  // 1 / (1 - dt * symbol_k)
  for (int k = 0; k < m; ++k) resolvent[k] = 1.0 / (1.0 - dt * laplacian_symbol(k, m, h));

  std::vector<double> u = u0;
  std::vector<std::complex<double>> work(m);
  for (int n = 0; n < steps; ++n) {
    for (int i = 0; i < m; ++i) {
      double v = u[i];
      work[i] = std::complex<double>(v + dt * (v - v * v * v), 0.0);
    }
    dft(work, -1);
    for (int k = 0; k < m; ++k) work[k] *= resolvent[k];
    dft(work, +1);
    for (int i = 0; i < m; ++i) u[i] = work[i].real() / m;
    if (on_step) on_step(u);
  }
  return u;
}

std::vector<double> allen_cahn_resolvent_dense(int m, double dt) {
  require(m >= 3, "allen_cahn_resolvent_dense: m >= 3");
  double h = kTwoPi / m;
  // circulant: first column is the inverse DFT of the reciprocal symbol
  std::vector<std::complex<double>> col(m);
  for (int k = 0; k < m; ++k) col[k] = 1.0 / (1.0 - dt * laplacian_symbol(k, m, h));
  dft(col, +1);
  std::vector<double> R(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      R[static_cast<std::size_t>(i) * m + j] = col[(i - j + m) % m].real() / m;
  return R;
}

std::vector<double> solve_conslaw_lxf(const std::vector<double>& u0, const Flux& flux, double T,
                                      double cfl,
                                      const std::function<void(const std::vector<double>&)>& on_step) {
  int m = static_cast<int>(u0.size());
  require(m >= 3, "solve_conslaw_lxf: need at least 3 cells");
  require(T >= 0, "solve_conslaw_lxf: T >= 0");
  require(cfl > 0 && cfl <= 1.0, "solve_conslaw_lxf: cfl in (0,1]");
  for (double v : u0) require(std::isfinite(v), "solve_conslaw_lxf: non-finite data");

  double dx = kTwoPi / m;
  std::vector<double> u = u0, un(m);
  double t = 0.0;
  while (t < T) {
    double smax = 0.0;
    for (double v : u) smax = std::max(smax, std::abs(flux.df(v)));
    double dt = smax > 0 ? cfl * dx / smax : (T - t);
    if (dt <= 0) dt = T - t;
    if (t + dt > T) dt = T - t;
    double lam = dt / dx;
    for (int i = 0; i < m; ++i) {
      double up = u[(i + 1) % m], um = u[(i + m - 1) % m];
      un[i] = 0.5 * (up + um) - 0.5 * lam * (flux.f(up) - flux.f(um));
    }
    u.swap(un);
    t += dt;
    if (on_step) on_step(u);
    if (dt == 0.0) break;
  }
  return u;
}

namespace {

// solve x0 - sin(x0) t = xi on the entropy branch for xi in (-pi, pi]
double burgers_characteristic_root(double xi, double t) {
  if (xi == 0.0) return 0.0;
  bool flip = xi < 0.0;
  double target = flip ? -xi : xi;  // odd symmetry: root(-xi) = -root(xi)
  // g(x0) = x0 - sin(x0) t increases from its minimum to g(pi) = pi
  double lo = (t > 1.0) ? std::acos(1.0 / t) : 0.0;
  double hi = kTwoPi / 2.0;
  auto g = [&](double x0) { return x0 - std::sin(x0) * t; };
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    double gx = g(x) - target;
    if (std::abs(gx) < 1e-14) break;
    if (gx > 0)
      hi = x;
    else
      lo = x;
    double dg = 1.0 - std::cos(x) * t;
    double step = dg != 0.0 ? gx / dg : 0.0;
    double xn = x - step;
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);  // bisection safeguard
    if (std::abs(xn - x) < 1e-15 && std::abs(gx) < 1e-12) {
      x = xn;
      break;
    }
    x = xn;
    if (it == 199 && std::abs(g(x) - target) > 1e-9)
      throw NumericalError("burgers_exact: Newton did not converge at xi = " +
                           std::to_string(flip ? -target : target));
  }
  return flip ? -x : x;
}

}  // namespace

FieldSample burgers_exact_shifted_sine(double xhat, double t, const Grid& output_grid) {
  require(t >= 0 && t <= kTwoPi / 4.0 + 1e-12, "burgers_exact: implemented for t <= pi/2");
  require(output_grid.kind == DomainKind::Torus && output_grid.dim == 1,
          "burgers_exact: 1-d periodic output grid");
  std::vector<double> v(output_grid.size());
  for (std::size_t q = 0; q < v.size(); ++q) {
    double xi = output_grid.point_at(q)[0] - xhat;
    // wrap to (-pi, pi]
    xi = std::fmod(xi, kTwoPi);
    if (xi <= -kTwoPi / 2.0) xi += kTwoPi;
    if (xi > kTwoPi / 2.0) xi -= kTwoPi;
    double x0 = burgers_characteristic_root(xi, t);
    v[q] = -std::sin(x0);
  }
  FieldSample out(output_grid, std::move(v));
  out.latent = std::vector<double>{xhat};
  return out;
}

double integral_functional(const FieldSample& u, const std::vector<bool>& mask) {
  require(mask.size() == u.grid.size(), "integral_functional: mask does not match grid");
  double s = 0.0;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) s += u.grid.weight(i) * u.values[i];
  return s;
}

}  // namespace don
