#pragma once

#include <functional>
#include <vector>

#include "core/grid.hpp"

namespace don {

// ---- forced gravity pendulum -----------------------------------------------
// dv1/dt = v2, dv2/dt = -gamma sin(v1) + u(t), v(0) = 0. Classical RK4, fixed step.
struct PendulumTrajectory {
  Grid time;                 // [0,T], steps+1 points
  std::vector<double> v1;    // angle
  std::vector<double> v2;    // angular velocity
};

PendulumTrajectory solve_pendulum(const std::function<double(double)>& forcing, double gamma,
                                  double T, int steps);

// ---- variable-coefficient elliptic problem ---------------------------------
// -(a u')' = f on the periodic grid, <u> = 0; second-order centered differences,
// conjugate gradient on the mean-zero subspace to residual <= tol.
FieldSample solve_elliptic(const FieldSample& a, const FieldSample& f, double tol = 1e-10,
                           int max_iter = 0);

// ---- Allen-Cahn IMEX scheme -------------------------------------------------
// U^{k+1} = (I - dt D)^{-1} (U^k + dt f(U^k)), f(v) = v - v^3, periodic grid on
// [0,2pi]; the linear solve diagonalizes the discrete Laplacian by DFT.
// Preconditions: ||U0||_inf <= 1 and dt <= 1/2.
std::vector<double> solve_allen_cahn(const std::vector<double>& u0, double dt, int steps,
                                     const std::function<void(const std::vector<double>&)>&
                                         on_step = nullptr);

// dense (I - dt D)^{-1} for the same discretization (circulant inverse)
std::vector<double> allen_cahn_resolvent_dense(int m, double dt);  // m x m row-major

// ---- Lax-Friedrichs finite-volume solver ------------------------------------
struct Flux {
  std::function<double(double)> f;
  std::function<double(double)> df;
  static Flux burgers() {
    return {[](double v) { return 0.5 * v * v; }, [](double v) { return v; }};
  }
};

// Cell averages on the periodic domain [0,2pi]; dt chosen per step so that
// max|f'(u)| dt/dx <= cfl, final partial step lands exactly on T.
std::vector<double> solve_conslaw_lxf(const std::vector<double>& u0, const Flux& flux, double T,
                                      double cfl,
                                      const std::function<void(const std::vector<double>&)>&
                                          on_step = nullptr);

// ---- Burgers exact solution for shifted-sine data ---------------------------
// u0(x) = -sin(x - xhat); characteristics x0 - sin(x0) t = x - xhat solved by
// safeguarded Newton on the entropy branch; stationary shock at x = xhat for t >= 1.
FieldSample burgers_exact_shifted_sine(double xhat, double t, const Grid& output_grid);

// ---- masked linear functional ------------------------------------------------
// G(u) = sum over masked grid points of w_i u_i (trapezoidal quadrature over the region)
double integral_functional(const FieldSample& u, const std::vector<bool>& mask);

}  // namespace don
