#pragma once

#include "core/mlp.hpp"

namespace don {

// An explicitly constructed ReLU network together with the contract it was
// built to satisfy; `certify` re-checks the contract numerically.
struct GadgetNet {
  enum class Kind { Shrink, Indicator, Cubic, AcEmulator };
  Kind kind;
  Mlp net;
  double tolerance = 0.0;  // guaranteed sup/L1 tolerance where applicable

  double eval1(double x) const { return net.forward({x})[0]; }
};

// shrink(y) = clamp(y, -1, 1) = 1 - s(2 - s(1 + y)), exact.
GadgetNet shrink_net();

// Four-ReLU ramp approximation of the indicator of [a,b]:
// 0 outside [a,b], 1 on [a+eps, b-eps], linear ramps of width eps inside;
// the exact L1 distance to the indicator is eps (two triangles of area eps/2)
// whenever eps <= (b-a)/2. Requires 0 < eps < b-a.
GadgetNet indicator_net(double a, double b, double eps);

// ReLU approximation of f(v) = v - v^3 on [-1,1], sup error <= eps, output
// clipped to [-1,1]; sawtooth product construction, size O(|log eps|).
GadgetNet cubic_net(double eps);

// Emulates n steps of the scheme U <- R_{dt,dx} (U + dt g_eps(U)) on m periodic
// grid points of [0,2pi] with the cubic gadget g_eps in place of f.
GadgetNet ac_emulator_net(int m, int n_steps, double dt, double eps);

// The reference recursion the emulator must reproduce exactly: applies the same
// gadget network entrywise and the dense resolvent matrix.
std::vector<double> ac_emulator_reference(const GadgetNet& cubic, int m, int n_steps, double dt,
                                          const std::vector<double>& u0);

}  // namespace don
