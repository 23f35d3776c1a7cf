#include "core/gadgets.hpp"

#include <cmath>

#include "core/oracles.hpp"

namespace don {

GadgetNet shrink_net() {
  // 1 - s(2 - s(1 + y))
  Mlp net({1, 1, 1, 1});
  net.layers()[0].w(0, 0) = 1.0;
  net.layers()[0].b[0] = 1.0;
  net.layers()[1].w(0, 0) = -1.0;
  net.layers()[1].b[0] = 2.0;
  net.layers()[2].w(0, 0) = -1.0;
  net.layers()[2].b[0] = 1.0;
  return {GadgetNet::Kind::Shrink, std::move(net), 0.0};
}

GadgetNet indicator_net(double a, double b, double eps) {
  require(a < b, "indicator_net: need a < b");
  require(eps > 0 && eps < b - a, "indicator_net: need 0 < eps < b - a");
  // ramps of width eps inside [a,b]: ( s(x-a) - s(x-(a+eps)) - s(x-(b-eps)) + s(x-b) ) / eps
  Mlp net({1, 4, 1});
  const double knots[4] = {a, a + eps, b - eps, b};
  const double signs[4] = {1.0, -1.0, -1.0, 1.0};
  for (int i = 0; i < 4; ++i) {
    net.layers()[0].w(i, 0) = 1.0;
    net.layers()[0].b[i] = -knots[i];
    net.layers()[1].w(0, i) = signs[i] / eps;
  }
  return {GadgetNet::Kind::Indicator, std::move(net), eps};
}

namespace {

// Yarotsky product net: input (x, y) (or a single eta with x = y = eta),
// output approximately x*y for |x|,|y|,|x+y| <= M; sup error <= 1.5 M^2 4^{-S-1}.
Mlp yarotsky_product(double M, int S, bool single_input) {
  require(S >= 1, "yarotsky_product: S >= 1");
  // layers: A1 (abs parts), A2 (sq block initialization), S-1 sawtooth stages, final combine
  int in = single_input ? 1 : 2;
  std::vector<int> widths;
  widths.push_back(in);
  widths.push_back(6);
  for (int s = 0; s < S; ++s) widths.push_back(9);
  widths.push_back(1);
  Mlp net(widths);

  // A1: pre = [x+y, -(x+y), x, -x, y, -y]
  auto& A1 = net.layers()[0];
  if (single_input) {
    double c[6] = {2.0, -2.0, 1.0, -1.0, 1.0, -1.0};
    for (int i = 0; i < 6; ++i) A1.w(i, 0) = c[i];
  } else {
    double cx[6] = {1.0, -1.0, 1.0, -1.0, 0.0, 0.0};
    double cy[6] = {1.0, -1.0, 0.0, 0.0, 1.0, -1.0};
    for (int i = 0; i < 6; ++i) {
      A1.w(i, 0) = cx[i];
      A1.w(i, 1) = cy[i];
    }
  }

  // A2: for each square block q, u_q = (h_{2q} + h_{2q+1})/M; pre = [u, u - 1/2, u]
  auto& A2 = net.layers()[1];
  for (int q = 0; q < 3; ++q) {
    for (int c = 0; c < 2; ++c) {
      A2.w(3 * q + 0, 2 * q + c) = 1.0 / M;
      A2.w(3 * q + 1, 2 * q + c) = 1.0 / M;
      A2.w(3 * q + 2, 2 * q + c) = 1.0 / M;
    }
    A2.b[3 * q + 1] = -0.5;
  }

  // sawtooth stages: from state [a, b, c] per block, g = 2a - 4b,
  // next pre = [g, g - 1/2, c - g/4^s]
  for (int s = 1; s <= S - 1; ++s) {
    auto& L = net.layers()[1 + s];
    double inv4s = std::pow(0.25, s);
    for (int q = 0; q < 3; ++q) {
      int o = 3 * q;
      L.w(o + 0, o + 0) = 2.0;
      L.w(o + 0, o + 1) = -4.0;
      L.w(o + 1, o + 0) = 2.0;
      L.w(o + 1, o + 1) = -4.0;
      L.b[o + 1] = -0.5;
      L.w(o + 2, o + 0) = -2.0 * inv4s;
      L.w(o + 2, o + 1) = 4.0 * inv4s;
      L.w(o + 2, o + 2) = 1.0;
    }
  }

  // final: sq_q = c_q - (2 a_q - 4 b_q)/4^S; out = (M^2/2) (sq_0 - sq_1 - sq_2)
  auto& F = net.layers()[static_cast<std::size_t>(S) + 1];
  double inv4S = std::pow(0.25, S);
  double m2 = M * M / 2.0;
  double sign[3] = {1.0, -1.0, -1.0};
  for (int q = 0; q < 3; ++q) {
    int o = 3 * q;
    F.w(0, o + 0) = -2.0 * inv4S * m2 * sign[q];
    F.w(0, o + 1) = 4.0 * inv4S * m2 * sign[q];
    F.w(0, o + 2) = m2 * sign[q];
  }
  return net;
}

Mlp clip_net_pm1() {
  // clamp(r, -1, 1) = s(r+1) - s(r-1) - 1
  Mlp net({1, 2, 1});
  net.layers()[0].w(0, 0) = 1.0;
  net.layers()[0].b[0] = 1.0;
  net.layers()[1].w(0, 0) = 1.0;
  net.layers()[0].w(1, 0) = 1.0;
  net.layers()[0].b[1] = -1.0;
  net.layers()[1].w(0, 1) = -1.0;
  net.layers()[1].b[0] = -1.0;
  return net;
}

}  // namespace

GadgetNet cubic_net(double eps) {
  require(eps > 0 && eps < 1, "cubic_net: 0 < eps < 1");
  int S = static_cast<int>(std::ceil(std::log2(1.0 / eps))) + 2;
  const double M = 4.0;

  // q ~= eta^2 alongside a carried copy of eta
  Mlp sq = yarotsky_product(M, S, true);
  Mlp carry = relu_identity(1, sq.layer_count() - 1);
  Mlp dup({1, 2});
  dup.layers()[0].w(0, 0) = 1.0;
  dup.layers()[0].w(1, 0) = 1.0;
  Mlp stage1 = compose(dup, parallel({sq, carry}));  // eta -> [q, eta]

  // [q, eta] -> (x, y) = (eta, 1 - q) for the second product
  Mlp link({2, 2});
  link.layers()[0].w(0, 1) = 1.0;
  link.layers()[0].w(1, 0) = -1.0;
  link.layers()[0].b[1] = 1.0;

  Mlp prod = yarotsky_product(M, S, false);  // (eta, 1-q) -> eta - eta^3 approx
  Mlp net = compose(compose(compose(stage1, link), prod), clip_net_pm1());
  return {GadgetNet::Kind::Cubic, std::move(net), eps};
}

GadgetNet ac_emulator_net(int m, int n_steps, double dt, double eps) {
  require(m >= 3, "ac_emulator_net: m >= 3");
  require(n_steps >= 1, "ac_emulator_net: n_steps >= 1");
  require(dt > 0 && dt <= 0.5, "ac_emulator_net: 0 < dt <= 1/2");
  GadgetNet cubic = cubic_net(eps);

  // per-entry block: entry duplicated, then [g_eps(x); x]
  Mlp carry = relu_identity(1, cubic.net.layer_count() - 1);
  Mlp blk = parallel({cubic.net, carry});
  Mlp dup({1, 2});
  dup.layers()[0].w(0, 0) = 1.0;
  dup.layers()[0].w(1, 0) = 1.0;
  Mlp entry_stage = compose(replicate(dup, m), replicate(blk, m));  // m -> 2m interleaved [g;x]

  // step affine: U' = R (x + dt g), columns interleaved per entry
  std::vector<double> R = allen_cahn_resolvent_dense(m, dt);
  Mlp step_affine({2 * m, m});
  {
    auto& L = step_affine.layers()[0];
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double r = R[static_cast<std::size_t>(i) * m + j];
        L.w(i, 2 * j) = dt * r;
        L.w(i, 2 * j + 1) = r;
      }
  }

  Mlp step = compose(entry_stage, step_affine);
  // inter-step boundary goes through an exact ReLU identity so composing steps
  // never reassociates the resolvent row sums
  Mlp step_with_id = compose(relu_identity(m, 1), step);
  Mlp net = step;
  for (int s = 1; s < n_steps; ++s) net = compose(net, step_with_id);
  return {GadgetNet::Kind::AcEmulator, std::move(net), eps};
}

std::vector<double> ac_emulator_reference(const GadgetNet& cubic, int m, int n_steps, double dt,
                                          const std::vector<double>& u0) {
  require(static_cast<int>(u0.size()) == m, "ac_emulator_reference: bad input length");
  std::vector<double> R = allen_cahn_resolvent_dense(m, dt);
  std::vector<double> u = u0, y(m), un(m);
  for (int s = 0; s < n_steps; ++s) {
    for (int i = 0; i < m; ++i) y[i] = u[i] + dt * cubic.eval1(u[i]);
    for (int i = 0; i < m; ++i) {
      double acc = 0.0;
      const double* row = &R[static_cast<std::size_t>(i) * m];
      for (int j = 0; j < m; ++j) acc += row[j] * y[j];
      un[i] = acc;
    }
    u = un;
  }
  return u;
}

}  // namespace don
