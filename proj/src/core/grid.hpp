#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "core/common.hpp"

namespace don {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Equispaced grids on the domains the library works with:
//   Torus    — [0,2pi]^d periodic, points x_j = 2pi j / n (no duplicated endpoint)
//   Interval — [0,T], n points including both endpoints
//   Point    — a single abstract output point (scalar-valued operators)
enum class DomainKind { Torus, Interval, Point };

struct Grid {
  DomainKind kind = DomainKind::Torus;
  int dim = 1;        // 1 or 2 (Torus); Interval/Point are 1-d
  int n = 1;          // points per axis
  double extent = kTwoPi;  // 2pi for Torus, T for Interval

  static Grid torus(int n_per_axis, int dim = 1) {
    require(n_per_axis >= 1 && (dim == 1 || dim == 2), "Grid::torus: bad shape");
    return Grid{DomainKind::Torus, dim, n_per_axis, kTwoPi};
  }
  static Grid interval(int n_points, double T) {
    require(n_points >= 2 && T > 0, "Grid::interval: bad shape");
    return Grid{DomainKind::Interval, 1, n_points, T};
  }
  static Grid point() { return Grid{DomainKind::Point, 1, 1, 1.0}; }

  std::size_t size() const {
    if (kind == DomainKind::Point) return 1;
    std::size_t s = static_cast<std::size_t>(n);
    return dim == 2 ? s * s : s;
  }

  double spacing() const {
    if (kind == DomainKind::Torus) return extent / n;
    if (kind == DomainKind::Interval) return extent / (n - 1);
    return 1.0;
  }

  // coordinate of point i along an axis
  double coord(int i) const {
    if (kind == DomainKind::Torus) return extent * i / n;
    if (kind == DomainKind::Interval) return extent * i / (n - 1);
    return 0.0;
  }

  std::array<double, 2> point_at(std::size_t flat) const {
    if (dim == 1) return {coord(static_cast<int>(flat)), 0.0};
    int j = static_cast<int>(flat % static_cast<std::size_t>(n));
    int i = static_cast<int>(flat / static_cast<std::size_t>(n));
    return {coord(i), coord(j)};
  }

  // trapezoidal quadrature weight of point i (flat index)
  double weight(std::size_t flat) const {
    switch (kind) {
      case DomainKind::Torus: {
        double w = extent / n;
        return dim == 2 ? w * w : w;
      }
      case DomainKind::Interval: {
        double h = spacing();
        int i = static_cast<int>(flat);
        return (i == 0 || i == n - 1) ? 0.5 * h : h;
      }
      case DomainKind::Point:
        return 1.0;
    }
    return 0.0;
  }

  bool same_shape(const Grid& o) const {
    return kind == o.kind && dim == o.dim && n == o.n && std::abs(extent - o.extent) < 1e-12;
  }
};

// A function sampled on a grid. `latent` optionally keeps the coefficients the
// sample was generated from (KL Z's, parametrized Y's, or the sine shift).
struct FieldSample {
  Grid grid;
  std::vector<double> values;
  std::optional<std::vector<double>> latent;

  FieldSample() = default;
  FieldSample(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
    require(values.size() == grid.size(), "FieldSample: values length != grid size");
  }
};

// <f,g> under the grid's trapezoidal rule
inline double inner(const Grid& g, const std::vector<double>& a, const std::vector<double>& b) {
  require(a.size() == g.size() && b.size() == g.size(), "inner: size mismatch");
  if (g.kind == DomainKind::Torus) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    double w = g.extent / g.n;
    return s * (g.dim == 2 ? w * w : w);
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += g.weight(i) * a[i] * b[i];
  return s;
}

inline double norm_l2(const Grid& g, const std::vector<double>& a) {
  return std::sqrt(std::max(0.0, inner(g, a, a)));
}

inline double norm_l1(const Grid& g, const std::vector<double>& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += g.weight(i) * std::abs(a[i]);
  return s;
}

inline double integrate(const Grid& g, const std::vector<double>& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += g.weight(i) * a[i];
  return s;
}

// Evaluates a grid-based FieldSample off-grid. Periodic grids use trigonometric
// interpolation (the library's only interpolation rule for torus data);
// interval grids use piecewise-linear interpolation on the sample's own grid.
double eval_field(const FieldSample& f, const std::array<double, 2>& x);

}  // namespace don
