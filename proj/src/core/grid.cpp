#include "core/grid.hpp"

#include "core/fourier.hpp"

namespace don {

double eval_field(const FieldSample& f, const std::array<double, 2>& x) {
  const Grid& g = f.grid;
  if (g.kind == DomainKind::Point) return f.values[0];
  if (g.kind == DomainKind::Interval) {
    double t = std::min(std::max(x[0], 0.0), g.extent);
    double h = g.spacing();
    int i = std::min(static_cast<int>(t / h), g.n - 2);
    double s = (t - i * h) / h;
    return (1.0 - s) * f.values[i] + s * f.values[i + 1];
  }
  if (g.dim == 1) {
    TrigInterp1d p(f.values);
    return p(x[0]);
  }
  TrigInterp2d p(f.values, g.n);
  return p(x[0], x[1]);
}

}  // namespace don
