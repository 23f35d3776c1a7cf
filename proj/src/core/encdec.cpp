#include "core/encdec.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "core/common.hpp"

namespace don {

FieldFn as_field_fn(const FieldSample& f) {
  if (f.grid.kind == DomainKind::Torus && f.grid.dim == 1) {
    auto interp = std::make_shared<TrigInterp1d>(f.values);
    return [interp](const std::array<double, 2>& x) { return (*interp)(x[0]); };
  }
  if (f.grid.kind == DomainKind::Torus && f.grid.dim == 2) {
    auto interp = std::make_shared<TrigInterp2d>(f.values, f.grid.n);
    return [interp](const std::array<double, 2>& x) { return (*interp)(x[0], x[1]); };
  }
  auto copy = std::make_shared<FieldSample>(f);
  return [copy](const std::array<double, 2>& x) { return eval_field(*copy, x); };
}

SensorSet SensorSet::equispaced(int m, int dim) {
  require(m >= 1 && (dim == 1 || dim == 2), "SensorSet::equispaced: bad shape");
  SensorSet s;
  s.kind = Kind::Equispaced;
  s.dim = dim;
  if (dim == 1) {
    s.locations.resize(m);
    for (int j = 0; j < m; ++j) s.locations[j] = {kTwoPi * j / m, 0.0};
  } else {
    s.locations.resize(static_cast<std::size_t>(m) * m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        s.locations[static_cast<std::size_t>(i) * m + j] = {kTwoPi * i / m, kTwoPi * j / m};
  }
  return s;
}

SensorSet SensorSet::random(int m, int dim, Rng& rng) {
  require(m >= 1 && (dim == 1 || dim == 2), "SensorSet::random: bad shape");
  SensorSet s;
  s.kind = Kind::Random;
  s.dim = dim;
  s.locations.resize(m);
  for (int j = 0; j < m; ++j) {
    s.locations[j] = {rng.uniform(0.0, kTwoPi), dim == 2 ? rng.uniform(0.0, kTwoPi) : 0.0};
  }
  return s;
}

SensorSet SensorSet::cell_centers(int m) {
  require(m >= 1, "SensorSet::cell_centers: need at least one cell");
  SensorSet s;
  s.kind = Kind::CellCenters;
  s.dim = 1;
  s.dx = kTwoPi / m;
  s.locations.resize(m);
  for (int j = 0; j < m; ++j) s.locations[j] = {(j + 0.5) * s.dx, 0.0};
  return s;
}

std::vector<double> encode_pointwise(const FieldFn& u, const SensorSet& sensors) {
  std::vector<double> out(sensors.locations.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = u(sensors.locations[j]);
  return out;
}

std::vector<double> encode_pointwise(const FieldSample& u, const SensorSet& sensors) {
  return encode_pointwise(as_field_fn(u), sensors);
}

std::vector<double> encode_cell_average(const FieldFn& u, const SensorSet& cells, int subpoints) {
  require(cells.kind == SensorSet::Kind::CellCenters, "encode_cell_average: needs cellCenters");
  require(subpoints >= 8, "encode_cell_average: need >= 8 subpoints per cell");
  std::vector<double> out(cells.locations.size());
  double dx = cells.dx;
  for (std::size_t j = 0; j < out.size(); ++j) {
    double c = cells.locations[j][0];
    double h = dx / subpoints;
    double acc = 0.0;
    for (int q = 0; q < subpoints; ++q) {
      double x = c - 0.5 * dx + (q + 0.5) * h;
      if (x < 0) x += kTwoPi;
      if (x >= kTwoPi) x -= kTwoPi;
      acc += u({x, 0.0});
    }
    out[j] = acc / subpoints;
  }
  return out;
}

TrigInterp1d decode_dft(const std::vector<double>& encoded) {
  require(encoded.size() % 2 == 1, "decode_dft: sensor count must be odd (m = 2K+1)");
  return TrigInterp1d(encoded);
}

GaussianKernelBasis::GaussianKernelBasis(double ell, int K, int dim) {
  require(ell > 0 && K >= 0, "GaussianKernelBasis: ell > 0, K >= 0");
  int count = dim == 2 ? (2 * K + 1) * (2 * K + 1) : 2 * K + 1;
  modes_ = enumerate_wavenumbers(count, dim);
  lambda_.reserve(modes_.size());
  for (const auto& k : modes_) lambda_.push_back(gaussian_kernel_eigenvalue(ell, k));
  // the enumeration is nonincreasing in lambda within this kernel family
}

PseudoinverseDecoder PseudoinverseDecoder::make(const EigenBasis& basis, int m_eig,
                                                const SensorSet& sensors,
                                                double sigma_min_threshold) {
  int M = sensors.count();
  require(m_eig >= 1 && m_eig <= basis.count(), "PseudoinverseDecoder: bad m_eig");
  require(M >= m_eig, "PseudoinverseDecoder: need at least m_eig sensors");
  Eigen::MatrixXd phi(m_eig, M);
  for (int i = 0; i < m_eig; ++i)
    for (int j = 0; j < M; ++j) phi(i, j) = basis.eval(i, sensors.locations[j]);

  Eigen::MatrixXd gram = phi * phi.transpose();
  double domain = sensors.dim == 2 ? kTwoPi * kTwoPi : kTwoPi;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es((domain / M) * gram);
  require(es.info() == Eigen::Success, "PseudoinverseDecoder: eigensolver failed");
  double smin = es.eigenvalues().minCoeff();
  if (smin < sigma_min_threshold) {
    throw NumericalError("PseudoinverseDecoder: sigma_min((|D|/M) Phi Phi^T) = " +
                         std::to_string(smin) + " below threshold " +
                         std::to_string(sigma_min_threshold));
  }

  Eigen::MatrixXd pinv = gram.ldlt().solve(phi);  // (Phi Phi^T)^{-1} Phi, m x M

  PseudoinverseDecoder d;
  d.m_ = m_eig;
  d.M_ = M;
  d.sigma_min_ = smin;
  d.pinv_.resize(static_cast<std::size_t>(m_eig) * M);
  for (int i = 0; i < m_eig; ++i)
    for (int j = 0; j < M; ++j) d.pinv_[static_cast<std::size_t>(i) * M + j] = pinv(i, j);
  return d;
}

std::vector<double> PseudoinverseDecoder::apply_pinv(const std::vector<double>& v) const {
  require(static_cast<int>(v.size()) == M_, "PseudoinverseDecoder: sensor value length mismatch");
  std::vector<double> c(m_, 0.0);
  for (int i = 0; i < m_; ++i) {
    const double* row = &pinv_[static_cast<std::size_t>(i) * M_];
    double s = 0.0;
    for (int j = 0; j < M_; ++j) s += row[j] * v[j];
    c[i] = s;
  }
  return c;
}

std::vector<double> PseudoinverseDecoder::coefficients(const std::vector<double>& v) const {
  return apply_pinv(v);
}

double aliasing_error(const EigenBasis& basis, const PseudoinverseDecoder& dec,
                      const SensorSet& sensors, double tail_rtol) {
  int m = dec.mode_count();
  double lam1 = basis.eigenvalue(0);
  double acc = 0.0;
  for (int l = m; l < basis.count(); ++l) {
    double lam = basis.eigenvalue(l);
    if (lam1 > 0 && lam / lam1 < tail_rtol) break;
    std::vector<double> phi_at(sensors.count());
    for (int j = 0; j < sensors.count(); ++j) phi_at[j] = basis.eval(l, sensors.locations[j]);
    auto c = dec.apply_pinv(phi_at);
    double sq = 0.0;
    for (double v : c) sq += v * v;
    acc += lam * sq;
  }
  return std::sqrt(acc);
}

EncDecPair dft_pair(int m) {
  require(m % 2 == 1, "dft_pair: m must be odd");
  EncDecPair p;
  p.sensors = SensorSet::equispaced(m, 1);
  p.decode_on = [](const std::vector<double>& enc, const Grid& ref) {
    TrigInterp1d interp = decode_dft(enc);
    return interp.on_grid(ref);
  };
  return p;
}

EncDecPair pseudoinverse_pair(const std::shared_ptr<const EigenBasis>& basis, int m_eig,
                              const SensorSet& sensors) {
  auto dec = std::make_shared<PseudoinverseDecoder>(
      PseudoinverseDecoder::make(*basis, m_eig, sensors));
  EncDecPair p;
  p.sensors = sensors;
  p.decode_on = [basis, dec, m_eig](const std::vector<double>& enc, const Grid& ref) {
    auto c = dec->apply_pinv(enc);
    std::vector<double> out(ref.size(), 0.0);
    for (int i = 0; i < m_eig; ++i) {
      if (c[i] == 0.0) continue;
      for (std::size_t q = 0; q < out.size(); ++q)
        out[q] += c[i] * basis->eval(i, ref.point_at(q));
    }
    return out;
  };
  return p;
}

namespace {

std::vector<double> encdec_sq_errors(const MeasureSpec& spec, const EncDecPair& pair, int Nmc,
                                     std::uint64_t seed, const Grid& ref_grid) {
  require(Nmc >= 2, "encoding_error_mc: need Nmc >= 2");
  std::vector<double> sq(Nmc);
  for (int i = 0; i < Nmc; ++i) {
    Rng rng(seed, static_cast<std::uint64_t>(i));
    auto latent = sample_latent(spec, rng);
    FieldSample u = field_from_latent(spec, latent, ref_grid);
    std::vector<double> enc;
    if (pair.cell_average)
      enc = encode_cell_average(as_field_fn(u), pair.sensors);
    else {
      // evaluate the measure analytically at the sensors (exact, no grid interpolation)
      enc = eval_measure_at(spec, latent, pair.sensors.locations);
    }
    auto rec = pair.decode_on(enc, ref_grid);
    double s = 0.0;
    for (std::size_t q = 0; q < rec.size(); ++q) {
      double d = rec[q] - u.values[q];
      s += ref_grid.weight(q) * d * d;
    }
    sq[i] = s;
  }
  return sq;
}

}  // namespace

McEstimate encoding_error_mc(const MeasureSpec& spec, const EncDecPair& pair, int Nmc,
                             std::uint64_t seed, const Grid& ref_grid) {
  return jackknife_rms(encdec_sq_errors(spec, pair, Nmc, seed, ref_grid));
}

McEstimate encoding_error_sq_mc(const MeasureSpec& spec, const EncDecPair& pair, int Nmc,
                                std::uint64_t seed, const Grid& ref_grid) {
  return jackknife_mean(encdec_sq_errors(spec, pair, Nmc, seed, ref_grid));
}

double shrink(double y) {
  if (y > 1.0) return 1.0;
  if (y < -1.0) return -1.0;
  return y;
}

ShrinkDecodeResult decode_shrink(const std::vector<double>& encoded, const MeasureSpec& spec,
                                 const Grid& output_grid) {
  require(spec.family == MeasureSpec::Family::ParamFourier,
          "decode_shrink: spec must be ParamFourier");
  require(spec.dim == 1, "decode_shrink: implemented for d = 1");
  int m = static_cast<int>(encoded.size());
  require(m % 2 == 1 && m >= 1, "decode_shrink: grid size must be 2N+1");
  int N = (m - 1) / 2;

  // subtract the mean, then take grid-quadrature inner products with e_k
  std::vector<double> centered(encoded);
  for (auto& v : centered) v -= spec.mean_const;

  Grid enc_grid = Grid::torus(m, 1);
  auto modes = kl_modes(spec);
  std::vector<double> y_hat(modes.size(), 0.0);
  double scale_ref = 0.0;
  for (double v : centered) scale_ref = std::max(scale_ref, std::abs(v));

  for (std::size_t q = 0; q < modes.size(); ++q) {
    if (modes[q].k.inf_norm() > N) continue;  // outside K_N: coefficient stays 0
    double uhat = 0.0;
    for (int j = 0; j < m; ++j)
      uhat += enc_grid.weight(j) * centered[j] * fourier_basis(modes[q].k, enc_grid.point_at(j));
    double alpha = modes[q].scale;
    if (alpha == 0.0) {
      if (std::abs(uhat) > 1e-13 * std::max(1.0, scale_ref))
        throw NumericalError("decode_shrink: alpha_k = 0 for retained mode with nonzero "
                             "coefficient (division undefined)");
      y_hat[q] = 0.0;
      continue;
    }
    y_hat[q] = shrink(uhat / alpha);
  }

  ShrinkDecodeResult r;
  r.y_hat = y_hat;
  r.decoded = field_from_latent(spec, y_hat, output_grid);
  return r;
}

}  // namespace don
