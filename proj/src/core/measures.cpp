#include "core/measures.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "json.hpp"

namespace don {

using nlohmann::json;

int MeasureSpec::effective_truncation() const {
  if (family != Family::GaussianKernel) return modes;
  if (truncation > 0) return truncation;
  // lambda_k / lambda_0 = exp(-(ell k)^2 / 2) < 1e-14
  double target = std::sqrt(2.0 * std::log(1e14));
  return static_cast<int>(std::ceil(target / ell)) + 1;
}

void MeasureSpec::validate() const {
  require(dim == 1 || dim == 2, "MeasureSpec: dim must be 1 or 2");
  switch (family) {
    case Family::GaussianKernel:
      require(ell > 0, "MeasureSpec: ell must be positive");
      break;
    case Family::ParamFourier:
      require(alpha_c >= 0 && alpha_ell > 0, "MeasureSpec: alpha decay must have C>=0, ell>0");
      require(modes >= 0, "MeasureSpec: modes must be >= 0");
      break;
    case Family::ShiftedSine:
      require(dim == 1, "MeasureSpec: ShiftedSine is one-dimensional");
      break;
  }
}

std::string MeasureSpec::to_json() const {
  json j;
  switch (family) {
    case Family::GaussianKernel:
      j["family"] = "gaussianKernel";
      j["ell"] = ell;
      j["K"] = effective_truncation();
      break;
    case Family::ParamFourier:
      j["family"] = "paramFourier";
      j["alphaDecay"] = {{"C", alpha_c}, {"ell", alpha_ell}};
      j["K"] = modes;
      break;
    case Family::ShiftedSine:
      j["family"] = "shiftedSine";
      break;
  }
  j["dim"] = dim;
  if (mean_const != 0.0) j["mean"] = mean_const;
  return j.dump();
}

MeasureSpec MeasureSpec::from_json(const std::string& text) {
  json j = json::parse(text);
  MeasureSpec s;
  std::string fam = j.at("family").get<std::string>();
  if (fam == "gaussianKernel") {
    s.family = Family::GaussianKernel;
    s.ell = j.at("ell").get<double>();
    if (j.contains("K")) s.truncation = j["K"].get<int>();
  } else if (fam == "paramFourier") {
    s.family = Family::ParamFourier;
    if (j.contains("alphaDecay")) {
      s.alpha_c = j["alphaDecay"].value("C", 1.0);
      s.alpha_ell = j["alphaDecay"].value("ell", 1.0);
    }
    if (j.contains("K")) s.modes = j["K"].get<int>();
  } else if (fam == "shiftedSine") {
    s.family = Family::ShiftedSine;
  } else {
    throw InvalidArgument("MeasureSpec: unknown family '" + fam + "'");
  }
  s.dim = j.value("dim", 1);
  s.mean_const = j.value("mean", 0.0);
  s.validate();
  return s;
}

double gaussian_kernel_eigenvalue(double ell, const Wavenumber& k) {
  require(ell > 0, "gaussian_kernel_eigenvalue: ell must be positive");
  double lam = 1.0;
  for (int a = 0; a < k.dim; ++a) {
    double ka = k.k[a];
    lam *= std::sqrt(kTwoPi) * ell * std::exp(-0.5 * ell * ell * ka * ka);
  }
  return lam;
}

std::vector<double> gaussian_kernel_eigenvalues(double ell, int K) {
  auto ks = enumerate_wavenumbers(2 * K + 1, 1);
  std::vector<double> out;
  out.reserve(ks.size());
  for (const auto& k : ks) out.push_back(gaussian_kernel_eigenvalue(ell, k));
  return out;
}

std::vector<KlMode> kl_modes(const MeasureSpec& spec) {
  spec.validate();
  std::vector<KlMode> out;
  if (spec.family == MeasureSpec::Family::ShiftedSine) return out;
  int K = spec.effective_truncation();
  int count = spec.dim == 2 ? (2 * K + 1) * (2 * K + 1) : 2 * K + 1;
  auto ks = enumerate_wavenumbers(count, spec.dim);
  out.reserve(ks.size());
  for (const auto& k : ks) {
    double s = spec.family == MeasureSpec::Family::GaussianKernel
                   ? std::sqrt(gaussian_kernel_eigenvalue(spec.ell, k))
                   : spec.alpha_c * std::exp(-spec.alpha_ell * k.inf_norm());
    out.push_back({k, s});
  }
  return out;
}

std::vector<double> sample_latent(const MeasureSpec& spec, Rng& rng) {
  spec.validate();
  if (spec.family == MeasureSpec::Family::ShiftedSine) return {rng.uniform(0.0, kTwoPi)};
  auto modes = kl_modes(spec);
  std::vector<double> z(modes.size());
  for (auto& v : z)
    v = spec.family == MeasureSpec::Family::GaussianKernel ? rng.normal() : rng.uniform(-1.0, 1.0);
  return z;
}

std::vector<double> eval_measure_at(const MeasureSpec& spec, const std::vector<double>& latent,
                                    const std::vector<std::array<double, 2>>& points) {
  spec.validate();
  std::vector<double> out(points.size(), 0.0);
  if (spec.family == MeasureSpec::Family::ShiftedSine) {
    require(latent.size() == 1, "eval_measure_at: ShiftedSine latent is the shift");
    for (std::size_t i = 0; i < points.size(); ++i) out[i] = -std::sin(points[i][0] - latent[0]);
    return out;
  }
  auto modes = kl_modes(spec);
  require(latent.size() == modes.size(), "eval_measure_at: latent size mismatch");
  for (std::size_t i = 0; i < points.size(); ++i) {
    double s = spec.mean_const;
    for (std::size_t m = 0; m < modes.size(); ++m)
      s += modes[m].scale * latent[m] * fourier_basis(modes[m].k, points[i]);
    out[i] = s;
  }
  return out;
}

FieldSample field_from_latent(const MeasureSpec& spec, const std::vector<double>& latent,
                              const Grid& grid) {
  require(grid.dim == spec.dim, "field_from_latent: grid dimension does not match measure");
  std::vector<std::array<double, 2>> pts(grid.size());
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = grid.point_at(i);
  FieldSample f(grid, eval_measure_at(spec, latent, pts));
  f.latent = latent;
  return f;
}

FieldSample sample(const MeasureSpec& spec, const Grid& grid, Rng& rng) {
  auto latent = sample_latent(spec, rng);
  return field_from_latent(spec, latent, grid);
}

double SpectrumEstimate::tail_sum(int p) const {
  double head = 0.0;
  for (int i = 0; i < p && i < static_cast<int>(eigenvalues.size()); ++i) head += eigenvalues[i];
  return std::max(0.0, trace - head);
}

SpectrumEstimate empirical_spectrum(const std::vector<FieldSample>& samples, int p) {
  require(samples.size() >= 2, "empirical_spectrum: need at least 2 samples");
  const Grid& g = samples[0].grid;
  for (const auto& s : samples)
    require(s.grid.same_shape(g), "empirical_spectrum: samples on different grids");
  std::size_t n = g.size();
  std::size_t N = samples.size();
  require(p >= 1 && static_cast<std::size_t>(p) <= std::min(N, n),
          "empirical_spectrum: p must satisfy 1 <= p <= min(sampleCount, gridSize)");

  // quadrature weights; torus grids are uniform, intervals are trapezoidal
  Eigen::VectorXd w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = g.weight(i);

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  for (const auto& s : samples)
    mean += Eigen::Map<const Eigen::VectorXd>(s.values.data(), static_cast<Eigen::Index>(n));
  mean /= static_cast<double>(N);

  Eigen::MatrixXd S(N, n);  // centered snapshots, one per row
  for (std::size_t i = 0; i < N; ++i)
    S.row(i) =
        Eigen::Map<const Eigen::VectorXd>(samples[i].values.data(), static_cast<Eigen::Index>(n))
            .transpose() -
        mean.transpose();

  SpectrumEstimate out;
  out.sample_count = static_cast<int>(N);
  out.mean_field = FieldSample(g, std::vector<double>(mean.data(), mean.data() + n));

  // trace = (1/N) sum_i <s_i, s_i>
  double trace = 0.0;
  for (std::size_t i = 0; i < N; ++i) trace += S.row(i).cwiseAbs2().dot(w.transpose());
  trace /= static_cast<double>(N);
  out.trace = trace;

  Eigen::MatrixXd V;          // eigenvectors as columns (grid functions)
  Eigen::VectorXd lam;        // matching eigenvalues, descending
  Eigen::MatrixXd Sw = S.array().rowwise() * w.transpose().array().sqrt();  // weighted snapshots

  if (N <= n) {
    // Gram route: G = (1/N) Sw Sw^T has the nonzero covariance eigenvalues
    Eigen::MatrixXd G = (Sw * Sw.transpose()) / static_cast<double>(N);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    require(es.info() == Eigen::Success, "empirical_spectrum: eigensolver failed");
    // ascending order from Eigen; take the top p
    lam.resize(p);
    V.resize(n, p);
    for (int j = 0; j < p; ++j) {
      Eigen::Index src = static_cast<Eigen::Index>(N) - 1 - j;
      double theta = es.eigenvalues()[src];
      lam[j] = std::max(theta, 0.0);
      Eigen::VectorXd y = es.eigenvectors().col(src);
      Eigen::VectorXd v = S.transpose() * y;  // unweighted snapshot combination
      double nrm = std::sqrt(std::max(1e-300, (v.cwiseAbs2().dot(w))));
      V.col(j) = v / nrm;
    }
  } else {
    // covariance route: M = (1/N) S^T diag(w)^(1/2)... build the weighted operator directly
    Eigen::MatrixXd M = (S.transpose() * S) / static_cast<double>(N);  // n x n, unweighted outer
    // eigenproblem of the integral operator: M diag(w) v = lambda v; symmetrize with sqrt(w)
    Eigen::VectorXd sw = w.array().sqrt();
    Eigen::MatrixXd Msym = sw.asDiagonal() * M * sw.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Msym);
    require(es.info() == Eigen::Success, "empirical_spectrum: eigensolver failed");
    lam.resize(p);
    V.resize(n, p);
    for (int j = 0; j < p; ++j) {
      Eigen::Index src = static_cast<Eigen::Index>(n) - 1 - j;
      lam[j] = std::max(es.eigenvalues()[src], 0.0);
      Eigen::VectorXd v = es.eigenvectors().col(src).array() / sw.array();
      double nrm = std::sqrt(std::max(1e-300, (v.cwiseAbs2().dot(w))));
      V.col(j) = v / nrm;
    }
  }

  // Re-orthonormalize under the quadrature inner product; degenerate (near-null)
  // directions are replaced by orthogonalized canonical vectors so the returned
  // family is always orthonormal.
  for (int j = 0; j < p; ++j) {
    for (int r = 0; r < 2; ++r) {
      for (int i = 0; i < j; ++i) {
        double c = (V.col(j).cwiseProduct(V.col(i))).dot(w);
        V.col(j) -= c * V.col(i);
      }
    }
    double nrm = std::sqrt(std::max(0.0, V.col(j).cwiseAbs2().dot(w)));
    if (nrm < 1e-10) {
      for (std::size_t cand = 0; cand < n; ++cand) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
        e[static_cast<Eigen::Index>(cand)] = 1.0;
        for (int i = 0; i < j; ++i) {
          double c = (e.cwiseProduct(V.col(i))).dot(w);
          e -= c * V.col(i);
        }
        double en = std::sqrt(std::max(0.0, e.cwiseAbs2().dot(w)));
        if (en > 1e-8) {
          V.col(j) = e / en;
          break;
        }
      }
    } else {
      V.col(j) /= nrm;
    }
  }

  out.eigenvalues.assign(lam.data(), lam.data() + p);
  out.eigenvectors.resize(p);
  for (int j = 0; j < p; ++j)
    out.eigenvectors[j].assign(V.col(j).data(), V.col(j).data() + n);
  return out;
}

}  // namespace don
