#include "core/reconstruction.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

namespace don {

namespace {

Eigen::VectorXd quad_weights(const Grid& g) {
  Eigen::VectorXd w(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) w[static_cast<Eigen::Index>(i)] = g.weight(i);
  return w;
}

Eigen::MatrixXd members_matrix(const std::vector<std::vector<double>>& rows, std::size_t n) {
  Eigen::MatrixXd M(rows.size(), n);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i].size() == n, "trunk member has wrong grid length");
    M.row(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::VectorXd>(rows[i].data(), static_cast<Eigen::Index>(n));
  }
  return M;
}

}  // namespace

std::vector<double> reconstruct(const std::vector<double>& alpha, const TrunkBasis& basis) {
  require(static_cast<int>(alpha.size()) == basis.p(),
          "reconstruct: coefficient count != trunk member count");
  std::size_t n = basis.ygrid.size();
  std::vector<double> out = basis.bias.empty() ? std::vector<double>(n, 0.0) : basis.bias;
  require(out.size() == n, "reconstruct: bias has wrong grid length");
  for (int k = 0; k < basis.p(); ++k) {
    const auto& tk = basis.members[k];
    for (std::size_t q = 0; q < n; ++q) out[q] += alpha[k] * tk[q];
  }
  return out;
}

ProjectionOperator dual_basis(const TrunkBasis& basis, double cond_limit) {
  int p = basis.p();
  require(p >= 1, "dual_basis: empty trunk");
  std::size_t n = basis.ygrid.size();
  Eigen::VectorXd w = quad_weights(basis.ygrid);
  Eigen::MatrixXd T = members_matrix(basis.members, n);

  Eigen::MatrixXd G = T * w.asDiagonal() * T.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  require(es.info() == Eigen::Success, "dual_basis: Gram eigensolver failed");
  double emin = es.eigenvalues().minCoeff();
  double emax = es.eigenvalues().maxCoeff();
  double cond = emin > 0 ? emax / emin : std::numeric_limits<double>::infinity();
  if (!(cond < cond_limit)) {
    throw NumericalError("dual_basis: Gram matrix ill-conditioned, cond = " +
                         std::to_string(cond));
  }

  Eigen::MatrixXd duals = G.ldlt().solve(T);  // rows are tau*_k
  ProjectionOperator proj;
  proj.ygrid = basis.ygrid;
  proj.bias = basis.bias.empty() ? std::vector<double>(n, 0.0) : basis.bias;
  proj.duals.assign(p, std::vector<double>(n));
  for (int k = 0; k < p; ++k)
    for (std::size_t q = 0; q < n; ++q) proj.duals[k][q] = duals(k, static_cast<Eigen::Index>(q));
  return proj;
}

ProjectionOperator dual_basis_pinv(const TrunkBasis& basis, double rel_threshold) {
  int p = basis.p();
  require(p >= 1, "dual_basis_pinv: empty trunk");
  std::size_t n = basis.ygrid.size();
  Eigen::VectorXd w = quad_weights(basis.ygrid);
  Eigen::MatrixXd T = members_matrix(basis.members, n);
  Eigen::MatrixXd G = T * w.asDiagonal() * T.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  require(es.info() == Eigen::Success, "dual_basis_pinv: Gram eigensolver failed");
  double emax = std::max(0.0, es.eigenvalues().maxCoeff());
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(p);
  for (int i = 0; i < p; ++i) {
    double e = es.eigenvalues()[i];
    if (e > rel_threshold * emax) inv[i] = 1.0 / e;
  }
  Eigen::MatrixXd Gpinv =
      es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
  Eigen::MatrixXd duals = Gpinv * T;
  ProjectionOperator proj;
  proj.ygrid = basis.ygrid;
  proj.bias = basis.bias.empty() ? std::vector<double>(n, 0.0) : basis.bias;
  proj.duals.assign(p, std::vector<double>(n));
  for (int k = 0; k < p; ++k)
    for (std::size_t q = 0; q < n; ++q) proj.duals[k][q] = duals(k, static_cast<Eigen::Index>(q));
  return proj;
}

std::vector<double> project(const std::vector<double>& u, const ProjectionOperator& proj) {
  std::size_t n = proj.ygrid.size();
  require(u.size() == n, "project: function has wrong grid length");
  std::vector<double> alpha(proj.p());
  for (int k = 0; k < proj.p(); ++k) {
    double s = 0.0;
    const auto& d = proj.duals[k];
    for (std::size_t q = 0; q < n; ++q) s += proj.ygrid.weight(q) * (u[q] - proj.bias[q]) * d[q];
    alpha[k] = s;
  }
  return alpha;
}

std::pair<TrunkBasis, ProjectionOperator> pca_reconstruction(const SpectrumEstimate& spectrum,
                                                             int p) {
  require(p >= 1 && p <= static_cast<int>(spectrum.eigenvalues.size()),
          "pca_reconstruction: p exceeds computed spectrum");
  // rank check: a zero eigenvalue within the first p means p exceeds sample rank
  double lam1 = spectrum.eigenvalues.empty() ? 0.0 : spectrum.eigenvalues[0];
  for (int k = 0; k < p; ++k) {
    if (!(spectrum.eigenvalues[k] > 1e-14 * std::max(1.0, lam1)))
      throw NumericalError("pca_reconstruction: p exceeds available sample rank at k = " +
                           std::to_string(k + 1));
  }
  TrunkBasis basis;
  basis.source = TrunkBasis::Source::Pca;
  basis.ygrid = spectrum.mean_field.grid;
  basis.bias = spectrum.mean_field.values;
  basis.members.assign(spectrum.eigenvectors.begin(), spectrum.eigenvectors.begin() + p);

  // eigenvectors are orthonormal: duals coincide with members
  ProjectionOperator proj;
  proj.ygrid = basis.ygrid;
  proj.bias = basis.bias;
  proj.duals = basis.members;
  return {basis, proj};
}

std::pair<TrunkBasis, ProjectionOperator> pca_reconstruction(
    const std::vector<FieldSample>& samples, int p) {
  require(samples.size() >= 2, "pca_reconstruction: need at least 2 samples");
  SpectrumEstimate spec = empirical_spectrum(samples, p);
  return pca_reconstruction(spec, p);
}

TrunkBasis analytic_trunk(TrunkBasis::Source kind, int p, const Grid& ygrid) {
  require(p >= 1, "analytic_trunk: p >= 1");
  TrunkBasis basis;
  basis.source = kind;
  basis.ygrid = ygrid;
  basis.bias.assign(ygrid.size(), 0.0);
  basis.members.resize(p);
  if (kind == TrunkBasis::Source::Fourier) {
    require(ygrid.kind == DomainKind::Torus, "analytic_trunk: Fourier trunk needs a torus grid");
    auto ks = enumerate_wavenumbers(p, ygrid.dim);
    for (int k = 0; k < p; ++k) {
      basis.members[k].resize(ygrid.size());
      for (std::size_t q = 0; q < ygrid.size(); ++q)
        basis.members[k][q] = fourier_basis(ks[k], ygrid.point_at(q));
    }
    return basis;
  }
  if (kind == TrunkBasis::Source::Legendre) {
    require(ygrid.kind == DomainKind::Interval, "analytic_trunk: Legendre trunk needs [0,T]");
    require(static_cast<std::size_t>(p) <= ygrid.size(), "analytic_trunk: p exceeds grid size");
    double T = ygrid.extent;
    for (int k = 0; k < p; ++k) basis.members[k].resize(ygrid.size());
    std::vector<double> P(p);
    for (std::size_t q = 0; q < ygrid.size(); ++q) {
      double s = 2.0 * ygrid.point_at(q)[0] / T - 1.0;  // map to [-1,1]
      // (k+1) P_{k+1} = (2k+1) s P_k - k P_{k-1}
      for (int k = 0; k < p; ++k) {
        if (k == 0)
          P[k] = 1.0;
        else if (k == 1)
          P[k] = s;
        else
          P[k] = ((2.0 * k - 1.0) * s * P[k - 1] - (k - 1.0) * P[k - 2]) / k;
        basis.members[k][q] = std::sqrt((2.0 * k + 1.0) / T) * P[k];
      }
    }
    // orthonormalize against the grid quadrature so the Gram matrix is the
    // identity under the same rule all projections use (the analytic family
    // is only orthonormal for exact integrals)
    for (int k = 0; k < p; ++k) {
      for (int r = 0; r < 2; ++r)
        for (int j = 0; j < k; ++j) {
          double c = inner(ygrid, basis.members[k], basis.members[j]);
          for (std::size_t q = 0; q < ygrid.size(); ++q)
            basis.members[k][q] -= c * basis.members[j][q];
        }
      double nrm = norm_l2(ygrid, basis.members[k]);
      require(nrm > 1e-12, "analytic_trunk: Legendre family degenerates on this grid");
      for (auto& v : basis.members[k]) v /= nrm;
    }
    return basis;
  }
  throw InvalidArgument("analytic_trunk: kind must be fourier or legendre");
}

McEstimate reconstruction_error_mc(const std::vector<FieldSample>& samples,
                                   const TrunkBasis& basis, const ProjectionOperator& proj) {
  require(samples.size() >= 2, "reconstruction_error_mc: need at least 2 samples");
  std::vector<double> sq(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    require(samples[i].grid.same_shape(basis.ygrid), "reconstruction_error_mc: grid mismatch");
    auto alpha = project(samples[i].values, proj);
    auto rec = reconstruct(alpha, basis);
    double s = 0.0;
    for (std::size_t q = 0; q < rec.size(); ++q) {
      double d = rec[q] - samples[i].values[q];
      s += basis.ygrid.weight(q) * d * d;
    }
    sq[i] = s;
  }
  return jackknife_rms(sq);
}

double spectral_lower_bound(const std::vector<double>& eigenvalues, int p) {
  double s = 0.0;
  for (std::size_t k = static_cast<std::size_t>(std::max(p, 0)); k < eigenvalues.size(); ++k)
    s += eigenvalues[k];
  return std::sqrt(std::max(0.0, s));
}

namespace {

// sigma_max of a p x n "synthesis" map alpha -> sum alpha_k tau_k under the
// grid inner product: largest eigenvalue of the weighted Gram matrix.
double sigma_max_gram(const std::vector<std::vector<double>>& rows, const Grid& g) {
  std::size_t n = g.size();
  Eigen::VectorXd w = quad_weights(g);
  Eigen::MatrixXd T = members_matrix(rows, n);
  Eigen::MatrixXd G = T * w.asDiagonal() * T.transpose();
  // power iteration on the small SPD Gram
  Eigen::VectorXd v = Eigen::VectorXd::Ones(G.rows()).normalized();
  double lam = 0.0;
  for (int it = 0; it < 500; ++it) {
    Eigen::VectorXd u = G * v;
    double nl = u.norm();
    if (nl == 0) return 0.0;
    u /= nl;
    if (std::abs(nl - lam) <= 1e-13 * std::max(1.0, nl) && it > 3) {
      lam = nl;
      break;
    }
    lam = nl;
    v = u;
  }
  return std::sqrt(lam);
}

}  // namespace

double lip_reconstruct(const TrunkBasis& basis) { return sigma_max_gram(basis.members, basis.ygrid); }

double lip_projection(const ProjectionOperator& proj) {
  return sigma_max_gram(proj.duals, proj.ygrid);
}

double lip_reconstruct_project(const TrunkBasis& basis, const ProjectionOperator& proj) {
  // Linear part of R o P is A u = T^T (D W u). Its L2(w) operator norm equals
  // sigma_max(B) for B = Wh T^T D Wh, Wh = diag(sqrt(w)); power-iterate B^T B.
  std::size_t n = basis.ygrid.size();
  Eigen::VectorXd w = quad_weights(basis.ygrid);
  Eigen::VectorXd wh = w.array().sqrt();
  Eigen::MatrixXd T = members_matrix(basis.members, n);
  Eigen::MatrixXd D = members_matrix(proj.duals, n);
  auto apply_B = [&](const Eigen::VectorXd& z) -> Eigen::VectorXd {
    return wh.asDiagonal() * (T.transpose() * (D * (wh.asDiagonal() * z)));
  };
  auto apply_Bt = [&](const Eigen::VectorXd& z) -> Eigen::VectorXd {
    return wh.asDiagonal() * (D.transpose() * (T * (wh.asDiagonal() * z)));
  };
  Eigen::VectorXd v = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] += 0.1 * std::sin(1.0 + 2.7 * i);
  v.normalize();
  double lam = 0.0;
  for (int it = 0; it < 500; ++it) {
    Eigen::VectorXd u = apply_Bt(apply_B(v));
    double nl = u.norm();
    if (nl == 0) return 0.0;
    u /= nl;
    if (it > 3 && std::abs(nl - lam) <= 1e-12 * std::max(1.0, nl)) {
      lam = nl;
      v = u;
      break;
    }
    lam = nl;
    v = u;
  }
  return std::sqrt(lam);
}

}  // namespace don
