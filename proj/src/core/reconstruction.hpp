#pragma once

#include <vector>

#include "core/measures.hpp"
#include "core/stats.hpp"

namespace don {

// Affine trunk basis on an output grid: R(alpha) = tau0 + sum alpha_k tau_k.
struct TrunkBasis {
  enum class Source { Fourier, Legendre, Pca, Neural };
  Source source = Source::Fourier;
  Grid ygrid;
  std::vector<double> bias;                  // tau0 on the grid (may be all zero)
  std::vector<std::vector<double>> members;  // tau_1..tau_p on the grid

  int p() const { return static_cast<int>(members.size()); }
};

// Dual family tau*_k realizing the optimal projection P(u) = (<u - tau0, tau*_k>)_k.
struct ProjectionOperator {
  Grid ygrid;
  std::vector<double> bias;
  std::vector<std::vector<double>> duals;

  int p() const { return static_cast<int>(duals.size()); }
};

std::vector<double> reconstruct(const std::vector<double>& alpha, const TrunkBasis& basis);

// tau*_k = sum_l (G^{-1})_{kl} tau_l with G the quadrature Gram matrix.
// Throws when cond(G) exceeds cond_limit.
ProjectionOperator dual_basis(const TrunkBasis& basis, double cond_limit = 1e12);

// Least-squares variant for possibly degenerate trunks (trained neural trunks
// can have nearly dependent members): duals through the spectral pseudoinverse
// of the Gram matrix, directions below rel_threshold * lambda_max dropped.
// R o P is still the orthogonal projection onto span(tau).
ProjectionOperator dual_basis_pinv(const TrunkBasis& basis, double rel_threshold = 1e-12);

std::vector<double> project(const std::vector<double>& u, const ProjectionOperator& proj);

// Optimal affine reconstruction from pushforward samples: bias = sample mean,
// members = leading covariance eigenvectors; projection is orthogonal.
std::pair<TrunkBasis, ProjectionOperator> pca_reconstruction(
    const std::vector<FieldSample>& samples, int p);
std::pair<TrunkBasis, ProjectionOperator> pca_reconstruction(const SpectrumEstimate& spectrum,
                                                             int p);

// Analytic trunks: first p members of the Fourier basis under the enumeration
// kappa (torus grids), or the first p L2[0,T]-orthonormalized Legendre
// polynomials (interval grids). Bias is zero.
TrunkBasis analytic_trunk(TrunkBasis::Source kind, int p, const Grid& ygrid);

// RMS of ||R(P(v_i)) - v_i||_{L2} with jackknife stderr.
McEstimate reconstruction_error_mc(const std::vector<FieldSample>& samples,
                                   const TrunkBasis& basis, const ProjectionOperator& proj);

// sqrt(sum_{k>p} lambda_k) for a finite nonincreasing eigenvalue list.
double spectral_lower_bound(const std::vector<double>& eigenvalues, int p);

// Operator norms of the linear parts measured by power iteration:
// Lip(R) = sigma_max of alpha -> sum alpha_k tau_k, Lip(R o P) of the linear projector part.
double lip_reconstruct(const TrunkBasis& basis);
double lip_projection(const ProjectionOperator& proj);
double lip_reconstruct_project(const TrunkBasis& basis, const ProjectionOperator& proj);

}  // namespace don
