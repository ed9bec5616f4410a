#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hypobgk/core.hpp"

namespace hypobgk {

struct SpectralGapResult {
  Real gap = 0.0;                       // min |Re lambda| over eigenvalues with |lambda| > 1e-9
  bool defective_gap_eigenvalue = false;  // some eigenvalue attaining the gap is defective
  CVec eigenvalues;
};

namespace detail {

/// Geometric multiplicity of the eigenvalue lambda of C, by SVD rank of
/// C - lambda I with threshold 1e-8 ||C||.
inline int geometric_multiplicity(const CMat& c, Complex lambda) {
  const int n = static_cast<int>(c.rows());
  Eigen::JacobiSVD<CMat> svd(c - lambda * CMat::Identity(n, n));
  const Real tol = 1e-8 * std::max(1.0, c.norm());
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > tol) ++rank;
  }
  return n - rank;
}

/// Groups eigenvalues into clusters of diameter 1e-8 and reports, for each
/// cluster, (representative, algebraic multiplicity).
inline std::vector<std::pair<Complex, int>> eigenvalue_clusters(const CVec& eigenvalues) {
  std::vector<std::pair<Complex, int>> clusters;
  std::vector<bool> used(eigenvalues.size(), false);
  for (int i = 0; i < eigenvalues.size(); ++i) {
    if (used[i]) continue;
    Complex sum = eigenvalues[i];
    int count = 1;
    used[i] = true;
    for (int j = i + 1; j < eigenvalues.size(); ++j) {
      if (!used[j] && std::abs(eigenvalues[j] - eigenvalues[i]) < 1e-8) {
        sum += eigenvalues[j];
        ++count;
        used[j] = true;
      }
    }
    clusters.emplace_back(sum / static_cast<Real>(count), count);
  }
  return clusters;
}

}  // namespace detail

/// Spectral gap of a matrix: the minimum of |Re lambda| over eigenvalues
/// away from zero, with a defectiveness flag for the gap-attaining ones.
inline SpectralGapResult spectral_gap(const CMat& c) {
  if (c.rows() != c.cols()) throw std::invalid_argument("spectral_gap: matrix not square");
  Eigen::ComplexEigenSolver<CMat> es(c, false);
  if (es.info() != Eigen::Success) throw CertificationError("spectral_gap: eigensolver failed");
  SpectralGapResult result;
  result.eigenvalues = es.eigenvalues();
  result.gap = std::numeric_limits<Real>::infinity();
  for (int i = 0; i < result.eigenvalues.size(); ++i) {
    const Complex lambda = result.eigenvalues[i];
    if (std::abs(lambda) > 1e-9) result.gap = std::min(result.gap, std::abs(lambda.real()));
  }
  if (!std::isfinite(result.gap)) {
    result.gap = 0.0;
    return result;
  }
  for (const auto& [lambda, algebraic] : detail::eigenvalue_clusters(result.eigenvalues)) {
    if (std::abs(lambda) <= 1e-9 || std::abs(std::abs(lambda.real()) - result.gap) > 1e-8) continue;
    if (algebraic > 1 && detail::geometric_multiplicity(c, lambda) < algebraic) {
      result.defective_gap_eigenvalue = true;
    }
  }
  return result;
}

/// Positive definite P with C*P + PC >= 2 mu P and the usual diagnostics.
struct LyapunovCertificate {
  CMat P;
  Real mu = 0.0;
  Real p_min = 0.0;
  Real p_max = 0.0;
  Real margin = 0.0;  // least eigenvalue of C*P + PC - 2 mu P

  bool valid(Real tol = 1e-10) const { return p_min > 0.0 && margin >= -tol; }
};

/// Least eigenvalue of the Hermitian matrix C*P + PC - 2 mu P. The
/// certificate is valid iff the result is >= -1e-10.
inline Real verify_inequality(const CMat& c, const CMat& p, Real mu) {
  if ((p - p.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, p.norm())) {
    throw std::invalid_argument("verify_inequality: P is not Hermitian");
  }
  const CMat m = c.adjoint() * p + p * c - 2.0 * mu * p;
  return least_eigenvalue(hermitize(m));
}

/**
 * Lyapunov matrix from the eigenvector sum P = sum_j b_j w_j w_j^* with
 * w_j the eigenvectors of C^*. The certified rate is the spectral gap of C;
 * eigenvalues attaining it must be non-defective (otherwise construction is
 * refused, since this P form cannot certify a defective gap).
 *
 * Default weights are b_j = 1 / ||w_j||^2, which normalizes P toward
 * identity-like conditioning.
 */
inline LyapunovCertificate construct_P(const CMat& c, const Vec& weights = Vec()) {
  if (c.rows() != c.cols()) throw std::invalid_argument("construct_P: matrix not square");
  const int n = static_cast<int>(c.rows());
  const SpectralGapResult gap = spectral_gap(c);
  if (gap.defective_gap_eigenvalue) {
    throw CertificationError("construct_P: eigenvalue attaining the gap is defective");
  }
  Eigen::ComplexEigenSolver<CMat> es(c.adjoint(), true);
  if (es.info() != Eigen::Success) throw CertificationError("construct_P: eigensolver failed");
  const CMat w = es.eigenvectors();
  Eigen::JacobiSVD<CMat> svd(w);
  if (svd.singularValues()(n - 1) < 1e-12 * svd.singularValues()(0)) {
    throw CertificationError("construct_P: eigenvector basis is numerically singular");
  }
  if (weights.size() != 0 && weights.size() != n) {
    throw std::invalid_argument("construct_P: weight count mismatch");
  }

  LyapunovCertificate cert;
  cert.P = CMat::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    Real b = 1.0 / w.col(j).squaredNorm();
    if (weights.size() == n) {
      if (!(weights[j] > 0.0)) throw std::invalid_argument("construct_P: weights must be positive");
      b = weights[j];
    }
    cert.P += b * (w.col(j) * w.col(j).adjoint());
  }
  cert.P = hermitize(cert.P);
  cert.mu = gap.gap;

  // Cholesky as the definiteness gate; eigensolve for the exact extremes
  Eigen::LLT<CMat> llt(cert.P);
  Eigen::SelfAdjointEigenSolver<CMat> pes(cert.P, Eigen::EigenvaluesOnly);
  cert.p_min = pes.eigenvalues().minCoeff();
  cert.p_max = pes.eigenvalues().maxCoeff();
  if (llt.info() != Eigen::Success || cert.p_min < 1e-12 * std::max(1.0, cert.p_max)) {
    throw CertificationError("construct_P: P failed the positive-definiteness check");
  }
  cert.margin = verify_inequality(c, cert.P, cert.mu);
  return cert;
}

/// Norm-equivalence constant: ||f(t)|| <= c e^{-mu t} ||f(0)|| with
/// c = sqrt(p_max / p_min).
inline Real decay_envelope(const LyapunovCertificate& cert) {
  if (!(cert.p_min > 0.0)) throw std::invalid_argument("decay_envelope: P not positive definite");
  return std::sqrt(cert.p_max / cert.p_min);
}

}  // namespace hypobgk
