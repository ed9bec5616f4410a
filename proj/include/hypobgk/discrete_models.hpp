#pragma once

#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

#include "hypobgk/core.hpp"
#include "hypobgk/entropy.hpp"
#include "hypobgk/trace.hpp"

namespace hypobgk {

/// Finite-state relaxation system df/dt = G f with a one-dimensional
/// kernel: G f_inf = 0 and left_null^T G = 0, normalized so that
/// <left_null, f_inf> = 1.
struct DiscreteBGKSystem {
  Mat generator;
  Vec steady_state;
  Vec left_null;

  int dimension() const { return static_cast<int>(generator.rows()); }
};

/// Space-homogeneous relaxation toward rho at rate 2 lambda:
/// G = 2 lambda (rho (1,...,1) - I). Spectrum {0, -2 lambda (n-1 fold)}.
inline DiscreteBGKSystem build_homogeneous(const Vec& rho, Real lambda) {
  const int n = static_cast<int>(rho.size());
  if (n < 2) throw std::invalid_argument("build_homogeneous: need at least two states");
  if (!(lambda > 0.0)) throw std::invalid_argument("build_homogeneous: lambda must be positive");
  Real total = 0.0;
  for (int j = 0; j < n; ++j) {
    if (!(rho[j] > 0.0 && rho[j] < 1.0)) {
      throw std::invalid_argument("build_homogeneous: rho entries must lie in (0,1)");
    }
    total += rho[j];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("build_homogeneous: rho must sum to 1");
  }
  DiscreteBGKSystem sys;
  sys.generator = 2.0 * lambda * (rho * Eigen::RowVectorXd::Ones(n) - Mat::Identity(n, n));
  sys.steady_state = rho;
  sys.left_null = Vec::Ones(n);
  return sys;
}

/// Four-state phase-space model: relaxation within each position pair plus
/// a centered-difference transport coupling. The transport part is
/// skew-symmetric, so the symmetric part of the generator loses the
/// spectral gap while the full spectrum keeps {0, -1/2 +- i sqrt(15)/2, -1}.
inline DiscreteBGKSystem build_four_state() {
  Mat relax(4, 4);
  relax << -1, 1, 0, 0,  //
      1, -1, 0, 0,       //
      0, 0, -1, 1,       //
      0, 0, 1, -1;
  relax *= 0.5;
  Mat transport(4, 4);
  transport << 0, -1, 0, 1,  //
      1, 0, -1, 0,           //
      0, 1, 0, -1,           //
      -1, 0, 1, 0;
  DiscreteBGKSystem sys;
  sys.generator = relax + transport;
  sys.steady_state = Vec::Constant(4, 0.25);
  sys.left_null = Vec::Ones(4);
  return sys;
}

/**
 * Exact solution of df/dt = G f at time t, via eigendecomposition when the
 * eigenvector basis is well conditioned (guard 1e8), otherwise via the
 * scaling-and-squaring matrix exponential.
 */
inline Vec evolve_exact(const DiscreteBGKSystem& sys, const Vec& f0, Real t) {
  if (f0.size() != sys.dimension()) throw std::invalid_argument("evolve_exact: size mismatch");
  if (t < 0.0) throw std::invalid_argument("evolve_exact: negative time");
  if (t == 0.0) return f0;
  Eigen::EigenSolver<Mat> es(sys.generator);
  const CMat v = es.eigenvectors();
  Eigen::JacobiSVD<CMat> svd(v);
  const Real cond = svd.singularValues()(0) / svd.singularValues().tail(1)(0);
  if (std::isfinite(cond) && cond < 1e8) {
    const CVec phases = (es.eigenvalues().array() * t).exp();
    const CVec out = v * (phases.array() * v.colPivHouseholderQr().solve(f0.cast<Complex>()).array()).matrix();
    return out.real();
  }
  const Mat expm = (sys.generator * t).exp();
  return expm * f0;
}

struct GeneratorFlags {
  bool essentially_nonnegative = false;
  bool q_matrix = false;
  bool detailed_balance = false;
};

/// Structural predicates: Metzler sign pattern, Q-matrix property
/// (additionally: constant vectors are stationary for the transpose flow),
/// and detailed balance in the sense ker G = ker G^T.
inline GeneratorFlags classify(const DiscreteBGKSystem& sys) {
  const int n = sys.dimension();
  GeneratorFlags flags;
  flags.essentially_nonnegative = true;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && sys.generator(i, j) < -1e-14) flags.essentially_nonnegative = false;
    }
  }
  flags.q_matrix =
      flags.essentially_nonnegative && (sys.generator * Vec::Ones(n)).cwiseAbs().maxCoeff() < 1e-12;

  auto kernel = [&](const Mat& m) {
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
    const Real tol = 1e-10 * std::max(1.0, svd.singularValues()(0));
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i) {
      if (svd.singularValues()(i) > tol) ++rank;
    }
    return Mat(svd.matrixV().rightCols(n - rank));
  };
  const Mat ker = kernel(sys.generator);
  const Mat ker_t = kernel(sys.generator.transpose());
  flags.detailed_balance = false;
  if (ker.cols() == ker_t.cols()) {
    // same span iff projecting one basis onto the other is lossless
    const Mat proj = ker_t * (ker_t.transpose() * ker);
    flags.detailed_balance = (proj - ker).cwiseAbs().maxCoeff() < 1e-10;
  }
  return flags;
}

/// Relative entropy and entropy production sampled along the exact flow,
/// with the fitted exponential decay rate of e_psi.
inline EntropyTrace entropy_decay_trace(const DiscreteBGKSystem& sys, const Vec& f0,
                                        const EntropyGenerator& gen, const Vec& t_grid) {
  EntropyTrace trace;
  trace.times = t_grid;
  trace.entropy.resize(t_grid.size());
  trace.production.resize(t_grid.size());
  for (int i = 0; i < t_grid.size(); ++i) {
    const Vec f = evolve_exact(sys, f0, t_grid[i]);
    trace.entropy[i] = relative_entropy(f, sys.steady_state, gen);
    trace.production[i] = fisher_information(f, sys.steady_state, gen, sys.generator);
  }
  trace.fitted_rate = fit_decay_rate(trace.times, trace.entropy);
  return trace;
}

}  // namespace hypobgk
