#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "hypobgk/basis.hpp"
#include "hypobgk/core.hpp"
#include "hypobgk/lyapunov.hpp"
#include "hypobgk/optim.hpp"

namespace hypobgk {

enum class ModeModel { TwoVelocity, DiscreteVelocity, ContinuousLinear, ContinuousLinearized };

/// Diagonal of the collision projection in the Hermite basis: 0 on the
/// conserved channels (mass; plus energy when the model conserves it),
/// -1 elsewhere. Returned with opposite sign convention folded into C_k.
inline Vec collision_diagonal(bool conserves_energy, int size) {
  Vec d = Vec::Constant(size, -1.0);
  d[0] = 0.0;
  if (conserves_energy && size > 2) d[2] = 0.0;
  return d;
}

/// Mode matrix of the two-velocity transport-relaxation system,
/// C_k = ((0, ik sigma), (ik sigma, 1)).
inline CMat two_velocity_mode_matrix(Real sigma, int k) {
  CMat c(2, 2);
  const Complex iks(0.0, k * sigma);
  c << Complex(0.0, 0.0), iks, iks, Complex(1.0, 0.0);
  return c;
}

/// The spatial mode k of a kinetic model, as the matrix C_k in
/// d/dt u_k = -C_k u_k. For velocity-expanded models C_k = ik sqrt(T) S - D
/// with S the (discrete) velocity matrix and D the collision diagonal.
struct ModeOperator {
  ModeModel model = ModeModel::ContinuousLinear;
  int k = 1;
  Real temperature = 1.0;
  Real sigma = 1.0;  // two-velocity transport speed
  CMat matrix;

  int size() const { return static_cast<int>(matrix.rows()); }
};

/**
 * Builds C_k for mode k != 0. size_param is the Hermite order N for the
 * continuous models (matrix side N+1, N >= 5 so that the 5x5 block algebra
 * below applies) and the lattice order n for the discrete-velocity model.
 * The k = 0 mode is not represented as a matrix: it relaxes analytically
 * (channelwise e^{-t} off the conserved channels).
 */
inline ModeOperator build_mode_operator(ModeModel model, int k, int size_param, Real T = 1.0,
                                        Real sigma = 1.0) {
  if (k == 0) throw std::invalid_argument("build_mode_operator: k = 0 is handled analytically");
  ModeOperator op;
  op.model = model;
  op.k = k;
  op.temperature = T;
  op.sigma = sigma;
  switch (model) {
    case ModeModel::TwoVelocity:
      if (!(sigma > 0)) throw std::invalid_argument("two-velocity model needs sigma > 0");
      op.matrix = two_velocity_mode_matrix(sigma, k);
      break;
    case ModeModel::DiscreteVelocity: {
      const int n = size_param;
      const Mat s = discrete_velocity_matrix(n);
      const Vec d = collision_diagonal(false, n + 1);
      op.matrix = Complex(0.0, static_cast<Real>(k)) * s.cast<Complex>();
      op.matrix -= d.cast<Complex>().asDiagonal().toDenseMatrix();
      break;
    }
    case ModeModel::ContinuousLinear:
    case ModeModel::ContinuousLinearized: {
      const int order = size_param;
      if (order < 5) throw std::invalid_argument("continuous models need Hermite order >= 5");
      const Mat s = velocity_matrix(order, T);
      const Vec d = collision_diagonal(model == ModeModel::ContinuousLinearized, order + 1);
      op.matrix = Complex(0.0, static_cast<Real>(k)) * s.cast<Complex>();
      op.matrix -= d.cast<Complex>().asDiagonal().toDenseMatrix();
      break;
    }
  }
  return op;
}

struct TwoVelocityEigenvalues {
  Complex slow;  // eigenvalue of -C_k with the least negative real part
  Complex fast;
  bool defective_boundary = false;  // |k| sigma = 1/2, where the pair merges
};

/// Closed-form eigenvalues -1/2 +- sqrt(1/4 - k^2 sigma^2) of -C_k.
inline TwoVelocityEigenvalues two_velocity_eigenvalues(Real sigma, int k) {
  if (!(sigma > 0)) throw std::invalid_argument("two_velocity_eigenvalues: sigma > 0 required");
  TwoVelocityEigenvalues out;
  const Real disc = 0.25 - static_cast<Real>(k) * k * sigma * sigma;
  const Complex root = std::sqrt(Complex(disc, 0.0));
  out.slow = Complex(-0.5, 0.0) + root;
  out.fast = Complex(-0.5, 0.0) - root;
  out.defective_boundary = std::abs(disc) < 1e-12;
  return out;
}

/// Sharp transformation matrix of the two-velocity model: the eigenvector
/// construction below the crossover, the trace-2 normalized form above it.
inline CMat two_velocity_P(Real sigma, int k) {
  if (k == 0) return CMat::Identity(2, 2);
  const Real ks = static_cast<Real>(k) * sigma;
  TwoVelocityEigenvalues ev = two_velocity_eigenvalues(sigma, k);
  if (ev.defective_boundary) {
    throw CertificationError("two_velocity_P: defective mode at |k| sigma = 1/2");
  }
  CMat p(2, 2);
  if (std::abs(ks) < 0.5) {
    p << Complex(4.0 * ks * ks, 0.0), Complex(0.0, -2.0 * ks),  //
        Complex(0.0, 2.0 * ks), Complex(2.0 - 4.0 * ks * ks, 0.0);
  } else {
    p << Complex(1.0, 0.0), Complex(0.0, -0.5 / ks),  //
        Complex(0.0, 0.5 / ks), Complex(1.0, 0.0);
  }
  return p;
}

/// Block ansatz for the transformation matrices P_k: identity with a small
/// skew-adjusted block in the upper-left corner.
struct PkAnsatz {
  enum class Form { ExactTwoByTwo, TwoBlock, FourBlock };
  Form form = Form::TwoBlock;
  Real alpha = 0.0;
  Real beta = 0.0;

  static PkAnsatz exact_two_by_two() { return {Form::ExactTwoByTwo, 0.0, 0.0}; }
  static PkAnsatz two_block(Real alpha) { return {Form::TwoBlock, alpha, 0.0}; }
  static PkAnsatz four_block(Real alpha, Real beta) { return {Form::FourBlock, alpha, beta}; }
};

/**
 * P_k of the requested ansatz at matrix side `size`.
 * TwoBlock: upper-left ((1, -i a/k), (i a/k, 1)), eigenvalues (k+-a)/k,
 * needs 0 < a < |k|. FourBlock: that block plus ((1, -i b/2k), (i b/2k, 1))
 * on channels 2,3; eigenvalues 1 +- a/k and 1 +- b/2k, needs 0 < a,b < 1.
 */
inline CMat build_Pk(int k, const PkAnsatz& ansatz, int size, Real sigma = 1.0) {
  if (k == 0) return CMat::Identity(size, size);
  CMat p = CMat::Identity(size, size);
  const Real kk = static_cast<Real>(k);
  switch (ansatz.form) {
    case PkAnsatz::Form::ExactTwoByTwo:
      if (size != 2) throw std::invalid_argument("build_Pk: exact ansatz is 2x2");
      return two_velocity_P(sigma, k);
    case PkAnsatz::Form::TwoBlock:
      if (!(ansatz.alpha > 0.0 && ansatz.alpha < std::abs(kk))) {
        throw std::invalid_argument("build_Pk: need 0 < alpha < |k|");
      }
      if (size < 2) throw std::invalid_argument("build_Pk: size too small");
      p(0, 1) = Complex(0.0, -ansatz.alpha / kk);
      p(1, 0) = Complex(0.0, ansatz.alpha / kk);
      break;
    case PkAnsatz::Form::FourBlock:
      if (!(ansatz.alpha > 0.0 && ansatz.alpha < 1.0 && ansatz.beta > 0.0 && ansatz.beta < 1.0)) {
        throw std::invalid_argument("build_Pk: need alpha, beta in (0,1)");
      }
      if (size < 4) throw std::invalid_argument("build_Pk: size too small");
      p(0, 1) = Complex(0.0, -ansatz.alpha / kk);
      p(1, 0) = Complex(0.0, ansatz.alpha / kk);
      p(2, 3) = Complex(0.0, -ansatz.beta / (2.0 * kk));
      p(3, 2) = Complex(0.0, ansatz.beta / (2.0 * kk));
      break;
  }
  return p;
}

// ---------------------------------------------------------------------------
// Closed-form leading minors of C*P + PC - 2 mu P on the nontrivial block.
// The second velocity-matrix entry is fixed at sqrt(2) (continuous model).
// ---------------------------------------------------------------------------

inline Real two_block_delta1(Real mu, Real alpha) { return 2.0 * (alpha - mu); }

inline Real two_block_delta2(Real mu, Real alpha, Real k) {
  const Real q = (1.0 - 2.0 * mu);
  return 4.0 * (alpha - mu) * (1.0 - alpha - mu) - alpha * alpha / (k * k) * q * q;
}

inline Real two_block_delta3(Real mu, Real alpha, Real k) {
  const Real q = (1.0 - 2.0 * mu);
  return 8.0 * (1.0 - mu) * (alpha - mu) * (1.0 - alpha - mu) -
         4.0 * alpha * alpha * (1.0 - alpha - mu) -
         2.0 * alpha * alpha / (k * k) * (1.0 - mu) * q * q;
}

/// Maximizer of delta3(0; ., k) between its first two positive roots:
/// alpha_k = ((3 + 1/2k^2) - sqrt((3 + 1/2k^2)^2 - 6)) / 3. Equals 1/3 at
/// k = 1 and decreases to (3 - sqrt(3))/3 as |k| grows.
inline Real two_block_alpha_opt(Real k) {
  const Real c = 3.0 + 0.5 / (k * k);
  return (c - std::sqrt(c * c - 6.0)) / 3.0;
}

/// Quintic-minor polynomial of the energy-conserving model at alpha = beta:
/// det of the 5x5 block equals alpha^2 p5(alpha, k).
inline Real four_block_p5(Real alpha, Real k) {
  const Real s3 = std::sqrt(3.0);
  const Real k2 = k * k;
  const Real k4 = k2 * k2;
  return 16.0 * (s3 - 1.0) - (8.0 * s3 + 16.0 + (2.0 + 4.0 * s3) / k2) * alpha +
         (34.0 - 6.0 * s3 + (24.0 * k2 + 1.0) / (2.0 * k4)) * alpha * alpha -
         (4.0 * s3 - 1.0 + s3 / k2) * alpha * alpha * alpha;
}

/// The 5x5 block of C*P + PC for the energy-conserving model with the
/// FourBlock ansatz; the rest of that matrix is exactly 2I.
inline CMat four_block_D(Real k, Real alpha, Real beta) {
  const Real s2 = std::sqrt(2.0);
  const Real s3 = std::sqrt(3.0);
  CMat d(5, 5);
  d.setZero();
  d(0, 0) = 2.0 * alpha;
  d(0, 1) = Complex(0.0, -alpha / k);
  d(1, 0) = Complex(0.0, alpha / k);
  d(0, 2) = s2 * alpha;
  d(2, 0) = s2 * alpha;
  d(1, 1) = 2.0 - 2.0 * alpha;
  d(1, 3) = -beta / s2;
  d(3, 1) = -beta / s2;
  d(2, 2) = s3 * beta;
  d(2, 3) = Complex(0.0, -beta / (2.0 * k));
  d(3, 2) = Complex(0.0, beta / (2.0 * k));
  d(2, 4) = beta;
  d(4, 2) = beta;
  d(3, 3) = 2.0 - s3 * beta;
  d(4, 4) = 2.0;
  return d;
}

/**
 * Leading principal minors delta_1..delta_5 of C*P + PC - 2 mu P restricted
 * to the nontrivial corner. For the mass-only model (TwoBlock) these are the
 * closed forms above, padded by the (2 - 2mu) diagonal; for the
 * energy-conserving model they are determinants of the explicit 5x5 block.
 */
inline std::array<Real, 5> minors(ModeModel model, Real alpha, Real beta, Real mu, int k) {
  if (k == 0) throw std::invalid_argument("minors: k != 0 required");
  const Real kk = static_cast<Real>(k);
  std::array<Real, 5> out{};
  if (model == ModeModel::ContinuousLinear) {
    out[0] = two_block_delta1(mu, alpha);
    out[1] = two_block_delta2(mu, alpha, kk);
    out[2] = two_block_delta3(mu, alpha, kk);
    out[3] = out[2] * (2.0 - 2.0 * mu);
    out[4] = out[3] * (2.0 - 2.0 * mu);
    return out;
  }
  if (model == ModeModel::ContinuousLinearized) {
    const CMat d = four_block_D(kk, alpha, beta);
    const CMat p5 = build_Pk(k, PkAnsatz::four_block(alpha, beta), 5);
    const CMat m = d - 2.0 * mu * p5;
    for (int j = 1; j <= 5; ++j) {
      out[j - 1] = m.topLeftCorner(j, j).determinant().real();
    }
    return out;
  }
  throw std::invalid_argument("minors: closed forms exist for the continuous models only");
}

/// Entrywise deviation of C*P + PC from its exact sparse form: the
/// closed-form corner block plus 2I elsewhere. Zero (to roundoff) at every
/// truncation; this is what makes the block certificates N-independent.
inline Real structural_block_deviation(ModeModel model, const PkAnsatz& ansatz, int k, int order) {
  const ModeOperator op = build_mode_operator(model, k, order);
  const int n = op.size();
  const CMat p = build_Pk(k, ansatz, n);
  const CMat m = op.matrix.adjoint() * p + p * op.matrix;
  CMat expected = 2.0 * CMat::Identity(n, n);
  if (model == ModeModel::ContinuousLinear && ansatz.form == PkAnsatz::Form::TwoBlock) {
    const Real a = ansatz.alpha;
    const Real kk = static_cast<Real>(k);
    CMat block(3, 3);
    block.setZero();
    block(0, 0) = 2.0 * a;
    block(0, 1) = Complex(0.0, -a / kk);
    block(1, 0) = Complex(0.0, a / kk);
    block(0, 2) = std::sqrt(2.0) * a;
    block(2, 0) = std::sqrt(2.0) * a;
    block(1, 1) = 2.0 - 2.0 * a;
    block(2, 2) = 2.0;
    expected.topLeftCorner(3, 3) = block;
  } else if (model == ModeModel::ContinuousLinearized && ansatz.form == PkAnsatz::Form::FourBlock) {
    expected.topLeftCorner(5, 5) = four_block_D(static_cast<Real>(k), ansatz.alpha, ansatz.beta);
  } else {
    throw std::invalid_argument("structural_block_deviation: unsupported model/ansatz pair");
  }
  return (m - expected).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Uniform-in-k certification
// ---------------------------------------------------------------------------

struct CertifiedRate {
  Real mu = 0.0;      // C*P + PC >= 2 mu P for every mode k != 0
  Real alpha = 0.0;   // 0 when a per-mode alpha rule is in use
  Real beta = 0.0;
  bool per_mode_alpha = false;
  int worst_k = 1;    // mode attaining the minimal margin
  Real margin = 0.0;  // min over verified modes of lambda_min(C*P+PC-2muP)
  std::array<Real, 5> minors_at_worst{};
  Real p_min = 1.0;   // extreme P_k eigenvalues over the family
  Real p_max = 1.0;
  Real envelope = 1.0;
  bool tail_certified = false;

  Real two_mu() const { return 2.0 * mu; }
};

namespace detail {

/// Largest mu with C*P + PC >= 2 mu P, as half the smallest eigenvalue of
/// the definite pencil (C*P + PC, P).
inline Real pencil_rate(const CMat& c, const CMat& p) {
  const CMat m = hermitize(c.adjoint() * p + p * c);
  Eigen::GeneralizedSelfAdjointEigenSolver<CMat> es(m, p, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success) throw CertificationError("pencil eigensolver failed");
  return 0.5 * es.eigenvalues().minCoeff();
}

/// Largest mu in [0, hi] keeping every closed-form TwoBlock minor
/// nonnegative at k = 1 (the minors only improve with |k|).
inline Real two_block_mu_max(Real alpha) {
  auto admissible = [alpha](Real mu) {
    return two_block_delta1(mu, alpha) >= 0.0 && two_block_delta2(mu, alpha, 1.0) >= 0.0 &&
           two_block_delta3(mu, alpha, 1.0) >= 0.0;
  };
  const Real hi = std::min(alpha, 0.5);
  if (!admissible(0.0)) return 0.0;
  return bisect_largest(admissible, 0.0, hi);
}

inline PkAnsatz family_at_k(const PkAnsatz& family, bool per_mode_alpha, int k) {
  if (!per_mode_alpha) return family;
  return PkAnsatz::two_block(two_block_alpha_opt(static_cast<Real>(k)));
}

/// Tail certification for |k| > k_max: every minor stays nonnegative and is
/// nondecreasing along a geometric k-sample, including the 1/k^2 -> 0 limit
/// (represented by a huge k).
inline bool tail_minors_certified(ModeModel model, const PkAnsatz& family, bool per_mode_alpha,
                                  Real mu, int k_max) {
  std::vector<int> sample;
  for (int k = k_max; k <= 10 * k_max; k += std::max(1, k_max)) sample.push_back(k);
  sample.push_back(1 << 20);  // the limiting formula in all 1/k^2 terms
  std::array<Real, 5> prev{};
  bool first = true;
  for (int k : sample) {
    const PkAnsatz at_k = family_at_k(family, per_mode_alpha, k);
    const auto m = minors(model, at_k.alpha, at_k.beta, mu, k);
    for (int j = 0; j < 5; ++j) {
      if (m[j] < -1e-12) return false;
      if (!first && !per_mode_alpha && m[j] < prev[j] - 1e-9 * std::max(1.0, std::abs(prev[j]))) {
        return false;  // monotonicity in |k| failed at the formula level
      }
    }
    prev = m;
    first = false;
  }
  return true;
}

}  // namespace detail

/**
 * Verifies C*P + PC >= 2 mu P across 1 <= |k| <= k_max at Hermite order N
 * and certifies the tail through the closed-form minors. Strategies:
 *
 *  - TwoVelocity/ExactTwoByTwo: per-mode sharp P, mu = min_k gap(C_k).
 *  - ContinuousLinear/TwoBlock, optimize = false, alpha = 0: per-mode
 *    alpha_k maximizing delta3; the uniform bound 2 mu = 17/108.
 *  - ContinuousLinear/TwoBlock, optimize = true: uniform alpha from a
 *    500-point grid + golden refinement, mu from bisection on the minors.
 *  - ContinuousLinearized/FourBlock: fixed (alpha, beta), mu from the
 *    pencil minimum over k; optimize = true scans alpha = beta.
 */
inline CertifiedRate certify_uniform_rate(ModeModel model, PkAnsatz family, int k_max, int N,
                                          bool optimize = false, Real sigma = 1.0, Real T = 1.0) {
  if (k_max < 1) throw std::invalid_argument("certify_uniform_rate: k_max >= 1");
  CertifiedRate cert;
  cert.alpha = family.alpha;
  cert.beta = family.beta;
  const Real inf = std::numeric_limits<Real>::infinity();

  switch (model) {
    case ModeModel::TwoVelocity: {
      if (family.form != PkAnsatz::Form::ExactTwoByTwo) {
        throw std::invalid_argument("two-velocity certification uses the exact 2x2 family");
      }
      cert.mu = -two_velocity_eigenvalues(sigma, 1).slow.real();
      break;
    }
    case ModeModel::ContinuousLinear: {
      if (family.form != PkAnsatz::Form::TwoBlock) {
        throw std::invalid_argument("mass-only model certification uses the TwoBlock family");
      }
      if (optimize) {
        Real best_mu = 0.0, best_alpha = 0.0;
        for (int i = 0; i < 500; ++i) {
          const Real a = 0.01 + (0.70 - 0.01) * i / 499.0;
          const Real m = detail::two_block_mu_max(a);
          if (m > best_mu) {
            best_mu = m;
            best_alpha = a;
          }
        }
        const Real width = (0.70 - 0.01) / 499.0;
        const auto refined = golden_section_min(
            [](Real a) { return -detail::two_block_mu_max(a); }, best_alpha - width,
            best_alpha + width, 1e-5);
        cert.alpha = refined.first;
        cert.mu = -refined.second;
        family = PkAnsatz::two_block(cert.alpha);
      } else if (family.alpha > 0.0) {
        cert.mu = detail::two_block_mu_max(family.alpha);
      } else {
        cert.per_mode_alpha = true;
        cert.alpha = 0.0;
        cert.mu = 17.0 / 216.0;  // lambda_1 >= delta3(alpha_1, 1)/4 = 17/54 and P <= 2I
      }
      break;
    }
    case ModeModel::ContinuousLinearized: {
      if (family.form != PkAnsatz::Form::FourBlock) {
        throw std::invalid_argument("energy-conserving model certification uses FourBlock");
      }
      if (optimize) {
        auto mu_of_alpha = [&](Real a) {
          const ModeOperator op = build_mode_operator(model, 1, N, T);
          return detail::pencil_rate(op.matrix, build_Pk(1, PkAnsatz::four_block(a, a), N + 1));
        };
        const auto best = golden_section_min([&](Real a) { return -mu_of_alpha(a); }, 0.05, 0.55,
                                             1e-4);
        cert.alpha = cert.beta = best.first;
        family = PkAnsatz::four_block(cert.alpha, cert.beta);
      }
      cert.mu = inf;  // set below from the pencil over modes
      break;
    }
    case ModeModel::DiscreteVelocity:
      throw std::invalid_argument(
          "discrete-velocity certification goes through construct_P per mode");
  }

  // pencil pass for the energy-conserving model: mu is the family minimum
  if (model == ModeModel::ContinuousLinearized) {
    std::vector<Real> rates(k_max);
    parallel_for(k_max, [&](int i) {
      const int k = i + 1;
      const ModeOperator op = build_mode_operator(model, k, N, T);
      rates[i] = detail::pencil_rate(op.matrix, build_Pk(k, family, N + 1));
    });
    for (int i = 0; i < k_max; ++i) cert.mu = std::min(cert.mu, rates[i]);
  }

  // margin verification across modes
  cert.margin = inf;
  cert.p_min = inf;
  cert.p_max = -inf;
  std::vector<Real> margins(k_max);
  std::vector<std::pair<Real, Real>> p_ranges(k_max);
  parallel_for(k_max, [&](int i) {
    const int k = i + 1;
    const PkAnsatz at_k = detail::family_at_k(family, cert.per_mode_alpha, k);
    CMat c, p;
    if (model == ModeModel::TwoVelocity) {
      c = two_velocity_mode_matrix(sigma, k);
      p = two_velocity_P(sigma, k);
    } else {
      const ModeOperator op = build_mode_operator(model, k, N, T);
      c = op.matrix;
      p = build_Pk(k, at_k, op.size());
    }
    margins[i] = verify_inequality(c, p, cert.mu);
    Eigen::SelfAdjointEigenSolver<CMat> pes(p, Eigen::EigenvaluesOnly);
    p_ranges[i] = {pes.eigenvalues().minCoeff(), pes.eigenvalues().maxCoeff()};
  });
  for (int i = 0; i < k_max; ++i) {
    if (margins[i] < cert.margin) {
      cert.margin = margins[i];
      cert.worst_k = i + 1;
    }
    cert.p_min = std::min(cert.p_min, p_ranges[i].first);
    cert.p_max = std::max(cert.p_max, p_ranges[i].second);
  }
  cert.envelope = std::sqrt(cert.p_max / cert.p_min);

  if (model == ModeModel::TwoVelocity) {
    // above the crossover the sharp P gives C*P+PC = 2 lambda_k P exactly,
    // with lambda_k = 1/2 >= mu; nothing changes for larger |k|
    cert.tail_certified = cert.mu <= 0.5 + 1e-12;
    cert.minors_at_worst.fill(0.0);
  } else {
    const PkAnsatz at_worst = detail::family_at_k(family, cert.per_mode_alpha, cert.worst_k);
    cert.minors_at_worst = minors(model, at_worst.alpha, at_worst.beta, cert.mu, cert.worst_k);
    cert.tail_certified =
        detail::tail_minors_certified(model, family, cert.per_mode_alpha, cert.mu, k_max);
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Spectral studies
// ---------------------------------------------------------------------------

/**
 * Unique real eigenvalue of the discrete-velocity mode operator at lattice
 * order 4, from the characteristic identity
 *   lam (lam+1)^4 + k^2 (lam+1)^2 (5 lam + 1) + k^4 (4 lam + 5/2) = 0,
 * bracketed on (-5/8, 0). Decreases monotonically toward -5/8 in |k|.
 */
inline Real discrete_real_eigenvalue(int k) {
  if (k == 0) throw std::invalid_argument("discrete_real_eigenvalue: k != 0");
  const Real kk = static_cast<Real>(std::abs(k));
  const Real k2 = kk * kk;
  const Real k4 = k2 * k2;
  auto h = [&](Real lam) {
    const Real lp = lam + 1.0;
    return lam * lp * lp * lp * lp + k2 * lp * lp * (5.0 * lam + 1.0) + k4 * (4.0 * lam + 2.5);
  };
  return bisect_root(h, -0.625 + 1e-13, 0.0);
}

struct GapConvergence {
  std::vector<int> orders;
  std::vector<Real> gaps;
  Real extrapolated = 0.0;
};

/// Spectral gap of C_k across a list of truncation orders, with an Aitken
/// extrapolation of the last three values.
inline GapConvergence truncated_gap_convergence(ModeModel model, int k,
                                                const std::vector<int>& orders, Real T = 1.0,
                                                Real sigma = 1.0) {
  GapConvergence out;
  out.orders = orders;
  out.gaps.resize(orders.size());
  for (std::size_t i = 0; i < orders.size(); ++i) {
    const ModeOperator op = build_mode_operator(model, k, orders[i], T, sigma);
    out.gaps[i] = spectral_gap(op.matrix).gap;
  }
  const std::size_t n = out.gaps.size();
  if (n >= 3) {
    const Real g1 = out.gaps[n - 3], g2 = out.gaps[n - 2], g3 = out.gaps[n - 1];
    const Real denom = (g3 - g2) - (g2 - g1);
    out.extrapolated = std::abs(denom) > 1e-15 ? g3 - (g3 - g2) * (g3 - g2) / denom : g3;
  } else if (n > 0) {
    out.extrapolated = out.gaps.back();
  }
  return out;
}

}  // namespace hypobgk
