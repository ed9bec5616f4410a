#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hypobgk/basis.hpp"
#include "hypobgk/core.hpp"
#include "hypobgk/mode_operators.hpp"
#include "hypobgk/trace.hpp"

namespace hypobgk {

enum class FlowModel { Linear, Linearized, Nonlinear };

/**
 * Deviation from the global Maxwellian in Fourier-Hermite coefficients:
 * coeffs(m, k + k_max) is the m-th Hermite coefficient of the spatial mode
 * k in [-k_max, k_max]. Real phase-space densities satisfy
 * coeffs(m, -k) = conj(coeffs(m, k)); the coefficient (0, k=0) is the total
 * mass deviation and stays 0, and for the energy-conserving models
 * (2, k=0) stays 0 as well.
 */
struct SpectralState {
  int k_max = 0;
  int order = 0;
  Real temperature = 1.0;
  Real time = 0.0;
  CMat coeffs;

  static SpectralState zero(int k_max, int order, Real temperature = 1.0) {
    SpectralState s;
    s.k_max = k_max;
    s.order = order;
    s.temperature = temperature;
    s.coeffs = CMat::Zero(order + 1, 2 * k_max + 1);
    return s;
  }

  int col(int k) const { return k + k_max; }
  Complex coeff(int k, int m) const { return coeffs(m, col(k)); }

  Real sigma0() const { return coeffs(0, col(0)).real(); }
  Real tau0() const {
    return std::sqrt(2.0) * temperature * coeffs(2, col(0)).real() +
           temperature * coeffs(0, col(0)).real();
  }

  Real reality_defect() const {
    Real worst = std::abs(coeffs.col(col(0)).imag().cwiseAbs().maxCoeff());
    for (int k = 1; k <= k_max; ++k) {
      worst = std::max(worst,
                       (coeffs.col(col(-k)) - coeffs.col(col(k)).conjugate()).cwiseAbs().maxCoeff());
    }
    return worst;
  }

  Real l2_norm_squared() const { return coeffs.squaredNorm(); }

  Real sobolev_norm_squared(Real gamma) const {
    Real sum = 0.0;
    for (int k = -k_max; k <= k_max; ++k) {
      sum += std::pow(1.0 + static_cast<Real>(k) * k, gamma) * coeffs.col(col(k)).squaredNorm();
    }
    return sum;
  }

  /// Fraction of the squared norm carried by the top quarter of either
  /// index range; the resolution monitor of a run.
  Real tail_fraction() const {
    const Real total = l2_norm_squared();
    if (total == 0.0) return 0.0;
    Real tail = coeffs.bottomRows((order + 1) / 4).squaredNorm();
    const int k_cut = k_max + 1 - (k_max + 1) / 4;
    for (int k = k_cut; k <= k_max; ++k) {
      tail += coeffs.col(col(k)).squaredNorm() + coeffs.col(col(-k)).squaredNorm();
    }
    return tail / total;
  }

  void scale(Real factor) { coeffs *= factor; }

  void enforce_reality() {
    coeffs.col(col(0)).imag().setZero();
    for (int k = 1; k <= k_max; ++k) coeffs.col(col(-k)) = coeffs.col(col(k)).conjugate();
  }
};

/// Random deviation with the decay profile (1+k^2)^{-1} (1+m)^{-2},
/// zero mass and energy deviation, and exact conjugate symmetry.
inline SpectralState random_state(int k_max, int order, Real temperature, std::uint64_t seed) {
  SpectralState s = SpectralState::zero(k_max, order, temperature);
  Rng rng(seed);
  for (int k = 0; k <= k_max; ++k) {
    for (int m = 0; m <= order; ++m) {
      const Real amp =
          1.0 / ((1.0 + static_cast<Real>(k) * k) * (1.0 + m) * (1.0 + m));
      const Real re = rng.symmetric();
      const Real im = rng.symmetric();
      s.coeffs(m, s.col(k)) = amp * Complex(re, k == 0 ? 0.0 : im);
    }
  }
  s.coeffs(0, s.col(0)) = 0.0;
  s.coeffs(2, s.col(0)) = 0.0;
  s.enforce_reality();
  return s;
}

struct MomentFields {
  CVec sigma;  // density deviation modes, index k + k_max
  CVec tau;    // pressure deviation modes
};

inline MomentFields moments(const SpectralState& s) {
  MomentFields m;
  m.sigma.resize(2 * s.k_max + 1);
  m.tau.resize(2 * s.k_max + 1);
  for (int k = -s.k_max; k <= s.k_max; ++k) {
    m.sigma[s.col(k)] = s.coeff(k, 0);
    m.tau[s.col(k)] =
        std::sqrt(2.0) * s.temperature * s.coeff(k, 2) + s.temperature * s.coeff(k, 0);
  }
  return m;
}

/// Relaxation gain of the energy-conserving linear model: sigma_k enters
/// the m = 0 channel and (tau_k/T - sigma_k)/sqrt(2) the m = 2 channel.
inline CMat gain_linearized(const SpectralState& s) {
  CMat gain = CMat::Zero(s.order + 1, 2 * s.k_max + 1);
  const MomentFields m = moments(s);
  for (int k = -s.k_max; k <= s.k_max; ++k) {
    gain(0, s.col(k)) = m.sigma[s.col(k)];
    gain(2, s.col(k)) =
        (m.tau[s.col(k)] / s.temperature - m.sigma[s.col(k)]) / std::sqrt(2.0);
  }
  return gain;
}

/**
 * Hermite coefficients of the local Maxwellian with density 1 + sigma and
 * pressure T + tau at each node, by Gauss-Hermite quadrature against the
 * local Gaussian (exact for the polynomial integrands). Column j holds the
 * coefficients at node j.
 */
inline Mat local_maxwellian_project(const Vec& sigma, const Vec& tau, int order, Real T) {
  if (sigma.size() != tau.size()) {
    throw std::invalid_argument("local_maxwellian_project: field size mismatch");
  }
  static thread_local int cached_order = -1;
  static thread_local QuadratureRule rule;
  if (cached_order != order) {
    rule = gauss_hermite(2 * order + 8, 1.0);
    cached_order = order;
  }
  const HermiteBasis basis(order, T);
  Mat out(order + 1, sigma.size());
  Vec poly(order + 1);
  Vec accum(order + 1);
  for (int j = 0; j < sigma.size(); ++j) {
    const Real rho = 1.0 + sigma[j];
    const Real pressure = T + tau[j];
    if (!(rho > 0.0) || !(pressure > 0.0)) {
      throw BlowupError("nonpositive density or pressure in the local Maxwellian",
                        std::numeric_limits<Real>::quiet_NaN());
    }
    const Real theta = pressure / rho;  // local temperature
    accum.setZero();
    for (int q = 0; q < rule.nodes.size(); ++q) {
      const Real v = std::sqrt(theta) * rule.nodes[q];
      basis.evaluate_polynomials(v, poly);
      accum += rule.weights[q] * poly;
    }
    out.col(j) = rho * accum;
  }
  return out;
}

/// The interpolation path between the global and the local Maxwellian:
/// F(s) is the Gaussian with density 1 + s sigma and pressure T + s tau.
inline Real local_maxwellian_path(Real s, Real sigma, Real tau, Real v, Real T) {
  const Real rho = 1.0 + s * sigma;
  const Real pressure = T + s * tau;
  return std::pow(rho, 1.5) / std::sqrt(2.0 * kPi * pressure) *
         std::exp(-v * v * rho / (2.0 * pressure));
}

/// Closed-form second s-derivative of the path above.
inline Real local_maxwellian_path_dss(Real s, Real sigma, Real tau, Real v, Real T) {
  const Real rho = 1.0 + s * sigma;
  const Real pressure = T + s * tau;
  const Real theta = pressure / rho;
  const Real m_theta = std::exp(-v * v / (2.0 * theta)) / std::sqrt(2.0 * kPi * theta);
  const Real v2 = v * v;
  const Real v4 = v2 * v2;
  const Real bracket = -3.0 * sigma / (4.0 * theta) +
                       (1.5 * v2 * sigma + 0.75 * tau) / (theta * theta) -
                       (0.25 * v4 * sigma + 1.5 * v2 * tau) / (theta * theta * theta) +
                       0.25 * v4 * tau / (theta * theta * theta * theta);
  return (tau - T * sigma) / (rho * rho) * bracket * m_theta;
}

// ---------------------------------------------------------------------------
// Exact linear stepping
// ---------------------------------------------------------------------------

/// Exact per-mode exponential integrator for the linear models. Modes k > 0
/// are advanced through precomputed eigendecompositions of -C_k, negative
/// modes by conjugation, and k = 0 channelwise.
class LinearPropagator {
 public:
  LinearPropagator(FlowModel model, int k_max, int order, Real temperature = 1.0)
      : k_max_(k_max), order_(order) {
    if (model == FlowModel::Nonlinear) {
      throw std::invalid_argument("LinearPropagator: linear models only");
    }
    const ModeModel mode_model = model == FlowModel::Linear ? ModeModel::ContinuousLinear
                                                            : ModeModel::ContinuousLinearized;
    k0_diag_ = collision_diagonal(model == FlowModel::Linearized, order + 1);
    modes_.resize(k_max);
    for (int k = 1; k <= k_max; ++k) {
      const ModeOperator op = build_mode_operator(mode_model, k, order, temperature);
      Eigen::ComplexEigenSolver<CMat> es(-op.matrix, true);
      if (es.info() != Eigen::Success) throw CertificationError("mode eigensolver failed");
      modes_[k - 1].values = es.eigenvalues();
      modes_[k - 1].vectors = es.eigenvectors();
      modes_[k - 1].inverse = es.eigenvectors().inverse();
    }
  }

  void step(SpectralState& s, Real dt) const {
    if (s.k_max != k_max_ || s.order != order_) {
      throw std::invalid_argument("LinearPropagator: state resolution mismatch");
    }
    for (int m = 0; m <= order_; ++m) {
      s.coeffs(m, s.col(0)) *= std::exp(k0_diag_[m] * dt);
    }
    for (int k = 1; k <= k_max_; ++k) {
      const auto& mode = modes_[k - 1];
      const CVec phases = (mode.values.array() * dt).exp();
      s.coeffs.col(s.col(k)) =
          mode.vectors * (phases.array() * (mode.inverse * s.coeffs.col(s.col(k))).array())
                             .matrix();
      s.coeffs.col(s.col(-k)) = s.coeffs.col(s.col(k)).conjugate();
    }
    s.time += dt;
  }

 private:
  struct ModeDecomposition {
    CVec values;
    CMat vectors;
    CMat inverse;
  };
  int k_max_;
  int order_;
  Vec k0_diag_;
  std::vector<ModeDecomposition> modes_;
};

// ---------------------------------------------------------------------------
// Nonlinear stepping (Strang splitting)
// ---------------------------------------------------------------------------

/**
 * Strang step for the nonlinear relaxation model: exact half-step transport
 * per mode, a full relaxation step toward the frozen local Maxwellian
 * (exact for frozen coefficients), and a second transport half-step.
 * The physical grid has 2 k_max + 2 equispaced nodes, so products of
 * resolved modes transform without aliasing.
 */
class NonlinearStepper {
 public:
  NonlinearStepper(int k_max, int order, Real temperature = 1.0)
      : k_max_(k_max), order_(order), temperature_(temperature) {
    Eigen::SelfAdjointEigenSolver<Mat> es(velocity_matrix(order, temperature));
    transport_values_ = es.eigenvalues();
    transport_vectors_ = es.eigenvectors();
    const int nodes = 2 * k_max + 2;
    synthesis_.resize(2 * k_max + 1, nodes);
    analysis_.resize(nodes, 2 * k_max + 1);
    for (int j = 0; j < nodes; ++j) {
      const Real x = 2.0 * kPi * j / nodes;
      for (int k = -k_max; k <= k_max; ++k) {
        synthesis_(k + k_max, j) = std::exp(Complex(0.0, k * x));
        analysis_(j, k + k_max) = std::exp(Complex(0.0, -k * x)) / static_cast<Real>(nodes);
      }
    }
  }

  void step(SpectralState& s, Real dt) const {
    if (s.k_max != k_max_ || s.order != order_) {
      throw std::invalid_argument("NonlinearStepper: state resolution mismatch");
    }
    transport(s, 0.5 * dt);
    relax(s, dt);
    transport(s, 0.5 * dt);
    s.time += dt;
  }

  /// Node values of the deviation coefficients, (order+1) x nodes.
  Mat node_coefficients(const SpectralState& s) const {
    return (s.coeffs * synthesis_).real();
  }

  const CMat& analysis() const { return analysis_; }

 private:
  void transport(SpectralState& s, Real span) const {
    for (int k = 1; k <= k_max_; ++k) {
      CVec phases(order_ + 1);
      for (int m = 0; m <= order_; ++m) {
        phases[m] = std::exp(Complex(0.0, -k * transport_values_[m] * span));
      }
      s.coeffs.col(s.col(k)) =
          transport_vectors_.cast<Complex>() *
          (phases.array() *
           (transport_vectors_.transpose().cast<Complex>() * s.coeffs.col(s.col(k))).array())
              .matrix();
      s.coeffs.col(s.col(-k)) = s.coeffs.col(s.col(k)).conjugate();
    }
  }

  void relax(SpectralState& s, Real dt) const {
    Mat node_vals = node_coefficients(s);
    const Vec sigma = node_vals.row(0).transpose();
    const Vec tau = (std::sqrt(2.0) * temperature_ * node_vals.row(2) +
                     temperature_ * node_vals.row(0))
                        .transpose();
    Mat maxwellian;
    try {
      maxwellian = local_maxwellian_project(sigma, tau, order_, temperature_);
    } catch (const BlowupError& e) {
      throw BlowupError(e.what(), s.time);
    }
    maxwellian.row(0).array() -= 1.0;  // switch to deviation coefficients
    const Real damp = std::exp(-dt);
    node_vals = maxwellian + (node_vals - maxwellian) * damp;
    s.coeffs = (node_vals.cast<Complex>() * analysis_);
    s.enforce_reality();
  }

  int k_max_;
  int order_;
  Real temperature_;
  Vec transport_values_;
  Mat transport_vectors_;
  CMat synthesis_;  // modes -> nodes
  CMat analysis_;   // nodes -> modes
};

/// Quadratic-order residual of the local Maxwellian around the global one:
/// R = M_f - M_T - (linear gain), returned as Fourier-Hermite coefficients.
inline CMat remainder_coefficients(const SpectralState& s) {
  const NonlinearStepper aux(s.k_max, s.order, s.temperature);
  const Mat node_vals = aux.node_coefficients(s);
  const Vec sigma = node_vals.row(0).transpose();
  const Vec tau = (std::sqrt(2.0) * s.temperature * node_vals.row(2) +
                   s.temperature * node_vals.row(0))
                      .transpose();
  Mat residual = local_maxwellian_project(sigma, tau, s.order, s.temperature);
  residual.row(0).array() -= 1.0;
  for (int j = 0; j < sigma.size(); ++j) {
    residual(0, j) -= sigma[j];
    residual(2, j) -= (tau[j] / s.temperature - sigma[j]) / std::sqrt(2.0);
  }
  return residual.cast<Complex>() * aux.analysis();
}

/// Sobolev norm of the remainder; the measured ratio
/// remainder_norm / ||h||^2 estimates the quadratic-bound constant.
inline Real remainder_norm(const SpectralState& s, Real gamma) {
  const CMat r = remainder_coefficients(s);
  Real sum = 0.0;
  for (int k = -s.k_max; k <= s.k_max; ++k) {
    sum += std::pow(1.0 + static_cast<Real>(k) * k, gamma) * r.col(s.col(k)).squaredNorm();
  }
  return std::sqrt(sum);
}

// ---------------------------------------------------------------------------
// Entropy functionals and run driver
// ---------------------------------------------------------------------------

/// Mode-weighted quadratic entropy e_gamma = sum_k (1+k^2)^gamma <h_k, P_k h_k>
/// for a block-ansatz family of transformation matrices (P_0 = I).
struct EntropyFunctional {
  Real gamma = 0.0;
  PkAnsatz ansatz = PkAnsatz::two_block(0.4684);
  Real certified_rate = 0.0;  // guaranteed decay rate of e_gamma

  /// Sharp-balance family for the mass-only model (optimized uniform alpha).
  static EntropyFunctional mass_only(Real gamma = 0.0) {
    EntropyFunctional f;
    f.gamma = gamma;
    f.ansatz = PkAnsatz::two_block(0.4684);
    f.certified_rate = 0.547592;
    return f;
  }

  /// Family for the energy-conserving models.
  static EntropyFunctional energy_conserving(Real gamma) {
    EntropyFunctional f;
    f.gamma = gamma;
    f.ansatz = PkAnsatz::four_block(1.0 / 3.0, 1.0 / 3.0);
    f.certified_rate = 0.0412;
    return f;
  }

  Real value_at_gamma(const SpectralState& s, Real g) const {
    Real sum = 0.0;
    for (int k = -s.k_max; k <= s.k_max; ++k) {
      const Real weight = std::pow(1.0 + static_cast<Real>(k) * k, g);
      const auto column = s.coeffs.col(s.col(k));
      Real quad = column.squaredNorm();
      if (k != 0) {
        const Real kk = static_cast<Real>(k);
        if (ansatz.form == PkAnsatz::Form::TwoBlock ||
            ansatz.form == PkAnsatz::Form::FourBlock) {
          quad += 2.0 * std::real(Complex(0.0, -ansatz.alpha / kk) * std::conj(column(0)) *
                                  column(1));
        }
        if (ansatz.form == PkAnsatz::Form::FourBlock) {
          quad += 2.0 * std::real(Complex(0.0, -ansatz.beta / (2.0 * kk)) *
                                  std::conj(column(2)) * column(3));
        }
      }
      sum += weight * quad;
    }
    return sum;
  }

  Real value(const SpectralState& s) const { return value_at_gamma(s, gamma); }
};

struct SimulationResult {
  std::vector<TraceRow> rows;
  Real fitted_rate_e = 0.0;        // slope of the gamma = 0 functional
  Real fitted_rate_e_gamma = 0.0;  // slope of the gamma-weighted functional
  Real fitted_norm_rate = 0.0;     // slope of the plain norm (half the quadratic rate)
  Real initial_remainder_ratio = 0.0;  // nonlinear runs: ||R|| / ||h||^2 at start
  Real max_tail_fraction = 0.0;
};

/**
 * Runs a model from the given state with fixed step dt until t_max,
 * sampling every `stride` steps. Tracks the entropy functional, the plain
 * Sobolev norm, and the conserved moments. The share of the squared norm
 * in the top quarter of either index range is monitored at every sample
 * and reported; a run is rejected when it crosses tail_reject, the point
 * where the truncated representation has stopped resolving the state.
 */
inline SimulationResult simulate(FlowModel model, SpectralState state, Real dt, Real t_max,
                                 int stride, const EntropyFunctional& functional,
                                 Real tail_reject = 0.1) {
  if (!(dt > 0.0) || t_max < 0.0) throw std::invalid_argument("simulate: bad time stepping");
  const int steps = static_cast<int>(std::llround(t_max / dt));
  SimulationResult result;

  std::optional<LinearPropagator> linear;
  std::optional<NonlinearStepper> nonlinear;
  if (model == FlowModel::Nonlinear) {
    nonlinear.emplace(state.k_max, state.order, state.temperature);
    result.initial_remainder_ratio =
        remainder_norm(state, functional.gamma) /
        std::max(1e-300, state.sobolev_norm_squared(functional.gamma));
  } else {
    linear.emplace(model, state.k_max, state.order, state.temperature);
  }

  auto sample = [&](const SpectralState& s) {
    TraceRow row;
    row.t = s.time;
    row.e = functional.value_at_gamma(s, 0.0);
    row.e_gamma = functional.value(s);
    row.l2_norm = std::sqrt(s.l2_norm_squared());
    row.sigma0 = s.sigma0();
    row.tau0 = s.tau0();
    result.rows.push_back(row);
    const Real tail = s.tail_fraction();
    result.max_tail_fraction = std::max(result.max_tail_fraction, tail);
    if (tail > tail_reject) {
      throw ResolutionError("coefficient tail grew past the resolution threshold");
    }
  };

  sample(state);
  for (int step = 1; step <= steps; ++step) {
    if (linear) {
      linear->step(state, dt);
    } else {
      nonlinear->step(state, dt);
    }
    if (step % stride == 0 || step == steps) sample(state);
  }

  Vec times(static_cast<int>(result.rows.size()));
  Vec e_vals(times.size()), eg_vals(times.size()), norms(times.size());
  for (int i = 0; i < times.size(); ++i) {
    times[i] = result.rows[i].t;
    e_vals[i] = result.rows[i].e;
    eg_vals[i] = result.rows[i].e_gamma;
    norms[i] = result.rows[i].l2_norm;
  }
  result.fitted_rate_e = fit_decay_rate(times, e_vals);
  result.fitted_rate_e_gamma = fit_decay_rate(times, eg_vals);
  result.fitted_norm_rate = fit_decay_rate(times, norms);
  return result;
}

// ---------------------------------------------------------------------------
// Two-velocity transport runs
// ---------------------------------------------------------------------------

/// Mode-resolved run of the two-velocity system with the sharp per-mode
/// transformation matrices; reports the fitted norm decay rate.
struct TwoVelocityRun {
  std::vector<TraceRow> rows;
  Real fitted_norm_rate = 0.0;
  Real certified_rate = 0.0;
};

inline TwoVelocityRun simulate_two_velocity(Real sigma, int k_max, Real dt, Real t_max,
                                            int stride, std::uint64_t seed) {
  TwoVelocityRun run;
  run.certified_rate = -two_velocity_eigenvalues(sigma, 1).slow.real();
  std::vector<CVec> modes(k_max);
  std::vector<CMat> p_mats(k_max);
  std::vector<Eigen::ComplexEigenSolver<CMat>> decomps(k_max);
  Rng rng(seed);
  for (int k = 1; k <= k_max; ++k) {
    CVec u(2);
    u << Complex(rng.symmetric(), rng.symmetric()) / (1.0 + k * k),
        Complex(rng.symmetric(), rng.symmetric()) / (1.0 + k * k);
    modes[k - 1] = u;
    p_mats[k - 1] = two_velocity_P(sigma, k);
    decomps[k - 1].compute(-two_velocity_mode_matrix(sigma, k), true);
  }
  const int steps = static_cast<int>(std::llround(t_max / dt));
  auto sample = [&](Real t) {
    TraceRow row;
    row.t = t;
    for (int k = 1; k <= k_max; ++k) {
      row.e += 2.0 * std::real((modes[k - 1].adjoint() * p_mats[k - 1] * modes[k - 1])(0, 0));
      row.l2_norm += 2.0 * modes[k - 1].squaredNorm();
    }
    row.e_gamma = row.e;
    row.l2_norm = std::sqrt(row.l2_norm);
    run.rows.push_back(row);
  };
  sample(0.0);
  for (int step = 1; step <= steps; ++step) {
    const Real t = step * dt;
    for (int k = 1; k <= k_max; ++k) {
      const auto& es = decomps[k - 1];
      const CVec phases = (es.eigenvalues().array() * dt).exp();
      modes[k - 1] =
          es.eigenvectors() *
          (phases.array() * (es.eigenvectors().inverse() * modes[k - 1]).array()).matrix();
    }
    if (step % stride == 0 || step == steps) sample(t);
  }
  Vec times(static_cast<int>(run.rows.size())), evals(times.size());
  for (int i = 0; i < times.size(); ++i) {
    times[i] = run.rows[i].t;
    evals[i] = run.rows[i].e;
  }
  run.fitted_norm_rate = 0.5 * fit_decay_rate(times, evals);
  return run;
}

}  // namespace hypobgk
