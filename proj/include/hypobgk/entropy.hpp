#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "hypobgk/core.hpp"
#include "hypobgk/optim.hpp"

namespace hypobgk {

enum class GeneratorKind { Log, Power, AbsPower, Quadratic };

/**
 * Convex generator psi of a relative entropy: psi(1) = 0, psi >= 0 and
 * psi'' >= 0 on its domain J. The quadratic generator lives on all of R,
 * everything else on the positive half-axis.
 *
 * Families:
 *   Log        sigma log sigma - sigma + 1        (extended by 1 at sigma=0)
 *   Power p    sigma^p - 1 - p (sigma - 1),  p > 1
 *   AbsPower p |sigma - 1|^p,                p > 1
 *   Quadratic  (sigma - 1)^2
 */
class EntropyGenerator {
 public:
  static EntropyGenerator log_entropy() { return EntropyGenerator(GeneratorKind::Log, 1.0); }
  static EntropyGenerator power(Real p) {
    if (!(p > 1.0)) throw std::invalid_argument("power generator needs p > 1");
    return EntropyGenerator(GeneratorKind::Power, p);
  }
  static EntropyGenerator abs_power(Real p) {
    if (!(p > 1.0)) throw std::invalid_argument("abs_power generator needs p > 1");
    return EntropyGenerator(GeneratorKind::AbsPower, p);
  }
  static EntropyGenerator quadratic() { return EntropyGenerator(GeneratorKind::Quadratic, 2.0); }

  GeneratorKind kind() const { return kind_; }
  Real exponent() const { return p_; }

  /// J = R for the quadratic generator, R+ otherwise.
  bool positive_domain() const { return kind_ != GeneratorKind::Quadratic; }

  bool contains_closure(Real s) const { return !positive_domain() || s >= 0.0; }

  Real psi(Real s) const {
    require_closure(s);
    switch (kind_) {
      case GeneratorKind::Log:
        return s == 0.0 ? 1.0 : s * std::log(s) - s + 1.0;
      case GeneratorKind::Power:
        return std::pow(s, p_) - 1.0 - p_ * (s - 1.0);
      case GeneratorKind::AbsPower:
        return std::pow(std::abs(s - 1.0), p_);
      case GeneratorKind::Quadratic:
        return (s - 1.0) * (s - 1.0);
    }
    return 0.0;
  }

  Real psi_prime(Real s) const {
    require_closure(s);
    switch (kind_) {
      case GeneratorKind::Log:
        if (s == 0.0) throw std::domain_error("psi' of the log generator is unbounded at 0");
        return std::log(s);
      case GeneratorKind::Power:
        return p_ * (std::pow(s, p_ - 1.0) - 1.0);
      case GeneratorKind::AbsPower: {
        const Real d = s - 1.0;
        return d == 0.0 ? 0.0 : p_ * std::pow(std::abs(d), p_ - 1.0) * (d > 0 ? 1.0 : -1.0);
      }
      case GeneratorKind::Quadratic:
        return 2.0 * (s - 1.0);
    }
    return 0.0;
  }

  Real psi_second(Real s) const {
    require_closure(s);
    switch (kind_) {
      case GeneratorKind::Log:
        if (s == 0.0) throw std::domain_error("psi'' of the log generator is unbounded at 0");
        return 1.0 / s;
      case GeneratorKind::Power:
        if (s == 0.0 && p_ < 2.0) throw std::domain_error("psi'' unbounded at 0 for p < 2");
        return p_ * (p_ - 1.0) * std::pow(s, p_ - 2.0);
      case GeneratorKind::AbsPower: {
        const Real d = std::abs(s - 1.0);
        if (d == 0.0 && p_ < 2.0) throw std::domain_error("psi'' unbounded at 1 for p < 2");
        return p_ * (p_ - 1.0) * (p_ == 2.0 ? 1.0 : std::pow(d, p_ - 2.0));
      }
      case GeneratorKind::Quadratic:
        return 2.0;
    }
    return 0.0;
  }

  std::string name() const {
    switch (kind_) {
      case GeneratorKind::Log:
        return "log";
      case GeneratorKind::Power:
        return "power(" + format_double(p_) + ")";
      case GeneratorKind::AbsPower:
        return "abs_power(" + format_double(p_) + ")";
      case GeneratorKind::Quadratic:
        return "quadratic";
    }
    return "?";
  }

 private:
  EntropyGenerator(GeneratorKind kind, Real p) : kind_(kind), p_(p) {}

  void require_closure(Real s) const {
    if (!contains_closure(s)) {
      throw std::domain_error("argument " + format_double(s) + " outside closure of J");
    }
  }

  GeneratorKind kind_;
  Real p_;
};

/// Discrete relative entropy sum_j psi(f_j / f^inf_j) f^inf_j.
inline Real relative_entropy(const Vec& f, const Vec& f_inf, const EntropyGenerator& gen) {
  if (f.size() != f_inf.size()) throw std::invalid_argument("relative_entropy: size mismatch");
  Real sum = 0.0;
  for (int j = 0; j < f.size(); ++j) {
    if (!(f_inf[j] > 0.0)) throw std::invalid_argument("relative_entropy: f_inf must be positive");
    sum += gen.psi(f[j] / f_inf[j]) * f_inf[j];
  }
  return sum;
}

/// Entropy production -d/dt e_psi along df/dt = G f, evaluated at f:
/// I = -sum_j psi'(f_j / f^inf_j) (G f)_j.
inline Real fisher_information(const Vec& f, const Vec& f_inf, const EntropyGenerator& gen,
                               const Mat& generator) {
  if (f.size() != f_inf.size() || generator.rows() != f.size() || generator.cols() != f.size()) {
    throw std::invalid_argument("fisher_information: dimension mismatch");
  }
  const Vec rate = generator * f;
  Real sum = 0.0;
  for (int j = 0; j < f.size(); ++j) {
    sum -= gen.psi_prime(f[j] / f_inf[j]) * rate[j];
  }
  return sum;
}

namespace detail {

/// Ratio of the second-derivative form to the first-derivative form in the
/// entropy admissibility inequality, at a simplex point u; +inf when the
/// denominator vanishes or the point is unusable.
inline Real admissibility_ratio(const Vec& u, const Vec& rho, const EntropyGenerator& gen) {
  const Real inf = std::numeric_limits<Real>::infinity();
  if ((u - rho).norm() < 1e-6) return inf;
  Real lhs = 0.0, rhs = 0.0;
  for (int j = 0; j < u.size(); ++j) {
    if (u[j] < 0.0 || u[j] > 1.0) return inf;
    const Real r = u[j] / rho[j];
    try {
      lhs += gen.psi_second(r) * (rho[j] - u[j]) * (rho[j] - u[j]) / rho[j];
      rhs += gen.psi_prime(r) * (u[j] - rho[j]);
    } catch (const std::domain_error&) {
      return inf;
    }
  }
  if (!(rhs > 1e-14)) return inf;
  return lhs / rhs;
}

}  // namespace detail

/**
 * Best constant mu/(2 lambda) in [0, 1] for the admissibility inequality
 *   sum_j psi''(u_j/rho_j) (rho_j - u_j)^2 / rho_j
 *     >= (mu / 2 lambda) sum_j psi'(u_j/rho_j) (u_j - rho_j)
 * over probability vectors u, found by minimizing the two-sided ratio over
 * the simplex (dense grid for two states, Nelder-Mead refinement on the 50
 * best grid points otherwise). A ball of radius 1e-6 around rho is
 * excluded; there the ratio tends to its quadratic-limit value.
 */
inline Real admissibility_mu(const Vec& rho, const EntropyGenerator& gen) {
  const int n = static_cast<int>(rho.size());
  if (n < 2) throw std::invalid_argument("admissibility_mu: need at least two states");
  Real total = 0.0;
  for (int j = 0; j < n; ++j) {
    if (!(rho[j] > 0.0 && rho[j] < 1.0)) {
      throw std::invalid_argument("admissibility_mu: rho entries must lie in (0,1)");
    }
    total += rho[j];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("admissibility_mu: rho must sum to 1");
  }

  Real best = std::numeric_limits<Real>::infinity();
  if (n == 2) {
    const int grid = 2001;
    Real best_u1 = rho[0];
    for (int i = 0; i < grid; ++i) {
      const Real u1 = 1e-9 + (1.0 - 2e-9) * i / (grid - 1);
      Vec u(2);
      u << u1, 1.0 - u1;
      const Real r = detail::admissibility_ratio(u, rho, gen);
      if (r < best) {
        best = r;
        best_u1 = u1;
      }
    }
    const Real h = (1.0 - 2e-9) / (grid - 1);
    auto line = [&](Real u1) {
      Vec u(2);
      u << u1, 1.0 - u1;
      return detail::admissibility_ratio(u, rho, gen);
    };
    const auto refined = golden_section_min(line, std::max(1e-9, best_u1 - 2 * h),
                                            std::min(1.0 - 1e-9, best_u1 + 2 * h), 1e-12);
    best = std::min(best, refined.second);
  } else {
    // coarse simplex grid, then local refinement from the best candidates
    const int steps = n == 3 ? 120 : 30;
    std::vector<std::pair<Real, Vec>> candidates;
    std::vector<int> idx(n - 1, 0);
    std::function<void(int, Real)> visit = [&](int depth, Real used) {
      if (depth == n - 1) {
        Vec u(n);
        for (int j = 0; j < n - 1; ++j) u[j] = static_cast<Real>(idx[j]) / steps;
        u[n - 1] = 1.0 - used;
        if (u[n - 1] < 0.0) return;
        const Real r = detail::admissibility_ratio(u, rho, gen);
        if (std::isfinite(r)) candidates.emplace_back(r, u);
        return;
      }
      for (idx[depth] = 0; idx[depth] <= steps; ++idx[depth]) {
        const Real val = static_cast<Real>(idx[depth]) / steps;
        if (used + val > 1.0 + 1e-12) break;
        visit(depth + 1, used + val);
      }
    };
    visit(0, 0.0);
    std::sort(candidates.begin(), candidates.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    const int keep = std::min<std::size_t>(50, candidates.size());
    for (int c = 0; c < keep; ++c) {
      auto objective = [&](const Vec& free) {
        Vec u(n);
        Real used = 0.0;
        for (int j = 0; j < n - 1; ++j) {
          u[j] = free[j];
          used += free[j];
        }
        u[n - 1] = 1.0 - used;
        return detail::admissibility_ratio(u, rho, gen);
      };
      const Vec start = candidates[c].second.head(n - 1);
      const auto refined = nelder_mead(objective, start, 0.5 / steps);
      best = std::min(best, refined.second);
    }
  }
  return std::min(best, 1.0);
}

/**
 * Slack of the Csiszar-Kullback bound at exponent p:
 *   p = 1: 2 e_1(f1|f2) - ||f1 - f2||_1^2
 *   p > 1: (2 / p(p-1)) e_p(f1|f2) - ||f1 - f2||_1^2
 * Nonnegative for normalized inputs when p <= 2. For p > 2 the constant
 * 2/p(p-1) is too strong and the slack can dip below zero (witness:
 * f1 = (0.9, 0.1), f2 = (0.5, 0.5), p = 2.5).
 */
inline Real csiszar_kullback_gap(const Vec& f1, const Vec& f2, Real p) {
  if (p < 1.0) throw std::invalid_argument("csiszar_kullback_gap: p >= 1 required");
  if (std::abs(f1.sum() - 1.0) > 1e-9 || std::abs(f2.sum() - 1.0) > 1e-9) {
    throw std::invalid_argument("csiszar_kullback_gap: inputs must have unit mass");
  }
  const Real l1 = (f1 - f2).cwiseAbs().sum();
  if (p == 1.0) {
    return 2.0 * relative_entropy(f1, f2, EntropyGenerator::log_entropy()) - l1 * l1;
  }
  const Real e_p = relative_entropy(f1, f2, EntropyGenerator::power(p));
  return 2.0 / (p * (p - 1.0)) * e_p - l1 * l1;
}

}  // namespace hypobgk
