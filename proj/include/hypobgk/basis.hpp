#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hypobgk/core.hpp"

namespace hypobgk {

/// Centered Maxwellian at temperature T.
inline Real maxwellian(Real v, Real T) {
  return std::exp(-v * v / (2.0 * T)) / std::sqrt(2.0 * kPi * T);
}

/// Probabilists' Hermite polynomial H_m(x), by the three-term recurrence
/// H_{m+1} = x H_m - m H_{m-1}. Overflows around m = 150 for |x| ~ 1;
/// for orthonormal work use HermiteBasis::polynomial instead.
inline Real hermite_polynomial(int m, Real x) {
  if (m < 0) throw std::invalid_argument("hermite_polynomial: m < 0");
  Real prev = 1.0;
  if (m == 0) return prev;
  Real cur = x;
  for (int j = 1; j < m; ++j) {
    const Real next = x * cur - static_cast<Real>(j) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Orthonormal Hermite polynomial p_m(v) = H_m(v/sqrt(T)) / sqrt(m!),
/// satisfying v p_m = sqrt(T) [sqrt(m+1) p_{m+1} + sqrt(m) p_{m-1}].
/// The normalized recurrence keeps every intermediate O(p_m), so there is
/// no factorial overflow.
inline Real hermite_orthonormal_polynomial(int m, Real v, Real T) {
  if (m < 0) throw std::invalid_argument("hermite polynomial index < 0");
  const Real u = v / std::sqrt(T);
  Real prev = 1.0;
  if (m == 0) return prev;
  Real cur = u;
  for (int j = 1; j < m; ++j) {
    const Real next =
        (u * cur - std::sqrt(static_cast<Real>(j)) * prev) / std::sqrt(static_cast<Real>(j + 1));
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Normalized Hermite function: the m-th orthonormal basis element of
/// L^2(M_T^{-1}), with g~_0 = M_T.
inline Real hermite_function(int m, Real v, Real T) {
  return hermite_orthonormal_polynomial(m, v, T) * maxwellian(v, T);
}

/// Gauss quadrature for the weight M_T(v) dv on the real line.
/// Nodes/weights from the Golub-Welsch eigenproblem of the Jacobi matrix;
/// total weight is 1, exact for polynomials of degree <= 2*count - 1.
struct QuadratureRule {
  Vec nodes;
  Vec weights;
};

inline QuadratureRule gauss_hermite(int count, Real T = 1.0) {
  if (count < 1) throw std::invalid_argument("gauss_hermite: count < 1");
  Mat jacobi = Mat::Zero(count, count);
  for (int j = 0; j + 1 < count; ++j) {
    const Real a = std::sqrt(static_cast<Real>(j + 1));
    jacobi(j, j + 1) = a;
    jacobi(j + 1, j) = a;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(jacobi, Eigen::EigenvaluesOnly);
  QuadratureRule rule;
  rule.nodes.resize(count);
  rule.weights.resize(count);
  std::vector<Real> p(count + 1);
  for (int i = 0; i < count; ++i) {
    Real u = es.eigenvalues()[i];
    // Newton polish of the root of p_count, then Christoffel weights
    // w = 1 / sum_{m<count} p_m^2. The eigenvector route loses all relative
    // accuracy in the far tail, where weights underflow past 1e-30.
    for (int it = 0; it < 3; ++it) {
      p[0] = 1.0;
      if (count >= 1) p[1] = u;
      for (int j = 1; j < count; ++j) {
        p[j + 1] = (u * p[j] - std::sqrt(static_cast<Real>(j)) * p[j - 1]) /
                   std::sqrt(static_cast<Real>(j + 1));
      }
      const Real deriv = std::sqrt(static_cast<Real>(count)) * p[count - 1];
      if (deriv == 0.0) break;
      const Real shift = p[count] / deriv;
      u -= shift;
      if (std::abs(shift) < 1e-15 * (1.0 + std::abs(u))) break;
    }
    p[0] = 1.0;
    if (count >= 1) p[1] = u;
    Real christoffel = 1.0;
    for (int j = 1; j < count; ++j) {
      p[j + 1] = (u * p[j] - std::sqrt(static_cast<Real>(j)) * p[j - 1]) /
                 std::sqrt(static_cast<Real>(j + 1));
      christoffel += p[j] * p[j];
    }
    rule.nodes[i] = u * std::sqrt(T);
    rule.weights[i] = 1.0 / christoffel;
  }
  return rule;
}

/// Matrix of multiplication by v on span{g~_0, ..., g~_N}: symmetric
/// tridiagonal, zero diagonal, superdiagonal sqrt(T) sqrt(m+1).
inline Mat velocity_matrix(int order, Real T) {
  if (order < 1) throw std::invalid_argument("velocity_matrix: order < 1");
  Mat m = Mat::Zero(order + 1, order + 1);
  for (int j = 0; j < order; ++j) {
    const Real a = std::sqrt(T) * std::sqrt(static_cast<Real>(j + 1));
    m(j, j + 1) = a;
    m(j + 1, j) = a;
  }
  return m;
}

/// Hermite function basis {g~_0, ..., g~_N} at temperature T.
class HermiteBasis {
 public:
  HermiteBasis(int order, Real temperature) : order_(order), temperature_(temperature) {
    if (order < 1) throw std::invalid_argument("HermiteBasis: order < 1");
    if (!(temperature > 0)) throw std::invalid_argument("HermiteBasis: T <= 0");
  }

  int order() const { return order_; }
  Real temperature() const { return temperature_; }

  Real value(int m, Real v) const { return hermite_function(m, v, temperature_); }
  Real polynomial(int m, Real v) const {
    return hermite_orthonormal_polynomial(m, v, temperature_);
  }

  /// 2N+8 nodes: exact for all inner products of basis polynomials plus
  /// a few extra degrees of margin.
  QuadratureRule quadrature() const { return gauss_hermite(2 * order_ + 8, temperature_); }

  /// Numerical Gram matrix of {g~_m} under the weight M_T^{-1}.
  Mat gram_matrix() const {
    const QuadratureRule rule = quadrature();
    Mat vals(order_ + 1, rule.nodes.size());
    for (int i = 0; i < rule.nodes.size(); ++i) {
      evaluate_polynomials(rule.nodes[i], vals.col(i));
    }
    return vals * rule.weights.asDiagonal() * vals.transpose();
  }

  /// Fills out[0..order] with p_m(v) in one recurrence sweep.
  template <typename Derived>
  void evaluate_polynomials(Real v, Eigen::MatrixBase<Derived> const& out_) const {
    auto& out = const_cast<Eigen::MatrixBase<Derived>&>(out_);
    const Real u = v / std::sqrt(temperature_);
    out(0) = 1.0;
    if (order_ >= 1) out(1) = u;
    for (int j = 1; j < order_; ++j) {
      out(j + 1) = (u * out(j) - std::sqrt(static_cast<Real>(j)) * out(j - 1)) /
                   std::sqrt(static_cast<Real>(j + 1));
    }
  }

 private:
  int order_;
  Real temperature_;
};

inline long long binomial_ll(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;  // wide intermediate: exact through n = 62
  for (int j = 1; j <= k; ++j) {
    r = r * static_cast<unsigned>(n - k + j) / static_cast<unsigned>(j);
  }
  return static_cast<long long>(r);
}

/// Integer coefficients of (1+t)^{n-v} (1-t)^v, i.e. K_{n,m}(v) for
/// m = 0..n, by polynomial multiplication. Exact in 64-bit for n <= 62.
inline std::vector<long long> krawtchouk_row(int n, int v) {
  if (n < 1) throw std::invalid_argument("krawtchouk_row: n < 1");
  if (v < 0 || v > n) throw std::out_of_range("krawtchouk_row: v out of [0, n]");
  std::vector<long long> coeffs(n + 1, 0);
  for (int i = 0; i <= n - v; ++i) coeffs[i] = binomial_ll(n - v, i);
  // multiply by (1 - t)^v one factor at a time
  for (int f = 0; f < v; ++f) {
    for (int m = n; m >= 1; --m) coeffs[m] -= coeffs[m - 1];
  }
  return coeffs;
}

inline long long krawtchouk_ll(int n, int m, int v) {
  if (m < 0 || m > n) throw std::out_of_range("krawtchouk: m out of [0, n]");
  return krawtchouk_row(n, v)[m];
}

inline Real krawtchouk(int n, int m, int v) {
  return static_cast<Real>(krawtchouk_ll(n, m, v));
}

/// Superdiagonal entry (m, m+1) of multiplication by v in the discrete
/// Hermite basis of order n. Tends to sqrt(m+1) as n grows.
inline Real discrete_velocity_entry(long long n, int m) {
  return std::sqrt(static_cast<Real>(m + 1)) *
         std::sqrt(static_cast<Real>(n - m) / static_cast<Real>(n));
}

/// Matrix of multiplication by v in the discrete Hermite basis of order n:
/// symmetric tridiagonal, zero diagonal, superdiagonal
/// sqrt(m+1) sqrt((n-m)/n).
inline Mat discrete_velocity_matrix(int n) {
  if (n < 1) throw std::invalid_argument("discrete_velocity_matrix: n < 1");
  Mat m = Mat::Zero(n + 1, n + 1);
  for (int j = 0; j < n; ++j) {
    const Real a = discrete_velocity_entry(n, j);
    m(j, j + 1) = a;
    m(j + 1, j) = a;
  }
  return m;
}

/// Binomial velocity lattice of order n: nodes v_j = (2j-n)/sqrt(n) with
/// weights 2^-n C(n,j), plus the discrete Hermite polynomials H_{n,m},
/// which are orthonormal for that measure.
class KrawtchoukBasis {
 public:
  explicit KrawtchoukBasis(int order) : order_(order) {
    if (order < 1) throw std::invalid_argument("KrawtchoukBasis: order < 1");
    nodes_.resize(order + 1);
    weights_.resize(order + 1);
    const Real scale = std::pow(2.0, -order);
    for (int j = 0; j <= order; ++j) {
      nodes_[j] = (2.0 * j - order) / std::sqrt(static_cast<Real>(order));
      weights_[j] = scale * static_cast<Real>(binomial_ll(order, j));
    }
    values_.resize(order + 1, order + 1);
    for (int j = 0; j <= order; ++j) {
      const auto row = krawtchouk_row(order, j);
      for (int m = 0; m <= order; ++m) {
        const Real sign = (m % 2 == 0) ? 1.0 : -1.0;
        values_(m, j) =
            sign * static_cast<Real>(row[m]) / std::sqrt(static_cast<Real>(binomial_ll(order, m)));
      }
    }
  }

  int order() const { return order_; }
  const Vec& nodes() const { return nodes_; }
  const Vec& weights() const { return weights_; }

  /// H_{n,m} evaluated at node j.
  Real discrete_hermite(int m, int j) const { return values_(m, j); }

  Mat gram_matrix() const { return values_ * weights_.asDiagonal() * values_.transpose(); }

 private:
  int order_;
  Vec nodes_;
  Vec weights_;
  Mat values_;  // (m, j)
};

}  // namespace hypobgk
