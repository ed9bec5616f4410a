#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "hypobgk/core.hpp"

namespace hypobgk {

/// Golden-section minimization of a unimodal function on [a, b].
template <typename Fn>
std::pair<Real, Real> golden_section_min(Fn&& fn, Real a, Real b, Real tol) {
  const Real inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  Real x1 = b - inv_phi * (b - a);
  Real x2 = a + inv_phi * (b - a);
  Real f1 = fn(x1);
  Real f2 = fn(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = fn(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = fn(x2);
    }
  }
  const Real x = 0.5 * (a + b);
  return {x, fn(x)};
}

/// Root of a continuous scalar function on a bracketing interval, by
/// bisection. Requires fn(a) and fn(b) of opposite sign.
template <typename Fn>
Real bisect_root(Fn&& fn, Real a, Real b, int iterations = 200) {
  Real fa = fn(a);
  Real fb = fn(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0)) throw std::invalid_argument("bisect_root: no sign change");
  for (int i = 0; i < iterations; ++i) {
    const Real mid = 0.5 * (a + b);
    const Real fm = fn(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (fa > 0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

/// Largest x in [lo, hi] for which pred holds, assuming pred is true on
/// [lo, x*] and false beyond. pred(lo) must hold.
template <typename Pred>
Real bisect_largest(Pred&& pred, Real lo, Real hi, int iterations = 100) {
  if (!pred(lo)) throw std::invalid_argument("bisect_largest: pred(lo) is false");
  if (pred(hi)) return hi;
  for (int i = 0; i < iterations; ++i) {
    const Real mid = 0.5 * (lo + hi);
    if (pred(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

/// Nelder-Mead simplex minimization in d dimensions.
template <typename Fn>
std::pair<Vec, Real> nelder_mead(Fn&& fn, const Vec& start, Real step, int max_iter = 400) {
  const int d = static_cast<int>(start.size());
  std::vector<Vec> pts(d + 1, start);
  std::vector<Real> vals(d + 1);
  for (int i = 1; i <= d; ++i) pts[i][i - 1] += step;
  for (int i = 0; i <= d; ++i) vals[i] = fn(pts[i]);

  auto order = [&] {
    for (int i = 1; i <= d; ++i) {
      Vec p = pts[i];
      Real v = vals[i];
      int j = i - 1;
      while (j >= 0 && vals[j] > v) {
        pts[j + 1] = pts[j];
        vals[j + 1] = vals[j];
        --j;
      }
      pts[j + 1] = std::move(p);
      vals[j + 1] = v;
    }
  };
  order();

  for (int it = 0; it < max_iter; ++it) {
    Vec centroid = Vec::Zero(d);
    for (int i = 0; i < d; ++i) centroid += pts[i];
    centroid /= d;

    const Vec reflected = centroid + (centroid - pts[d]);
    const Real fr = fn(reflected);
    if (fr < vals[0]) {
      const Vec expanded = centroid + 2.0 * (centroid - pts[d]);
      const Real fe = fn(expanded);
      if (fe < fr) {
        pts[d] = expanded;
        vals[d] = fe;
      } else {
        pts[d] = reflected;
        vals[d] = fr;
      }
    } else if (fr < vals[d - 1]) {
      pts[d] = reflected;
      vals[d] = fr;
    } else {
      const Vec contracted = centroid + 0.5 * (pts[d] - centroid);
      const Real fc = fn(contracted);
      if (fc < vals[d]) {
        pts[d] = contracted;
        vals[d] = fc;
      } else {
        for (int i = 1; i <= d; ++i) {
          pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
          vals[i] = fn(pts[i]);
        }
      }
    }
    order();
    if (std::abs(vals[d] - vals[0]) < 1e-14 * (1.0 + std::abs(vals[0]))) break;
  }
  return {pts[0], vals[0]};
}

}  // namespace hypobgk
