#include "hypobgk/basis.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace hypobgk;
using Catch::Approx;

TEST_CASE("hermite function low orders match closed forms") {
  for (Real T : {0.5, 1.0, 2.0}) {
    for (Real v : {-3.1, -0.4, 0.0, 0.7, 2.5}) {
      CHECK(hermite_function(0, v, T) == Approx(maxwellian(v, T)).margin(1e-14));
      CHECK(hermite_function(2, v, T) ==
            Approx((v * v - T) / (std::sqrt(2.0) * T) * maxwellian(v, T)).margin(1e-14));
    }
    CHECK(hermite_function(1, 0.0, T) == 0.0);
  }
}

TEST_CASE("hermite functions are orthonormal under M_T^{-1}") {
  for (Real T : {0.5, 1.0, 2.0}) {
    HermiteBasis basis(40, T);
    const Mat gram = basis.gram_matrix();
    const Mat dev = gram - Mat::Identity(41, 41);
    CHECK(dev.cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("velocity matrix") {
  SECTION("superdiagonal values") {
    const Mat m3 = velocity_matrix(3, 1.0);
    CHECK(m3(0, 1) == Approx(std::sqrt(1.0)));
    CHECK(m3(1, 2) == Approx(std::sqrt(2.0)));
    CHECK(m3(2, 3) == Approx(std::sqrt(3.0)));
    CHECK(m3.diagonal().cwiseAbs().maxCoeff() == 0.0);
    CHECK((m3 - m3.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(velocity_matrix(1, 4.0)(0, 1) == Approx(2.0));
  }

  SECTION("applied to e0 gives sqrt(T) e1") {
    const Real T = 1.7;
    const Mat m = velocity_matrix(4, T);
    Vec e0 = Vec::Zero(5);
    e0[0] = 1.0;
    const Vec out = m * e0;
    CHECK(out[1] == Approx(std::sqrt(T)));
    CHECK(std::abs(out[0]) + std::abs(out[2]) + std::abs(out[3]) == 0.0);
  }

  SECTION("reproduces multiplication by v pointwise") {
    for (Real T : {0.5, 1.0, 2.0}) {
      const int order = 12;
      HermiteBasis basis(order, T);
      const Mat m = velocity_matrix(order, T);
      const Real lim = 6.0 * std::sqrt(T);
      for (Real v = -lim; v <= lim; v += lim / 16.0) {
        for (int j = 0; j + 1 <= order; ++j) {
          Real recon = m(j, j + 1) * basis.value(j + 1, v);
          if (j > 0) recon += m(j, j - 1) * basis.value(j - 1, v);
          CHECK(std::abs(v * basis.value(j, v) - recon) < 1e-9);
        }
      }
    }
  }
}

TEST_CASE("krawtchouk generating-function coefficients") {
  SECTION("m = 0 coefficient is 1, m = 1 is n - 2v") {
    for (int n : {1, 3, 7, 12}) {
      for (int v = 0; v <= n; ++v) {
        CHECK(krawtchouk_ll(n, 0, v) == 1);
        CHECK(krawtchouk_ll(n, 1, v) == n - 2 * v);
      }
    }
  }

  SECTION("leading coefficient has sign (-1)^m") {
    // K_{n,n}(v) = coefficient of t^n in (1+t)^{n-v}(1-t)^v: sign (-1)^v,
    // and the leading coefficient in v alternates with m; check via the
    // highest-degree difference K(v+1)-K(v) repeated m times.
    const int n = 6;
    for (int m = 0; m <= n; ++m) {
      // m-th finite difference of a degree-m polynomial equals m! * leading
      long long diff[7];
      for (int v = 0; v <= n; ++v) diff[v] = krawtchouk_ll(n, m, v);
      for (int pass = 0; pass < m; ++pass) {
        for (int v = 0; v + 1 <= n - pass; ++v) diff[v] = diff[v + 1] - diff[v];
      }
      const long long lead = diff[0];
      CHECK((m % 2 == 0 ? lead > 0 : lead < 0));
    }
  }

  SECTION("orthogonality, exact in integers for n <= 12") {
    for (int n : {2, 5, 9, 12}) {
      for (int m = 0; m <= n; ++m) {
        for (int l = 0; l <= m; ++l) {
          long long sum = 0;  // sum_j C(n,j) K_m(j) K_l(j) = 2^n C(n,m) delta
          for (int j = 0; j <= n; ++j) {
            sum += binomial_ll(n, j) * krawtchouk_ll(n, m, j) * krawtchouk_ll(n, l, j);
          }
          const long long expected = (m == l) ? (1ll << n) * binomial_ll(n, m) : 0;
          CHECK(sum == expected);
        }
      }
    }
  }

  SECTION("orthogonality in floating point") {
    const int n = 12;
    const Real scale = std::pow(2.0, -n);
    for (int m = 0; m <= n; ++m) {
      for (int l = 0; l <= m; ++l) {
        Real sum = 0;
        for (int j = 0; j <= n; ++j) {
          sum += scale * static_cast<Real>(binomial_ll(n, j)) * krawtchouk(n, m, j) *
                 krawtchouk(n, l, j);
        }
        const Real expected = (m == l) ? static_cast<Real>(binomial_ll(n, m)) : 0.0;
        CHECK(std::abs(sum - expected) < 1e-10 * std::max(1.0, expected));
      }
    }
  }

  SECTION("index out of range") {
    CHECK_THROWS_AS(krawtchouk(4, 5, 0), std::out_of_range);
    CHECK_THROWS_AS(krawtchouk(4, -1, 0), std::out_of_range);
    CHECK_THROWS_AS(krawtchouk(4, 2, 5), std::out_of_range);
  }
}

TEST_CASE("discrete hermite basis") {
  SECTION("orthonormal under the binomial measure") {
    for (int n : {1, 4, 10, 20}) {
      KrawtchoukBasis basis(n);
      const Mat dev = basis.gram_matrix() - Mat::Identity(n + 1, n + 1);
      CHECK(dev.cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  SECTION("recurrence matches the velocity matrix entries") {
    const int n = 7;
    KrawtchoukBasis basis(n);
    const Mat vmat = discrete_velocity_matrix(n);
    for (int j = 0; j <= n; ++j) {
      const Real v = basis.nodes()[j];
      for (int m = 0; m <= n; ++m) {
        Real recon = 0;
        if (m + 1 <= n) recon += vmat(m, m + 1) * basis.discrete_hermite(m + 1, j);
        if (m - 1 >= 0) recon += vmat(m, m - 1) * basis.discrete_hermite(m - 1, j);
        CHECK(std::abs(v * basis.discrete_hermite(m, j) - recon) < 1e-11);
      }
    }
  }
}

TEST_CASE("discrete velocity matrix") {
  SECTION("superdiagonal for n = 4 and n = 1") {
    const Mat m4 = discrete_velocity_matrix(4);
    CHECK(m4(0, 1) == Approx(1.0));
    CHECK(m4(1, 2) == Approx(std::sqrt(1.5)));
    CHECK(m4(2, 3) == Approx(std::sqrt(1.5)));
    CHECK(m4(3, 4) == Approx(1.0));
    CHECK(discrete_velocity_matrix(1)(0, 1) == Approx(1.0));
  }

  SECTION("eigenvalues are exactly the node set") {
    for (int n = 1; n <= 20; ++n) {
      KrawtchoukBasis basis(n);
      Eigen::SelfAdjointEigenSolver<Mat> es(discrete_velocity_matrix(n), Eigen::EigenvaluesOnly);
      Vec nodes = basis.nodes();
      std::sort(nodes.begin(), nodes.end());
      CHECK((es.eigenvalues() - nodes).cwiseAbs().maxCoeff() < 1e-10);
    }
  }

  SECTION("entries converge to the continuous ones") {
    const long long n = 1000000;
    for (int m = 0; m <= 5; ++m) {
      CHECK(std::abs(discrete_velocity_entry(n, m) - std::sqrt(static_cast<Real>(m + 1))) < 1e-5);
    }
  }
}

TEST_CASE("gauss hermite quadrature integrates moments") {
  const QuadratureRule rule = gauss_hermite(24, 1.3);
  CHECK(rule.weights.sum() == Approx(1.0).margin(1e-13));
  // even moments of M_T: E v^2 = T, E v^4 = 3 T^2
  const Real m2 = (rule.nodes.array().square() * rule.weights.array()).sum();
  const Real m4 = (rule.nodes.array().pow(4) * rule.weights.array()).sum();
  CHECK(m2 == Approx(1.3).margin(1e-12));
  CHECK(m4 == Approx(3.0 * 1.3 * 1.3).margin(1e-11));
}
