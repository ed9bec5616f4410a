#include "hypobgk/simulator.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace hypobgk;
using Catch::Approx;

TEST_CASE("spectral states") {
  SECTION("random states satisfy the bookkeeping invariants") {
    const auto s = random_state(8, 12, 1.0, 42);
    CHECK(s.reality_defect() == 0.0);
    CHECK(s.sigma0() == 0.0);
    CHECK(s.tau0() == 0.0);
    CHECK(s.l2_norm_squared() > 0.0);
  }

  SECTION("generation is deterministic in the seed") {
    const auto a = random_state(5, 9, 1.0, 7);
    const auto b = random_state(5, 9, 1.0, 7);
    CHECK((a.coeffs - b.coeffs).cwiseAbs().maxCoeff() == 0.0);
    const auto c = random_state(5, 9, 1.0, 8);
    CHECK((a.coeffs - c.coeffs).cwiseAbs().maxCoeff() > 0.0);
  }

  SECTION("moment fields match the coefficient identities") {
    const auto s = random_state(4, 8, 1.3, 5);
    const auto m = moments(s);
    for (int k = -4; k <= 4; ++k) {
      CHECK(std::abs(m.sigma[s.col(k)] - s.coeff(k, 0)) < 1e-15);
      CHECK(std::abs(m.tau[s.col(k)] - (std::sqrt(2.0) * 1.3 * s.coeff(k, 2) +
                                        1.3 * s.coeff(k, 0))) < 1e-15);
    }
  }
}

TEST_CASE("exact linear stepping") {
  SECTION("equilibrium is a fixed point") {
    auto s = SpectralState::zero(4, 8);
    LinearPropagator prop(FlowModel::Linear, 4, 8);
    prop.step(s, 0.37);
    CHECK(s.l2_norm_squared() == 0.0);
    CHECK(s.time == Approx(0.37));
  }

  SECTION("transformed norm of a certified mode never increases") {
    Rng rng(3);
    const int order = 16;
    LinearPropagator prop(FlowModel::Linear, 2, order);
    const CMat p = build_Pk(1, PkAnsatz::two_block(0.4684), order + 1);
    for (int trial = 0; trial < 20; ++trial) {
      auto s = SpectralState::zero(2, order);
      for (int m = 0; m <= order; ++m) {
        s.coeffs(m, s.col(1)) = Complex(rng.symmetric(), rng.symmetric()) / (1.0 + m);
      }
      s.enforce_reality();
      Real prev = std::numeric_limits<Real>::infinity();
      for (int step = 0; step < 25; ++step) {
        const CVec u = s.coeffs.col(s.col(1));
        const Real norm_p = std::real((u.adjoint() * p * u)(0, 0));
        CHECK(norm_p <= prev * (1 + 1e-12));
        prev = norm_p;
        prop.step(s, 0.08);
      }
    }
  }

  SECTION("k = 0 relaxes channelwise off the conserved channels") {
    auto s = SpectralState::zero(3, 9);
    for (int m = 0; m <= 9; ++m) s.coeffs(m, s.col(0)) = 1.0;
    s.coeffs(0, s.col(0)) = 0.0;
    s.coeffs(2, s.col(0)) = 0.0;
    LinearPropagator prop(FlowModel::Linearized, 3, 9);
    prop.step(s, 0.5);
    for (int m : {1, 3, 4, 5, 6, 7, 8, 9}) {
      CHECK(std::abs(s.coeff(0, m) - std::exp(-0.5)) < 1e-14);
    }
    CHECK(s.coeff(0, 0) == Complex(0, 0));
    CHECK(s.coeff(0, 2) == Complex(0, 0));
  }

  SECTION("reality is preserved along steps") {
    auto s = random_state(6, 10, 1.0, 11);
    LinearPropagator prop(FlowModel::Linear, 6, 10);
    for (int step = 0; step < 40; ++step) prop.step(s, 0.05);
    CHECK(s.reality_defect() < 1e-14);
  }
}

TEST_CASE("linearized gain term") {
  SECTION("pure m = 1 content produces no gain") {
    auto s = SpectralState::zero(3, 8);
    s.coeffs(1, s.col(2)) = Complex(0.3, -0.1);
    s.coeffs(1, s.col(-2)) = Complex(0.3, 0.1);
    CHECK(gain_linearized(s).cwiseAbs().maxCoeff() == 0.0);
  }

  SECTION("density bump with zero pressure deviation") {
    // sigma_k = 1, tau_k = 0 corresponds to h_{k,0} = 1, h_{k,2} = -1/sqrt(2)
    auto s = SpectralState::zero(2, 8);
    s.coeffs(0, s.col(1)) = 1.0;
    s.coeffs(2, s.col(1)) = -1.0 / std::sqrt(2.0);
    s.enforce_reality();
    const CMat gain = gain_linearized(s);
    CHECK(std::abs(gain(0, s.col(1)) - Complex(1.0, 0.0)) < 1e-15);
    CHECK(std::abs(gain(2, s.col(1)) - Complex(-1.0 / std::sqrt(2.0), 0.0)) < 1e-15);
    for (int m : {1, 3, 4, 5, 6, 7, 8}) CHECK(std::abs(gain(m, s.col(1))) == 0.0);
  }

  SECTION("gain minus state equals the collision diagonal action") {
    const auto s = random_state(5, 10, 1.0, 23);
    const CMat gain = gain_linearized(s);
    const Vec diag = collision_diagonal(true, 11);
    const CMat expected = diag.cast<Complex>().asDiagonal() * s.coeffs;
    CHECK((gain - s.coeffs - expected).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("local Maxwellian projection") {
  SECTION("zero perturbation gives the equilibrium coefficients") {
    const Mat c = local_maxwellian_project(Vec::Zero(3), Vec::Zero(3), 12, 1.0);
    for (int j = 0; j < 3; ++j) {
      CHECK(c(0, j) == Approx(1.0).margin(1e-13));
      for (int m = 1; m <= 12; ++m) CHECK(std::abs(c(m, j)) < 1e-13);
    }
  }

  SECTION("projection reproduces density and pressure") {
    Vec sigma(4), tau(4);
    sigma << -0.2, 0.0, 0.15, 0.4;
    tau << 0.1, -0.05, 0.0, 0.3;
    const Real T = 1.2;
    const Mat c = local_maxwellian_project(sigma, tau, 20, T);
    for (int j = 0; j < 4; ++j) {
      CHECK(c(0, j) == Approx(1.0 + sigma[j]).margin(1e-10));
      CHECK(std::sqrt(2.0) * T * c(2, j) + T * c(0, j) == Approx(T + tau[j]).margin(1e-10));
    }
  }

  SECTION("reconstruction matches the closed form pointwise") {
    const Real T = 1.0;
    Vec sigma(1), tau(1);
    sigma << 0.1;
    tau << 0.05;
    const int order = 40;
    const Mat c = local_maxwellian_project(sigma, tau, order, T);
    const HermiteBasis basis(order, T);
    const Real rho = 1.0 + sigma[0];
    const Real pressure = T + tau[0];
    for (Real v : {-2.5, -1.0, 0.0, 0.8, 3.0}) {
      Real recon = 0.0;
      for (int m = 0; m <= order; ++m) recon += c(m, 0) * basis.value(m, v);
      const Real exact = std::pow(rho, 1.5) / std::sqrt(2.0 * kPi * pressure) *
                         std::exp(-v * v * rho / (2.0 * pressure));
      CHECK(recon == Approx(exact).margin(1e-10));
    }
  }

  SECTION("quadratic approach to the linear gain") {
    const int order = 24;
    auto deviation = [&](Real eps) {
      Vec sigma(1), tau(1);
      sigma << 0.7 * eps;
      tau << -0.4 * eps;
      const Mat c = local_maxwellian_project(sigma, tau, order, 1.0);
      Vec linear = Vec::Zero(order + 1);
      linear[0] = 1.0 + sigma[0];
      linear[2] = (tau[0] - sigma[0]) / std::sqrt(2.0);
      return (c.col(0) - linear).norm();
    };
    const Real e1 = deviation(1e-2);
    const Real e2 = deviation(2e-2);
    CHECK(e2 / e1 == Approx(4.0).margin(0.25));
  }

  SECTION("nonpositive density or pressure aborts") {
    Vec sigma(1), tau(1);
    sigma << -1.5;
    tau << 0.0;
    CHECK_THROWS_AS(local_maxwellian_project(sigma, tau, 8, 1.0), BlowupError);
    sigma << 0.0;
    tau << -2.0;
    CHECK_THROWS_AS(local_maxwellian_project(sigma, tau, 8, 1.0), BlowupError);
  }
}

TEST_CASE("nonlinear stepping") {
  SECTION("global equilibrium is a fixed point") {
    auto s = SpectralState::zero(4, 10);
    NonlinearStepper stepper(4, 10);
    stepper.step(s, 0.01);
    CHECK(s.l2_norm_squared() < 1e-28);
  }

  SECTION("mass and energy are conserved") {
    auto s = random_state(4, 12, 1.0, 19);
    s.scale(1e-2 / std::sqrt(s.sobolev_norm_squared(1.0)));
    NonlinearStepper stepper(4, 12);
    for (int step = 0; step < 300; ++step) stepper.step(s, 1e-3);
    CHECK(std::abs(s.sigma0()) < 1e-13);
    CHECK(std::abs(s.tau0()) < 1e-13);
    CHECK(s.reality_defect() < 1e-14);
  }

  SECTION("second-order self-convergence in dt") {
    auto initial = random_state(4, 12, 1.0, 31);
    initial.scale(1e-2 / std::sqrt(initial.sobolev_norm_squared(1.0)));
    NonlinearStepper stepper(4, 12);
    const Real t_end = 0.4;
    auto run = [&](Real dt) {
      auto s = initial;
      const int steps = static_cast<int>(std::llround(t_end / dt));
      for (int i = 0; i < steps; ++i) stepper.step(s, dt);
      return s;
    };
    const auto ref = run(t_end / 1024.0);
    const Real err1 = (run(t_end / 64.0).coeffs - ref.coeffs).norm();
    const Real err2 = (run(t_end / 128.0).coeffs - ref.coeffs).norm();
    CHECK(err1 / err2 == Approx(4.0).margin(0.6));
  }
}

TEST_CASE("remainder of the local Maxwellian expansion") {
  SECTION("zero at equilibrium") {
    const auto s = SpectralState::zero(3, 10);
    CHECK(remainder_norm(s, 0.0) < 1e-13);
    CHECK(remainder_norm(s, 1.0) < 1e-13);
  }

  SECTION("quadratic scaling in the perturbation size") {
    const auto base = random_state(6, 24, 1.0, 47);
    const Real base_norm = std::sqrt(base.sobolev_norm_squared(1.0));
    Real ratios[2];
    int idx = 0;
    for (Real eps : {1e-2, 1e-3}) {
      auto s = base;
      s.scale(eps / base_norm);
      ratios[idx++] = remainder_norm(s, 1.0) / s.sobolev_norm_squared(1.0);
    }
    CHECK(std::abs(ratios[0] - ratios[1]) / ratios[1] < 0.05);
  }

  SECTION("path second derivative matches a central difference") {
    for (Real s : {0.0, 0.3, 0.8}) {
      for (Real v : {-1.7, 0.0, 0.6, 2.2}) {
        const Real sigma = 0.12, tau = -0.07, T = 1.0;
        const Real h = 1e-4;
        const Real fd = (local_maxwellian_path(s + h, sigma, tau, v, T) -
                         2.0 * local_maxwellian_path(s, sigma, tau, v, T) +
                         local_maxwellian_path(s - h, sigma, tau, v, T)) /
                        (h * h);
        CHECK(local_maxwellian_path_dss(s, sigma, tau, v, T) == Approx(fd).margin(1e-8));
      }
    }
  }
}

TEST_CASE("simulation driver") {
  SECTION("linear model: monotone entropy, rate, and sandwich") {
    auto s = random_state(8, 20, 1.0, 101);
    const auto functional = EntropyFunctional::mass_only();
    const auto result = simulate(FlowModel::Linear, s, 0.02, 12.0, 10, functional);
    CHECK(result.fitted_rate_e >= 0.5475);
    Real prev = std::numeric_limits<Real>::infinity();
    for (const auto& row : result.rows) {
      CHECK(row.e <= prev * (1 + 1e-12));
      prev = row.e;
      CHECK(std::abs(row.sigma0) < 1e-14);
      // coarse sandwich from the P spectrum: (1/2) e <= ||h||^2 <= 4 e
      const Real h2 = row.l2_norm * row.l2_norm;
      if (row.e > 1e-20) {
        CHECK(h2 >= 0.5 * row.e - 1e-15);
        CHECK(h2 <= 4.0 * row.e + 1e-15);
      }
    }
  }

  SECTION("linearized model: e_gamma decay and two-sided norm equivalence") {
    auto s = random_state(8, 20, 1.0, 103);
    const auto functional = EntropyFunctional::energy_conserving(1.0);
    const auto result = simulate(FlowModel::Linearized, s, 0.02, 12.0, 10, functional);
    CHECK(result.fitted_rate_e_gamma >= 0.0412);
    Real prev = std::numeric_limits<Real>::infinity();
    auto state_copy = s;  // recompute sobolev norms along the run
    LinearPropagator prop(FlowModel::Linearized, 8, 20);
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
      const auto& row = result.rows[i];
      CHECK(row.e_gamma <= prev * (1 + 1e-12));
      prev = row.e_gamma;
      if (i > 0) {
        for (int rep = 0; rep < 10; ++rep) prop.step(state_copy, 0.02);
      }
      const Real h2 = state_copy.sobolev_norm_squared(1.0);
      if (row.e_gamma > 1e-20) {
        // from (2/3) I <= P <= (4/3) I
        CHECK(h2 >= 0.75 * row.e_gamma - 1e-15);
        CHECK(h2 <= 1.5 * row.e_gamma + 1e-15);
      }
      CHECK(std::abs(row.tau0) < 1e-14);
    }
  }

  SECTION("nonlinear model: certified decay at small amplitude") {
    auto s = random_state(6, 16, 1.0, 107);
    s.scale(1e-2 / std::sqrt(s.sobolev_norm_squared(1.0)));
    const auto functional = EntropyFunctional::energy_conserving(1.0);
    const auto result = simulate(FlowModel::Nonlinear, s, 2e-3, 10.0, 100, functional);
    const Real e0 = result.rows.front().e_gamma;
    for (const auto& row : result.rows) {
      CHECK(row.e_gamma <= std::exp(-row.t / 25.0) * e0 * (1 + 1e-9));
      CHECK(std::abs(row.sigma0) < 1e-12);
      CHECK(std::abs(row.tau0) < 1e-12);
    }
    CHECK(result.initial_remainder_ratio > 0.0);
  }

  SECTION("identical runs produce identical traces") {
    auto a = simulate(FlowModel::Linear, random_state(4, 10, 1.0, 55), 0.05, 2.0, 5,
                      EntropyFunctional::mass_only());
    auto b = simulate(FlowModel::Linear, random_state(4, 10, 1.0, 55), 0.05, 2.0, 5,
                      EntropyFunctional::mass_only());
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
      CHECK(a.rows[i].e == b.rows[i].e);
      CHECK(a.rows[i].l2_norm == b.rows[i].l2_norm);
    }
  }
}

TEST_CASE("two-velocity transport runs") {
  SECTION("sigma = 1: sharp rate 1/2") {
    const auto run = simulate_two_velocity(1.0, 8, 0.01, 25.0, 10, 71);
    CHECK(run.certified_rate == Approx(0.5).margin(1e-12));
    CHECK(run.fitted_norm_rate == Approx(0.5).margin(1e-3));
  }

  SECTION("sigma = 0.4: rate 0.2 from the slow real branch") {
    const auto run = simulate_two_velocity(0.4, 8, 0.01, 100.0, 10, 73);
    CHECK(run.certified_rate == Approx(0.2).margin(1e-12));
    CHECK(run.fitted_norm_rate == Approx(0.2).margin(1e-3));
  }

  SECTION("transformed norm is monotone") {
    const auto run = simulate_two_velocity(0.7, 6, 0.02, 10.0, 5, 77);
    Real prev = std::numeric_limits<Real>::infinity();
    for (const auto& row : run.rows) {
      CHECK(row.e <= prev * (1 + 1e-12));
      prev = row.e;
    }
  }
}
