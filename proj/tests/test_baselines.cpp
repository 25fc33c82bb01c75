#include "afrelay/baselines.hpp"

#include <cmath>

#include "doctest.h"
#include "afrelay/channel.hpp"
#include "afrelay/linalg.hpp"
#include "afrelay/robust_core.hpp"
#include "test_oracles.hpp"

using namespace afrelay;
using namespace afrelay::baselines;
using test_oracles::random_complex;

TEST_CASE("sum-power design rides the principal singular direction") {
  Philox rng(50, 0);
  MatrixXcd h = random_complex(3, 3, rng);
  const double sigma = linalg::principal_singular_triple(h).sigma;
  const int n = 3;

  SUBCASE("zero radius") {
    const auto [w, f] = sum_power_design(h, 0.0, n);
    CHECK(f == doctest::Approx(std::sqrt(3.0) * sigma).epsilon(1e-10));
    CHECK(w.norm() == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
  }
  SUBCASE("radius above the top singular value invalidates") {
    const auto [w, f] = sum_power_design(h, sigma * 1.1, n);
    CHECK(f <= 0.0);
    (void)w;
  }
  SUBCASE("dominates every box-feasible point with the same total budget") {
    for (int k = 0; k < 200; ++k) {
      MatrixXcd hr = random_complex(3, 3, rng);
      const double eps = epsilon_from_rho(hr, rng.next_double() * 0.9);
      const auto [ws, fs] = sum_power_design(hr, eps, n);
      Philox solver_rng(51, k);
      const AlternatingResult run = multistart_solve(hr, eps, 3, solver_rng);
      CHECK(fs >= run.f_value - 1e-10);
    }
  }
  SUBCASE("zero channel rejected") {
    CHECK_THROWS_AS(sum_power_design(MatrixXcd::Zero(2, 2), 0.1, 2),
                    std::invalid_argument);
  }
}

TEST_CASE("perfect-CSI alternation reaches the principal source vector") {
  Philox rng(52, 0);
  for (int k = 0; k < 20; ++k) {
    const int n = 2 + (k % 3);
    MatrixXcd hsr = random_complex(n, n, rng);
    MatrixXcd hrd = random_complex(n, n, rng);
    const VectorXcd b0 = VectorXcd::Constant(n, 1.0 / std::sqrt(double(n)));
    const VectorXcd r0 =
        linalg::principal_eigenpair(hrd * hrd.adjoint()).vector;
    const AlternatingBaselineResult run =
        perfect_csi_alternating(hsr, hrd, b0, r0, 1e-12, 20000);

    const VectorXcd b_opt = source_bf(hsr);
    // Compare up to phase through the aligned inner product.
    CHECK(std::abs(std::abs(run.source.dot(b_opt)) - 1.0) <= 1e-6);

    for (std::size_t i = 1; i < run.trace.size(); ++i) {
      CHECK(run.trace[i] >= run.trace[i - 1] - 1e-12);
    }
  }
}

TEST_CASE("perfect-CSI alternation matches the fresh-design route") {
  Philox rng(53, 0);
  SystemConfig config;
  config.source_antennas = config.dest_antennas = config.relay_antennas = 4;
  config.source_power_w = db_to_linear(20.0);
  config.relay_noise_var = config.dest_noise_var = 1.0;
  config.relay_power_cap_w = db_to_linear(10.0);
  config.mode = DesignMode::kSnrMax;
  for (int k = 0; k < 25; ++k) {
    MatrixXcd hsr = random_complex(4, 4, rng);
    MatrixXcd hrd = random_complex(4, 4, rng);
    const VectorXcd r0 =
        linalg::principal_eigenpair(hrd * hrd.adjoint()).vector;
    const VectorXcd b0 = VectorXcd::Constant(4, 0.5);

    const AlternatingBaselineResult legacy =
        perfect_csi_alternating(hsr, hrd, b0, r0, 1e-11, 20000);
    const VectorXcd w_legacy = equal_power_weights(hrd, legacy.receive);
    const double f_legacy = robust_objective(hrd, w_legacy, 0.0);
    const double snr_legacy = snr_from_parts(
        config.relay_power_cap_w, config.source_power_w,
        (hsr * legacy.source).squaredNorm(), config.relay_noise_var,
        config.dest_noise_var, f_legacy);

    const AlternatingResult fresh = alternating_solve(hrd, 0.0, r0, 1e-11,
                                                      20000);
    const double snr_fresh = snr_from_parts(
        config.relay_power_cap_w, config.source_power_w,
        linalg::principal_eigenpair(hsr.adjoint() * hsr).value,
        config.relay_noise_var, config.dest_noise_var, fresh.f_value);

    CHECK(std::abs(snr_legacy - snr_fresh) <= 1e-8 * snr_fresh);
  }
}

TEST_CASE("perfect-CSI alternation reports non-convergence with its trace") {
  Philox rng(63, 0);
  MatrixXcd hsr = random_complex(3, 3, rng);
  MatrixXcd hrd = random_complex(3, 3, rng);
  const VectorXcd b0 = VectorXcd::Constant(3, 1.0 / std::sqrt(3.0));
  const VectorXcd r0 = random_unit_vector(3, rng);
  try {
    perfect_csi_alternating(hsr, hrd, b0, r0, 1e-15, 2);
    FAIL("expected IterationError");
  } catch (const IterationError& e) {
    CHECK(e.trace().size() == 2);
  }
}

TEST_CASE("adversarial error attains the closed-form inner value") {
  Philox rng(54, 0);
  SUBCASE("zero radius gives the zero matrix") {
    MatrixXcd h = random_complex(2, 2, rng);
    VectorXcd w = random_unit_vector(2, rng);
    VectorXcd r = random_unit_vector(2, rng);
    CHECK(adversarial_error(h, w, r, 0.0).norm() == 0.0);
  }
  SUBCASE("closed form matches on random instances") {
    for (int k = 0; k < 100; ++k) {
      const int n = 2 + (k % 4);
      MatrixXcd h = random_complex(n, n, rng);
      VectorXcd r = random_unit_vector(n, rng);
      const double eps = 0.3 * rng.next_double();
      const InnerSolveResult inner = inner_solve(h, r, eps);
      if (!inner.valid || inner.objective <= 0.0) continue;
      const VectorXcd w = inner.weights();
      const MatrixXcd worst = adversarial_error(h, w, r, eps);
      CHECK(std::abs(worst.norm() - eps) <= 1e-12);
      const double attained = std::abs(r.dot((h + worst) * w));
      const double closed =
          std::max(std::abs(r.dot(h * w)) - eps * w.norm(), 0.0);
      CHECK(std::abs(attained - closed) <= 1e-12 * std::max(1.0, closed));
    }
  }
  SUBCASE("no ball sample does better than the adversary") {
    MatrixXcd h = random_complex(3, 3, rng);
    VectorXcd r = random_unit_vector(3, rng);
    const double eps = 0.4;
    const InnerSolveResult inner = inner_solve(h, r, eps);
    REQUIRE(inner.valid);
    const VectorXcd w = inner.weights();
    const double worst_value =
        std::abs(r.dot((h + adversarial_error(h, w, r, eps)) * w));
    for (int k = 0; k < 10000; ++k) {
      const MatrixXcd error = sample_error_ball(3, 3, eps, rng);
      CHECK(std::abs(r.dot((h + error) * w)) >= worst_value - 1e-12);
    }
  }
  SUBCASE("zero weights rejected") {
    MatrixXcd h = random_complex(2, 2, rng);
    VectorXcd r = random_unit_vector(2, rng);
    CHECK_THROWS_AS(adversarial_error(h, VectorXcd::Zero(2), r, 0.1),
                    std::invalid_argument);
  }
}

TEST_CASE("exhaustive box search") {
  Philox rng(55, 0);
  SUBCASE("single antenna is exact") {
    MatrixXcd h = random_complex(3, 1, rng);
    const double sigma = h.norm();
    const double eps = 0.2;
    const OracleResult result = exhaustive_box_search(h, eps);
    CHECK(result.f_best == doctest::Approx(sigma - eps).epsilon(1e-12));
    CHECK(result.evaluations > 0);
  }
  SUBCASE("identity channel saturates both antennas") {
    // ||I w|| - eps ||w|| = (1 - eps) ||w||, maximal at the box corner.
    const double eps = std::sqrt(0.5);
    const OracleResult result =
        exhaustive_box_search(MatrixXcd::Identity(2, 2), eps);
    CHECK(result.f_best ==
          doctest::Approx(std::sqrt(2.0) * (1.0 - eps)).epsilon(1e-6));
  }
  SUBCASE("box-feasible output consistent with its value") {
    MatrixXcd h = random_complex(2, 2, rng);
    const double eps = epsilon_from_rho(h, 0.5);
    const OracleResult result = exhaustive_box_search(h, eps);
    CHECK(result.w_best.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
    CHECK(robust_objective(h, result.w_best, eps) ==
          doctest::Approx(result.f_best).epsilon(1e-12));
  }
  SUBCASE("too many antennas rejected") {
    CHECK_THROWS_AS(exhaustive_box_search(MatrixXcd::Identity(4, 4), 0.1),
                    std::invalid_argument);
  }
}

TEST_CASE("relaxation sandwich at desk scale") {
  Philox rng(56, 0);
  for (int k = 0; k < 30; ++k) {
    const int n = 2 + (k % 2);
    MatrixXcd h = random_complex(n, n, rng);
    const double rho = (k % 3 == 0) ? 0.1 : (k % 3 == 1 ? 0.5 : 0.8);
    const double eps = epsilon_from_rho(h, rho);

    Philox solver_rng(57, k);
    const AlternatingResult ao = multistart_solve(h, eps, 5, solver_rng);
    const PotdcResult relaxed = potdc_solve(h, eps);
    const OracleResult brute = exhaustive_box_search(h, eps);
    const VectorXcd extracted =
        rank1_extract(relaxed.state.lifted, solver_rng, 200, h, eps);
    const double f_extracted =
        extracted.norm() > 0 ? robust_objective(h, extracted, eps) : 0.0;

    CHECK(ao.f_value <= relaxed.f_relaxed + 1e-6);
    CHECK(f_extracted <= relaxed.f_relaxed + 1e-9);
    CHECK(f_extracted <= brute.f_best * 1.01 + 1e-9);
    CHECK(std::abs(ao.f_value - brute.f_best) <=
          0.01 * std::max(brute.f_best, 1e-9));
  }
}

TEST_CASE("potdc state invariants hold at every outer iteration") {
  Philox rng(58, 0);
  for (int k = 0; k < 10; ++k) {
    const int n = 2 + (k % 3);
    MatrixXcd h = random_complex(n, n, rng);
    const double eps = epsilon_from_rho(h, 0.4);
    const PotdcResult result = potdc_solve(h, eps);
    REQUIRE_FALSE(result.outer_states.empty());
    for (const PotdcState& state : result.outer_states) {
      CHECK(state.q1 >= 0.0);
      CHECK(state.q2 >= 0.0);
      CHECK(state.q2 <= n + 1e-9);
      CHECK(state.q_center > 0.0);
      CHECK(std::abs(state.lifted.real().trace() - state.q2) <= 1e-9);
      for (int i = 0; i < n; ++i) {
        CHECK(state.lifted(i, i).real() <= 1.0 + 1e-9);
      }
      Eigen::SelfAdjointEigenSolver<MatrixXcd> es(state.lifted);
      CHECK(es.eigenvalues().minCoeff() >= -1e-9);
    }
    CHECK((result.outer_states.back().lifted - result.state.lifted).norm() ==
          0.0);
    // The linearized objective trace is monotone up to the stopping slack.
    for (std::size_t i = 1; i < result.objective_trace.size(); ++i) {
      CHECK(result.objective_trace[i] >=
            result.objective_trace[i - 1] - 1e-7);
    }
  }
}

TEST_CASE("potdc at zero radius dominates the alternating value") {
  Philox rng(59, 0);
  MatrixXcd h = random_complex(3, 3, rng);
  const PotdcResult relaxed = potdc_solve(h, 0.0);
  Philox solver_rng(60, 0);
  const AlternatingResult ao = multistart_solve(h, 0.0, 5, solver_rng);
  CHECK(relaxed.f_relaxed >= ao.f_value - 1e-8);
}

TEST_CASE("rank-one extraction") {
  Philox rng(61, 0);
  SUBCASE("recovers a rank-one lifted matrix up to phase") {
    VectorXcd a(3);
    a << std::polar(0.9, 0.3), std::polar(0.5, -1.2), std::polar(1.0, 2.0);
    const MatrixXcd lifted = a * a.adjoint();
    MatrixXcd h = random_complex(3, 3, rng);
    const VectorXcd w = rank1_extract(lifted, rng, 50, h, 0.1);
    CHECK(std::abs(std::abs(w.dot(a)) - a.squaredNorm()) <= 1e-6);
  }
  SUBCASE("output is always box feasible") {
    for (int k = 0; k < 50; ++k) {
      MatrixXcd h = random_complex(3, 3, rng);
      const double eps = epsilon_from_rho(h, 0.6);
      const PotdcResult relaxed = potdc_solve(h, eps);
      const VectorXcd w =
          rank1_extract(relaxed.state.lifted, rng, 50, h, eps);
      CHECK(w.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
    }
  }
  SUBCASE("extraction from a rank-one relaxed solution is exact") {
    int rank_one_seen = 0;
    for (int k = 0; k < 20; ++k) {
      MatrixXcd h = random_complex(2, 2, rng);
      const double eps = epsilon_from_rho(h, 0.1);
      const PotdcResult relaxed = potdc_solve(h, eps);
      Eigen::SelfAdjointEigenSolver<MatrixXcd> es(relaxed.state.lifted);
      if (es.eigenvalues()(0) > 1e-6 * es.eigenvalues()(1)) continue;
      ++rank_one_seen;
      const VectorXcd w =
          rank1_extract(relaxed.state.lifted, rng, 50, h, eps);
      CHECK(robust_objective(h, w, eps) ==
            doctest::Approx(relaxed.f_relaxed).epsilon(1e-6));
    }
    CHECK(rank_one_seen > 0);
  }
}

TEST_CASE("projected-gradient magnitude oracle") {
  Philox rng(62, 0);
  SUBCASE("shutdown regime converges to zero") {
    Eigen::VectorXd gains(3);
    gains << 0.1, 0.2, 0.3;
    const InnerOracleResult result =
        projected_gradient_inner(gains, 10.0 * gains.norm());
    CHECK(std::abs(result.value) <= 1e-8);
  }
  SUBCASE("zero radius saturates everything") {
    Eigen::VectorXd gains(4);
    gains << 0.5, 1.0, 0.2, 0.8;
    const InnerOracleResult result = projected_gradient_inner(gains, 0.0);
    CHECK(result.value == doctest::Approx(gains.sum()).epsilon(1e-9));
    CHECK((result.magnitudes - Eigen::VectorXd::Ones(4)).norm() <= 1e-8);
  }
}
