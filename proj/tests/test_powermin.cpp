#include "afrelay/powermin.hpp"

#include <cmath>

#include "doctest.h"
#include "afrelay/errors.hpp"
#include "afrelay/linalg.hpp"
#include "test_oracles.hpp"

using namespace afrelay;
using test_oracles::random_complex;

namespace {

SystemConfig powermin_config(int n, double gamma0_db = 15.0) {
  SystemConfig config;
  config.source_antennas = config.dest_antennas = config.relay_antennas = n;
  config.source_power_w = db_to_linear(20.0);
  config.relay_noise_var = 1.0;
  config.dest_noise_var = 1.0;
  config.snr_target = db_to_linear(gamma0_db);
  config.mode = DesignMode::kPowerMin;
  return config;
}

}  // namespace

TEST_CASE("feasibility conditions") {
  Philox rng(30, 0);
  MatrixXcd hsr = random_complex(3, 3, rng);
  SystemConfig config = powermin_config(3);

  CHECK_FALSE(power_min_feasible(hsr, config, 0.0));
  CHECK_FALSE(power_min_feasible(hsr, config, -1.0));
  CHECK(power_min_feasible(hsr, config, 0.5));

  const double cap = config.source_power_w *
                     linalg::principal_eigenpair(hsr.adjoint() * hsr).value /
                     config.relay_noise_var;
  SystemConfig greedy = config;
  greedy.snr_target = cap * 1.5;
  CHECK_FALSE(power_min_feasible(hsr, greedy, 0.5));
  greedy.snr_target = cap * (1.0 - 1e-9);  // inside the rejection headroom
  CHECK_FALSE(power_min_feasible(hsr, greedy, 0.5));
}

TEST_CASE("required power inverts the SNR formula") {
  Philox rng(31, 0);
  const SystemConfig config = powermin_config(4);
  for (int k = 0; k < 100; ++k) {
    MatrixXcd hsr = random_complex(4, 4, rng);
    const VectorXcd b = source_bf(hsr);
    const double gain2 = (hsr * b).squaredNorm();
    const double f = 0.2 + rng.next_double() * 3.0;
    const double cap = required_power(hsr, b, config.snr_target, f,
                                      config.relay_noise_var,
                                      config.dest_noise_var,
                                      config.source_power_w);
    CHECK(cap > 0.0);
    const double snr = snr_from_parts(cap, config.source_power_w, gain2,
                                      config.relay_noise_var,
                                      config.dest_noise_var, f);
    CHECK(std::abs(snr - config.snr_target) <= 1e-9 * config.snr_target);
  }
}

TEST_CASE("required power limits") {
  Philox rng(32, 0);
  MatrixXcd hsr = random_complex(3, 3, rng);
  const VectorXcd b = source_bf(hsr);
  const SystemConfig config = powermin_config(3);
  const double f = 1.3;

  SUBCASE("vanishing target needs vanishing power") {
    const double tiny =
        required_power(hsr, b, 1e-9, f, 1.0, 1.0, config.source_power_w);
    CHECK(tiny > 0.0);
    CHECK(tiny < 1e-6);
  }
  SUBCASE("doubling a low target roughly doubles the power") {
    const double gain2 = (hsr * b).squaredNorm();
    const double cap = config.source_power_w * gain2 / 1.0;
    const double target = 0.01 * cap;
    const double p1 =
        required_power(hsr, b, target, f, 1.0, 1.0, config.source_power_w);
    const double p2 = required_power(hsr, b, 2.0 * target, f, 1.0, 1.0,
                                     config.source_power_w);
    CHECK(p2 / p1 == doctest::Approx(2.0).epsilon(0.05));
  }
  SUBCASE("violated conditions name themselves") {
    CHECK_THROWS_AS(
        required_power(hsr, b, config.snr_target, 0.0, 1.0, 1.0, 100.0),
        InfeasibleError);
    CHECK_THROWS_AS(required_power(hsr, b, 1e12, f, 1.0, 1.0, 100.0),
                    InfeasibleError);
  }
}

TEST_CASE("power-min design meets the target exactly") {
  Philox rng(33, 0);
  const SystemConfig config = powermin_config(4);
  int feasible_count = 0;
  for (int k = 0; k < 50; ++k) {
    MatrixXcd hsr = random_complex(4, 4, rng);
    MatrixXcd hrd = random_complex(4, 4, rng);
    const double eps = epsilon_from_rho(hrd, 0.3);
    Philox solver_rng(34, k);
    const PowerMinResult result = power_min_design(
        hsr, hrd, eps, config.snr_target, config, 3, solver_rng);
    if (!result.feasible) continue;
    ++feasible_count;
    CHECK(result.required_power_w > 0.0);
    const WorstCaseEval eval =
        worst_case_snr(result.design, config, result.f_value);
    CHECK(std::abs(eval.snr - config.snr_target) <= 1e-9 * config.snr_target);
    CHECK(std::abs(result.design.relay_inner.cwiseAbs().maxCoeff() - 1.0) <=
          1e-10);  // at least one antenna saturates at the reported power
  }
  CHECK(feasible_count > 40);  // the 15 dB target is almost always feasible
}

TEST_CASE("power formula matches the directly scaled relay matrix") {
  Philox rng(35, 0);
  const SystemConfig config = powermin_config(3);
  for (int k = 0; k < 20; ++k) {
    MatrixXcd hsr = random_complex(3, 3, rng);
    MatrixXcd hrd = random_complex(3, 3, rng);
    const double eps = epsilon_from_rho(hrd, 0.2);
    Philox solver_rng(36, k);
    const PowerMinResult result = power_min_design(
        hsr, hrd, eps, config.snr_target, config, 3, solver_rng);
    if (!result.feasible) continue;

    // Independent route: w b^H H^H / (||g|| f) * sqrt(g0 sd2 / (Ps||g||^2 - g0 sr2)).
    const VectorXcd b = source_bf(hsr);
    const VectorXcd g = hsr * b;
    const double gain2 = g.squaredNorm();
    const MatrixXcd direct =
        (result.design.relay_inner * b.adjoint() * hsr.adjoint()) /
        (std::sqrt(gain2) * result.f_value) *
        std::sqrt(config.snr_target * config.dest_noise_var /
                  (config.source_power_w * gain2 -
                   config.snr_target * config.relay_noise_var));
    CHECK((result.design.relay_matrix - direct).norm() <=
          1e-10 * direct.norm());
  }
}

TEST_CASE("required power is monotone in the target and the objective") {
  Philox rng(37, 0);
  MatrixXcd hsr = random_complex(3, 3, rng);
  const VectorXcd b = source_bf(hsr);
  double previous = 0.0;
  for (const double target : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    const double p = required_power(hsr, b, target, 1.0, 1.0, 1.0, 100.0);
    CHECK(p > previous);
    previous = p;
  }
  previous = INFINITY;
  for (const double f : {0.5, 1.0, 2.0, 4.0}) {
    const double p = required_power(hsr, b, 10.0, f, 1.0, 1.0, 100.0);
    CHECK(p < previous);
    previous = p;
  }
}

TEST_CASE("infeasible targets come back flagged without a design") {
  Philox rng(38, 0);
  MatrixXcd hsr = random_complex(2, 2, rng);
  MatrixXcd hrd = random_complex(2, 2, rng);
  SystemConfig config = powermin_config(2);
  config.snr_target = 1e12;  // far above any relay-side cap here
  Philox solver_rng(39, 0);
  const PowerMinResult result =
      power_min_design(hsr, hrd, 0.1, config.snr_target, config, 2,
                       solver_rng);
  CHECK_FALSE(result.feasible);
  CHECK(result.required_power_w == 0.0);
}
