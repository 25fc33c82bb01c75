#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "afrelay/rng.hpp"

namespace afrelay::baselines {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

struct OracleResult {
  double f_best = 0.0;
  VectorXcd w_best;
  long evaluations = 0;
};

/// Iterate of the lifted difference-of-convex relaxation.
struct PotdcState {
  MatrixXcd lifted;      // Hermitian PSD, unit-bounded diagonal
  double q1 = 0.0;       // tr(H^H H * lifted)
  double q2 = 0.0;       // tr(lifted)
  double q_center = 0.0; // linearization point for sqrt(q2)
  int iteration = 0;
};

struct PotdcResult {
  PotdcState state;
  double f_relaxed = 0.0;
  std::vector<double> objective_trace;    // linearized objective per outer step
  std::vector<PotdcState> outer_states;   // iterate after each outer step
};

class PotdcError : public std::runtime_error {
 public:
  PotdcError(const std::string& what, PotdcState state)
      : std::runtime_error(what), state_(std::move(state)) {}
  const PotdcState& state() const { return state_; }

 private:
  PotdcState state_;
};

/// Alternating iteration giving up before both stopping tests pass.
class IterationError : public std::runtime_error {
 public:
  IterationError(const std::string& what, std::vector<double> trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const std::vector<double>& trace() const { return trace_; }

 private:
  std::vector<double> trace_;
};

struct AlternatingBaselineResult {
  VectorXcd source;   // b
  VectorXcd receive;  // r
  std::vector<double> trace;  // receive-side objective per iteration
  int iterations = 0;
};

struct InnerOracleResult {
  double value = 0.0;
  VectorXd magnitudes;
  int iterations = 0;
};

/// Robust design under a total (sum) power budget. norm2_budget caps
/// ||w||^2 in units of the per-antenna cap; passing the antenna count gives
/// the equal-total-budget comparison. The optimum rides the principal right
/// singular direction: w = sqrt(budget) * v1, f = sqrt(budget) * (sigma1 - eps).
std::pair<VectorXcd, double> sum_power_design(
    const Eigen::Ref<const MatrixXcd>& hrd_est, double epsilon,
    double norm2_budget);

/// Perfect-CSI alternating iteration: power-method update of the source
/// vector and matched-filter update of the receive vector against the
/// phase-only relay weights. Stops when both successive-difference tests
/// fall below tol; throws IterationError past max_iter.
AlternatingBaselineResult perfect_csi_alternating(
    const Eigen::Ref<const MatrixXcd>& hsr,
    const Eigen::Ref<const MatrixXcd>& hrd_est,
    const Eigen::Ref<const VectorXcd>& b0,
    const Eigen::Ref<const VectorXcd>& r0, double tol = 1e-10,
    int max_iter = 10000);

/// Rank-one error matrix of Frobenius norm epsilon that attains the
/// worst-case inner value |r^H H w| - eps ||w|| (when that value is >= 0).
MatrixXcd adversarial_error(const Eigen::Ref<const MatrixXcd>& hrd_est,
                            const Eigen::Ref<const VectorXcd>& w,
                            const Eigen::Ref<const VectorXcd>& r,
                            double epsilon);

/// Exhaustive grid search of f over the unit box with a coordinate-descent
/// polish pass. The global phase is anchored on the largest-magnitude
/// coordinate. Only for up to three relay antennas.
OracleResult exhaustive_box_search(const Eigen::Ref<const MatrixXcd>& hrd_est,
                                   double epsilon, int magnitude_grid = 21,
                                   int phase_grid = 32);

/// Difference-of-convex relaxation solved by iterating the linearized
/// concave subproblem (accelerated projected ascent, exact projection onto
/// the PSD-and-bounded-diagonal set via Dykstra alternation).
PotdcResult potdc_solve(const Eigen::Ref<const MatrixXcd>& hrd_est,
                        double epsilon, double outer_tol = 1e-9,
                        double inner_tol = 1e-7, int max_outer = 60,
                        int max_inner = 40000);

/// Box-feasible vector from a PSD matrix: the scaled principal eigenvector
/// when the matrix is numerically rank one, otherwise the best of `samples`
/// Gaussian draws with that covariance, each scaled into the box by its
/// largest entry magnitude and ranked by f.
VectorXcd rank1_extract(const Eigen::Ref<const MatrixXcd>& lifted, Philox& rng,
                        int samples, const Eigen::Ref<const MatrixXcd>& hrd_est,
                        double epsilon);

/// Projected-gradient solve of the fixed-receive-vector magnitude problem
/// max gains . m - eps ||m|| over the unit box; the independent check of the
/// closed-form route.
InnerOracleResult projected_gradient_inner(
    const Eigen::Ref<const VectorXd>& gains, double epsilon,
    double stationarity_tol = 1e-8, int max_iter = 200000);

}  // namespace afrelay::baselines
