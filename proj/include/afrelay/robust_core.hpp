#pragma once

#include <Eigen/Dense>
#include <vector>

#include "afrelay/channel.hpp"
#include "afrelay/rng.hpp"

namespace afrelay {

/// Full joint design. The relay matrix is the rank-one combination of a
/// matched filter to the effective first-hop channel g = H_sr b and the inner
/// weight vector w, scaled so antenna i transmits exactly cap * |w_i|^2.
struct BeamformingDesign {
  VectorXcd source;        // b, unit norm
  VectorXcd relay_inner;   // w, |w_i| <= 1
  VectorXcd receive;       // r, unit norm
  MatrixXcd relay_matrix;  // W = (relay_scale / ||g||) * w * g^H
  double relay_scale = 0.0;     // sqrt(cap / (Ps ||g||^2 + sigma_r^2))
  double first_hop_gain2 = 0.0; // ||H_sr b||^2
};

/// Output of the closed-form fixed-receive-vector solve. Antennas outside the
/// first free_count positions of `order` are saturated at magnitude one;
/// free_count == N marks the radius where even full shutdown cannot keep the
/// worst-case objective positive.
struct InnerSolveResult {
  VectorXd gains;          // alpha_i = |h_i^H r|, natural antenna order
  VectorXd phases;         // arg(h_i^H r); 0 where the gain vanishes
  std::vector<int> order;  // sorts gains non-decreasingly, stable in index
  int free_count = 0;
  VectorXd magnitudes;     // |w_i|, natural antenna order, in [0, 1]
  double objective = 0.0;
  bool valid = true;       // false iff free_count == N

  VectorXcd weights() const;  // magnitudes .* exp(j * phases)
};

struct WorstCaseEval {
  double f_value = 0.0;
  double snr = 0.0;  // linear
  bool valid = false;
};

struct AlternatingResult {
  VectorXcd w;
  VectorXcd r;
  double f_value = 0.0;
  std::vector<double> trace;        // objective after each full iteration
  std::vector<double> inner_trace;  // objective right after each w update
  int iterations = 0;
  bool valid = true;
};

/// Unit-norm principal eigenvector of H_sr^H H_sr.
VectorXcd source_bf(const Eigen::Ref<const MatrixXcd>& hsr);

/// sqrt(cap / (Ps ||g||^2 + sigma_r^2)).
double relay_scale(double relay_power_cap, double source_power,
                   const Eigen::Ref<const VectorXcd>& g,
                   double relay_noise_var);

/// Per-antenna gains |h_i^H r| and phases arg(h_i^H r) for the columns h_i of
/// the second-hop estimate, plus the stable sorting permutation.
void antenna_gains(const Eigen::Ref<const MatrixXcd>& hrd_est,
                   const Eigen::Ref<const VectorXcd>& r, VectorXd& gains,
                   VectorXd& phases, std::vector<int>& order);

/// Threshold on epsilon^2 below which the k-th smallest-gain antenna stays
/// saturated: sum of the k smallest squared gains plus the k-th squared gain
/// times (N - k). One-based k.
double saturation_threshold(const Eigen::Ref<const VectorXd>& sorted_gains,
                            int k);

/// Largest k with threshold(k) < epsilon^2; 0 when even threshold(1) is not
/// exceeded (every antenna saturated), N when epsilon^2 > threshold(N).
int free_antenna_count(const Eigen::Ref<const VectorXd>& sorted_gains,
                       double epsilon);

/// KKT magnitudes for the fixed-receive-vector subproblem. Requires
/// free_count < N; the free antennas scale proportionally to their gains.
VectorXd inner_magnitudes(const Eigen::Ref<const VectorXd>& gains,
                          const std::vector<int>& order, int free_count,
                          double epsilon);

/// Optimal value matching inner_magnitudes.
double inner_objective(const Eigen::Ref<const VectorXd>& gains,
                       const std::vector<int>& order, int free_count,
                       double epsilon);

/// Closed-form solution of max |r^H H w| - eps ||w|| over the unit box.
InnerSolveResult inner_solve(const Eigen::Ref<const MatrixXcd>& hrd_est,
                             const Eigen::Ref<const VectorXcd>& r,
                             double epsilon);

/// Matched filter to the estimated effective channel: H w / ||H w||.
VectorXcd receive_bf(const Eigen::Ref<const MatrixXcd>& hrd_est,
                     const Eigen::Ref<const VectorXcd>& w);

/// Unit-magnitude weights phase-aligned to h_i^H r (phase 0 on zero gains).
VectorXcd equal_power_weights(const Eigen::Ref<const MatrixXcd>& hrd_est,
                              const Eigen::Ref<const VectorXcd>& r);

/// f(w) = ||H w|| - eps ||w||, the worst-case design objective.
double robust_objective(const Eigen::Ref<const MatrixXcd>& hrd_est,
                        const Eigen::Ref<const VectorXcd>& w, double epsilon);

/// Alternate the closed-form w update and matched-filter r update until the
/// objective change drops to tol or max_iter is hit. The trace is monotone
/// non-decreasing; an inner solve with free_count == N aborts with a zero,
/// invalid result.
AlternatingResult alternating_solve(const Eigen::Ref<const MatrixXcd>& hrd_est,
                                    double epsilon,
                                    const Eigen::Ref<const VectorXcd>& r0,
                                    double tol = 1e-8, int max_iter = 500);

/// One run from the principal-eigenvector start of H H^H plus `restarts`
/// random unit starts; returns the run with the largest objective.
AlternatingResult multistart_solve(const Eigen::Ref<const MatrixXcd>& hrd_est,
                                   double epsilon, int restarts, Philox& rng,
                                   double tol = 1e-8, int max_iter = 500);

/// Build the full design around a box-feasible w.
BeamformingDesign assemble_design(const Eigen::Ref<const MatrixXcd>& hsr,
                                  const Eigen::Ref<const MatrixXcd>& hrd_est,
                                  const Eigen::Ref<const VectorXcd>& w,
                                  double relay_power_cap,
                                  const SystemConfig& config);

/// Certified worst-case SNR from the design scalars; f is clamped at zero.
double snr_from_parts(double relay_power_cap, double source_power,
                      double first_hop_gain2, double relay_noise_var,
                      double dest_noise_var, double f_value);

/// Worst-case SNR of a design given the raw signed objective value.
WorstCaseEval worst_case_snr(const BeamformingDesign& design,
                             const SystemConfig& config, double f_value);

/// Received SNR computed straight from the system model with an explicit
/// second-hop channel; an independent route from the certificate formula.
double snr_with_channel(const BeamformingDesign& design,
                        const SystemConfig& config,
                        const Eigen::Ref<const MatrixXcd>& hsr,
                        const Eigen::Ref<const MatrixXcd>& hrd_actual);

/// Whether a positive worst-case objective is possible for this r:
/// epsilon^2 < sum_i |h_i^H r|^2.
bool transmission_feasible(const Eigen::Ref<const MatrixXcd>& hrd_est,
                           const Eigen::Ref<const VectorXcd>& r,
                           double epsilon);

VectorXcd random_unit_vector(int n, Philox& rng);

}  // namespace afrelay
