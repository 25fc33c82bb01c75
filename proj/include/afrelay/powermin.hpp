#pragma once

#include <Eigen/Dense>

#include "afrelay/robust_core.hpp"

namespace afrelay {

struct PowerMinResult {
  BeamformingDesign design;
  double required_power_w = 0.0;  // minimal per-antenna cap meeting the target
  double f_value = 0.0;
  int iterations = 0;
  bool feasible = false;
};

/// Both feasibility conditions: a positive worst-case objective and an SNR
/// target strictly below the relay-side cap Ps * lambda_max(H^H H) / sigma_r^2.
bool power_min_feasible(const Eigen::Ref<const MatrixXcd>& hsr,
                        const SystemConfig& config, double f_value);

/// Scalar core of the power formula; throws InfeasibleError naming the
/// violated condition. Targets within 1e-6 relative of the cap are rejected.
double required_power_from_parts(double snr_target, double dest_noise_var,
                                 double source_power, double first_hop_gain2,
                                 double relay_noise_var, double f_value);

/// Minimal per-antenna relay power meeting the SNR target for this source
/// vector and worst-case objective value.
double required_power(const Eigen::Ref<const MatrixXcd>& hsr,
                      const Eigen::Ref<const VectorXcd>& b, double snr_target,
                      double f_value, double relay_noise_var,
                      double dest_noise_var, double source_power);

/// Solve the same inner problem as the SNR-max design, then scale the relay
/// matrix for the minimal power meeting the target. Infeasible targets come
/// back flagged, without a design.
PowerMinResult power_min_design(const Eigen::Ref<const MatrixXcd>& hsr,
                                const Eigen::Ref<const MatrixXcd>& hrd_est,
                                double epsilon, double snr_target,
                                const SystemConfig& config, int restarts,
                                Philox& rng, double tol = 1e-8,
                                int max_iter = 500);

}  // namespace afrelay
