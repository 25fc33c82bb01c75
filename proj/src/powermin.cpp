#include "afrelay/powermin.hpp"

#include <cmath>

#include "afrelay/errors.hpp"
#include "afrelay/linalg.hpp"

namespace afrelay {

namespace {
constexpr double kCapHeadroom = 1e-6;  // reject targets this close to the cap
}

bool power_min_feasible(const Eigen::Ref<const MatrixXcd>& hsr,
                        const SystemConfig& config, double f_value) {
  if (!(f_value > 0.0)) return false;
  const double lambda =
      linalg::principal_eigenpair(hsr.adjoint() * hsr).value;
  const double cap = config.source_power_w * lambda / config.relay_noise_var;
  return config.snr_target < cap * (1.0 - kCapHeadroom);
}

double required_power_from_parts(double snr_target, double dest_noise_var,
                                 double source_power, double first_hop_gain2,
                                 double relay_noise_var, double f_value) {
  if (!(f_value > 0.0)) {
    throw InfeasibleError(
        "required_power: worst-case objective is not positive");
  }
  const double cap = source_power * first_hop_gain2 / relay_noise_var;
  if (!(snr_target < cap * (1.0 - kCapHeadroom))) {
    throw InfeasibleError(
        "required_power: SNR target reaches the relay-side cap");
  }
  const double numerator = snr_target * dest_noise_var *
                           (source_power * first_hop_gain2 + relay_noise_var);
  const double denominator =
      (source_power * first_hop_gain2 - snr_target * relay_noise_var) *
      f_value * f_value;
  return numerator / denominator;
}

double required_power(const Eigen::Ref<const MatrixXcd>& hsr,
                      const Eigen::Ref<const VectorXcd>& b, double snr_target,
                      double f_value, double relay_noise_var,
                      double dest_noise_var, double source_power) {
  const double gain2 = (hsr * b).squaredNorm();
  return required_power_from_parts(snr_target, dest_noise_var, source_power,
                                   gain2, relay_noise_var, f_value);
}

PowerMinResult power_min_design(const Eigen::Ref<const MatrixXcd>& hsr,
                                const Eigen::Ref<const MatrixXcd>& hrd_est,
                                double epsilon, double snr_target,
                                const SystemConfig& config, int restarts,
                                Philox& rng, double tol, int max_iter) {
  PowerMinResult result;
  const AlternatingResult solved =
      multistart_solve(hrd_est, epsilon, restarts, rng, tol, max_iter);
  result.f_value = solved.valid ? solved.f_value : 0.0;
  result.iterations = solved.iterations;
  SystemConfig target_config = config;
  target_config.snr_target = snr_target;
  if (!solved.valid ||
      !power_min_feasible(hsr, target_config, result.f_value)) {
    result.feasible = false;
    return result;
  }
  const VectorXcd b = source_bf(hsr);
  result.required_power_w =
      required_power(hsr, b, snr_target, result.f_value,
                     config.relay_noise_var, config.dest_noise_var,
                     config.source_power_w);
  result.design = assemble_design(hsr, hrd_est, solved.w,
                                  result.required_power_w, config);
  result.feasible = true;
  return result;
}

}  // namespace afrelay
