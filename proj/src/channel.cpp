#include "afrelay/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "afrelay/errors.hpp"
#include "afrelay/linalg.hpp"

namespace afrelay {

void SystemConfig::validate() const {
  if (source_antennas < 1 || dest_antennas < 1 || relay_antennas < 1) {
    throw ConfigError("config: antenna counts must be positive");
  }
  if (source_power_w <= 0.0) throw ConfigError("config: source power must be > 0");
  if (relay_noise_var <= 0.0 || dest_noise_var <= 0.0) {
    throw ConfigError("config: noise variances must be > 0");
  }
  if (mode == DesignMode::kSnrMax && relay_power_cap_w <= 0.0) {
    throw ConfigError("config: snr-max mode requires a positive per-antenna power cap");
  }
  if (mode == DesignMode::kPowerMin && snr_target <= 0.0) {
    throw ConfigError("config: power-min mode requires a positive SNR target");
  }
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double value) { return 10.0 * std::log10(value); }

MatrixXcd rayleigh_matrix(int rows, int cols, Philox& rng) {
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("rayleigh_matrix: dimensions must be >= 1");
  }
  MatrixXcd h(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) h(i, j) = rng.next_cgaussian();
  }
  return h;
}

double epsilon_from_rho(const Eigen::Ref<const MatrixXcd>& hrd_est, double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw std::invalid_argument("epsilon_from_rho: rho must be in [0, 1)");
  }
  if (rho == 0.0) return 0.0;
  const double lambda =
      linalg::principal_eigenpair(hrd_est * hrd_est.adjoint()).value;
  return std::sqrt(rho * lambda);
}

MatrixXcd sample_error_ball(int rows, int cols, double epsilon, Philox& rng,
                            bool boundary) {
  if (epsilon < 0.0) {
    throw std::invalid_argument("sample_error_ball: epsilon must be >= 0");
  }
  if (epsilon == 0.0) return MatrixXcd::Zero(rows, cols);
  MatrixXcd direction = rayleigh_matrix(rows, cols, rng);
  const double norm = direction.norm();
  if (norm == 0.0) return MatrixXcd::Zero(rows, cols);
  double radius = epsilon;
  if (!boundary) {
    const double u = rng.next_double();
    radius *= std::pow(u, 1.0 / (2.0 * rows * cols));
  }
  return direction * (radius / norm);
}

ChannelRealization draw_channel(const SystemConfig& config, double rho,
                                Philox& rng) {
  ChannelRealization chan;
  chan.first_hop =
      rayleigh_matrix(config.relay_antennas, config.source_antennas, rng);
  chan.second_hop_est =
      rayleigh_matrix(config.dest_antennas, config.relay_antennas, rng);
  chan.epsilon = epsilon_from_rho(chan.second_hop_est, rho);
  return chan;
}

}  // namespace afrelay
