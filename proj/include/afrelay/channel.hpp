#pragma once

#include <Eigen/Dense>

#include "afrelay/rng.hpp"

namespace afrelay {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

enum class DesignMode { kSnrMax, kPowerMin };

/// Scenario scalars. Powers and noise variances are linear watts; dB values
/// are converted at the configuration boundary and never appear past it.
struct SystemConfig {
  int source_antennas = 0;
  int dest_antennas = 0;
  int relay_antennas = 0;
  double source_power_w = 0.0;
  double relay_noise_var = 0.0;
  double dest_noise_var = 0.0;
  double relay_power_cap_w = 0.0;  // per-antenna cap, snr-max mode
  double snr_target = 0.0;         // linear, power-min mode
  DesignMode mode = DesignMode::kSnrMax;

  void validate() const;  // throws ConfigError
};

/// One scenario draw: exact first-hop channel, estimated second-hop channel,
/// and the Frobenius radius of the second-hop error ball.
struct ChannelRealization {
  MatrixXcd first_hop;        // relay_antennas x source_antennas
  MatrixXcd second_hop_est;   // dest_antennas x relay_antennas
  double epsilon = 0.0;
};

struct UncertaintySpec {
  double rho = 0.0;  // in [0, 1); epsilon^2 = rho * lambda_max(H H^H)
};

double db_to_linear(double db);
double linear_to_db(double value);

/// i.i.d. entries with unit total variance (real/imag parts N(0, 1/2) each).
MatrixXcd rayleigh_matrix(int rows, int cols, Philox& rng);

/// epsilon = sqrt(rho * lambda_max(Hrd_est Hrd_est^H)); rho must be in [0, 1).
double epsilon_from_rho(const Eigen::Ref<const MatrixXcd>& hrd_est, double rho);

/// Error matrix inside the Frobenius ball of radius epsilon: Gaussian
/// direction, radius epsilon * u^(1/d) for uniform u with d = 2*rows*cols,
/// i.e. uniform in the ball. With boundary set, the radius is exactly epsilon.
MatrixXcd sample_error_ball(int rows, int cols, double epsilon, Philox& rng,
                            bool boundary = false);

/// First hop, second-hop estimate and radius for one trial.
ChannelRealization draw_channel(const SystemConfig& config, double rho,
                                Philox& rng);

}  // namespace afrelay
