#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "afrelay/harness.hpp"
#include "afrelay/powermin.hpp"

namespace afrelay {

/// Parsed configuration document. All dB-valued keys (ps_dbw, pr_dbw,
/// gamma0_db) are converted to linear units here and nowhere else.
struct LoadedConfig {
  SystemConfig system;
  UncertaintySpec uncertainty;
  harness::SolverOptions solver;
  std::uint64_t seed = 0;
  bool has_experiment = false;
  harness::ExperimentSpec experiment;
  // oracle-check section
  int oracle_instances = 100;
  int oracle_relay_antennas = 2;
  std::vector<double> oracle_rhos = {0.1, 0.5, 0.8};
};

LoadedConfig load_config(const std::string& path);

/// Everything cmd_design writes and cmd_evaluate reads back: the scenario,
/// the channel draw, the design vectors/matrix and the headline results.
/// Complex entries are stored as [re, im] pairs.
struct DesignArtifact {
  std::uint64_t seed = 0;
  SystemConfig system;
  double rho = 0.0;
  double epsilon = 0.0;
  MatrixXcd hsr;
  MatrixXcd hrd_est;
  BeamformingDesign design;
  double f_value = 0.0;
  int free_count = 0;
  bool valid = false;
  double snr_wc = 0.0;
  double required_power_w = 0.0;  // power-min mode only
  int trace_length = 0;
};

void write_design_artifact(const DesignArtifact& artifact,
                           const std::string& path);
DesignArtifact read_design_artifact(const std::string& path);

}  // namespace afrelay
