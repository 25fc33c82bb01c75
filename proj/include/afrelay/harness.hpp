#pragma once

#include <string>
#include <vector>

#include "afrelay/channel.hpp"

namespace afrelay::harness {

enum class Experiment {
  kConvergence,  // relative error vs iteration index
  kTiming,       // design time vs relay antenna count
  kSnrVsRho,     // worst-case SNR vs normalized uncertainty
  kSnrVsPower,   // worst-case SNR vs per-antenna cap in dBW
  kPowerVsN,     // required per-antenna power vs relay antenna count
};

enum class Method {
  kRobustAo,
  kEqualPower,
  kSumPower,
  kPotdc,
  kPotdcRank1,
  kMdIteration,
};

std::string to_string(Experiment e);
std::string to_string(Method m);
Experiment experiment_from_string(const std::string& name);
Method method_from_string(const std::string& name);

/// Solver knobs shared by the CLI and the experiment runner.
struct SolverOptions {
  double ao_tol = 1e-8;
  int ao_max_iter = 500;
  int restarts = 5;
  double potdc_outer_tol = 1e-9;
  double potdc_inner_tol = 1e-7;
  int potdc_max_outer = 60;
  int potdc_max_inner = 40000;
  int potdc_samples = 200;
  int timing_reps = 3;  // timed repetitions per trial; the median is kept
};

struct ExperimentSpec {
  Experiment experiment = Experiment::kSnrVsRho;
  int trials = 1;
  std::uint64_t seed = 0;
  std::vector<double> sweep;
  SystemConfig config;  // antenna counts are overridden on N sweeps
  double rho = 0.0;     // uncertainty level for experiments that fix it
  std::vector<Method> methods;
  SolverOptions solver;

  void validate() const;  // throws ConfigError
};

/// One measurement. wall_time_s is zero outside the timing experiment so
/// record lists are bit-reproducible for a fixed seed.
struct TrialRecord {
  std::string experiment;
  int trial = 0;
  double sweep_value = 0.0;
  std::string method;
  std::string metric_name;
  double metric_value = 0.0;
  bool valid = false;
  int iterations = 0;
  double wall_time_s = 0.0;
};

struct SummaryRow {
  std::string experiment;
  double sweep_value = 0.0;
  std::string method;
  std::string metric_name;
  double mean = 0.0;       // NaN when no record contributes
  double stderr_mean = 0.0;
  int count = 0;           // records contributing to the mean
  int total = 0;
  double validity_fraction = 0.0;
};

/// Run every requested method against the same per-trial channel draw.
/// Channels come from the stream (seed, trial), so any subset of trials
/// reproduces exactly. Infeasible measurements are recorded, not dropped.
std::vector<TrialRecord> run_experiment(const ExperimentSpec& spec);

/// Per (sweep value, method, metric) mean, standard error and validity
/// fraction. Worst-case-SNR records enter the mean even when the transmission
/// is invalid (the measurement is a true zero); other metrics are undefined
/// on invalid records and are skipped.
std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records);

void emit_csv(const std::vector<TrialRecord>& records, const std::string& path);
void emit_csv(const std::vector<SummaryRow>& summary, const std::string& path);
std::vector<TrialRecord> parse_records_csv(const std::string& path);

/// Self-contained SVG: mean vs sweep value, one series per method, standard
/// error bars.
void emit_plot(const std::vector<SummaryRow>& summary, const std::string& path);

}  // namespace afrelay::harness
