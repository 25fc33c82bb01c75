#include "afrelay/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <tuple>

#include "afrelay/baselines.hpp"
#include "afrelay/errors.hpp"
#include "afrelay/linalg.hpp"
#include "afrelay/powermin.hpp"
#include "afrelay/robust_core.hpp"

namespace afrelay::harness {
namespace {

constexpr const char* kSnrMetric = "snr_wc_linear";

// Substream layout for the per-trial Philox stream (seed, trial, substream):
// purpose in the low bits, sweep index above, so every draw is pinned to its
// (trial, sweep, purpose) slot regardless of execution order.
std::uint64_t substream_id(int purpose, int sweep_index) {
  return (static_cast<std::uint64_t>(sweep_index) << 20) |
         static_cast<std::uint64_t>(purpose);
}

constexpr int kChannelPurpose = 1;
constexpr int kMethodPurposeBase = 16;

struct MethodEval {
  double f = 0.0;
  double gain2 = 0.0;
  int iterations = 0;
};

struct TrialContext {
  const ExperimentSpec& spec;
  const SystemConfig& config;
  ChannelRealization channel;
  double optimal_gain2 = 0.0;  // lambda_max(H_sr^H H_sr)
  int trial = 0;
  int sweep_index = 0;
  std::optional<baselines::PotdcResult> potdc;  // shared by both potdc methods
};

const baselines::PotdcResult& potdc_for(TrialContext& ctx) {
  if (!ctx.potdc) {
    ctx.potdc = baselines::potdc_solve(
        ctx.channel.second_hop_est, ctx.channel.epsilon,
        ctx.spec.solver.potdc_outer_tol, ctx.spec.solver.potdc_inner_tol,
        ctx.spec.solver.potdc_max_outer, ctx.spec.solver.potdc_max_inner);
  }
  return *ctx.potdc;
}

MethodEval eval_method_checked(Method method, TrialContext& ctx);

// A solver giving up on one draw must not abort a long sweep; the record
// comes back flagged invalid with a zero objective instead.
MethodEval eval_method(Method method, TrialContext& ctx) {
  try {
    return eval_method_checked(method, ctx);
  } catch (const baselines::PotdcError&) {
    return {0.0, ctx.optimal_gain2, ctx.spec.solver.potdc_max_inner};
  } catch (const baselines::IterationError&) {
    return {0.0, ctx.optimal_gain2, ctx.spec.solver.ao_max_iter};
  }
}

MethodEval eval_method_checked(Method method, TrialContext& ctx) {
  const MatrixXcd& hsr = ctx.channel.first_hop;
  const MatrixXcd& hrd = ctx.channel.second_hop_est;
  const double epsilon = ctx.channel.epsilon;
  const SolverOptions& solver = ctx.spec.solver;
  Philox rng(ctx.spec.seed, static_cast<std::uint64_t>(ctx.trial),
             substream_id(kMethodPurposeBase + static_cast<int>(method),
                          ctx.sweep_index));
  MethodEval eval;
  eval.gain2 = ctx.optimal_gain2;
  switch (method) {
    case Method::kRobustAo: {
      const AlternatingResult run = multistart_solve(
          hrd, epsilon, solver.restarts, rng, solver.ao_tol, solver.ao_max_iter);
      eval.f = run.valid ? run.f_value : 0.0;
      eval.iterations = run.iterations;
      break;
    }
    case Method::kEqualPower: {
      // Designed as if the estimate were exact, then held to the actual ball.
      const VectorXcd start =
          linalg::principal_eigenpair(hrd * hrd.adjoint()).vector;
      const AlternatingResult run =
          alternating_solve(hrd, 0.0, start, solver.ao_tol, solver.ao_max_iter);
      eval.f = robust_objective(hrd, run.w, epsilon);
      eval.iterations = run.iterations;
      break;
    }
    case Method::kSumPower: {
      const auto [w, f] = baselines::sum_power_design(
          hrd, epsilon, static_cast<double>(hrd.cols()));
      eval.f = f;
      eval.iterations = 1;
      break;
    }
    case Method::kPotdc: {
      const baselines::PotdcResult& relaxed = potdc_for(ctx);
      eval.f = relaxed.f_relaxed;
      eval.iterations = relaxed.state.iteration;
      break;
    }
    case Method::kPotdcRank1: {
      const baselines::PotdcResult& relaxed = potdc_for(ctx);
      const VectorXcd w =
          baselines::rank1_extract(relaxed.state.lifted, rng,
                                   solver.potdc_samples, hrd, epsilon);
      eval.f = w.norm() > 0.0 ? robust_objective(hrd, w, epsilon) : 0.0;
      eval.iterations = relaxed.state.iteration;
      break;
    }
    case Method::kMdIteration: {
      const int ms = static_cast<int>(hsr.cols());
      const VectorXcd b0 =
          VectorXcd::Constant(ms, 1.0 / std::sqrt(double(ms)));
      const VectorXcd r0 =
          linalg::principal_eigenpair(hrd * hrd.adjoint()).vector;
      const baselines::AlternatingBaselineResult run =
          baselines::perfect_csi_alternating(
              hsr, hrd, b0, r0, std::min(solver.ao_tol, 1e-10),
              std::max(solver.ao_max_iter, 10000));
      const VectorXcd w = equal_power_weights(hrd, run.receive);
      eval.f = robust_objective(hrd, w, epsilon);
      eval.gain2 = (hsr * run.source).squaredNorm();
      eval.iterations = run.iterations;
      break;
    }
  }
  return eval;
}

SystemConfig config_for_sweep(const ExperimentSpec& spec, double sweep_value) {
  SystemConfig config = spec.config;
  if (spec.experiment == Experiment::kTiming ||
      spec.experiment == Experiment::kPowerVsN) {
    const int n = static_cast<int>(sweep_value);
    config.source_antennas = n;
    config.dest_antennas = n;
    config.relay_antennas = n;
  }
  return config;
}

TrialRecord make_record(const ExperimentSpec& spec, int trial,
                        double sweep_value, Method method,
                        const std::string& metric, double value, bool valid,
                        int iterations, double wall_time = 0.0) {
  TrialRecord record;
  record.experiment = to_string(spec.experiment);
  record.trial = trial;
  record.sweep_value = sweep_value;
  record.method = to_string(method);
  record.metric_name = metric;
  record.metric_value = value;
  record.valid = valid;
  record.iterations = iterations;
  record.wall_time_s = wall_time;
  return record;
}

void run_convergence_trial(const ExperimentSpec& spec, int trial,
                           std::vector<TrialRecord>& records) {
  Philox rng(spec.seed, trial, substream_id(kChannelPurpose, 0));
  const ChannelRealization chan = draw_channel(spec.config, spec.rho, rng);
  const VectorXcd start =
      linalg::principal_eigenpair(chan.second_hop_est *
                                  chan.second_hop_est.adjoint())
          .vector;
  const AlternatingResult run =
      alternating_solve(chan.second_hop_est, chan.epsilon, start, 1e-13,
                        std::max(spec.solver.ao_max_iter, 2000));
  const double converged = run.f_value;

  int iterations_at_tol = static_cast<int>(run.trace.size());
  double previous = 0.0;
  for (std::size_t k = 0; k < run.trace.size(); ++k) {
    if (std::abs(run.trace[k] - previous) <= spec.solver.ao_tol) {
      iterations_at_tol = static_cast<int>(k + 1);
      break;
    }
    previous = run.trace[k];
  }

  for (const double sweep_value : spec.sweep) {
    const std::size_t k = static_cast<std::size_t>(sweep_value);
    double rel_error = 0.0;
    if (run.valid && converged > 0.0 && k >= 1) {
      const double phi =
          k <= run.trace.size() ? run.trace[k - 1] : run.trace.back();
      rel_error = std::max((converged - phi) / converged, 0.0);
    }
    records.push_back(make_record(spec, trial, sweep_value, Method::kRobustAo,
                                  "rel_error", rel_error, run.valid,
                                  iterations_at_tol));
  }
}

void run_timing_trial(const ExperimentSpec& spec, int trial,
                      std::vector<TrialRecord>& records) {
  using clock = std::chrono::steady_clock;
  for (std::size_t si = 0; si < spec.sweep.size(); ++si) {
    const double sweep_value = spec.sweep[si];
    const SystemConfig config = config_for_sweep(spec, sweep_value);
    TrialContext ctx{spec, config, {}, 0.0, trial, static_cast<int>(si), {}};
    Philox rng(spec.seed, trial,
               substream_id(kChannelPurpose, static_cast<int>(si)));
    ctx.channel = draw_channel(config, spec.rho, rng);
    ctx.optimal_gain2 =
        linalg::principal_eigenpair(ctx.channel.first_hop.adjoint() *
                                    ctx.channel.first_hop)
            .value;
    for (const Method method : spec.methods) {
      std::vector<double> times;
      MethodEval eval;
      for (int rep = 0; rep < spec.solver.timing_reps; ++rep) {
        ctx.potdc.reset();  // time the full computation each repetition
        const auto begin = clock::now();
        eval = eval_method(method, ctx);
        const auto end = clock::now();
        times.push_back(std::chrono::duration<double>(end - begin).count());
      }
      std::sort(times.begin(), times.end());
      const double median = times[times.size() / 2];
      records.push_back(make_record(spec, trial, sweep_value, method,
                                    "design_time_s", median, eval.f > 0.0,
                                    eval.iterations, median));
    }
  }
}

void run_snr_trial(const ExperimentSpec& spec, int trial,
                   std::vector<TrialRecord>& records) {
  Philox rng(spec.seed, trial, substream_id(kChannelPurpose, 0));
  const double base_rho =
      spec.experiment == Experiment::kSnrVsRho ? 0.0 : spec.rho;
  ChannelRealization chan = draw_channel(spec.config, base_rho, rng);
  const double optimal_gain2 =
      linalg::principal_eigenpair(chan.first_hop.adjoint() * chan.first_hop)
          .value;

  if (spec.experiment == Experiment::kSnrVsRho) {
    for (std::size_t si = 0; si < spec.sweep.size(); ++si) {
      TrialContext ctx{spec,  spec.config, chan, optimal_gain2,
                       trial, static_cast<int>(si), {}};
      ctx.channel.epsilon = epsilon_from_rho(chan.second_hop_est, spec.sweep[si]);
      for (const Method method : spec.methods) {
        const MethodEval eval = eval_method(method, ctx);
        const double snr = snr_from_parts(
            spec.config.relay_power_cap_w, spec.config.source_power_w,
            eval.gain2, spec.config.relay_noise_var,
            spec.config.dest_noise_var, eval.f);
        records.push_back(make_record(spec, trial, spec.sweep[si], method,
                                      kSnrMetric, snr, eval.f > 0.0,
                                      eval.iterations));
      }
    }
    return;
  }

  // snr-vs-power: the design is independent of the cap, so evaluate each
  // method once and sweep the cap through the certificate formula.
  TrialContext ctx{spec, spec.config, chan, optimal_gain2, trial, 0, {}};
  for (const Method method : spec.methods) {
    const MethodEval eval = eval_method(method, ctx);
    for (const double sweep_value : spec.sweep) {
      const double cap_w = db_to_linear(sweep_value);
      const double snr = snr_from_parts(
          cap_w, spec.config.source_power_w, eval.gain2,
          spec.config.relay_noise_var, spec.config.dest_noise_var, eval.f);
      records.push_back(make_record(spec, trial, sweep_value, method,
                                    kSnrMetric, snr, eval.f > 0.0,
                                    eval.iterations));
    }
  }
}

void run_power_trial(const ExperimentSpec& spec, int trial,
                     std::vector<TrialRecord>& records) {
  for (std::size_t si = 0; si < spec.sweep.size(); ++si) {
    const double sweep_value = spec.sweep[si];
    const SystemConfig config = config_for_sweep(spec, sweep_value);
    TrialContext ctx{spec, config, {}, 0.0, trial, static_cast<int>(si), {}};
    Philox rng(spec.seed, trial,
               substream_id(kChannelPurpose, static_cast<int>(si)));
    ctx.channel = draw_channel(config, spec.rho, rng);
    ctx.optimal_gain2 =
        linalg::principal_eigenpair(ctx.channel.first_hop.adjoint() *
                                    ctx.channel.first_hop)
            .value;
    for (const Method method : spec.methods) {
      const MethodEval eval = eval_method(method, ctx);
      double required = 0.0;
      bool feasible = false;
      try {
        required = required_power_from_parts(
            config.snr_target, config.dest_noise_var, config.source_power_w,
            eval.gain2, config.relay_noise_var, eval.f);
        feasible = true;
      } catch (const InfeasibleError&) {
        required = 0.0;
      }
      records.push_back(make_record(spec, trial, sweep_value, method,
                                    "pr_required_w", required, feasible,
                                    eval.iterations));
    }
  }
}

}  // namespace

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::kConvergence: return "convergence";
    case Experiment::kTiming: return "timing";
    case Experiment::kSnrVsRho: return "snr-vs-rho";
    case Experiment::kSnrVsPower: return "snr-vs-power";
    case Experiment::kPowerVsN: return "power-vs-n";
  }
  return "unknown";
}

std::string to_string(Method m) {
  switch (m) {
    case Method::kRobustAo: return "robust-ao";
    case Method::kEqualPower: return "equal-power";
    case Method::kSumPower: return "sum-power";
    case Method::kPotdc: return "potdc";
    case Method::kPotdcRank1: return "potdc-rank1";
    case Method::kMdIteration: return "md-iteration";
  }
  return "unknown";
}

Experiment experiment_from_string(const std::string& name) {
  if (name == "convergence") return Experiment::kConvergence;
  if (name == "timing") return Experiment::kTiming;
  if (name == "snr-vs-rho") return Experiment::kSnrVsRho;
  if (name == "snr-vs-power") return Experiment::kSnrVsPower;
  if (name == "power-vs-n") return Experiment::kPowerVsN;
  throw ConfigError("unknown experiment: " + name);
}

Method method_from_string(const std::string& name) {
  if (name == "robust-ao") return Method::kRobustAo;
  if (name == "equal-power") return Method::kEqualPower;
  if (name == "sum-power") return Method::kSumPower;
  if (name == "potdc") return Method::kPotdc;
  if (name == "potdc-rank1") return Method::kPotdcRank1;
  if (name == "md-iteration") return Method::kMdIteration;
  throw ConfigError("unknown method: " + name);
}

void ExperimentSpec::validate() const {
  if (trials < 1) throw ConfigError("experiment: trials must be >= 1");
  if (sweep.empty()) throw ConfigError("experiment: sweep must be non-empty");
  if (methods.empty()) throw ConfigError("experiment: methods must be non-empty");
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw ConfigError("experiment: rho must be in [0, 1)");
  }
  switch (experiment) {
    case Experiment::kConvergence:
      for (double v : sweep) {
        if (v < 1.0 || v != std::floor(v)) {
          throw ConfigError("convergence sweep values are iteration indices >= 1");
        }
      }
      if (methods.size() != 1 || methods[0] != Method::kRobustAo) {
        throw ConfigError("convergence experiment supports only robust-ao");
      }
      break;
    case Experiment::kSnrVsRho:
      for (double v : sweep) {
        if (!(v >= 0.0 && v < 1.0)) {
          throw ConfigError("snr-vs-rho sweep values must be in [0, 1)");
        }
      }
      break;
    case Experiment::kTiming:
    case Experiment::kPowerVsN:
      for (double v : sweep) {
        if (v < 1.0 || v != std::floor(v)) {
          throw ConfigError("antenna sweep values must be positive integers");
        }
      }
      break;
    case Experiment::kSnrVsPower:
      break;  // dBW values, any real
  }
  SystemConfig probe = config_for_sweep(*this, sweep.front());
  if (experiment == Experiment::kPowerVsN) probe.mode = DesignMode::kPowerMin;
  probe.validate();
}

std::vector<TrialRecord> run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<TrialRecord> records;
  records.reserve(static_cast<std::size_t>(spec.trials) * spec.sweep.size() *
                  spec.methods.size());
  for (int trial = 0; trial < spec.trials; ++trial) {
    switch (spec.experiment) {
      case Experiment::kConvergence:
        run_convergence_trial(spec, trial, records);
        break;
      case Experiment::kTiming:
        run_timing_trial(spec, trial, records);
        break;
      case Experiment::kSnrVsRho:
      case Experiment::kSnrVsPower:
        run_snr_trial(spec, trial, records);
        break;
      case Experiment::kPowerVsN:
        run_power_trial(spec, trial, records);
        break;
    }
  }
  std::stable_sort(records.begin(), records.end(),
                   [](const TrialRecord& a, const TrialRecord& b) {
                     return std::tie(a.trial, a.sweep_value, a.method) <
                            std::tie(b.trial, b.sweep_value, b.method);
                   });
  return records;
}

std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records) {
  if (records.empty()) {
    throw std::invalid_argument("summarize: no records");
  }
  struct Accumulator {
    std::string experiment;
    double sum = 0.0;
    double sum_sq = 0.0;
    int count = 0;
    int total = 0;
    int valid = 0;
  };
  std::map<std::tuple<double, std::string, std::string>, Accumulator> groups;
  for (const TrialRecord& record : records) {
    Accumulator& acc =
        groups[{record.sweep_value, record.method, record.metric_name}];
    acc.experiment = record.experiment;
    acc.total += 1;
    if (record.valid) acc.valid += 1;
    const bool usable = record.valid || record.metric_name == kSnrMetric;
    if (usable && std::isfinite(record.metric_value)) {
      acc.sum += record.metric_value;
      acc.sum_sq += record.metric_value * record.metric_value;
      acc.count += 1;
    }
  }
  std::vector<SummaryRow> rows;
  rows.reserve(groups.size());
  for (const auto& [key, acc] : groups) {
    SummaryRow row;
    row.experiment = acc.experiment;
    row.sweep_value = std::get<0>(key);
    row.method = std::get<1>(key);
    row.metric_name = std::get<2>(key);
    row.total = acc.total;
    row.count = acc.count;
    row.validity_fraction =
        acc.total > 0 ? static_cast<double>(acc.valid) / acc.total : 0.0;
    if (acc.count > 0) {
      row.mean = acc.sum / acc.count;
      if (acc.count > 1) {
        const double var = std::max(
            (acc.sum_sq - acc.sum * acc.sum / acc.count) / (acc.count - 1), 0.0);
        row.stderr_mean = std::sqrt(var / acc.count);
      }
    } else {
      row.mean = std::numeric_limits<double>::quiet_NaN();
      row.stderr_mean = std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string format_double(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", v);
  return buffer;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // LF line endings everywhere
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

}  // namespace

void emit_csv(const std::vector<TrialRecord>& records,
              const std::string& path) {
  std::ofstream out = open_output(path);
  out << "experiment,trial,sweep_value,method,metric_name,metric_value,"
         "valid,iterations,wall_time_s\n";
  for (const TrialRecord& r : records) {
    out << r.experiment << ',' << r.trial << ',' << format_double(r.sweep_value)
        << ',' << r.method << ',' << r.metric_name << ','
        << format_double(r.metric_value) << ',' << (r.valid ? "true" : "false")
        << ',' << r.iterations << ',' << format_double(r.wall_time_s) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

void emit_csv(const std::vector<SummaryRow>& summary, const std::string& path) {
  std::ofstream out = open_output(path);
  out << "experiment,sweep_value,method,metric_name,mean,stderr,count,total,"
         "validity_fraction\n";
  for (const SummaryRow& row : summary) {
    out << row.experiment << ',' << format_double(row.sweep_value) << ','
        << row.method << ',' << row.metric_name << ','
        << format_double(row.mean) << ',' << format_double(row.stderr_mean)
        << ',' << row.count << ',' << row.total << ','
        << format_double(row.validity_fraction) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

std::vector<TrialRecord> parse_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty records file: " + path);
  const std::string expected =
      "experiment,trial,sweep_value,method,metric_name,metric_value,"
      "valid,iterations,wall_time_s";
  if (line != expected) throw IoError("unexpected header in " + path);
  std::vector<TrialRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 9) throw IoError("malformed row in " + path);
    TrialRecord r;
    r.experiment = fields[0];
    r.trial = std::stoi(fields[1]);
    r.sweep_value = std::stod(fields[2]);
    r.method = fields[3];
    r.metric_name = fields[4];
    r.metric_value = std::stod(fields[5]);
    r.valid = fields[6] == "true";
    r.iterations = std::stoi(fields[7]);
    r.wall_time_s = std::stod(fields[8]);
    records.push_back(std::move(r));
  }
  return records;
}

void emit_plot(const std::vector<SummaryRow>& summary,
               const std::string& path) {
  constexpr double kWidth = 720, kHeight = 480;
  constexpr double kLeft = 80, kRight = 40, kTop = 50, kBottom = 60;
  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                   "#9467bd", "#ff7f0e", "#8c564b"};

  std::vector<const SummaryRow*> points;
  for (const SummaryRow& row : summary) {
    if (row.count > 0 && std::isfinite(row.mean)) points.push_back(&row);
  }
  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  if (!points.empty()) {
    x_min = x_max = points.front()->sweep_value;
    y_min = y_max = points.front()->mean;
    for (const SummaryRow* p : points) {
      x_min = std::min(x_min, p->sweep_value);
      x_max = std::max(x_max, p->sweep_value);
      y_min = std::min(y_min, p->mean - p->stderr_mean);
      y_max = std::max(y_max, p->mean + p->stderr_mean);
    }
  }
  if (x_max == x_min) x_max = x_min + 1.0;
  if (y_max == y_min) y_max = y_min + 1.0;
  const double x_pad = 0.05 * (x_max - x_min);
  const double y_pad = 0.05 * (y_max - y_min);
  x_min -= x_pad;
  x_max += x_pad;
  y_min -= y_pad;
  y_max += y_pad;

  const auto sx = [&](double x) {
    return kLeft + (x - x_min) / (x_max - x_min) * (kWidth - kLeft - kRight);
  };
  const auto sy = [&](double y) {
    return kHeight - kBottom -
           (y - y_min) / (y_max - y_min) * (kHeight - kTop - kBottom);
  };
  const auto fmt = [](double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.4g", v);
    return std::string(buffer);
  };

  std::vector<std::string> methods;
  for (const SummaryRow* p : points) {
    if (std::find(methods.begin(), methods.end(), p->method) == methods.end()) {
      methods.push_back(p->method);
    }
  }
  const std::string title = points.empty()
                                ? std::string("empty")
                                : points.front()->experiment + " : " +
                                      points.front()->metric_name;

  std::ofstream out = open_output(path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth
      << "' height='" << kHeight << "' viewBox='0 0 " << kWidth << ' '
      << kHeight << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<text x='" << kWidth / 2 << "' y='24' text-anchor='middle' "
      << "font-family='sans-serif' font-size='15'>" << title << "</text>\n";
  out << "<line x1='" << kLeft << "' y1='" << kHeight - kBottom << "' x2='"
      << kWidth - kRight << "' y2='" << kHeight - kBottom
      << "' stroke='black'/>\n";
  out << "<line x1='" << kLeft << "' y1='" << kTop << "' x2='" << kLeft
      << "' y2='" << kHeight - kBottom << "' stroke='black'/>\n";
  for (int tick = 0; tick <= 5; ++tick) {
    const double tx = x_min + (x_max - x_min) * tick / 5.0;
    const double ty = y_min + (y_max - y_min) * tick / 5.0;
    out << "<line x1='" << sx(tx) << "' y1='" << kHeight - kBottom << "' x2='"
        << sx(tx) << "' y2='" << kHeight - kBottom + 5 << "' stroke='black'/>\n";
    out << "<text x='" << sx(tx) << "' y='" << kHeight - kBottom + 20
        << "' text-anchor='middle' font-family='sans-serif' font-size='11'>"
        << fmt(tx) << "</text>\n";
    out << "<line x1='" << kLeft - 5 << "' y1='" << sy(ty) << "' x2='" << kLeft
        << "' y2='" << sy(ty) << "' stroke='black'/>\n";
    out << "<text x='" << kLeft - 8 << "' y='" << sy(ty) + 4
        << "' text-anchor='end' font-family='sans-serif' font-size='11'>"
        << fmt(ty) << "</text>\n";
  }

  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    const char* color = kPalette[mi % 6];
    std::vector<const SummaryRow*> series;
    for (const SummaryRow* p : points) {
      if (p->method == methods[mi]) series.push_back(p);
    }
    std::sort(series.begin(), series.end(),
              [](const SummaryRow* a, const SummaryRow* b) {
                return a->sweep_value < b->sweep_value;
              });
    out << "<polyline fill='none' stroke='" << color
        << "' stroke-width='1.5' points='";
    for (const SummaryRow* p : series) {
      out << sx(p->sweep_value) << ',' << sy(p->mean) << ' ';
    }
    out << "'/>\n";
    for (const SummaryRow* p : series) {
      if (p->stderr_mean > 0.0) {
        out << "<line x1='" << sx(p->sweep_value) << "' y1='"
            << sy(p->mean - p->stderr_mean) << "' x2='" << sx(p->sweep_value)
            << "' y2='" << sy(p->mean + p->stderr_mean) << "' stroke='"
            << color << "'/>\n";
      }
      out << "<circle cx='" << sx(p->sweep_value) << "' cy='" << sy(p->mean)
          << "' r='3' fill='" << color << "'/>\n";
    }
    out << "<text x='" << kWidth - kRight - 10 << "' y='"
        << kTop + 16 * (mi + 1)
        << "' text-anchor='end' font-family='sans-serif' font-size='12' fill='"
        << color << "'>" << methods[mi] << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace afrelay::harness
