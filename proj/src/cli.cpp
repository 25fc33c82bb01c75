#include "afrelay/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>

#include "CLI11.hpp"

#include "afrelay/baselines.hpp"
#include "afrelay/config_io.hpp"
#include "afrelay/errors.hpp"
#include "afrelay/harness.hpp"
#include "afrelay/linalg.hpp"
#include "afrelay/powermin.hpp"

namespace afrelay::cli {
namespace {

namespace fs = std::filesystem;

void ensure_out_dir(const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir);
}

void fail_machine_readable(const std::string& kind, const std::string& reason) {
  std::cout << "{\"error\":\"" << kind << "\",\"reason\":\"" << reason
            << "\"}\n";
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const InfeasibleError& e) {
    fail_machine_readable("infeasible", e.what());
    return kExitInfeasible;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

double db_or_neg_inf(double linear) {
  return linear > 0.0 ? linear_to_db(linear) : -INFINITY;
}

}  // namespace

int cmd_design(const Options& options) {
  return guarded([&]() {
    const LoadedConfig loaded = load_config(options.config_path);
    ensure_out_dir(options.out_dir);
    const std::uint64_t seed = options.seed.value_or(loaded.seed);
    const SystemConfig& config = loaded.system;

    Philox channel_rng(seed, 0, 0);
    const ChannelRealization chan =
        draw_channel(config, loaded.uncertainty.rho, channel_rng);

    DesignArtifact artifact;
    artifact.seed = seed;
    artifact.system = config;
    artifact.rho = loaded.uncertainty.rho;
    artifact.epsilon = chan.epsilon;
    artifact.hsr = chan.first_hop;
    artifact.hrd_est = chan.second_hop_est;

    Philox solver_rng(seed, 0, 1);
    if (config.mode == DesignMode::kSnrMax) {
      const AlternatingResult solved = multistart_solve(
          chan.second_hop_est, chan.epsilon, loaded.solver.restarts,
          solver_rng, loaded.solver.ao_tol, loaded.solver.ao_max_iter);
      artifact.f_value = solved.valid ? solved.f_value : 0.0;
      artifact.valid = solved.valid && solved.f_value > 0.0;
      artifact.trace_length = static_cast<int>(solved.trace.size());
      if (!solved.valid) {
        throw InfeasibleError(
            "design: uncertainty radius forbids any valid transmission");
      }
      const InnerSolveResult inner =
          inner_solve(chan.second_hop_est, solved.r, chan.epsilon);
      artifact.free_count = inner.free_count;
      artifact.design =
          assemble_design(chan.first_hop, chan.second_hop_est, solved.w,
                          config.relay_power_cap_w, config);
      artifact.snr_wc =
          worst_case_snr(artifact.design, config, artifact.f_value).snr;
    } else {
      const PowerMinResult solved = power_min_design(
          chan.first_hop, chan.second_hop_est, chan.epsilon,
          config.snr_target, config, loaded.solver.restarts, solver_rng,
          loaded.solver.ao_tol, loaded.solver.ao_max_iter);
      artifact.f_value = solved.f_value;
      artifact.valid = solved.feasible;
      if (!solved.feasible) {
        throw InfeasibleError(
            "design: SNR target is infeasible for this channel draw");
      }
      const InnerSolveResult inner = inner_solve(
          chan.second_hop_est, solved.design.receive, chan.epsilon);
      artifact.free_count = inner.free_count;
      artifact.design = solved.design;
      artifact.required_power_w = solved.required_power_w;
      artifact.snr_wc = config.snr_target;
      artifact.trace_length = solved.iterations;
    }

    const std::string path =
        (fs::path(options.out_dir) / "design.json").string();
    write_design_artifact(artifact, path);

    if (options.verbosity >= 1) {
      std::printf("f_value:   %.10g\n", artifact.f_value);
      std::printf("free antennas (k): %d of %d\n", artifact.free_count,
                  config.relay_antennas);
      std::printf("valid:     %s\n", artifact.valid ? "true" : "false");
      if (config.mode == DesignMode::kSnrMax) {
        std::printf("snr_wc:    %.10g (%.4f dB)\n", artifact.snr_wc,
                    db_or_neg_inf(artifact.snr_wc));
      } else {
        std::printf("pr_required: %.10g W (%.4f dBW)\n",
                    artifact.required_power_w,
                    db_or_neg_inf(artifact.required_power_w));
      }
      std::printf("artifact:  %s\n", path.c_str());
    }
    return kExitOk;
  });
}

int cmd_evaluate(const Options& options) {
  return guarded([&]() {
    const DesignArtifact artifact = read_design_artifact(options.design_path);
    const SystemConfig& config = artifact.system;
    const std::uint64_t seed = options.seed.value_or(artifact.seed);

    // Certificate from the stored design, recomputed rather than trusted.
    const double f_value = robust_objective(
        artifact.hrd_est, artifact.design.relay_inner, artifact.epsilon);
    const WorstCaseEval certificate =
        worst_case_snr(artifact.design, config, f_value);

    const MatrixXcd worst_error = baselines::adversarial_error(
        artifact.hrd_est, artifact.design.relay_inner, artifact.design.receive,
        artifact.epsilon);
    const double adversary_snr =
        snr_with_channel(artifact.design, config, artifact.hsr,
                         artifact.hrd_est + worst_error);

    double sampled_min = INFINITY;
    Philox rng(seed, 0, 2);
    for (int s = 0; s < options.samples; ++s) {
      const MatrixXcd error =
          sample_error_ball(static_cast<int>(artifact.hrd_est.rows()),
                            static_cast<int>(artifact.hrd_est.cols()),
                            artifact.epsilon, rng);
      sampled_min = std::min(
          sampled_min, snr_with_channel(artifact.design, config, artifact.hsr,
                                        artifact.hrd_est + error));
    }

    if (options.verbosity >= 1) {
      std::printf("f_value:        %.10g\n", f_value);
      std::printf("valid:          %s\n", certificate.valid ? "true" : "false");
      std::printf("certificate:    %.12g\n", certificate.snr);
      std::printf("adversarial:    %.12g\n", adversary_snr);
      if (options.samples > 0) {
        std::printf("sampled_min:    %.12g (%d draws)\n", sampled_min,
                    options.samples);
      }
    }
    const double slack = 1e-9 * std::max(certificate.snr, 1.0);
    if (options.samples > 0 && sampled_min < certificate.snr - slack) {
      throw std::runtime_error(
          "evaluate: a sampled error undercut the certificate");
    }
    if (std::abs(adversary_snr - certificate.snr) > slack &&
        certificate.valid) {
      throw std::runtime_error(
          "evaluate: adversarial evaluation disagrees with the certificate");
    }
    return kExitOk;
  });
}

int cmd_sweep(const Options& options) {
  return guarded([&]() {
    const LoadedConfig loaded = load_config(options.config_path);
    if (!loaded.has_experiment) {
      throw ConfigError("sweep: config has no 'experiment' section");
    }
    ensure_out_dir(options.out_dir);
    harness::ExperimentSpec spec = loaded.experiment;
    if (options.seed) spec.seed = *options.seed;

    const std::vector<harness::TrialRecord> records =
        harness::run_experiment(spec);
    const std::vector<harness::SummaryRow> summary =
        harness::summarize(records);

    const std::string stem = harness::to_string(spec.experiment);
    const fs::path out(options.out_dir);
    harness::emit_csv(records, (out / (stem + ".records.csv")).string());
    harness::emit_csv(summary, (out / (stem + ".summary.csv")).string());
    harness::emit_plot(summary, (out / (stem + ".svg")).string());
    if (options.verbosity >= 1) {
      std::printf("%zu records -> %s/{%s.records.csv,%s.summary.csv,%s.svg}\n",
                  records.size(), options.out_dir.c_str(), stem.c_str(),
                  stem.c_str(), stem.c_str());
    }
    return kExitOk;
  });
}

int cmd_oracle_check(const Options& options) {
  return guarded([&]() {
    int instances = 100;
    int relay_antennas = 2;
    std::vector<double> rhos = {0.1, 0.5, 0.8};
    harness::SolverOptions solver;
    std::uint64_t seed = options.seed.value_or(7);
    if (!options.config_path.empty()) {
      const LoadedConfig loaded = load_config(options.config_path);
      instances = loaded.oracle_instances;
      relay_antennas = loaded.oracle_relay_antennas;
      rhos = loaded.oracle_rhos;
      solver = loaded.solver;
      seed = options.seed.value_or(loaded.seed);
    }
    if (relay_antennas > 3) {
      throw ConfigError("oracle-check: relay_antennas must be <= 3");
    }

    double max_inner_gap = 0.0;
    double max_bruteforce_gap = 0.0;
    double max_relax_violation = 0.0;
    bool failed = false;
    for (int k = 0; k < instances; ++k) {
      Philox rng(seed, k, 0);
      const int n = relay_antennas;
      const MatrixXcd hrd = rayleigh_matrix(n, n, rng);
      const double rho = rhos[k % rhos.size()];
      const double epsilon = epsilon_from_rho(hrd, rho);

      // Closed-form inner solve vs projected-gradient convex oracle.
      const VectorXcd r = random_unit_vector(n, rng);
      const InnerSolveResult inner = inner_solve(hrd, r, epsilon);
      const baselines::InnerOracleResult oracle =
          baselines::projected_gradient_inner(inner.gains, epsilon);
      const double inner_gap =
          std::abs((inner.objective + options.inner_bias) - oracle.value);
      max_inner_gap = std::max(max_inner_gap, inner_gap);
      if (inner_gap > 1e-6) failed = true;

      // Multistart vs exhaustive box search vs relaxation.
      Philox solver_rng(seed, k, 1);
      const AlternatingResult solved =
          multistart_solve(hrd, epsilon, solver.restarts, solver_rng,
                           solver.ao_tol, solver.ao_max_iter);
      const baselines::OracleResult brute =
          baselines::exhaustive_box_search(hrd, epsilon);
      const double f_ao = solved.valid ? solved.f_value : 0.0;
      const double scale = std::max(std::abs(brute.f_best), 1e-9);
      const double brute_gap = std::abs(f_ao - brute.f_best) / scale;
      max_bruteforce_gap = std::max(max_bruteforce_gap, brute_gap);
      if (brute_gap > 0.01) failed = true;

      const baselines::PotdcResult relaxed = baselines::potdc_solve(
          hrd, epsilon, solver.potdc_outer_tol, solver.potdc_inner_tol,
          solver.potdc_max_outer, solver.potdc_max_inner);
      const double violation = f_ao - relaxed.f_relaxed;
      max_relax_violation = std::max(max_relax_violation, violation);
      if (violation > 1e-6) failed = true;
    }

    std::printf("oracle-check: %d instances, %d relay antennas\n", instances,
                relay_antennas);
    std::printf("max |closed-form - convex oracle| gap: %.3e (tol 1e-6)\n",
                max_inner_gap);
    std::printf("max relative gap to exhaustive search: %.3e (tol 1e-2)\n",
                max_bruteforce_gap);
    std::printf("max relaxation violation:              %.3e (tol 1e-6)\n",
                max_relax_violation);
    std::printf("%s\n", failed ? "FAIL" : "PASS");
    if (failed) throw std::runtime_error("oracle-check: tolerances exceeded");
    return kExitOk;
  });
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Worst-case robust beamforming designs for two-hop "
               "amplify-and-forward relays under per-antenna power limits"};
  app.require_subcommand(1);

  Options options;
  bool quiet = false, debug = false;

  const auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* config_opt =
        sub->add_option("--config", options.config_path, "configuration file");
    if (needs_config) config_opt->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", options.seed, "seed override");
    sub->add_option("--out", options.out_dir, "output directory");
    sub->add_flag("--quiet", quiet, "suppress console summaries");
    sub->add_flag("--debug", debug, "extra diagnostics");
  };

  CLI::App* design = app.add_subcommand("design", "single-shot joint design");
  add_common(design, true);

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "check a design artifact");
  evaluate
      ->add_option("--design", options.design_path, "design artifact file")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--samples", options.samples,
                       "error-ball draws (0 for certificate+adversary only)");
  add_common(evaluate, false);

  CLI::App* sweep =
      app.add_subcommand("sweep", "seeded Monte Carlo experiment");
  add_common(sweep, true);

  CLI::App* oracle =
      app.add_subcommand("oracle-check", "closed form vs numerical oracles");
  add_common(oracle, false);
  oracle
      ->add_option("--inject-inner-bias", options.inner_bias,
                   "bias the closed-form value (self-test hook)")
      ->group("");  // hidden

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  options.verbosity = quiet ? 0 : (debug ? 2 : 1);

  if (design->parsed()) return cmd_design(options);
  if (evaluate->parsed()) return cmd_evaluate(options);
  if (sweep->parsed()) return cmd_sweep(options);
  return cmd_oracle_check(options);
}

}  // namespace afrelay::cli
