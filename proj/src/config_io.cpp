#include "afrelay/config_io.hpp"

#include <fstream>

#include "json.hpp"

#include "afrelay/errors.hpp"

namespace afrelay {
namespace {

using nlohmann::json;

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

template <typename T>
T require(const json& j, const std::string& key) {
  if (!j.contains(key)) throw ConfigError("config key missing: " + key);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

json complex_to_json(const std::complex<double>& z) {
  return json::array({z.real(), z.imag()});
}

std::complex<double> complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw ConfigError("expected [re, im] pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

json matrix_to_json(const MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back(complex_to_json(m(i, j)));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

MatrixXcd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("expected a matrix");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  MatrixXcd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j[i].size()) != cols) {
      throw ConfigError("ragged matrix rows");
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      m(i, k) = complex_from_json(j[i][k]);
    }
  }
  return m;
}

json vector_to_json(const VectorXcd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out.push_back(complex_to_json(v(i)));
  }
  return out;
}

VectorXcd vector_from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("expected a vector");
  VectorXcd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v(i) = complex_from_json(j[i]);
  }
  return v;
}

SystemConfig system_from_json(const json& sys) {
  SystemConfig config;
  config.source_antennas = require<int>(sys, "source_antennas");
  config.dest_antennas = require<int>(sys, "dest_antennas");
  config.relay_antennas = require<int>(sys, "relay_antennas");
  config.source_power_w = db_to_linear(require<double>(sys, "ps_dbw"));
  config.relay_noise_var = get_or<double>(sys, "sigma_r2_w", 1.0);
  config.dest_noise_var = get_or<double>(sys, "sigma_d2_w", 1.0);
  const std::string mode = get_or<std::string>(sys, "mode", "snr-max");
  if (mode == "snr-max") {
    config.mode = DesignMode::kSnrMax;
    config.relay_power_cap_w = db_to_linear(require<double>(sys, "pr_dbw"));
    if (sys.contains("gamma0_db")) {
      config.snr_target = db_to_linear(sys.at("gamma0_db").get<double>());
    }
  } else if (mode == "power-min") {
    config.mode = DesignMode::kPowerMin;
    config.snr_target = db_to_linear(require<double>(sys, "gamma0_db"));
    if (sys.contains("pr_dbw")) {
      config.relay_power_cap_w = db_to_linear(sys.at("pr_dbw").get<double>());
    }
  } else {
    throw ConfigError("config: mode must be snr-max or power-min");
  }
  config.validate();
  return config;
}

json system_to_json(const SystemConfig& config) {
  json sys;
  sys["source_antennas"] = config.source_antennas;
  sys["dest_antennas"] = config.dest_antennas;
  sys["relay_antennas"] = config.relay_antennas;
  sys["ps_dbw"] = linear_to_db(config.source_power_w);
  sys["sigma_r2_w"] = config.relay_noise_var;
  sys["sigma_d2_w"] = config.dest_noise_var;
  sys["mode"] =
      config.mode == DesignMode::kSnrMax ? "snr-max" : "power-min";
  if (config.relay_power_cap_w > 0.0) {
    sys["pr_dbw"] = linear_to_db(config.relay_power_cap_w);
  }
  if (config.snr_target > 0.0) {
    sys["gamma0_db"] = linear_to_db(config.snr_target);
  }
  return sys;
}

harness::SolverOptions solver_from_json(const json& root) {
  harness::SolverOptions solver;
  if (!root.contains("algorithm")) return solver;
  const json& alg = root.at("algorithm");
  solver.ao_tol = get_or<double>(alg, "tol", solver.ao_tol);
  solver.ao_max_iter = get_or<int>(alg, "max_iter", solver.ao_max_iter);
  solver.restarts = get_or<int>(alg, "restarts", solver.restarts);
  solver.potdc_outer_tol =
      get_or<double>(alg, "potdc_outer_tol", solver.potdc_outer_tol);
  solver.potdc_inner_tol =
      get_or<double>(alg, "potdc_inner_tol", solver.potdc_inner_tol);
  solver.potdc_max_outer =
      get_or<int>(alg, "potdc_max_outer", solver.potdc_max_outer);
  solver.potdc_max_inner =
      get_or<int>(alg, "potdc_max_inner", solver.potdc_max_inner);
  solver.potdc_samples =
      get_or<int>(alg, "potdc_samples", solver.potdc_samples);
  solver.timing_reps = get_or<int>(alg, "timing_reps", solver.timing_reps);
  return solver;
}

}  // namespace

LoadedConfig load_config(const std::string& path) {
  const json root = parse_file(path);
  LoadedConfig loaded;
  if (!root.contains("system")) throw ConfigError("config: missing 'system'");
  loaded.system = system_from_json(root.at("system"));
  if (root.contains("uncertainty")) {
    loaded.uncertainty.rho = get_or<double>(root.at("uncertainty"), "rho", 0.0);
    if (!(loaded.uncertainty.rho >= 0.0 && loaded.uncertainty.rho < 1.0)) {
      throw ConfigError("config: rho must be in [0, 1)");
    }
  }
  loaded.solver = solver_from_json(root);
  loaded.seed = get_or<std::uint64_t>(root, "seed", 0);

  if (root.contains("experiment")) {
    const json& exp = root.at("experiment");
    loaded.has_experiment = true;
    loaded.experiment.experiment =
        harness::experiment_from_string(require<std::string>(exp, "name"));
    loaded.experiment.trials = get_or<int>(exp, "trials", 1);
    loaded.experiment.seed = get_or<std::uint64_t>(exp, "seed", loaded.seed);
    loaded.experiment.sweep = require<std::vector<double>>(exp, "sweep");
    loaded.experiment.config = loaded.system;
    loaded.experiment.rho = loaded.uncertainty.rho;
    loaded.experiment.solver = loaded.solver;
    for (const std::string& name :
         require<std::vector<std::string>>(exp, "methods")) {
      loaded.experiment.methods.push_back(harness::method_from_string(name));
    }
    loaded.experiment.validate();
  }

  if (root.contains("oracle_check")) {
    const json& oc = root.at("oracle_check");
    loaded.oracle_instances = get_or<int>(oc, "instances", 100);
    loaded.oracle_relay_antennas = get_or<int>(oc, "relay_antennas", 2);
    loaded.oracle_rhos =
        get_or<std::vector<double>>(oc, "rhos", loaded.oracle_rhos);
  }
  return loaded;
}

void write_design_artifact(const DesignArtifact& artifact,
                           const std::string& path) {
  json doc;
  doc["schema"] = "afrelay-design/1";
  doc["seed"] = artifact.seed;
  doc["system"] = system_to_json(artifact.system);
  doc["uncertainty"] = {{"rho", artifact.rho}, {"epsilon", artifact.epsilon}};
  doc["channel"] = {{"hsr", matrix_to_json(artifact.hsr)},
                    {"hrd_est", matrix_to_json(artifact.hrd_est)}};
  doc["design"] = {
      {"source", vector_to_json(artifact.design.source)},
      {"relay_inner", vector_to_json(artifact.design.relay_inner)},
      {"receive", vector_to_json(artifact.design.receive)},
      {"relay_matrix", matrix_to_json(artifact.design.relay_matrix)},
      {"relay_scale", artifact.design.relay_scale},
      {"first_hop_gain2", artifact.design.first_hop_gain2}};
  doc["result"] = {{"f_value", artifact.f_value},
                   {"free_count", artifact.free_count},
                   {"valid", artifact.valid},
                   {"snr_wc_linear", artifact.snr_wc},
                   {"required_power_w", artifact.required_power_w},
                   {"trace_length", artifact.trace_length}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

DesignArtifact read_design_artifact(const std::string& path) {
  const json doc = parse_file(path);
  try {
    if (get_or<std::string>(doc, "schema", "") != "afrelay-design/1") {
      throw ConfigError("design artifact: unknown schema in " + path);
    }
    DesignArtifact artifact;
    artifact.seed = get_or<std::uint64_t>(doc, "seed", 0);
    artifact.system = system_from_json(doc.at("system"));
    artifact.rho = doc.at("uncertainty").at("rho").get<double>();
    artifact.epsilon = doc.at("uncertainty").at("epsilon").get<double>();
    artifact.hsr = matrix_from_json(doc.at("channel").at("hsr"));
    artifact.hrd_est = matrix_from_json(doc.at("channel").at("hrd_est"));
    const json& design = doc.at("design");
    artifact.design.source = vector_from_json(design.at("source"));
    artifact.design.relay_inner = vector_from_json(design.at("relay_inner"));
    artifact.design.receive = vector_from_json(design.at("receive"));
    artifact.design.relay_matrix =
        matrix_from_json(design.at("relay_matrix"));
    artifact.design.relay_scale = design.at("relay_scale").get<double>();
    artifact.design.first_hop_gain2 =
        design.at("first_hop_gain2").get<double>();
    const json& result = doc.at("result");
    artifact.f_value = result.at("f_value").get<double>();
    artifact.free_count = result.at("free_count").get<int>();
    artifact.valid = result.at("valid").get<bool>();
    artifact.snr_wc = result.at("snr_wc_linear").get<double>();
    artifact.required_power_w = result.at("required_power_w").get<double>();
    artifact.trace_length = result.at("trace_length").get<int>();
    return artifact;
  } catch (const json::exception& e) {
    throw ConfigError("design artifact " + path + ": " + e.what());
  }
}

}  // namespace afrelay
