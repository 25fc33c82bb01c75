#include "afrelay/robust_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "afrelay/linalg.hpp"

namespace afrelay {
namespace {

constexpr double kUnitNormSlack = 1e-6;

void require_unit(const Eigen::Ref<const VectorXcd>& r, const char* who) {
  if (std::abs(r.norm() - 1.0) > kUnitNormSlack) {
    throw std::invalid_argument(std::string(who) +
                                ": receive vector must have unit norm");
  }
}

}  // namespace

VectorXcd InnerSolveResult::weights() const {
  VectorXcd w(magnitudes.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    w(i) = std::polar(magnitudes(i), phases(i));
  }
  return w;
}

VectorXcd source_bf(const Eigen::Ref<const MatrixXcd>& hsr) {
  if (hsr.size() == 0 || hsr.norm() == 0.0) {
    throw std::invalid_argument("source_bf: zero first-hop channel");
  }
  return linalg::principal_eigenpair(hsr.adjoint() * hsr).vector;
}

double relay_scale(double relay_power_cap, double source_power,
                   const Eigen::Ref<const VectorXcd>& g,
                   double relay_noise_var) {
  const double g2 = g.squaredNorm();
  if (relay_power_cap <= 0.0 || source_power <= 0.0 || relay_noise_var <= 0.0 ||
      g2 <= 0.0) {
    throw std::invalid_argument("relay_scale: arguments must be positive");
  }
  return std::sqrt(relay_power_cap / (source_power * g2 + relay_noise_var));
}

void antenna_gains(const Eigen::Ref<const MatrixXcd>& hrd_est,
                   const Eigen::Ref<const VectorXcd>& r, VectorXd& gains,
                   VectorXd& phases, std::vector<int>& order) {
  require_unit(r, "antenna_gains");
  const VectorXcd projected = hrd_est.adjoint() * r;  // entry i is h_i^H r
  const Eigen::Index n = projected.size();
  gains.resize(n);
  phases.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    gains(i) = std::abs(projected(i));
    phases(i) = gains(i) > 0.0 ? std::arg(projected(i)) : 0.0;
  }
  order.resize(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return gains(a) < gains(b); });
}

double saturation_threshold(const Eigen::Ref<const VectorXd>& sorted_gains,
                            int k) {
  const int n = static_cast<int>(sorted_gains.size());
  if (k < 1 || k > n) {
    throw std::invalid_argument("saturation_threshold: k out of range");
  }
  double prefix = 0.0;
  for (int i = 0; i < k; ++i) prefix += sorted_gains(i) * sorted_gains(i);
  return prefix + sorted_gains(k - 1) * sorted_gains(k - 1) * (n - k);
}

int free_antenna_count(const Eigen::Ref<const VectorXd>& sorted_gains,
                       double epsilon) {
  const int n = static_cast<int>(sorted_gains.size());
  const double eps2 = epsilon * epsilon;
  int count = 0;
  double prefix = 0.0;
  for (int k = 1; k <= n; ++k) {
    const double g2 = sorted_gains(k - 1) * sorted_gains(k - 1);
    prefix += g2;
    const double threshold = prefix + g2 * (n - k);
    if (threshold < eps2) {
      count = k;
    } else {
      break;  // thresholds are non-decreasing in k
    }
  }
  return count;
}

VectorXd inner_magnitudes(const Eigen::Ref<const VectorXd>& gains,
                          const std::vector<int>& order, int free_count,
                          double epsilon) {
  const int n = static_cast<int>(gains.size());
  if (free_count == n) {
    throw std::domain_error("inner_magnitudes: infeasible, epsilon too large");
  }
  if (free_count < 0 || free_count > n) {
    throw std::invalid_argument("inner_magnitudes: free_count out of range");
  }
  VectorXd magnitudes = VectorXd::Ones(n);
  if (free_count == 0) return magnitudes;

  double free_gain2 = 0.0;
  for (int i = 0; i < free_count; ++i) {
    free_gain2 += gains(order[i]) * gains(order[i]);
  }
  const double slack = epsilon * epsilon - free_gain2;  // > 0 by construction
  const double factor = std::sqrt((n - free_count) / slack);
  for (int i = 0; i < free_count; ++i) {
    magnitudes(order[i]) = std::min(gains(order[i]) * factor, 1.0);
  }
  return magnitudes;
}

double inner_objective(const Eigen::Ref<const VectorXd>& gains,
                       const std::vector<int>& order, int free_count,
                       double epsilon) {
  const int n = static_cast<int>(gains.size());
  if (free_count == n) {
    throw std::domain_error("inner_objective: infeasible, epsilon too large");
  }
  if (free_count < 0 || free_count > n) {
    throw std::invalid_argument("inner_objective: free_count out of range");
  }
  double saturated_sum = 0.0;
  double free_gain2 = 0.0;
  for (int i = 0; i < n; ++i) {
    if (i < free_count) {
      free_gain2 += gains(order[i]) * gains(order[i]);
    } else {
      saturated_sum += gains(order[i]);
    }
  }
  const double slack = epsilon * epsilon - free_gain2;
  return saturated_sum - std::sqrt((n - free_count) * std::max(slack, 0.0));
}

InnerSolveResult inner_solve(const Eigen::Ref<const MatrixXcd>& hrd_est,
                             const Eigen::Ref<const VectorXcd>& r,
                             double epsilon) {
  if (epsilon < 0.0) {
    throw std::invalid_argument("inner_solve: epsilon must be >= 0");
  }
  InnerSolveResult result;
  antenna_gains(hrd_est, r, result.gains, result.phases, result.order);
  const int n = static_cast<int>(result.gains.size());
  VectorXd sorted(n);
  for (int i = 0; i < n; ++i) sorted(i) = result.gains(result.order[i]);
  result.free_count = free_antenna_count(sorted, epsilon);
  if (result.free_count == n) {
    // Even shutting every antenna down cannot keep the objective positive;
    // the limit solution is w = 0.
    result.magnitudes = VectorXd::Zero(n);
    result.objective = 0.0;
    result.valid = false;
    return result;
  }
  result.magnitudes =
      inner_magnitudes(result.gains, result.order, result.free_count, epsilon);
  result.objective =
      inner_objective(result.gains, result.order, result.free_count, epsilon);
  result.valid = true;
  return result;
}

VectorXcd receive_bf(const Eigen::Ref<const MatrixXcd>& hrd_est,
                     const Eigen::Ref<const VectorXcd>& w) {
  const VectorXcd effective = hrd_est * w;
  const double norm = effective.norm();
  if (norm == 0.0) {
    throw std::domain_error("receive_bf: zero effective channel");
  }
  return effective / norm;
}

VectorXcd equal_power_weights(const Eigen::Ref<const MatrixXcd>& hrd_est,
                              const Eigen::Ref<const VectorXcd>& r) {
  VectorXd gains, phases;
  std::vector<int> order;
  antenna_gains(hrd_est, r, gains, phases, order);
  VectorXcd w(gains.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = std::polar(1.0, phases(i));
  return w;
}

double robust_objective(const Eigen::Ref<const MatrixXcd>& hrd_est,
                        const Eigen::Ref<const VectorXcd>& w, double epsilon) {
  return (hrd_est * w).norm() - epsilon * w.norm();
}

AlternatingResult alternating_solve(const Eigen::Ref<const MatrixXcd>& hrd_est,
                                    double epsilon,
                                    const Eigen::Ref<const VectorXcd>& r0,
                                    double tol, int max_iter) {
  require_unit(r0, "alternating_solve");
  if (tol <= 0.0 || max_iter < 1) {
    throw std::invalid_argument(
        "alternating_solve: tol must be > 0 and max_iter >= 1");
  }
  AlternatingResult result;
  VectorXcd r = r0 / r0.norm();
  double previous = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    const InnerSolveResult inner = inner_solve(hrd_est, r, epsilon);
    result.iterations = it;
    if (!inner.valid) {
      result.w = VectorXcd::Zero(hrd_est.cols());
      result.r = r;
      result.f_value = 0.0;
      result.valid = false;
      return result;
    }
    result.inner_trace.push_back(inner.objective);
    const VectorXcd w = inner.weights();
    const VectorXcd effective = hrd_est * w;
    const double effective_norm = effective.norm();
    if (effective_norm == 0.0) {
      result.w = w;
      result.r = r;
      result.f_value = 0.0;
      result.valid = false;
      return result;
    }
    r = effective / effective_norm;
    const double phi = effective_norm - epsilon * w.norm();
    result.trace.push_back(phi);
    result.w = w;
    result.r = r;
    result.f_value = phi;
    if (std::abs(phi - previous) <= tol) break;
    previous = phi;
  }
  result.valid = true;
  return result;
}

AlternatingResult multistart_solve(const Eigen::Ref<const MatrixXcd>& hrd_est,
                                   double epsilon, int restarts, Philox& rng,
                                   double tol, int max_iter) {
  if (restarts < 0) {
    throw std::invalid_argument("multistart_solve: restarts must be >= 0");
  }
  const VectorXcd eigen_start =
      linalg::principal_eigenpair(hrd_est * hrd_est.adjoint()).vector;
  AlternatingResult best =
      alternating_solve(hrd_est, epsilon, eigen_start, tol, max_iter);
  for (int k = 0; k < restarts; ++k) {
    const VectorXcd start =
        random_unit_vector(static_cast<int>(hrd_est.rows()), rng);
    AlternatingResult run =
        alternating_solve(hrd_est, epsilon, start, tol, max_iter);
    if (run.valid && (!best.valid || run.f_value > best.f_value)) {
      best = std::move(run);
    }
  }
  return best;
}

BeamformingDesign assemble_design(const Eigen::Ref<const MatrixXcd>& hsr,
                                  const Eigen::Ref<const MatrixXcd>& hrd_est,
                                  const Eigen::Ref<const VectorXcd>& w,
                                  double relay_power_cap,
                                  const SystemConfig& config) {
  if (w.size() != hsr.rows() || w.size() != hrd_est.cols()) {
    throw std::invalid_argument("assemble_design: dimension mismatch");
  }
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (std::abs(w(i)) > 1.0 + 1e-10) {
      throw std::invalid_argument(
          "assemble_design: relay weights must satisfy |w_i| <= 1");
    }
  }
  BeamformingDesign design;
  design.source = source_bf(hsr);
  const VectorXcd g = hsr * design.source;
  design.first_hop_gain2 = g.squaredNorm();
  design.relay_scale = relay_scale(relay_power_cap, config.source_power_w, g,
                                   config.relay_noise_var);
  design.relay_inner = w;
  design.relay_matrix = (design.relay_scale / g.norm()) * (w * g.adjoint());
  design.receive = receive_bf(hrd_est, w);
  return design;
}

double snr_from_parts(double relay_power_cap, double source_power,
                      double first_hop_gain2, double relay_noise_var,
                      double dest_noise_var, double f_value) {
  const double scale2 =
      relay_power_cap / (source_power * first_hop_gain2 + relay_noise_var);
  const double f2 = std::max(f_value, 0.0) * std::max(f_value, 0.0);
  return scale2 * source_power * first_hop_gain2 * f2 /
         (scale2 * relay_noise_var * f2 + dest_noise_var);
}

WorstCaseEval worst_case_snr(const BeamformingDesign& design,
                             const SystemConfig& config, double f_value) {
  WorstCaseEval eval;
  eval.f_value = f_value;
  eval.valid = f_value > 0.0;
  const double scale2 = design.relay_scale * design.relay_scale;
  const double f2 = std::max(f_value, 0.0) * std::max(f_value, 0.0);
  eval.snr = scale2 * config.source_power_w * design.first_hop_gain2 * f2 /
             (scale2 * config.relay_noise_var * f2 + config.dest_noise_var);
  return eval;
}

double snr_with_channel(const BeamformingDesign& design,
                        const SystemConfig& config,
                        const Eigen::Ref<const MatrixXcd>& hsr,
                        const Eigen::Ref<const MatrixXcd>& hrd_actual) {
  const Eigen::RowVectorXcd through =
      design.receive.adjoint() * hrd_actual * design.relay_matrix;
  const std::complex<double> signal = through * (hsr * design.source);
  const double signal_power = config.source_power_w * std::norm(signal);
  const double noise_power =
      config.relay_noise_var * through.squaredNorm() + config.dest_noise_var;
  return signal_power / noise_power;
}

bool transmission_feasible(const Eigen::Ref<const MatrixXcd>& hrd_est,
                           const Eigen::Ref<const VectorXcd>& r,
                           double epsilon) {
  require_unit(r, "transmission_feasible");
  const double total_gain2 = (hrd_est.adjoint() * r).squaredNorm();
  return epsilon * epsilon < total_gain2;
}

VectorXcd random_unit_vector(int n, Philox& rng) {
  VectorXcd v(n);
  double norm = 0.0;
  do {
    for (int i = 0; i < n; ++i) v(i) = rng.next_cgaussian();
    norm = v.norm();
  } while (norm == 0.0);
  return v / norm;
}

}  // namespace afrelay
