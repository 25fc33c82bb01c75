#include "afrelay/baselines.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "afrelay/linalg.hpp"
#include "afrelay/robust_core.hpp"

namespace afrelay::baselines {
namespace {

double objective(const Eigen::Ref<const MatrixXcd>& h,
                 const Eigen::Ref<const VectorXcd>& w, double epsilon) {
  return (h * w).norm() - epsilon * w.norm();
}

MatrixXcd hermitize(const MatrixXcd& m) { return 0.5 * (m + m.adjoint()); }

MatrixXcd psd_project(const MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(hermitize(m));
  const VectorXd clamped = es.eigenvalues().cwiseMax(0.0);
  return hermitize(es.eigenvectors() * clamped.asDiagonal() *
                   es.eigenvectors().adjoint());
}

MatrixXcd diag_clip(MatrixXcd m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    m(i, i) = std::min(m(i, i).real(), 1.0);
  }
  return m;
}

// Congruence-scale oversized diagonal entries; keeps the cone membership.
MatrixXcd shrink_into_slab(MatrixXcd m) {
  const Eigen::Index n = m.rows();
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(n);
  bool touched = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = m(i, i).real();
    if (d > 1.0) {
      scale(i) = 1.0 / std::sqrt(d);
      touched = true;
    }
  }
  if (!touched) return m;
  return scale.asDiagonal() * m * scale.asDiagonal();
}

// Near-projection onto the PSD-and-bounded-diagonal set: Dykstra alternation
// (exact in the limit), finished on the feasible side so iterates never carry
// infeasibility into the stationarity measure.
MatrixXcd project_feasible(const MatrixXcd& m, int max_sweeps = 150) {
  {
    const MatrixXcd fast = psd_project(m);
    if (fast.diagonal().real().maxCoeff() <= 1.0 + 1e-15) return fast;
  }
  MatrixXcd x = hermitize(m);
  MatrixXcd p = MatrixXcd::Zero(m.rows(), m.cols());
  MatrixXcd q = p;
  const double scale = std::max(x.norm(), 1.0);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const MatrixXcd y = psd_project(x + p);
    p = x + p - y;
    const MatrixXcd z = diag_clip(y + q);
    q = y + q - z;
    const double delta = (z - x).norm();
    x = z;
    if (delta <= 1e-14 * scale) break;
  }
  return shrink_into_slab(psd_project(x));
}

struct InnerProblem {
  const MatrixXcd& a;  // normalized Gram matrix, lambda_max = 1
  double c = 0.0;      // linearized radius penalty on the trace

  double value(const MatrixXcd& u) const {
    const double q1 = std::max(
        (a.array().conjugate() * u.array()).sum().real(), 0.0);
    return std::sqrt(q1) - c * u.real().trace();
  }
  MatrixXcd gradient(const MatrixXcd& u) const {
    const double q1 = std::max(
        (a.array().conjugate() * u.array()).sum().real(), 1e-14);
    MatrixXcd g = a / (2.0 * std::sqrt(q1));
    g.diagonal().array() -= c;
    return g;
  }
};

double inner_dot(const MatrixXcd& x, const MatrixXcd& y) {
  return (x.array().conjugate() * y.array()).sum().real();
}

struct InnerSolveOutcome {
  MatrixXcd point;
  double value = 0.0;
  bool converged = false;
};

// Monotone projected-gradient ascent with backtracking. The step is capped so
// the prox target stays within a short reach of the feasible set, which keeps
// the Dykstra projection cheap and accurate. Stationarity is checked with a
// short probe step: its gradient-mapping norm upper-bounds the unit-step one.
InnerSolveOutcome maximize_inner(const InnerProblem& prob, MatrixXcd start,
                                 double tol, int max_iter) {
  constexpr double kProbeStep = 0.1;
  InnerSolveOutcome out;
  MatrixXcd x = project_feasible(start);
  out.value = prob.value(x);
  const double reach = 2.0;
  double step = 1.0;
  const auto stationary = [&](const MatrixXcd& point) {
    const MatrixXcd mapped =
        project_feasible(point + kProbeStep * prob.gradient(point), 2000);
    return (point - mapped).norm() / kProbeStep <= tol;
  };
  for (int it = 0; it < max_iter; ++it) {
    const MatrixXcd grad = prob.gradient(x);
    const double base = prob.value(x);
    const double step_cap = reach / std::max(grad.norm(), 1e-12);
    step = std::min(step, step_cap);
    MatrixXcd cand;
    while (true) {
      cand = project_feasible(x + step * grad);
      const MatrixXcd diff = cand - x;
      const double rhs = base + inner_dot(grad, diff) -
                         diff.squaredNorm() / (2.0 * step) - 1e-15;
      if (prob.value(cand) >= rhs || step < 1e-16) break;
      step *= 0.5;
    }
    if (prob.value(cand) >= base) x = cand;
    if (it % 10 == 0 || it == max_iter - 1) {
      if (stationary(x)) {
        out.point = x;
        out.value = prob.value(x);
        out.converged = true;
        return out;
      }
    }
    step = std::min(step * 1.2, step_cap);
  }
  out.point = x;
  out.value = prob.value(x);
  out.converged = stationary(x);
  return out;
}

}  // namespace

std::pair<VectorXcd, double> sum_power_design(
    const Eigen::Ref<const MatrixXcd>& hrd_est, double epsilon,
    double norm2_budget) {
  if (norm2_budget <= 0.0) {
    throw std::invalid_argument("sum_power_design: budget must be positive");
  }
  const linalg::SingularTriple triple =
      linalg::principal_singular_triple(hrd_est);
  const double scale = std::sqrt(norm2_budget);
  return {scale * triple.right, scale * (triple.sigma - epsilon)};
}

AlternatingBaselineResult perfect_csi_alternating(
    const Eigen::Ref<const MatrixXcd>& hsr,
    const Eigen::Ref<const MatrixXcd>& hrd_est,
    const Eigen::Ref<const VectorXcd>& b0,
    const Eigen::Ref<const VectorXcd>& r0, double tol, int max_iter) {
  if (std::abs(b0.norm() - 1.0) > 1e-6 || std::abs(r0.norm() - 1.0) > 1e-6) {
    throw std::invalid_argument(
        "perfect_csi_alternating: starts must have unit norm");
  }
  const MatrixXcd gram = hsr.adjoint() * hsr;
  AlternatingBaselineResult result;
  result.source = b0;
  result.receive = r0;
  double source_value = (gram * result.source).squaredNorm();
  double receive_value = std::numeric_limits<double>::quiet_NaN();
  for (int it = 1; it <= max_iter; ++it) {
    const VectorXcd w = equal_power_weights(hrd_est, result.receive);
    const VectorXcd effective = hrd_est * w;
    const double effective_norm = effective.norm();
    if (effective_norm == 0.0) {
      throw IterationError("perfect_csi_alternating: zero effective channel",
                           result.trace);
    }
    result.receive = effective / effective_norm;
    result.trace.push_back(effective_norm);

    const VectorXcd gb = gram * result.source;
    const double gb_norm = gb.norm();
    if (gb_norm == 0.0) {
      throw IterationError("perfect_csi_alternating: zero first-hop channel",
                           result.trace);
    }
    const VectorXcd b_next = gb / gb_norm;
    const double source_next = (gram * b_next).squaredNorm();

    const bool source_done = std::abs(source_next - source_value) <= tol;
    const bool receive_done =
        it >= 2 && std::abs(effective_norm - receive_value) <= tol;
    result.source = b_next;
    source_value = source_next;
    receive_value = effective_norm;
    result.iterations = it;
    if (source_done && receive_done) {
      result.source = linalg::canonical_phase(result.source);
      return result;
    }
  }
  throw IterationError("perfect_csi_alternating: no convergence within " +
                           std::to_string(max_iter) + " iterations",
                       result.trace);
}

MatrixXcd adversarial_error(const Eigen::Ref<const MatrixXcd>& hrd_est,
                            const Eigen::Ref<const VectorXcd>& w,
                            const Eigen::Ref<const VectorXcd>& r,
                            double epsilon) {
  const double w_norm = w.norm();
  if (w_norm == 0.0) {
    throw std::invalid_argument("adversarial_error: zero relay weights");
  }
  const std::complex<double> through = r.dot(hrd_est * w);  // r^H H w
  const double phase = std::abs(through) > 0.0 ? std::arg(through) : 0.0;
  return (-std::polar(epsilon / w_norm, phase)) * (r * w.adjoint());
}

OracleResult exhaustive_box_search(const Eigen::Ref<const MatrixXcd>& hrd_est,
                                   double epsilon, int magnitude_grid,
                                   int phase_grid) {
  const int n = static_cast<int>(hrd_est.cols());
  if (n < 1 || n > 3) {
    throw std::invalid_argument(
        "exhaustive_box_search: only up to 3 relay antennas");
  }
  if (magnitude_grid < 2 || phase_grid < 1) {
    throw std::invalid_argument("exhaustive_box_search: grid too coarse");
  }
  OracleResult result;
  result.w_best = VectorXcd::Zero(n);
  result.f_best = 0.0;  // w = 0 is always feasible

  std::vector<double> mags(n, 0.0), phases(n, 0.0);
  VectorXcd w(n);
  const auto evaluate = [&]() {
    for (int i = 0; i < n; ++i) w(i) = std::polar(mags[i], phases[i]);
    ++result.evaluations;
    return objective(hrd_est, w, epsilon);
  };

  std::vector<double> best_mags(n, 0.0), best_phases(n, 0.0);
  const double mag_step = 1.0 / (magnitude_grid - 1);
  const double phase_step = 2.0 * M_PI / phase_grid;

  std::vector<int> mag_index(n, 0);
  while (true) {
    for (int i = 0; i < n; ++i) mags[i] = mag_index[i] * mag_step;
    int anchor = 0;
    for (int i = 1; i < n; ++i) {
      if (mags[i] > mags[anchor]) anchor = i;
    }
    // The objective is invariant to a global phase, so the largest-magnitude
    // coordinate keeps phase zero and the rest sweep the grid.
    std::vector<int> phase_index(n, 0);
    while (true) {
      for (int i = 0; i < n; ++i) {
        phases[i] = (i == anchor) ? 0.0 : phase_index[i] * phase_step;
      }
      const double f = evaluate();
      if (f > result.f_best) {
        result.f_best = f;
        result.w_best = w;
        best_mags = mags;
        best_phases = phases;
      }
      int carry = 0;
      while (carry < n) {
        if (carry == anchor) {
          ++carry;
          continue;
        }
        if (++phase_index[carry] < phase_grid) break;
        phase_index[carry] = 0;
        ++carry;
      }
      if (carry >= n) break;
    }
    int carry = 0;
    while (carry < n && ++mag_index[carry] == magnitude_grid) {
      mag_index[carry] = 0;
      ++carry;
    }
    if (carry >= n) break;
  }

  // Coordinate refinement around the best grid point, halving both steps.
  int anchor = 0;
  for (int i = 1; i < n; ++i) {
    if (best_mags[i] > best_mags[anchor]) anchor = i;
  }
  double dm = mag_step, dp = phase_step;
  for (int round = 0; round < 10; ++round) {
    bool improved = true;
    int sweeps = 0;
    while (improved && sweeps++ < 50) {
      improved = false;
      for (int i = 0; i < n; ++i) {
        for (const double delta : {dm, -dm}) {
          mags = best_mags;
          phases = best_phases;
          mags[i] = std::clamp(best_mags[i] + delta, 0.0, 1.0);
          const double f = evaluate();
          if (f > result.f_best) {
            result.f_best = f;
            result.w_best = w;
            best_mags = mags;
            improved = true;
          }
        }
        if (i == anchor) continue;
        for (const double delta : {dp, -dp}) {
          mags = best_mags;
          phases = best_phases;
          phases[i] = best_phases[i] + delta;
          const double f = evaluate();
          if (f > result.f_best) {
            result.f_best = f;
            result.w_best = w;
            best_phases = phases;
            improved = true;
          }
        }
      }
    }
    dm *= 0.5;
    dp *= 0.5;
  }
  return result;
}

PotdcResult potdc_solve(const Eigen::Ref<const MatrixXcd>& hrd_est,
                        double epsilon, double outer_tol, double inner_tol,
                        int max_outer, int max_inner) {
  const int n = static_cast<int>(hrd_est.cols());
  if (n < 1 || n > 12) {
    throw std::invalid_argument("potdc_solve: supported up to 12 antennas");
  }
  const MatrixXcd gram = hermitize(hrd_est.adjoint() * hrd_est);
  const double gram_scale = linalg::principal_eigenpair(gram).value;
  if (gram_scale <= 0.0) {
    throw std::invalid_argument("potdc_solve: zero channel");
  }
  const MatrixXcd a_hat = gram / gram_scale;
  const double eps_hat = epsilon / std::sqrt(gram_scale);

  PotdcResult result;
  result.state.lifted = MatrixXcd::Identity(n, n);
  result.state.q_center = static_cast<double>(n);

  double previous_objective = std::numeric_limits<double>::quiet_NaN();
  for (int outer = 0; outer < max_outer; ++outer) {
    InnerProblem prob{a_hat, eps_hat / (2.0 * std::sqrt(result.state.q_center))};
    const InnerSolveOutcome inner =
        maximize_inner(prob, result.state.lifted, inner_tol, max_inner);
    if (!inner.converged) {
      throw PotdcError("potdc_solve: inner subproblem did not reach " +
                           std::to_string(inner_tol) + " stationarity",
                       result.state);
    }
    result.state.lifted = inner.point;
    result.state.q1 =
        gram_scale * std::max(inner_dot(a_hat, inner.point), 0.0);
    result.state.q2 = std::max(inner.point.real().trace(), 0.0);
    result.state.iteration = outer + 1;

    const double qc = result.state.q_center;
    const double linearized =
        std::sqrt(gram_scale) *
        (std::sqrt(result.state.q1 / gram_scale) -
         eps_hat * (result.state.q2 - qc) / (2.0 * std::sqrt(qc)) -
         eps_hat * std::sqrt(qc));
    result.objective_trace.push_back(linearized);
    result.outer_states.push_back(result.state);
    const bool settled = outer > 0 &&
                         std::abs(linearized - previous_objective) <= outer_tol;
    previous_objective = linearized;
    result.state.q_center = std::max(result.state.q2, 1e-9);
    if (settled) break;
  }
  result.f_relaxed =
      std::sqrt(result.state.q1) - epsilon * std::sqrt(result.state.q2);
  return result;
}

VectorXcd rank1_extract(const Eigen::Ref<const MatrixXcd>& lifted, Philox& rng,
                        int samples, const Eigen::Ref<const MatrixXcd>& hrd_est,
                        double epsilon) {
  const int n = static_cast<int>(lifted.rows());
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(hermitize(lifted));
  const VectorXd evals = es.eigenvalues().cwiseMax(0.0);
  const double top = evals(n - 1);
  if (top <= 0.0) return VectorXcd::Zero(n);

  const double second = n >= 2 ? evals(n - 2) : 0.0;
  const auto box_clip = [](VectorXcd v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double mag = std::abs(v(i));
      if (mag > 1.0) v(i) /= mag;
    }
    return v;
  };
  if (second / top <= 1e-6) {
    return box_clip(linalg::canonical_phase(std::sqrt(top) *
                                            es.eigenvectors().col(n - 1)));
  }

  const MatrixXcd sqrt_factor = es.eigenvectors() *
                                evals.cwiseSqrt().asDiagonal() *
                                es.eigenvectors().adjoint();
  VectorXcd best = box_clip(linalg::canonical_phase(
      std::sqrt(top) * es.eigenvectors().col(n - 1)));
  double best_f = objective(hrd_est, best, epsilon);
  for (int s = 0; s < samples; ++s) {
    VectorXcd draw(n);
    for (int i = 0; i < n; ++i) draw(i) = rng.next_cgaussian();
    VectorXcd candidate = sqrt_factor * draw;
    double peak = 0.0;
    for (int i = 0; i < n; ++i) peak = std::max(peak, std::abs(candidate(i)));
    if (peak < 1e-300) continue;
    candidate /= peak;
    const double f = objective(hrd_est, candidate, epsilon);
    if (f > best_f) {
      best_f = f;
      best = candidate;
    }
  }
  return best;
}

InnerOracleResult projected_gradient_inner(
    const Eigen::Ref<const VectorXd>& gains, double epsilon,
    double stationarity_tol, int max_iter) {
  const int n = static_cast<int>(gains.size());
  const auto clamp01 = [](VectorXd v) {
    return v.cwiseMax(0.0).cwiseMin(1.0).eval();
  };
  const auto value = [&](const VectorXd& m) {
    return gains.dot(m) - epsilon * m.norm();
  };
  const auto gradient = [&](const VectorXd& m) {
    const double norm = m.norm();
    if (norm == 0.0) return VectorXd(gains);
    return VectorXd(gains - (epsilon / norm) * m);
  };

  InnerOracleResult result;
  VectorXd m = VectorXd::Constant(n, 0.5);
  const double step_ref = 1.0 / (epsilon + gains.maxCoeff() + 1.0);
  double step = 1.0;
  for (int it = 0; it < max_iter; ++it) {
    result.iterations = it + 1;
    const VectorXd grad = gradient(m);
    const double base = value(m);
    VectorXd cand;
    while (true) {
      cand = clamp01(m + step * grad);
      const VectorXd diff = cand - m;
      if (value(cand) >=
              base + grad.dot(diff) - diff.squaredNorm() / (2.0 * step) - 1e-17 ||
          step < 1e-17) {
        break;
      }
      step *= 0.5;
    }
    m = cand;
    step = std::min(step * 1.3, 1e6);
    const VectorXd mapped = clamp01(m + step_ref * gradient(m));
    if ((m - mapped).norm() <= stationarity_tol * step_ref) break;
    if (m.norm() <= 1e-13) {
      m.setZero();  // shutdown regime; the optimum is the origin
      break;
    }
  }
  result.magnitudes = m;
  result.value = value(m);
  return result;
}

}  // namespace afrelay::baselines
