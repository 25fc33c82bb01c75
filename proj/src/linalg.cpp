#include "afrelay/linalg.hpp"

#include <cmath>
#include <limits>

#include "afrelay/rng.hpp"

namespace afrelay::linalg {
namespace {

VectorXcd random_start(Eigen::Index n) {
  // Fixed key: the restart is part of the deterministic contract.
  Philox rng(0x5eed0f1e1dULL, static_cast<std::uint64_t>(n));
  VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.next_cgaussian();
  const double norm = v.norm();
  return norm > 0 ? VectorXcd(v / norm) : VectorXcd::Unit(n, 0);
}

struct PowerRun {
  EigenPair pair;
  bool converged = false;
  double residual = 0.0;
};

PowerRun power_iterate(const Eigen::Ref<const MatrixXcd>& a, VectorXcd v,
                       double tol, int max_iter) {
  PowerRun run;
  run.residual = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    VectorXcd av = a * v;
    const double lambda = v.dot(av).real();  // v^H A v, real for Hermitian A
    const double residual = (av - lambda * v).norm();
    if (residual < run.residual) {
      run.residual = residual;
      run.pair = {lambda, v};
    }
    if (residual <= tol * std::abs(lambda)) {
      run.pair = {lambda, v};
      run.residual = residual;
      run.converged = true;
      return run;
    }
    const double av_norm = av.norm();
    if (av_norm == 0.0) {
      // v landed in the null space; only A = 0 makes that the answer, and the
      // zero matrix is handled before we get here. Let the caller restart.
      return run;
    }
    v = av / av_norm;
  }
  return run;
}

}  // namespace

VectorXcd canonical_phase(VectorXcd v) {
  Eigen::Index pivot = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v(i));
    if (mag > best) {
      best = mag;
      pivot = i;
    }
  }
  if (best <= 0.0) return v;
  v *= std::conj(v(pivot)) / best;
  v(pivot) = best;  // force the pivot exactly real
  return v;
}

VectorXcd matvec(const Eigen::Ref<const MatrixXcd>& a,
                 const Eigen::Ref<const VectorXcd>& x) {
  if (a.cols() != x.size()) {
    throw std::invalid_argument("matvec: dimension mismatch (" +
                                std::to_string(a.cols()) + " columns vs " +
                                std::to_string(x.size()) + " entries)");
  }
  return a * x;
}

EigenPair principal_eigenpair(const Eigen::Ref<const MatrixXcd>& a, double tol,
                              int max_iter) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw std::invalid_argument("principal_eigenpair: matrix must be square");
  }
  const Eigen::Index n = a.rows();
  const double scale = a.norm();
  if ((a - a.adjoint()).norm() > 1e-10 * std::max(scale, 1e-300)) {
    throw std::invalid_argument("principal_eigenpair: matrix is not Hermitian");
  }
  if (scale == 0.0) {
    return {0.0, VectorXcd::Constant(n, 1.0 / std::sqrt(double(n)))};
  }

  const VectorXcd ones_start = VectorXcd::Constant(n, 1.0 / std::sqrt(double(n)));
  PowerRun run = power_iterate(a, ones_start, tol, max_iter);
  if (!run.converged) {
    PowerRun retry = power_iterate(a, random_start(n), tol, max_iter);
    if (retry.converged || retry.residual < run.residual) run = retry;
    if (!run.converged) {
      throw EigenSolveError(
          "principal_eigenpair: no convergence within " +
              std::to_string(max_iter) + " iterations (residual " +
              std::to_string(run.residual) + ")",
          run.pair);
    }
  } else {
    // The deterministic start can sit in a non-dominant invariant subspace
    // (zero residual, wrong eigenvalue). A short probe from a random vector
    // detects that; if it finds a larger Rayleigh quotient, rerun from there.
    VectorXcd probe = random_start(n);
    for (int it = 0; it < 25; ++it) {
      VectorXcd av = a * probe;
      const double norm = av.norm();
      if (norm == 0.0) break;
      probe = av / norm;
    }
    const double probe_value = probe.dot(a * probe).real();
    if (probe_value > run.pair.value * (1.0 + 10.0 * tol) + 10.0 * tol * scale) {
      PowerRun retry = power_iterate(a, probe, tol, max_iter);
      if (retry.converged) run = retry;
    }
  }

  if (run.pair.value < -tol * scale) {
    throw std::invalid_argument(
        "principal_eigenpair: matrix is not positive semidefinite");
  }
  run.pair.value = std::max(run.pair.value, 0.0);
  run.pair.vector = canonical_phase(std::move(run.pair.vector));
  return run.pair;
}

SingularTriple principal_singular_triple(const Eigen::Ref<const MatrixXcd>& a) {
  if (a.size() == 0 || a.norm() == 0.0) {
    throw std::invalid_argument("principal_singular_triple: zero matrix");
  }
  const MatrixXcd gram = a.adjoint() * a;
  EigenPair pair = principal_eigenpair(gram);
  SingularTriple triple;
  triple.sigma = std::sqrt(std::max(pair.value, 0.0));
  triple.right = std::move(pair.vector);
  triple.left = (a * triple.right) / triple.sigma;
  return triple;
}

}  // namespace afrelay::linalg
