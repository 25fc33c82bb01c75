#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <utility>

namespace afrelay::linalg {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

/// Largest eigenvalue of a Hermitian PSD matrix together with a unit
/// eigenvector, phase-normalized so the largest-magnitude entry is real
/// nonnegative.
struct EigenPair {
  double value = 0.0;
  VectorXcd vector;
};

struct SingularTriple {
  double sigma = 0.0;
  VectorXcd left;
  VectorXcd right;
};

/// Power iteration giving up; carries the best iterate reached.
class EigenSolveError : public std::runtime_error {
 public:
  EigenSolveError(const std::string& what, EigenPair best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const EigenPair& best() const { return best_; }

 private:
  EigenPair best_;
};

/// Rotate v by a unit scalar so its largest-magnitude entry is real >= 0.
VectorXcd canonical_phase(VectorXcd v);

VectorXcd matvec(const Eigen::Ref<const MatrixXcd>& a,
                 const Eigen::Ref<const VectorXcd>& x);

/// Principal eigenpair of a Hermitian PSD matrix by power iteration.
///
/// Starts from the normalized all-ones vector; a seeded random restart kicks
/// in on stagnation, and a short random-start probe guards against a start
/// vector that is orthogonal to the dominant eigenspace. Satisfies
/// ||A v - lambda v|| <= tol * lambda on return.
EigenPair principal_eigenpair(const Eigen::Ref<const MatrixXcd>& a,
                              double tol = 1e-10, int max_iter = 10000);

/// sigma = sqrt(lambda_max(A^H A)), right = the matching eigenvector,
/// left = A * right / sigma.
SingularTriple principal_singular_triple(const Eigen::Ref<const MatrixXcd>& a);

}  // namespace afrelay::linalg
