#include "afrelay/linalg.hpp"

#include <complex>

#include "doctest.h"
#include "test_oracles.hpp"

using namespace afrelay;
using namespace afrelay::linalg;
using std::complex;
using test_oracles::random_complex;

TEST_CASE("matvec on identity and permutation") {
  MatrixXcd eye = MatrixXcd::Identity(2, 2);
  VectorXcd x(2);
  x << complex<double>(1, 0), complex<double>(0, 1);
  CHECK((matvec(eye, x) - x).norm() == doctest::Approx(0.0));

  MatrixXcd swap(2, 2);
  swap << 0, 1, 1, 0;
  VectorXcd e0(2);
  e0 << 1, 0;
  VectorXcd swapped = matvec(swap, e0);
  CHECK(std::abs(swapped(0)) == doctest::Approx(0.0));
  CHECK(std::abs(swapped(1) - 1.0) == doctest::Approx(0.0));
}

TEST_CASE("matvec matches entrywise summation") {
  Philox rng(11, 0);
  for (int k = 0; k < 20; ++k) {
    MatrixXcd a = random_complex(3, 2, rng);
    VectorXcd x = random_complex(2, 1, rng);
    CHECK((matvec(a, x) - test_oracles::matvec_by_summation(a, x)).norm() <=
          1e-14);
  }
}

TEST_CASE("matvec rejects dimension mismatch") {
  MatrixXcd a = MatrixXcd::Zero(2, 3);
  VectorXcd x = VectorXcd::Zero(2);
  CHECK_THROWS_AS(matvec(a, x), std::invalid_argument);
}

TEST_CASE("principal eigenpair of a diagonal matrix") {
  MatrixXcd a = MatrixXcd::Zero(2, 2);
  a(0, 0) = 3.0;
  a(1, 1) = 1.0;
  EigenPair pair = principal_eigenpair(a);
  CHECK(pair.value == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(std::abs(pair.vector(0)) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(pair.vector(1)) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(pair.vector(0).real() > 0.0);  // canonical phase
}

TEST_CASE("principal eigenpair of the all-ones matrix") {
  MatrixXcd a = MatrixXcd::Constant(2, 2, 1.0);
  EigenPair pair = principal_eigenpair(a);
  CHECK(pair.value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(pair.vector(0) - pair.vector(1)) <= 1e-9);
  CHECK(pair.vector.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("principal eigenpair matches the det-bisection oracle") {
  Philox rng(42, 0);
  for (int k = 0; k < 10; ++k) {
    MatrixXcd b = random_complex(4, 4, rng);
    MatrixXcd a = b.adjoint() * b;
    EigenPair pair = principal_eigenpair(a);
    const double oracle = test_oracles::lambda_max_by_det_bisection(a);
    CHECK(std::abs(pair.value - oracle) <= 1e-9 * std::max(oracle, 1.0));
    CHECK((a * pair.vector - pair.value * pair.vector).norm() <=
          1e-10 * pair.value);
  }
}

TEST_CASE("principal eigenpair rejects non-Hermitian input") {
  MatrixXcd a(2, 2);
  a << 1.0, 2.0, 3.0, 4.0;
  CHECK_THROWS_AS(principal_eigenpair(a), std::invalid_argument);
}

TEST_CASE("principal eigenpair escapes a non-dominant invariant start") {
  // The all-ones start is exactly orthogonal to the dominant eigenvector.
  MatrixXcd a(2, 2);
  a << 2.0, -1.0, -1.0, 2.0;
  EigenPair pair = principal_eigenpair(a);
  CHECK(pair.value == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("exhausted iteration budget raises an error with the best iterate") {
  Philox rng(48, 0);
  MatrixXcd b = random_complex(5, 5, rng);
  MatrixXcd a = b.adjoint() * b;
  try {
    principal_eigenpair(a, 1e-14, 1);
    FAIL("expected EigenSolveError");
  } catch (const EigenSolveError& e) {
    CHECK(e.best().vector.size() == 5);
    CHECK(e.best().value > 0.0);
  }
}

TEST_CASE("rayleigh quotient never exceeds the principal value") {
  Philox rng(43, 0);
  for (int k = 0; k < 50; ++k) {
    MatrixXcd b = random_complex(3, 3, rng);
    MatrixXcd a = b.adjoint() * b;
    EigenPair pair = principal_eigenpair(a);
    VectorXcd x = random_complex(3, 1, rng);
    x /= x.norm();
    CHECK(x.dot(a * x).real() <= pair.value + 1e-10 * pair.value + 1e-12);
  }
}

TEST_CASE("principal value scales linearly with a positive factor") {
  Philox rng(44, 0);
  MatrixXcd b = random_complex(3, 3, rng);
  MatrixXcd a = b.adjoint() * b;
  const double base = principal_eigenpair(a).value;
  for (const double c : {0.5, 2.0, 17.0}) {
    CHECK(principal_eigenpair(c * a).value ==
          doctest::Approx(c * base).epsilon(1e-9));
  }
}

TEST_CASE("principal singular triple on structured inputs") {
  MatrixXcd a = MatrixXcd::Zero(2, 2);
  a(0, 0) = 2.0;
  a(1, 1) = 1.0;
  CHECK(principal_singular_triple(a).sigma ==
        doctest::Approx(2.0).epsilon(1e-10));

  Philox rng(45, 0);
  VectorXcd u = random_complex(3, 1, rng);
  VectorXcd v = random_complex(4, 1, rng);
  MatrixXcd rank_one = u * v.adjoint();
  CHECK(principal_singular_triple(rank_one).sigma ==
        doctest::Approx(u.norm() * v.norm()).epsilon(1e-9));
}

TEST_CASE("principal singular value squared matches the eigen oracle") {
  Philox rng(46, 0);
  for (int k = 0; k < 10; ++k) {
    MatrixXcd a = random_complex(3, 3, rng);
    const SingularTriple triple = principal_singular_triple(a);
    const double oracle =
        test_oracles::lambda_max_by_det_bisection(a.adjoint() * a);
    CHECK(std::abs(triple.sigma * triple.sigma - oracle) <=
          1e-10 * std::max(oracle, 1.0));
    CHECK(triple.left.norm() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(triple.right.norm() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK((a * triple.right - triple.sigma * triple.left).norm() <= 1e-9);
  }
}

TEST_CASE("principal singular triple rejects the zero matrix") {
  CHECK_THROWS_AS(principal_singular_triple(MatrixXcd::Zero(2, 2)),
                  std::invalid_argument);
}

TEST_CASE("matvec output is bounded by the operator norm") {
  Philox rng(47, 0);
  for (int k = 0; k < 30; ++k) {
    MatrixXcd a = random_complex(4, 3, rng);
    VectorXcd x = random_complex(3, 1, rng);
    const double sigma = principal_singular_triple(a).sigma;
    CHECK(matvec(a, x).norm() <= sigma * x.norm() * (1.0 + 1e-10) + 1e-12);
  }
}
