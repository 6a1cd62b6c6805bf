#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "subdiag/algebra.hpp"
#include "subdiag/fkdet.hpp"
#include "subdiag/matcore.hpp"
#include "subdiag/rng.hpp"

using namespace subdiag;

namespace {

CMatrix random_full(Rng& rng, int n) {
  CMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.cgaussian();
  return a;
}

}  // namespace

TEST_CASE("determinant on hand examples") {
  CMatrix d = CMatrix::Zero(2, 2);
  d.diagonal() << 2.0, 8.0;
  CHECK(fk_det(d) == doctest::Approx(4.0).epsilon(1e-13));  // geometric mean
  CHECK(fk_det(CMatrix::Identity(5, 5)) == doctest::Approx(1.0));
  CHECK(fk_det(Complex(0.0, -3.0) * CMatrix::Identity(4, 4)) ==
        doctest::Approx(3.0).epsilon(1e-13));

  CMatrix sing = CMatrix::Zero(2, 2);
  sing(0, 1) = 7.0;
  CHECK(fk_det(sing) == 0.0);
  CHECK(fk_det(CMatrix::Zero(3, 3)) == 0.0);
}

TEST_CASE("determinant agrees with the LU route") {
  // exp(tau(log|a|)) versus |det a|^{1/n} computed by partial-pivot LU:
  // independent algorithms, same number.
  Rng rng(201);
  for (int n = 2; n <= 6; ++n) {
    for (int t = 0; t < 20; ++t) {
      CMatrix a = random_full(rng, n);
      const double via_svd = fk_det(a);
      const double via_lu = std::pow(std::abs(a.determinant()), 1.0 / n);
      CHECK(via_svd == doctest::Approx(via_lu).epsilon(1e-10));
    }
  }
}

TEST_CASE("determinant is scale covariant and adjoint invariant") {
  Rng rng(202);
  CMatrix a = random_full(rng, 4);
  CHECK(fk_det(2.5 * a) == doctest::Approx(2.5 * fk_det(a)).epsilon(1e-12));
  CHECK(fk_det(CMatrix(a.adjoint())) == doctest::Approx(fk_det(a)).epsilon(1e-11));
  CHECK(fk_det(polar(a).p) == doctest::Approx(fk_det(a)).epsilon(1e-11));
}

TEST_CASE("determinant is multiplicative") {
  Rng rng(203);
  for (int t = 0; t < 10; ++t) {
    CMatrix a = random_full(rng, 5), b = random_full(rng, 5);
    CHECK(fk_det(a * b) == doctest::Approx(fk_det(a) * fk_det(b)).epsilon(1e-10));
  }
}

TEST_CASE("determinant respects powers and order on positives") {
  auto alg = TracialSubalgebra::block_upper(BlockPartition({4}));
  Rng rng(204);
  CMatrix h = alg.random_positive(rng, 100.0);
  for (double q : {0.5, 2.0, 3.0}) {
    CHECK(fk_det(mat_pow(h, q)) == doctest::Approx(std::pow(fk_det(h), q)).epsilon(1e-10));
  }
  // 0 <= h <= k implies det(h) <= det(k).
  CMatrix g = random_full(rng, 4);
  CMatrix k = h + g * g.adjoint();
  CHECK(fk_det(h) <= fk_det(k) * (1.0 + 1e-12));
}

TEST_CASE("regularized determinant decreases to the determinant") {
  Rng rng(205);
  CMatrix a = random_full(rng, 4);
  double prev = fk_det_regularized(a, 1.0);
  for (double eps : {1e-1, 1e-3, 1e-6, 1e-9}) {
    const double cur = fk_det_regularized(a, eps);
    CHECK(cur <= prev * (1.0 + 1e-14));
    prev = cur;
  }
  CHECK(prev == doctest::Approx(fk_det(a)).epsilon(1e-8));
  CHECK(fk_det_regularized(a, 0.0) == doctest::Approx(fk_det(a)).epsilon(1e-12));

  // Singular input: the regularized value still collapses to zero.
  CMatrix sing = CMatrix::Zero(2, 2);
  sing(0, 1) = 1.0;
  CHECK(fk_det_regularized(sing, 1e-12) < 2e-6);
  CHECK_THROWS_AS(fk_det_regularized(a, -1.0), PreconditionError);
}

TEST_CASE("perturbation witness on hand examples") {
  // diag(1,-1): t = 0.5 gives det(diag(0.5, 1.5)) = sqrt(3)/2 < 1.
  CMatrix h = CMatrix::Zero(2, 2);
  h.diagonal() << 1.0, -1.0;
  auto w = det_perturbation_witness(h);
  REQUIRE(w.has_value());
  CHECK(w->t == doctest::Approx(0.5));
  CHECK(w->det == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-12));

  // Identity: first magnitude already works, det(0.5 * 1) = 0.5.
  auto wi = det_perturbation_witness(CMatrix::Identity(3, 3));
  REQUIRE(wi.has_value());
  CHECK(wi->t == doctest::Approx(0.5));
  CHECK(wi->det == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("perturbation witness exists for every nonzero selfadjoint element") {
  Rng rng(206);
  auto alg = TracialSubalgebra::block_upper(BlockPartition({3, 3}));
  for (int t = 0; t < 50; ++t) {
    CMatrix h = alg.random_selfadjoint(rng);
    auto w = det_perturbation_witness(h);
    REQUIRE(w.has_value());
    CHECK(w->det < 1.0 - 1e-6);
    // Strict concavity makes the largest magnitude succeed immediately.
    CHECK(std::abs(w->t) * op_norm(h) == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("perturbation witness refuses the zero element and non-selfadjoint input") {
  CHECK(!det_perturbation_witness(CMatrix::Zero(3, 3)).has_value());
  CMatrix a(2, 2);
  a << 0.0, 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(det_perturbation_witness(a), PreconditionError);
}
