#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "subdiag/algebra.hpp"

using namespace subdiag;

namespace {

CMatrix unit(int n, int i, int j) {
  CMatrix e = CMatrix::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

// span{E11, E22, E33, E13} in M_3: multiplicative expectation, but neither
// dense nor trace maximal nor uniquely extending.  The standard negative
// control throughout the test suite.
TracialSubalgebra counterexample_algebra() {
  return TracialSubalgebra::explicit_span(
      3, {unit(3, 0, 0), unit(3, 1, 1), unit(3, 2, 2), unit(3, 0, 2)});
}

}  // namespace

TEST_CASE("block partition geometry") {
  BlockPartition p({2, 1, 3});
  CHECK(p.dim() == 6);
  CHECK(p.blocks() == 3);
  CHECK(p.block_of(0) == 0);
  CHECK(p.block_of(1) == 0);
  CHECK(p.block_of(2) == 1);
  CHECK(p.block_of(5) == 2);
  CHECK(p.block_start(2) == 3);
  CHECK(p.in_algebra(0, 5));
  CHECK(!p.in_algebra(5, 0));
  CHECK(p.in_diagonal(0, 1));
  CHECK(!p.in_diagonal(1, 2));
  CHECK(p.in_strict(1, 2));
  CHECK(!p.in_strict(0, 1));
  CHECK_THROWS_AS(BlockPartition({2, 0}), InputError);
  CHECK_THROWS_AS(BlockPartition({}), InputError);
}

TEST_CASE("block algebra basis dimensions") {
  auto alg = TracialSubalgebra::block_upper(BlockPartition({2, 1}));
  CHECK(alg.n() == 3);
  CHECK(alg.basis().size() == 7);       // 9 - 2 below-block entries
  CHECK(alg.diag_basis().size() == 5);  // 2x2 block + 1x1 block
  CHECK(alg.zero_basis().size() == 2);

  auto full = TracialSubalgebra::block_upper(BlockPartition({3}));
  CHECK(full.basis().size() == 9);
  CHECK(full.zero_basis().empty());

  auto tri = TracialSubalgebra::block_upper(BlockPartition({1, 1, 1}));
  CHECK(tri.basis().size() == 6);
  CHECK(tri.diag_basis().size() == 3);
  CHECK(tri.zero_basis().size() == 3);
}

TEST_CASE("expectation keeps diagonal blocks and nothing else") {
  auto alg = TracialSubalgebra::block_upper(BlockPartition({2, 1}));
  CMatrix x(3, 3);
  x << 1, 2, 3, 4, 5, 6, 7, 8, 9;
  CMatrix px = alg.expectation(x);
  CMatrix want(3, 3);
  want << 1, 2, 0, 4, 5, 0, 0, 0, 9;
  CHECK((px - want).norm() == 0.0);

  // Idempotent and trace preserving.
  CHECK((alg.expectation(px) - px).norm() == 0.0);
  CHECK(std::abs(trace_state(px) - trace_state(x)) < 1e-15);
}

TEST_CASE("expectation is a D bimodule map") {
  auto alg = TracialSubalgebra::block_upper(BlockPartition({2, 2}));
  Rng rng(101);
  for (int t = 0; t < 10; ++t) {
    CMatrix d1 = alg.random_diagonal(rng);
    CMatrix d2 = alg.random_diagonal(rng);
    CMatrix x = alg.random_selfadjoint(rng);
    CMatrix lhs = alg.expectation(d1 * x * d2);
    CMatrix rhs = d1 * alg.expectation(x) * d2;
    CHECK((lhs - rhs).norm() < 1e-12 * d1.norm() * x.norm() * d2.norm());
  }
}

TEST_CASE("membership tests follow the masks") {
  auto alg = TracialSubalgebra::block_upper(BlockPartition({1, 2}));
  CHECK(alg.contains(unit(3, 0, 2)));
  CHECK(alg.contains(unit(3, 2, 1)));  // inside the 2x2 block
  CHECK(!alg.contains(unit(3, 1, 0)));
  CHECK(alg.diagonal_contains(unit(3, 2, 1)));
  CHECK(!alg.diagonal_contains(unit(3, 0, 1)));
}

TEST_CASE("block algebras pass all four structure checks") {
  for (auto sizes : std::vector<std::vector<int>>{{1, 1}, {2, 1}, {1, 2, 1}, {4}}) {
    auto alg = TracialSubalgebra::block_upper(BlockPartition(sizes));
    auto mult = alg.check_multiplicative();
    CHECK(mult.holds);
    CHECK(mult.max_residual < 1e-14);
    auto dens = alg.check_density();
    CHECK(dens.holds);
    CHECK(dens.span_dim == alg.n() * alg.n());
    auto maxi = alg.check_tau_maximal();
    CHECK(maxi.holds);
    CHECK(maxi.annihilator_dim == static_cast<int>(alg.basis().size()));
    auto uniq = alg.check_unique_extension();
    CHECK(uniq.holds);
    CHECK(uniq.kernel_dim == 0);
  }
}

TEST_CASE("counterexample algebra fails exactly the right checks") {
  auto alg = counterexample_algebra();
  CHECK(alg.basis().size() == 4);
  CHECK(alg.diag_basis().size() == 3);
  CHECK(alg.zero_basis().size() == 1);

  // Expectation multiplies: products of basis elements never cross D.
  CHECK(alg.check_multiplicative().holds);

  auto dens = alg.check_density();
  CHECK(!dens.holds);
  CHECK(dens.span_dim == 5);
  CHECK(dens.full_dim == 9);
  // The witness is self-adjoint and orthogonal to A + A*.
  REQUIRE(dens.witness.size() > 0);
  CHECK(is_hermitian(dens.witness, 1e-12));
  for (const CMatrix& b : alg.basis()) {
    CHECK(std::abs(hs_inner(dens.witness, b)) < 1e-10);
    CHECK(std::abs(hs_inner(dens.witness, CMatrix(b.adjoint()))) < 1e-10);
  }

  auto maxi = alg.check_tau_maximal();
  CHECK(!maxi.holds);
  CHECK(maxi.algebra_dim == 4);
  CHECK(maxi.annihilator_dim == 8);
  CHECK(maxi.algebra_contained);

  auto uniq = alg.check_unique_extension();
  CHECK(!uniq.holds);
  CHECK(uniq.kernel_dim == 4);
}

TEST_CASE("a selfadjoint span has multiplicative expectation but no density") {
  // span{1, E12 + E21} is a commutative *-algebra, so D is the whole algebra
  // and the expectation restricted to it is the identity.
  CMatrix x = unit(2, 0, 1) + unit(2, 1, 0);
  auto alg = TracialSubalgebra::explicit_span(2, {x});
  CHECK(alg.basis().size() == 2);  // x*x = 1, closure adds nothing
  CHECK(alg.diag_basis().size() == 2);
  CHECK(alg.zero_basis().empty());
  CHECK(alg.check_multiplicative().holds);
  CHECK(!alg.check_density().holds);
  CHECK(alg.check_density().span_dim == 2);
  CHECK(!alg.check_tau_maximal().holds);
  CHECK(alg.check_tau_maximal().annihilator_dim == 4);
  CHECK(!alg.check_unique_extension().holds);
  CHECK(alg.check_unique_extension().kernel_dim == 2);
}

TEST_CASE("explicit closure grows to a fixed point") {
  // E12 alone generates span{1, E12}: nilpotent, closure stops immediately.
  auto nil = TracialSubalgebra::explicit_span(2, {unit(2, 0, 1)});
  CHECK(nil.basis().size() == 2);
  CHECK(nil.zero_basis().size() == 1);

  // E12 and E21 together generate all of M_2.
  auto full = TracialSubalgebra::explicit_span(2, {unit(2, 0, 1), unit(2, 1, 0)});
  CHECK(full.basis().size() == 4);
  CHECK(full.check_density().holds);
}

TEST_CASE("explicit construction of a block algebra matches the mask version") {
  auto block = TracialSubalgebra::block_upper(BlockPartition({2, 1}));
  std::vector<CMatrix> gens;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (block.partition().in_algebra(i, j)) gens.push_back(unit(3, i, j));
  auto expl = TracialSubalgebra::explicit_span(3, gens);

  CHECK(expl.basis().size() == block.basis().size());
  CHECK(expl.diag_basis().size() == block.diag_basis().size());
  CHECK(expl.zero_basis().size() == block.zero_basis().size());

  Rng rng(7);
  for (int t = 0; t < 5; ++t) {
    CMatrix x = block.random_selfadjoint(rng);
    CHECK((expl.expectation(x) - block.expectation(x)).norm() < 1e-10 * x.norm());
    CHECK((expl.project_algebra(x) - block.project_algebra(x)).norm() < 1e-10 * x.norm());
  }
}

TEST_CASE("random draws live where they should") {
  auto alg = TracialSubalgebra::block_upper(BlockPartition({2, 1, 1}));
  Rng rng(13);

  CMatrix a = alg.random_element(rng);
  CHECK(alg.contains(a));
  CMatrix a0 = alg.random_strict(rng);
  CHECK(alg.contains(a0));
  CHECK(alg.expectation(a0).norm() < 1e-14 * a0.norm());
  CMatrix d = alg.random_diagonal(rng);
  CHECK(alg.diagonal_contains(d));
  CMatrix h = alg.random_selfadjoint(rng);
  CHECK(is_hermitian(h));

  CMatrix pos = alg.random_positive(rng, 50.0);
  EigDecomp ed = herm_eig(pos);
  CHECK(ed.values(0) > 0.0);
  CHECK(ed.values(3) / ed.values(0) == doctest::Approx(50.0).epsilon(1e-9));

  CMatrix inv = alg.random_invertible(rng, 100.0);
  CHECK(alg.contains(inv));
  RVector sv = singular_values(inv);
  CHECK(sv(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sv(0) / sv(3) <= 100.0 + 1e-6);
}

TEST_CASE("random draws are seed deterministic") {
  auto alg = TracialSubalgebra::block_upper(BlockPartition({2, 2}));
  Rng r1(42), r2(42);
  CHECK((alg.random_element(r1) - alg.random_element(r2)).norm() == 0.0);
  CHECK((alg.random_positive(r1, 10.0) - alg.random_positive(r2, 10.0)).norm() == 0.0);
}
