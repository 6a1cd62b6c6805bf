#pragma once

#include "subdiag/algebra.hpp"
#include "subdiag/types.hpp"

namespace subdiag {

// Factorization theory over a block upper triangular algebra A in M_n.  The
// canonical positive factorization of a positive definite b is b = r* r with
// r invertible in A and the diagonal part Phi(r) positive definite blockwise;
// that normalization makes r unique, so independent construction routes can
// be compared matrix against matrix.

// Determinant gate for factorization: fails when fk_det(f) is below
// floor_rel times the operator norm, i.e. f is numerically too close to the
// determinant-zero boundary for a stable outer part.
bool is_factorable(const CMatrix& f, double floor_rel = 1e-8);

// Canonical r with b = r* r, computed by block Cholesky along the partition.
// Requires b positive definite.
CMatrix positive_factor(const TracialSubalgebra& alg, const CMatrix& b);

// The constructive route: a invertible in A with a b a* = 1, equivalently
// b^{-1} = a* a.  Projects the identity onto A_0 in the <.,.>_b geometry and
// rescales by the diagonal part of the residue.  Throws PreconditionError
// when (1-p) b (1-p)* leaves the diagonal, which is exactly how the
// construction detects a non maximal subdiagonal algebra.
CMatrix normalizer_via_projection(const TracialSubalgebra& alg, const CMatrix& b);

struct CanonicalFactor {
  CMatrix factor;    // dunitary * input, diagonal part positive definite
  CMatrix dunitary;  // unitary in D
};

// Left normalization by a D-unitary.  Requires the diagonal part of a to be
// invertible blockwise.
CanonicalFactor canonical_form(const TracialSubalgebra& alg, const CMatrix& a);

struct InnerOuter {
  CMatrix inner;  // unitary u
  CMatrix outer;  // canonical h in A, invertible
};

// f = u h with u unitary and h outer (invertible in A), h canonical.  Route
// one: h from the positive factorization of f* f, then u = f h^{-1}.
InnerOuter inner_outer(const TracialSubalgebra& alg, const CMatrix& f);

// Route two: v = projection of f onto span(f A_0); f - v has polar part u,
// and h = u* f.  Lands on the same canonical pair as route one, which the
// tests exploit as a cross check.
InnerOuter inner_outer_via_projection(const TracialSubalgebra& alg, const CMatrix& f);

struct OuterCheck {
  bool outer = false;
  bool in_algebra = false;
  bool diag_invertible = false;
  double det = 0.0;        // fk_det(h)
  double det_diag = 0.0;   // fk_det(Phi(h))
  double trace_abs = 0.0;  // |tau(h)|
};

// h is outer exactly when h lies in A and is invertible there; in the block
// model that reduces to invertible diagonal blocks.  The determinant and
// trace diagnostics ride along because several classical criteria compare
// them.
OuterCheck check_outer(const TracialSubalgebra& alg, const CMatrix& h);

struct RieszFactors {
  CMatrix y;
  CMatrix z;
};

// Splits x in A as x = y z with y, z in A, |z|^q = |x|^r for 1/r = 1/p + 1/q,
// z outer.  Pass an infinite exponent to drop that factor's constraint;
// p = infinity reproduces the inner-outer split.  Requires x factorable.
RieszFactors riesz_factor(const TracialSubalgebra& alg, const CMatrix& x, double p, double q);

// The outer element h with |h|^p = f for positive definite f.
CMatrix outer_with_modulus(const TracialSubalgebra& alg, const CMatrix& f, double p);

}  // namespace subdiag
