#pragma once

#include <vector>

#include "subdiag/types.hpp"

namespace subdiag {

// Dense complex matrix kernels shared by every module.  All state-level
// quantities use the normalized trace tau = tr/n, so scalars are dimension
// free and the identity has norm one.

// tau(x) = tr(x)/n.
Complex trace_state(const CMatrix& x);

// <x, y> = tau(y* x).  Norm of the identity is 1.
Complex hs_inner(const CMatrix& x, const CMatrix& y);
double hs_norm(const CMatrix& x);

// <x, y>_h = tau(h^{1/2} y* x h^{1/2}).  Callers pass the positive square
// root directly since they typically reuse it across many products.
Complex weighted_inner(const CMatrix& x, const CMatrix& y, const CMatrix& sqrt_h);

// Largest singular value.
double op_norm(const CMatrix& x);

bool is_hermitian(const CMatrix& x, double rel_tol = tol::eig);

struct EigDecomp {
  RVector values;   // ascending
  CMatrix vectors;  // unitary, column i pairs with values[i]
};

// Eigendecomposition of a Hermitian matrix.  Throws PreconditionError if the
// input fails the Hermiticity check; the symmetrized (a + a*)/2 is then
// decomposed so roundoff-level asymmetry cannot leak into the result.
EigDecomp herm_eig(const CMatrix& a);

// Singular values in descending order.
RVector singular_values(const CMatrix& a);

struct PolarDecomp {
  CMatrix u;  // partial isometry with u*u = support projection of p
  CMatrix p;  // |a|, positive semidefinite
};

// a = u p with p = (a* a)^{1/2}.  Singular directions below
// tol::rank * sigma_max are excluded from u, so u is the minimal partial
// isometry and u* u projects onto the closure of the range of p.
PolarDecomp polar(const CMatrix& a);

// Completes a partial isometry to a unitary of the same size.  The completion
// pairs Gram-Schmidt bases of the kernel and the range complement taken from
// standard basis vectors in index order, so it is deterministic.
CMatrix unitary_extend(const CMatrix& u);

// Hermitian functional calculus.  mat_pow accepts positive semidefinite
// input and clamps roundoff-negative eigenvalues to zero; negative exponents
// additionally require the smallest eigenvalue to clear the rank cutoff.
// mat_log requires positive definite input; mat_exp only Hermitian.
CMatrix mat_pow(const CMatrix& a, double t);
CMatrix mat_sqrt(const CMatrix& a);
CMatrix mat_log(const CMatrix& a);
CMatrix mat_exp(const CMatrix& a);

// Orthonormal basis of span(elems) under the trace inner product, modified
// Gram-Schmidt with one re-orthogonalization pass.  Inputs whose residual
// falls below tol::rank times the largest input norm are dropped, so the
// result size is the numerical rank of the span.
std::vector<CMatrix> orthonormalize(const std::vector<CMatrix>& elems);

// Same, under <.,.>_h for positive definite h with the given square root.
std::vector<CMatrix> orthonormalize_weighted(const std::vector<CMatrix>& elems,
                                             const CMatrix& sqrt_h);

// Component of x orthogonal to an orthonormal family (hs inner product).
CMatrix project_out(const CMatrix& x, const std::vector<CMatrix>& onb);

// Projection of x onto the span of an orthonormal family.
CMatrix project_onto(const CMatrix& x, const std::vector<CMatrix>& onb);

}  // namespace subdiag
