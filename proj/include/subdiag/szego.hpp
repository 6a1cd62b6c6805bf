#pragma once

#include "subdiag/algebra.hpp"
#include "subdiag/rng.hpp"
#include "subdiag/types.hpp"

namespace subdiag {

// Constrained trace minimizations whose infima equal the determinant.  All
// of them optimize over a in a subspace of A and d = exp(s) with s Hermitian
// in D and tau(s) = 0, which pins det(d) = 1: the determinant constraint is
// active at any optimum by scaling, and a polar rotation absorbs the phase
// of d, so the exponential parametrization loses nothing.

struct SzegoOptions {
  int restarts = 8;       // multistart count; the first start is s = 0
  int max_iters = 5000;   // per restart
  double grad_tol = 1e-8; // on the numerical gradient of the scaled problem
};

struct SzegoResult {
  double value = 0.0;
  CMatrix minimizer_a;  // in A_0 (weighted forms) or A (two sided form)
  CMatrix minimizer_d;  // positive definite with det 1, in D
  bool converged = false;      // the restart that won reached grad_tol
  int converged_restarts = 0;  // how many restarts reached grad_tol
  int iterations = 0;          // of the winning restart
  double grad_norm = 0.0;      // at the winner
};

// Objective evaluators, exposed so oracles and invariance checks can probe
// the same numbers the optimizer sees.
double szego_l2_objective(const CMatrix& h, const CMatrix& a, const CMatrix& d);
double szego_lp_objective(const CMatrix& h, const CMatrix& a, const CMatrix& d, double p);
// tau(|m a|^p)^{1/q} (left) or tau(|a m|^p)^{1/q} (right) with m = h^{q/p}.
double szego_two_sided_objective(const CMatrix& h, const CMatrix& a, double p, double q,
                                 bool left);

// inf tau(h |a + d|^2) over a in A_0, d in D with det(d) >= 1; equals the
// determinant of h.  The minimization over a is an exact least squares
// solve, so only the d part needs iteration.
SzegoResult szego_l2(const TracialSubalgebra& alg, const CMatrix& h, Rng& rng,
                     const SzegoOptions& opts = {});

// inf tau(h |a + d|^p), same constraint set, same value; joint gradient
// descent over a and d since the inner problem is no longer quadratic.
SzegoResult szego_lp(const TracialSubalgebra& alg, const CMatrix& h, double p, Rng& rng,
                     const SzegoOptions& opts = {});

struct TwoSidedResult {
  SzegoResult left;   // inf tau(|h^{q/p} a|^p)^{1/q}, a in A, det(Phi(a)) >= 1
  SzegoResult right;  // the mirrored form with a on the left of the weight
};

// Both one sided infima; each equals the determinant of h, so they also
// agree with each other, which the suites check as a two route consistency.
TwoSidedResult szego_lp_two_sided(const TracialSubalgebra& alg, const CMatrix& h, double p,
                                  double q, Rng& rng, const SzegoOptions& opts = {});

// Frobenius distance of m = h^{q/p} to span(m A_0).  Distance zero forces
// det(h) = 0; the converse direction fails in general, most plainly for the
// full algebra where A_0 = 0.
double det_zero_distance(const TracialSubalgebra& alg, const CMatrix& h, double p, double q);

}  // namespace subdiag
