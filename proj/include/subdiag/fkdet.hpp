#pragma once

#include <optional>

#include "subdiag/types.hpp"

namespace subdiag {

// Normalized determinant det(a) = exp(tau(log|a|)) = (prod_i sigma_i)^{1/n}.
// Scale covariant: det(c a) = |c| det(a).  Returns 0 when any singular value
// falls below tol::rank * sigma_max, the numerical rank cutoff.
double fk_det(const CMatrix& a);

// Geometric mean of (sigma_i + eps), i.e. the determinant of |a| + eps.
// Decreases monotonically to fk_det(a) as eps drops to 0.
double fk_det_regularized(const CMatrix& a, double eps);

struct DetWitness {
  double t = 0.0;    // perturbation strength, det(1 - t h) < 1 - margin
  double det = 1.0;  // the determinant value reached
};

// Searches for t with det(1 - t h) < 1 - margin, certifying h != 0.  For
// selfadjoint h the map t -> log det(1 - t h) is strictly concave and
// vanishes at 0, so one of +-t works at any scale-normalized magnitude; the
// scan runs magnitudes 0.5, 0.25, ... of 1/||h|| with both signs and returns
// the first hit.  Returns nothing when h = 0, matching the fact that
// det(1 - t h) = 1 for all t exactly then.
std::optional<DetWitness> det_perturbation_witness(const CMatrix& h, double margin = 1e-6,
                                                   int grid = 64, int grid_max = 4096);

}  // namespace subdiag
