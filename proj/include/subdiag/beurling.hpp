#pragma once

#include <vector>

#include "subdiag/algebra.hpp"
#include "subdiag/rng.hpp"
#include "subdiag/types.hpp"

namespace subdiag {

// Subspaces of M_n carrying the trace inner product, stored through an
// orthonormal basis.  The module studies subspaces invariant under right
// multiplication by a block upper triangular algebra A.
struct Subspace {
  int n = 0;
  std::vector<CMatrix> basis;

  int dim() const { return static_cast<int>(basis.size()); }
};

Subspace make_subspace(int n, const std::vector<CMatrix>& spanning);

// Largest residual of either basis against the other subspace: bounded by
// the sine of the largest principal angle and zero exactly for equal spans.
// Computed directly from residuals, no cancellation through cosines.
double subspace_distance(const Subspace& s1, const Subspace& s2);

bool is_right_invariant(const TracialSubalgebra& alg, const Subspace& k,
                        double tolerance = tol::sub);

// span(K A_0), the one-step shift of K.
Subspace strict_shift(const TracialSubalgebra& alg, const Subspace& k);

// W = K minus span(K A_0): the wandering part, what right shifts cannot
// reach.  For invariant K the products W* W land in D.
Subspace wandering_subspace(const TracialSubalgebra& alg, const Subspace& k);

struct TypeSplit {
  Subspace type1;  // span(W A), regenerated from the wandering part
  Subspace type2;  // intersection of the shift chain span(K A_0^m)
};

// Splits invariant K into the part its wandering subspace regenerates and
// the tail of the shift chain.  A_0 is nilpotent in the block model, so the
// tail is always zero here; the chain is still computed, not assumed.
TypeSplit type_split(const TracialSubalgebra& alg, const Subspace& k);

struct BeurlingDecomposition {
  std::vector<CMatrix> isometries;  // u_i, partial isometries, |u_i| in D
  Subspace wandering;
  Subspace tail;              // type 2 part of the split
  double modulus_drift = 0;   // max distance of u_i* u_j from D (i = j) or 0 (i != j)
};

// Orthogonalizes the wandering subspace as a right D-module: returns partial
// isometries u_i with mutually orthogonal ranges and |u_i| a projection in
// D, such that K = span(u_1 A) + span(u_2 A) + ... as an orthogonal sum.
BeurlingDecomposition beurling_decompose(const TracialSubalgebra& alg, const Subspace& k);

// span(g_1 A + ... + g_m A) for random full matrices g_j: right invariant by
// construction, dimension varies with the draw.
Subspace random_invariant_subspace(const TracialSubalgebra& alg, Rng& rng, int generators);

}  // namespace subdiag
