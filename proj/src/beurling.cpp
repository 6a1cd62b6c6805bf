#include "subdiag/beurling.hpp"

#include <algorithm>
#include <cmath>

#include "subdiag/matcore.hpp"

namespace subdiag {

namespace {

void require_ambient(const TracialSubalgebra& alg, const Subspace& k, const char* who) {
  if (k.n != alg.n()) throw PreconditionError(std::string(who) + ": ambient dimension mismatch");
  for (const CMatrix& b : k.basis)
    if (b.rows() != k.n || b.cols() != k.n)
      throw PreconditionError(std::string(who) + ": basis element has wrong shape");
}

}  // namespace

Subspace make_subspace(int n, const std::vector<CMatrix>& spanning) {
  for (const CMatrix& s : spanning)
    if (s.rows() != n || s.cols() != n)
      throw PreconditionError("make_subspace: spanning element has wrong shape");
  return Subspace{n, orthonormalize(spanning)};
}

double subspace_distance(const Subspace& s1, const Subspace& s2) {
  if (s1.n != s2.n) throw PreconditionError("subspace_distance: ambient dimension mismatch");
  double d = 0.0;
  for (const CMatrix& b : s1.basis) d = std::max(d, hs_norm(project_out(b, s2.basis)));
  for (const CMatrix& b : s2.basis) d = std::max(d, hs_norm(project_out(b, s1.basis)));
  return d;
}

bool is_right_invariant(const TracialSubalgebra& alg, const Subspace& k, double tolerance) {
  require_ambient(alg, k, "is_right_invariant");
  for (const CMatrix& b : k.basis)
    for (const CMatrix& a : alg.basis()) {
      const CMatrix prod = b * a;
      if (hs_norm(project_out(prod, k.basis)) > tolerance * std::max(1.0, hs_norm(prod)))
        return false;
    }
  return true;
}

Subspace strict_shift(const TracialSubalgebra& alg, const Subspace& k) {
  require_ambient(alg, k, "strict_shift");
  std::vector<CMatrix> products;
  products.reserve(k.basis.size() * alg.zero_basis().size());
  for (const CMatrix& b : k.basis)
    for (const CMatrix& a0 : alg.zero_basis()) products.push_back(b * a0);
  return Subspace{k.n, orthonormalize(products)};
}

Subspace wandering_subspace(const TracialSubalgebra& alg, const Subspace& k) {
  const Subspace shifted = strict_shift(alg, k);
  std::vector<CMatrix> rest;
  for (const CMatrix& b : k.basis) rest.push_back(project_out(b, shifted.basis));
  return Subspace{k.n, orthonormalize(rest)};
}

TypeSplit type_split(const TracialSubalgebra& alg, const Subspace& k) {
  require_ambient(alg, k, "type_split");

  // Shift chain: span(K A_0^m) decreases, so it stabilizes in at most dim(K)
  // steps; the limit is the type 2 part.
  Subspace chain = strict_shift(alg, k);
  for (int guard = 0; guard <= k.dim(); ++guard) {
    Subspace next = strict_shift(alg, chain);
    if (next.dim() == chain.dim()) break;
    chain = std::move(next);
  }

  const Subspace w = wandering_subspace(alg, k);
  std::vector<CMatrix> regenerated;
  for (const CMatrix& b : w.basis)
    for (const CMatrix& a : alg.basis()) regenerated.push_back(b * a);
  return TypeSplit{Subspace{k.n, orthonormalize(regenerated)}, std::move(chain)};
}

BeurlingDecomposition beurling_decompose(const TracialSubalgebra& alg, const Subspace& k) {
  require_ambient(alg, k, "beurling_decompose");
  if (!alg.is_block())
    throw PreconditionError("beurling_decompose: needs a block upper triangular algebra");

  BeurlingDecomposition out;
  out.wandering = wandering_subspace(alg, k);
  TypeSplit split = type_split(alg, k);
  out.tail = std::move(split.type2);

  // Right D-module orthogonalization of the wandering part.  Each round
  // consumes the largest remaining element: w = u |w| with |w| in D, and the
  // updates keep u* r in D for everything left, so ranges stay orthogonal.
  std::vector<CMatrix> rest = out.wandering.basis;
  const double drop = 1e-7;
  while (!rest.empty()) {
    std::size_t pick = 0;
    for (std::size_t i = 1; i < rest.size(); ++i)
      if (hs_norm(rest[i]) > hs_norm(rest[pick])) pick = i;
    if (hs_norm(rest[pick]) <= drop) break;
    CMatrix w = rest[pick];
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(pick));

    CMatrix g = w.adjoint() * w;
    const CMatrix gd = alg.expectation(g);
    if ((g - gd).norm() > tol::sub * std::max(1.0, g.norm()))
      throw PreconditionError(
          "beurling_decompose: wandering products leave D; is the subspace invariant?");
    g = 0.5 * (gd + gd.adjoint());

    // u = w |w|^+ : pseudo-inverse of the modulus, rank cutoff relative to
    // its largest eigenvalue.
    EigDecomp ed = herm_eig(g);
    const double lmax = ed.values(ed.values.size() - 1);
    RVector inv_sqrt = RVector::Zero(ed.values.size());
    for (Eigen::Index i = 0; i < ed.values.size(); ++i)
      if (ed.values(i) > tol::rank * lmax) inv_sqrt(i) = 1.0 / std::sqrt(ed.values(i));
    const CMatrix mod_pinv = ed.vectors * inv_sqrt.asDiagonal() * ed.vectors.adjoint();
    CMatrix u = w * mod_pinv;

    for (CMatrix& r : rest) r -= u * alg.expectation(CMatrix(u.adjoint() * r));
    rest.erase(std::remove_if(rest.begin(), rest.end(),
                              [&](const CMatrix& r) { return hs_norm(r) <= drop; }),
               rest.end());
    out.isometries.push_back(std::move(u));
  }

  for (std::size_t i = 0; i < out.isometries.size(); ++i)
    for (std::size_t j = 0; j < out.isometries.size(); ++j) {
      const CMatrix p = out.isometries[i].adjoint() * out.isometries[j];
      const double drift = i == j ? (p - alg.expectation(p)).norm() : p.norm();
      out.modulus_drift = std::max(out.modulus_drift, drift);
    }
  return out;
}

Subspace random_invariant_subspace(const TracialSubalgebra& alg, Rng& rng, int generators) {
  if (generators < 0) throw PreconditionError("random_invariant_subspace: negative count");
  const int n = alg.n();
  std::vector<CMatrix> spanning;
  for (int g = 0; g < generators; ++g) {
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = rng.cgaussian();
    for (const CMatrix& a : alg.basis()) spanning.push_back(m * a);
  }
  return Subspace{n, orthonormalize(spanning)};
}

}  // namespace subdiag
