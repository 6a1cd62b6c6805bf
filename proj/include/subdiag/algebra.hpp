#pragma once

#include <optional>
#include <vector>

#include "subdiag/matcore.hpp"
#include "subdiag/rng.hpp"
#include "subdiag/types.hpp"

namespace subdiag {

// Sizes of the diagonal blocks of a block upper triangular algebra in M_n.
// Partition (1,1,...,1) gives the upper triangular matrices, partition (n)
// gives all of M_n.
class BlockPartition {
 public:
  explicit BlockPartition(std::vector<int> sizes);

  int dim() const { return dim_; }
  int blocks() const { return static_cast<int>(sizes_.size()); }
  int block_size(int b) const { return sizes_[b]; }
  int block_start(int b) const { return starts_[b]; }
  int block_of(int index) const { return owner_[index]; }
  const std::vector<int>& sizes() const { return sizes_; }

  // Entry (i, j) masks: the algebra A keeps the upper block triangle, the
  // diagonal part D the blocks themselves, and A_0 the strict upper triangle.
  bool in_algebra(int i, int j) const { return owner_[i] <= owner_[j]; }
  bool in_diagonal(int i, int j) const { return owner_[i] == owner_[j]; }
  bool in_strict(int i, int j) const { return owner_[i] < owner_[j]; }

 private:
  std::vector<int> sizes_;
  std::vector<int> starts_;
  std::vector<int> owner_;
  int dim_ = 0;
};

struct MultiplicativityResult {
  bool holds = true;
  double max_residual = 0.0;  // relative to the product of operand norms
  int witness_left = -1;      // basis indices of the worst pair
  int witness_right = -1;
};

struct DensityResult {
  bool holds = false;
  int span_dim = 0;  // dimension of span(A + A*)
  int full_dim = 0;  // n^2
  // Self-adjoint element orthogonal to A + A*, certificate when holds is
  // false; empty otherwise.
  CMatrix witness;
};

struct TauMaximalityResult {
  bool holds = false;
  int algebra_dim = 0;
  int annihilator_dim = 0;  // of {x : tau(x a) = 0 for all a in A_0}
  bool algebra_contained = false;
};

struct UniqueExtensionResult {
  bool holds = false;
  // Real dimension of {h = h* : tau(h a) = 0 for all a in A}.  Each such h
  // perturbs tau to a different state agreeing with tau on A, so the trace
  // extends uniquely exactly when this space is zero.
  int kernel_dim = 0;
};

// A unital subalgebra A of M_n with the normalized trace, together with the
// trace-preserving projection Phi onto the diagonal D = A n A* and the kernel
// part A_0 = A n ker Phi.  Block upper triangular algebras use entry masks
// throughout; explicit algebras close the given generators under products
// and represent everything by orthonormal bases.
class TracialSubalgebra {
 public:
  static TracialSubalgebra block_upper(BlockPartition partition);
  // Closes span(generators + {1}) under multiplication.
  static TracialSubalgebra explicit_span(int n, const std::vector<CMatrix>& generators);

  int n() const { return n_; }
  bool is_block() const { return partition_.has_value(); }
  const BlockPartition& partition() const;

  // Orthonormal bases under the trace inner product.
  const std::vector<CMatrix>& basis() const { return basis_; }
  const std::vector<CMatrix>& diag_basis() const { return diag_basis_; }
  const std::vector<CMatrix>& zero_basis() const { return zero_basis_; }

  // Phi: trace-preserving projection of M onto D.  On block algebras this
  // keeps the diagonal blocks and zeroes the rest.
  CMatrix expectation(const CMatrix& x) const;

  // Orthogonal projection of M onto span(A).
  CMatrix project_algebra(const CMatrix& x) const;

  bool contains(const CMatrix& x, double rel_tol = tol::alg) const;
  bool diagonal_contains(const CMatrix& x, double rel_tol = tol::alg) const;

  // Phi(ab) = Phi(a) Phi(b) over all basis pairs of A.
  MultiplicativityResult check_multiplicative() const;
  // span(A + A*) = M_n.
  DensityResult check_density() const;
  // A equals the trace annihilator of A_0.
  TauMaximalityResult check_tau_maximal() const;
  // tau restricted to A admits only tau as a state extension to M.
  UniqueExtensionResult check_unique_extension() const;

  // Random draws.  All entries and coefficients come from rng in a fixed
  // order, so a seed pins the instance.
  CMatrix random_element(Rng& rng) const;        // in A
  CMatrix random_strict(Rng& rng) const;         // in A_0
  CMatrix random_diagonal(Rng& rng) const;       // in D
  CMatrix random_selfadjoint(Rng& rng) const;    // in M
  // Positive definite in M with condition number exactly capped.
  CMatrix random_positive(Rng& rng, double cond_cap) const;
  // Invertible element of A, condition number at most cond_cap, unit
  // operator norm.
  CMatrix random_invertible(Rng& rng, double cond_cap) const;

 private:
  TracialSubalgebra() = default;
  void build_explicit(int n, const std::vector<CMatrix>& generators);
  CMatrix span_matrix(Rng& rng, const std::vector<CMatrix>& onb) const;

  int n_ = 0;
  std::optional<BlockPartition> partition_;
  std::vector<CMatrix> basis_;
  std::vector<CMatrix> diag_basis_;
  std::vector<CMatrix> zero_basis_;
};

}  // namespace subdiag
