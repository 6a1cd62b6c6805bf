#include "subdiag/algebra.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

namespace subdiag {

BlockPartition::BlockPartition(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.empty()) throw InputError("partition: needs at least one block");
  for (int s : sizes_) {
    if (s < 1) throw InputError("partition: block sizes must be positive");
    starts_.push_back(dim_);
    for (int k = 0; k < s; ++k) owner_.push_back(static_cast<int>(starts_.size()) - 1);
    dim_ += s;
  }
}

namespace {

CVector vectorize(const CMatrix& m) {
  return Eigen::Map<const CVector>(m.data(), m.size());
}

CMatrix unvectorize(const CVector& v, int n) {
  return Eigen::Map<const CMatrix>(v.data(), n, n);
}

// Complex nullity of a K x m matrix, rank cutoff relative to sigma_max.
int nullity(const CMatrix& t) {
  if (t.rows() == 0) return static_cast<int>(t.cols());
  Eigen::JacobiSVD<CMatrix> svd(t);
  const RVector& sv = svd.singularValues();
  const double cutoff = tol::rank * sv(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  return static_cast<int>(t.cols()) - rank;
}

int real_nullity(const RMatrix& t) {
  if (t.rows() == 0) return static_cast<int>(t.cols());
  Eigen::JacobiSVD<RMatrix> svd(t);
  const RVector& sv = svd.singularValues();
  const double cutoff = tol::rank * sv(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  return static_cast<int>(t.cols()) - rank;
}

}  // namespace

TracialSubalgebra TracialSubalgebra::block_upper(BlockPartition partition) {
  TracialSubalgebra alg;
  alg.n_ = partition.dim();
  const double scale = std::sqrt(static_cast<double>(alg.n_));
  const int n = alg.n_;
  // Scaled matrix units are orthonormal under the trace inner product.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (!partition.in_algebra(i, j)) continue;
      CMatrix e = CMatrix::Zero(n, n);
      e(i, j) = scale;
      alg.basis_.push_back(e);
      if (partition.in_diagonal(i, j)) alg.diag_basis_.push_back(e);
      if (partition.in_strict(i, j)) alg.zero_basis_.push_back(std::move(e));
    }
  alg.partition_ = std::move(partition);
  return alg;
}

TracialSubalgebra TracialSubalgebra::explicit_span(int n,
                                                   const std::vector<CMatrix>& generators) {
  TracialSubalgebra alg;
  alg.build_explicit(n, generators);
  return alg;
}

void TracialSubalgebra::build_explicit(int n, const std::vector<CMatrix>& generators) {
  if (n < 1) throw InputError("explicit_span: dimension must be positive");
  n_ = n;
  for (const CMatrix& g : generators)
    if (g.rows() != n || g.cols() != n)
      throw InputError("explicit_span: generator has wrong shape");

  std::vector<CMatrix> seed = generators;
  seed.push_back(CMatrix::Identity(n, n));
  basis_ = orthonormalize(seed);

  // Close under multiplication.  Each round either grows the span or stops,
  // so at most n^2 rounds happen.
  for (int round = 0; round <= n * n; ++round) {
    std::vector<CMatrix> extended = basis_;
    for (const CMatrix& a : basis_)
      for (const CMatrix& b : basis_) extended.push_back(a * b);
    std::vector<CMatrix> closed = orthonormalize(extended);
    if (closed.size() == basis_.size()) break;
    basis_ = std::move(closed);
  }

  // D = A n A* via principal angles between the vectorized spans.
  const int d = static_cast<int>(basis_.size());
  CMatrix b1(n * n, d), b2(n * n, d);
  for (int k = 0; k < d; ++k) {
    CVector v = vectorize(basis_[k]);
    b1.col(k) = v / v.norm();
    CVector w = vectorize(basis_[k].adjoint());
    b2.col(k) = w / w.norm();
  }
  Eigen::JacobiSVD<CMatrix> svd(b1.adjoint() * b2, Eigen::ComputeFullU);
  std::vector<CMatrix> meet;
  for (int k = 0; k < d; ++k) {
    if (svd.singularValues()(k) > 1.0 - tol::sub)
      meet.push_back(unvectorize(b1 * svd.matrixU().col(k), n));
  }
  diag_basis_ = orthonormalize(meet);

  std::vector<CMatrix> strict;
  for (const CMatrix& b : basis_) strict.push_back(b - project_onto(b, diag_basis_));
  zero_basis_ = orthonormalize(strict);
}

const BlockPartition& TracialSubalgebra::partition() const {
  if (!partition_) throw PreconditionError("partition: algebra is not block upper triangular");
  return *partition_;
}

CMatrix TracialSubalgebra::expectation(const CMatrix& x) const {
  if (x.rows() != n_ || x.cols() != n_)
    throw PreconditionError("expectation: shape mismatch");
  if (partition_) {
    CMatrix out = CMatrix::Zero(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        if (partition_->in_diagonal(i, j)) out(i, j) = x(i, j);
    return out;
  }
  return project_onto(x, diag_basis_);
}

CMatrix TracialSubalgebra::project_algebra(const CMatrix& x) const {
  if (x.rows() != n_ || x.cols() != n_)
    throw PreconditionError("project_algebra: shape mismatch");
  if (partition_) {
    CMatrix out = CMatrix::Zero(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        if (partition_->in_algebra(i, j)) out(i, j) = x(i, j);
    return out;
  }
  return project_onto(x, basis_);
}

bool TracialSubalgebra::contains(const CMatrix& x, double rel_tol) const {
  return (x - project_algebra(x)).norm() <= rel_tol * x.norm();
}

bool TracialSubalgebra::diagonal_contains(const CMatrix& x, double rel_tol) const {
  return (x - expectation(x)).norm() <= rel_tol * x.norm();
}

MultiplicativityResult TracialSubalgebra::check_multiplicative() const {
  MultiplicativityResult res;
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    const CMatrix pi = expectation(basis_[i]);
    for (std::size_t j = 0; j < basis_.size(); ++j) {
      const CMatrix lhs = expectation(basis_[i] * basis_[j]);
      const CMatrix rhs = pi * expectation(basis_[j]);
      const double denom = std::max(basis_[i].norm() * basis_[j].norm(), 1e-300);
      const double r = (lhs - rhs).norm() / denom;
      if (r > res.max_residual) {
        res.max_residual = r;
        res.witness_left = static_cast<int>(i);
        res.witness_right = static_cast<int>(j);
      }
    }
  }
  res.holds = res.max_residual <= tol::alg;
  return res;
}

DensityResult TracialSubalgebra::check_density() const {
  DensityResult res;
  res.full_dim = n_ * n_;
  std::vector<CMatrix> both = basis_;
  for (const CMatrix& b : basis_) both.push_back(b.adjoint());
  auto span = orthonormalize(both);
  res.span_dim = static_cast<int>(span.size());
  res.holds = res.span_dim == res.full_dim;
  if (res.holds) return res;

  // Certificate: a self-adjoint element orthogonal to A + A*.  The
  // orthogonal complement is *-closed, so symmetrizing a nonzero component
  // of some matrix unit stays inside it.
  for (int i = 0; i < n_ && res.witness.size() == 0; ++i)
    for (int j = 0; j < n_; ++j) {
      CMatrix e = CMatrix::Zero(n_, n_);
      e(i, j) = 1.0;
      CMatrix w = project_out(e, span);
      if (hs_norm(w) < 1e-6 * hs_norm(e)) continue;
      CMatrix h = w + CMatrix(w.adjoint());
      if (hs_norm(h) < 1e-10) h = Complex(0.0, -1.0) * (w - CMatrix(w.adjoint()));
      res.witness = h / hs_norm(h);
      break;
    }
  return res;
}

TauMaximalityResult TracialSubalgebra::check_tau_maximal() const {
  TauMaximalityResult res;
  res.algebra_dim = static_cast<int>(basis_.size());

  const int k = static_cast<int>(zero_basis_.size());
  CMatrix t(k, n_ * n_);
  for (int r = 0; r < k; ++r) t.row(r) = vectorize(zero_basis_[r].transpose()).transpose();
  res.annihilator_dim = nullity(t);

  res.algebra_contained = true;
  for (const CMatrix& b : basis_) {
    // tau(b a) = 0 for all a in A_0; bilinear, no conjugation.
    const double miss = (t * vectorize(b)).norm() / static_cast<double>(n_);
    if (miss > tol::alg * b.norm()) res.algebra_contained = false;
  }
  res.holds = res.algebra_contained && res.annihilator_dim == res.algebra_dim;
  return res;
}

UniqueExtensionResult TracialSubalgebra::check_unique_extension() const {
  // Hermitian h with tau(h a) = 0 for all a in A are exactly the directions
  // in which the trace can be perturbed to another extension of tau|_A.
  // Coordinates: h_ii, then (Re h_ij, Im h_ij) for i < j.
  UniqueExtensionResult res;
  const int k = static_cast<int>(basis_.size());
  const int cols = n_ * n_;
  RMatrix t(2 * k, cols);
  for (int r = 0; r < k; ++r) {
    const CMatrix& b = basis_[r];
    int c = 0;
    auto put = [&](Complex coeff) {
      t(2 * r, c) = coeff.real();
      t(2 * r + 1, c) = coeff.imag();
      ++c;
    };
    for (int i = 0; i < n_; ++i) put(b(i, i));
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j) {
        put(b(j, i) + b(i, j));                    // coefficient of Re h_ij
        put(Complex(0.0, 1.0) * (b(j, i) - b(i, j)));  // coefficient of Im h_ij
      }
  }
  res.kernel_dim = real_nullity(t);
  res.holds = res.kernel_dim == 0;
  return res;
}

CMatrix TracialSubalgebra::span_matrix(Rng& rng, const std::vector<CMatrix>& onb) const {
  CMatrix out = CMatrix::Zero(n_, n_);
  for (const CMatrix& b : onb) out += rng.cgaussian() * b;
  return out;
}

CMatrix TracialSubalgebra::random_element(Rng& rng) const { return span_matrix(rng, basis_); }

CMatrix TracialSubalgebra::random_strict(Rng& rng) const { return span_matrix(rng, zero_basis_); }

CMatrix TracialSubalgebra::random_diagonal(Rng& rng) const {
  return span_matrix(rng, diag_basis_);
}

CMatrix TracialSubalgebra::random_selfadjoint(Rng& rng) const {
  CMatrix g(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) g(i, j) = rng.cgaussian();
  return 0.5 * (g + g.adjoint());
}

CMatrix TracialSubalgebra::random_positive(Rng& rng, double cond_cap) const {
  if (cond_cap < 1.0) throw PreconditionError("random_positive: cond_cap below 1");
  CMatrix g(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) g(i, j) = rng.cgaussian();
  EigDecomp ed = herm_eig(g * g.adjoint());
  const double lmin = ed.values(0), lmax = ed.values(n_ - 1);
  RVector mapped(n_);
  if (lmax - lmin <= 1e-14 * std::abs(lmax)) {
    mapped.setOnes();
  } else {
    // Affine spectrum map onto [1/cond_cap, 1]: condition number is capped
    // by construction.
    for (int i = 0; i < n_; ++i)
      mapped(i) = 1.0 / cond_cap + (ed.values(i) - lmin) * (1.0 - 1.0 / cond_cap) / (lmax - lmin);
  }
  CMatrix h = ed.vectors * mapped.asDiagonal() * ed.vectors.adjoint();
  return 0.5 * (h + h.adjoint());
}

CMatrix TracialSubalgebra::random_invertible(Rng& rng, double cond_cap) const {
  if (cond_cap <= 1.0) throw PreconditionError("random_invertible: cond_cap must exceed 1");
  CMatrix a = random_element(rng);
  double shift = 0.0;
  for (int round = 0; round < 200; ++round) {
    RVector sv = singular_values(a);
    if (sv(n_ - 1) > 0.0 && sv(0) / sv(n_ - 1) <= cond_cap) return a / sv(0);
    shift = shift == 0.0 ? 0.05 * sv(0) : 2.0 * shift;
    a += shift * CMatrix::Identity(n_, n_);
  }
  throw PreconditionError("random_invertible: conditioning did not converge");
}

}  // namespace subdiag
