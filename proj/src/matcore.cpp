#include "subdiag/matcore.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace subdiag {

namespace {

void require_square(const CMatrix& x, const char* who) {
  if (x.rows() != x.cols() || x.rows() == 0)
    throw PreconditionError(std::string(who) + ": matrix must be square and nonempty");
}

void require_same_shape(const CMatrix& x, const CMatrix& y, const char* who) {
  if (x.rows() != y.rows() || x.cols() != y.cols())
    throw PreconditionError(std::string(who) + ": shape mismatch");
}

}  // namespace

Complex trace_state(const CMatrix& x) {
  require_square(x, "trace_state");
  return x.trace() / static_cast<double>(x.rows());
}

Complex hs_inner(const CMatrix& x, const CMatrix& y) {
  require_same_shape(x, y, "hs_inner");
  // tau(y* x) = sum_ij conj(y_ij) x_ij / n
  return (y.array().conjugate() * x.array()).sum() / static_cast<double>(x.rows());
}

double hs_norm(const CMatrix& x) {
  return x.norm() / std::sqrt(static_cast<double>(x.rows()));
}

Complex weighted_inner(const CMatrix& x, const CMatrix& y, const CMatrix& sqrt_h) {
  require_same_shape(x, y, "weighted_inner");
  require_square(sqrt_h, "weighted_inner");
  // tau(h^{1/2} y* x h^{1/2}) = tau((y h^{1/2})* (x h^{1/2})) by cyclicity
  return hs_inner(x * sqrt_h, y * sqrt_h);
}

double op_norm(const CMatrix& x) {
  return Eigen::JacobiSVD<CMatrix>(x).singularValues()(0);
}

bool is_hermitian(const CMatrix& x, double rel_tol) {
  if (x.rows() != x.cols()) return false;
  return (x - x.adjoint()).norm() <= rel_tol * x.norm();
}

EigDecomp herm_eig(const CMatrix& a) {
  require_square(a, "herm_eig");
  if (!is_hermitian(a))
    throw PreconditionError("herm_eig: input is not Hermitian");
  const CMatrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sym);
  if (es.info() != Eigen::Success)
    throw PreconditionError("herm_eig: eigensolver failed to converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

RVector singular_values(const CMatrix& a) {
  return Eigen::JacobiSVD<CMatrix>(a).singularValues();
}

PolarDecomp polar(const CMatrix& a) {
  require_square(a, "polar");
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVector& sv = svd.singularValues();
  const double cutoff = tol::rank * sv(0);
  const Eigen::Index n = a.rows();
  CMatrix u = CMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (sv(i) > cutoff && sv(i) > 0.0)
      u += svd.matrixU().col(i) * svd.matrixV().col(i).adjoint();
  }
  CMatrix p = svd.matrixV() * sv.asDiagonal() * svd.matrixV().adjoint();
  p = 0.5 * (p + p.adjoint());
  return {std::move(u), std::move(p)};
}

namespace {

// Orthonormal basis of range(I - proj) for a projection, Gram-Schmidt over
// standard basis vectors in index order.  The cutoff only has to separate
// genuine directions from roundoff residue, so its exact value is not
// delicate.
std::vector<CVector> complement_basis(const CMatrix& proj) {
  const Eigen::Index n = proj.rows();
  constexpr double drop = 1e-7;
  std::vector<CVector> basis;
  for (Eigen::Index j = 0; j < n; ++j) {
    CVector v = -proj.col(j);
    v(j) += 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (const CVector& b : basis) v -= b * b.dot(v);
    if (v.norm() > drop) basis.push_back(v.normalized());
  }
  return basis;
}

}  // namespace

CMatrix unitary_extend(const CMatrix& u) {
  require_square(u, "unitary_extend");
  const CMatrix q = u.adjoint() * u;
  const CMatrix r = u * u.adjoint();
  const double scale = std::max(1.0, q.norm());
  if ((q * q - q).norm() > tol::alg * scale * scale * u.rows())
    throw PreconditionError("unitary_extend: input is not a partial isometry");
  const auto ker = complement_basis(q);
  const auto coker = complement_basis(r);
  if (ker.size() != coker.size())
    throw PreconditionError("unitary_extend: kernel and corange dimensions disagree");
  CMatrix w = u;
  for (std::size_t i = 0; i < ker.size(); ++i) w += coker[i] * ker[i].adjoint();
  return w;
}

namespace {

enum class SpectrumNeed { kHermitian, kPositiveSemidef, kPositiveDef };

CMatrix herm_calculus(const CMatrix& a, SpectrumNeed need, const char* who,
                      double (*f)(double)) {
  EigDecomp ed = herm_eig(a);
  const Eigen::Index n = ed.values.size();
  const double lmax = ed.values.cwiseAbs().maxCoeff();
  RVector vals = ed.values;
  if (need != SpectrumNeed::kHermitian) {
    if (vals(0) < -tol::rank * lmax)
      throw PreconditionError(std::string(who) + ": input is not positive semidefinite");
    if (need == SpectrumNeed::kPositiveDef && (lmax == 0.0 || vals(0) <= tol::rank * lmax))
      throw PreconditionError(std::string(who) + ": input is not positive definite");
    for (Eigen::Index i = 0; i < n; ++i) vals(i) = std::max(vals(i), 0.0);
  }
  for (Eigen::Index i = 0; i < n; ++i) vals(i) = f(vals(i));
  CMatrix m = ed.vectors * vals.asDiagonal() * ed.vectors.adjoint();
  return 0.5 * (m + m.adjoint());
}

}  // namespace

CMatrix mat_pow(const CMatrix& a, double t) {
  if (t == 1.0) return a;
  const bool needs_inverse = t < 0.0;
  EigDecomp ed = herm_eig(a);
  const Eigen::Index n = ed.values.size();
  const double lmax = ed.values.cwiseAbs().maxCoeff();
  RVector vals = ed.values;
  if (vals(0) < -tol::rank * lmax)
    throw PreconditionError("mat_pow: input is not positive semidefinite");
  if (needs_inverse && (lmax == 0.0 || vals(0) <= tol::rank * lmax))
    throw PreconditionError("mat_pow: negative power of a singular matrix");
  RVector out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double l = std::max(vals(i), 0.0);
    out(i) = (l == 0.0 && t == 0.0) ? 1.0 : std::pow(l, t);
  }
  CMatrix m = ed.vectors * out.asDiagonal() * ed.vectors.adjoint();
  return 0.5 * (m + m.adjoint());
}

CMatrix mat_sqrt(const CMatrix& a) {
  return herm_calculus(a, SpectrumNeed::kPositiveSemidef, "mat_sqrt",
                       [](double l) { return std::sqrt(l); });
}

CMatrix mat_log(const CMatrix& a) {
  return herm_calculus(a, SpectrumNeed::kPositiveDef, "mat_log",
                       [](double l) { return std::log(l); });
}

CMatrix mat_exp(const CMatrix& a) {
  return herm_calculus(a, SpectrumNeed::kHermitian, "mat_exp",
                       [](double l) { return std::exp(l); });
}

namespace {

std::vector<CMatrix> mgs(const std::vector<CMatrix>& elems,
                         Complex (*inner)(const CMatrix&, const CMatrix&, const CMatrix*),
                         const CMatrix* weight) {
  std::vector<CMatrix> basis;
  if (elems.empty()) return basis;
  double max_norm = 0.0;
  for (const CMatrix& e : elems)
    max_norm = std::max(max_norm, std::sqrt(std::abs(inner(e, e, weight).real())));
  if (max_norm == 0.0) return basis;
  const double drop = tol::rank * max_norm;
  for (const CMatrix& e : elems) {
    CMatrix v = e;
    for (int pass = 0; pass < 2; ++pass)
      for (const CMatrix& b : basis) v -= inner(v, b, weight) * b;
    const double nv = std::sqrt(std::abs(inner(v, v, weight).real()));
    if (nv > drop) basis.push_back(v / nv);
  }
  return basis;
}

Complex hs_inner_w(const CMatrix& x, const CMatrix& y, const CMatrix*) {
  return hs_inner(x, y);
}

Complex weighted_inner_w(const CMatrix& x, const CMatrix& y, const CMatrix* sqrt_h) {
  return weighted_inner(x, y, *sqrt_h);
}

}  // namespace

std::vector<CMatrix> orthonormalize(const std::vector<CMatrix>& elems) {
  return mgs(elems, hs_inner_w, nullptr);
}

std::vector<CMatrix> orthonormalize_weighted(const std::vector<CMatrix>& elems,
                                             const CMatrix& sqrt_h) {
  return mgs(elems, weighted_inner_w, &sqrt_h);
}

CMatrix project_out(const CMatrix& x, const std::vector<CMatrix>& onb) {
  CMatrix r = x;
  for (int pass = 0; pass < 2; ++pass)
    for (const CMatrix& b : onb) r -= hs_inner(r, b) * b;
  return r;
}

CMatrix project_onto(const CMatrix& x, const std::vector<CMatrix>& onb) {
  return x - project_out(x, onb);
}

}  // namespace subdiag
