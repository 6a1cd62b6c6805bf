#include "subdiag/factor.hpp"

#include <cmath>
#include <limits>

#include <Eigen/LU>

#include "subdiag/fkdet.hpp"
#include "subdiag/matcore.hpp"

namespace subdiag {

namespace {

void require_block(const TracialSubalgebra& alg, const char* who) {
  if (!alg.is_block())
    throw PreconditionError(std::string(who) + ": needs a block upper triangular algebra");
}

void require_shape(const TracialSubalgebra& alg, const CMatrix& x, const char* who) {
  if (x.rows() != alg.n() || x.cols() != alg.n())
    throw PreconditionError(std::string(who) + ": shape mismatch with the algebra");
}

EigDecomp require_positive_definite(const CMatrix& b, const char* who) {
  if (!is_hermitian(b)) throw PreconditionError(std::string(who) + ": matrix is not Hermitian");
  EigDecomp ed = herm_eig(b);
  const double lmax = ed.values(ed.values.size() - 1);
  if (lmax <= 0.0 || ed.values(0) <= tol::rank * lmax)
    throw PreconditionError(std::string(who) + ": matrix is not positive definite");
  return ed;
}

// x z^{-1} without forming the inverse: solve z* y* = x*.
CMatrix right_divide(const CMatrix& x, const CMatrix& z) {
  return z.adjoint().partialPivLu().solve(CMatrix(x.adjoint())).adjoint();
}

}  // namespace

bool is_factorable(const CMatrix& f, double floor_rel) {
  const double scale = op_norm(f);
  if (scale == 0.0) return false;
  return fk_det(f) > floor_rel * scale;
}

CMatrix positive_factor(const TracialSubalgebra& alg, const CMatrix& b) {
  require_block(alg, "positive_factor");
  require_shape(alg, b, "positive_factor");
  require_positive_definite(b, "positive_factor");

  const BlockPartition& part = alg.partition();
  const int n = alg.n();
  CMatrix r = CMatrix::Zero(n, n);

  for (int i = 0; i < part.blocks(); ++i) {
    const int si = part.block_start(i), ni = part.block_size(i);

    // Schur complement of everything already factored.
    CMatrix s = b.block(si, si, ni, ni);
    for (int m = 0; m < i; ++m) {
      const int sm = part.block_start(m), nm = part.block_size(m);
      s -= r.block(sm, si, nm, ni).adjoint() * r.block(sm, si, nm, ni);
    }
    s = 0.5 * (s + s.adjoint());

    EigDecomp ed = herm_eig(s);
    if (ed.values(0) <= tol::rank * ed.values(ni - 1) || ed.values(ni - 1) <= 0.0)
      throw PreconditionError("positive_factor: Schur complement lost positivity");
    RVector rt = ed.values.cwiseSqrt();
    const CMatrix rii = ed.vectors * rt.asDiagonal() * ed.vectors.adjoint();
    const CMatrix rii_inv =
        ed.vectors * rt.cwiseInverse().asDiagonal() * ed.vectors.adjoint();

    r.block(si, si, ni, ni) = 0.5 * (rii + rii.adjoint());
    for (int j = i + 1; j < part.blocks(); ++j) {
      const int sj = part.block_start(j), nj = part.block_size(j);
      CMatrix acc = b.block(si, sj, ni, nj);
      for (int m = 0; m < i; ++m) {
        const int sm = part.block_start(m), nm = part.block_size(m);
        acc -= r.block(sm, si, nm, ni).adjoint() * r.block(sm, sj, nm, nj);
      }
      // R_ii is Hermitian positive, so R_ii^{-*} = R_ii^{-1}.
      r.block(si, sj, ni, nj) = rii_inv * acc;
    }
  }
  return r;
}

CMatrix normalizer_via_projection(const TracialSubalgebra& alg, const CMatrix& b) {
  require_shape(alg, b, "normalizer_via_projection");
  require_positive_definite(b, "normalizer_via_projection");
  const int n = alg.n();

  const CMatrix sqrt_b = mat_sqrt(b);
  const auto q = orthonormalize_weighted(alg.zero_basis(), sqrt_b);

  // 1 - p where p projects the identity onto span(A_0) in <.,.>_b.
  CMatrix resid = CMatrix::Identity(n, n);
  for (int pass = 0; pass < 2; ++pass)
    for (const CMatrix& qi : q) resid -= weighted_inner(resid, qi, sqrt_b) * qi;

  CMatrix x = resid * b * resid.adjoint();
  x = 0.5 * (x + x.adjoint());
  const CMatrix xd = alg.expectation(x);
  const double drift = (x - xd).norm();
  if (drift > tol::alg * std::max(1.0, b.norm() * resid.norm() * resid.norm()))
    throw PreconditionError(
        "normalizer_via_projection: (1-p) b (1-p)* leaves the diagonal; "
        "the algebra is not maximal subdiagonal");

  CMatrix e = mat_pow(0.5 * (xd + xd.adjoint()), -0.5);
  e = alg.expectation(e);  // scrub roundoff outside D
  return e * resid;
}

CanonicalFactor canonical_form(const TracialSubalgebra& alg, const CMatrix& a) {
  require_block(alg, "canonical_form");
  require_shape(alg, a, "canonical_form");
  const BlockPartition& part = alg.partition();
  CMatrix w = CMatrix::Zero(alg.n(), alg.n());
  for (int k = 0; k < part.blocks(); ++k) {
    const int sk = part.block_start(k), nk = part.block_size(k);
    const CMatrix blk = a.block(sk, sk, nk, nk);
    PolarDecomp pd = polar(blk);
    const CMatrix check = pd.u.adjoint() * pd.u;
    if ((check - CMatrix::Identity(nk, nk)).norm() > tol::sub * nk)
      throw PreconditionError("canonical_form: diagonal block is not invertible");
    w.block(sk, sk, nk, nk) = pd.u.adjoint();
  }
  return {w * a, w};
}

InnerOuter inner_outer(const TracialSubalgebra& alg, const CMatrix& f) {
  require_block(alg, "inner_outer");
  require_shape(alg, f, "inner_outer");
  if (!is_factorable(f))
    throw PreconditionError("inner_outer: determinant vanishes at this scale, no outer part");
  const CMatrix h = positive_factor(alg, CMatrix(f.adjoint() * f));
  return {right_divide(f, h), h};
}

InnerOuter inner_outer_via_projection(const TracialSubalgebra& alg, const CMatrix& f) {
  require_block(alg, "inner_outer_via_projection");
  require_shape(alg, f, "inner_outer_via_projection");
  if (!is_factorable(f))
    throw PreconditionError(
        "inner_outer_via_projection: determinant vanishes at this scale, no outer part");

  std::vector<CMatrix> fa0;
  fa0.reserve(alg.zero_basis().size());
  for (const CMatrix& a0 : alg.zero_basis()) fa0.push_back(f * a0);
  const auto onb = orthonormalize(fa0);

  const CMatrix v = project_onto(f, onb);
  CMatrix u = polar(CMatrix(f - v)).u;
  const int n = alg.n();
  if ((u.adjoint() * u - CMatrix::Identity(n, n)).norm() > tol::sub * n)
    u = unitary_extend(u);
  return {u, u.adjoint() * f};
}

OuterCheck check_outer(const TracialSubalgebra& alg, const CMatrix& h) {
  require_shape(alg, h, "check_outer");
  OuterCheck res;
  res.in_algebra = alg.contains(h);
  res.det = fk_det(h);
  const CMatrix diag = alg.expectation(h);
  res.trace_abs = std::abs(trace_state(h));

  const RVector dsv = singular_values(diag);
  res.det_diag = fk_det(diag);
  res.diag_invertible = dsv(dsv.size() - 1) > tol::rank * dsv(0) && dsv(0) > 0.0;

  const RVector sv = singular_values(h);
  const bool invertible = sv(sv.size() - 1) > tol::rank * sv(0) && sv(0) > 0.0;
  bool inverse_inside = false;
  if (res.in_algebra && invertible) {
    const CMatrix hinv = h.partialPivLu().inverse();
    inverse_inside = alg.contains(hinv, tol::sub);
  }
  res.outer = res.in_algebra && invertible && inverse_inside;
  return res;
}

RieszFactors riesz_factor(const TracialSubalgebra& alg, const CMatrix& x, double p, double q) {
  require_block(alg, "riesz_factor");
  require_shape(alg, x, "riesz_factor");
  if (!(p > 0.0) || !(q > 0.0))
    throw PreconditionError("riesz_factor: exponents must be positive (infinity allowed)");
  if (!alg.contains(x)) throw PreconditionError("riesz_factor: x must lie in A");
  if (!is_factorable(x))
    throw PreconditionError("riesz_factor: determinant vanishes at this scale");

  const double ip = std::isinf(p) ? 0.0 : 1.0 / p;
  const double iq = std::isinf(q) ? 0.0 : 1.0 / q;
  // q = infinity puts no constraint on z at all: the split is trivial.
  if (iq == 0.0) return {x, CMatrix::Identity(alg.n(), alg.n())};
  const double r_over_q = iq / (ip + iq);

  const CMatrix z = positive_factor(alg, mat_pow(CMatrix(x.adjoint() * x), r_over_q));
  return {right_divide(x, z), z};
}

CMatrix outer_with_modulus(const TracialSubalgebra& alg, const CMatrix& f, double p) {
  require_block(alg, "outer_with_modulus");
  require_shape(alg, f, "outer_with_modulus");
  if (!(p > 0.0) || std::isinf(p))
    throw PreconditionError("outer_with_modulus: exponent must be positive and finite");
  require_positive_definite(f, "outer_with_modulus");
  return positive_factor(alg, mat_pow(f, 2.0 / p));
}

}  // namespace subdiag
