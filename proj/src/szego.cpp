#include "subdiag/szego.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include <Eigen/QR>

#include "subdiag/matcore.hpp"

namespace subdiag {

namespace {

void require_shape(const TracialSubalgebra& alg, const CMatrix& x, const char* who) {
  if (x.rows() != alg.n() || x.cols() != alg.n())
    throw PreconditionError(std::string(who) + ": shape mismatch with the algebra");
}

void require_psd(const CMatrix& h, const char* who) {
  if (!is_hermitian(h)) throw PreconditionError(std::string(who) + ": weight is not Hermitian");
  EigDecomp ed = herm_eig(h);
  const double lmax = std::max(ed.values(ed.values.size() - 1), 0.0);
  if (ed.values(0) < -tol::rank * lmax)
    throw PreconditionError(std::string(who) + ": weight is not positive semidefinite");
}

void require_exponent(double p, const char* who) {
  if (!(p >= 1.0) || !std::isfinite(p))
    throw PreconditionError(std::string(who) + ": exponent must lie in [1, infinity)");
}

// tau(h (x* x)^{p/2}) through the eigenbasis of x* x.
double trace_weight_pow(const CMatrix& h, const CMatrix& x, double p) {
  EigDecomp ed = herm_eig(CMatrix(x.adjoint() * x));
  const CMatrix vhv = ed.vectors.adjoint() * h * ed.vectors;
  double s = 0.0;
  for (int i = 0; i < ed.values.size(); ++i)
    s += std::pow(std::max(ed.values(i), 0.0), 0.5 * p) * std::real(vhv(i, i));
  return s / static_cast<double>(x.rows());
}

// tau(|x|^p) from the singular values.
double trace_abs_pow(const CMatrix& x, double p) {
  RVector sv = singular_values(x);
  double s = 0.0;
  for (int i = 0; i < sv.size(); ++i) s += std::pow(sv(i), p);
  return s / static_cast<double>(x.rows());
}

// Real orthonormal basis of the traceless Hermitian part of D.  Exponentials
// of its span are exactly the positive definite elements of D with
// determinant one, which is the whole feasible set after the phase of d is
// absorbed into a and the determinant constraint is scaled to be active.
std::vector<CMatrix> traceless_herm_basis(const TracialSubalgebra& alg) {
  const int n = alg.n();
  const CMatrix id = CMatrix::Identity(n, n);
  std::vector<CMatrix> cand;
  for (const CMatrix& b : alg.diag_basis()) {
    CMatrix re = 0.5 * (b + b.adjoint());
    CMatrix im = Complex(0.0, -0.5) * (b - b.adjoint());
    re -= std::real(trace_state(re)) * id;
    im -= std::real(trace_state(im)) * id;
    cand.push_back(re);
    cand.push_back(im);
  }
  // Hermitian inputs have real pairwise inner products, so Gram-Schmidt
  // coefficients stay real and the output spans the same real space.
  return orthonormalize(cand);
}

CMatrix span_combination(const std::vector<CMatrix>& onb, const RVector& coords, int offset,
                         int n) {
  CMatrix s = CMatrix::Zero(n, n);
  for (size_t k = 0; k < onb.size(); ++k) s += coords(offset + static_cast<int>(k)) * onb[k];
  return s;
}

CMatrix complex_combination(const std::vector<CMatrix>& onb, const RVector& coords, int n) {
  CMatrix a = CMatrix::Zero(n, n);
  for (size_t k = 0; k < onb.size(); ++k)
    a += Complex(coords(2 * static_cast<int>(k)), coords(2 * static_cast<int>(k) + 1)) * onb[k];
  return a;
}

// Central differences.  The step balances truncation against evaluation
// noise of the objectives (around 1e-13 absolute), which puts the gradient
// noise floor near 1e-9, below grad_tol.
RVector num_grad(const std::function<double(const RVector&)>& f, const RVector& x) {
  const double fd = 1e-4 * std::max(1.0, x.size() ? x.cwiseAbs().maxCoeff() : 0.0);
  RVector g(x.size());
  RVector xp = x, xm = x;
  for (int k = 0; k < x.size(); ++k) {
    xp(k) = x(k) + fd;
    xm(k) = x(k) - fd;
    g(k) = (f(xp) - f(xm)) / (2.0 * fd);
    xp(k) = x(k);
    xm(k) = x(k);
  }
  return g;
}

struct OptRun {
  RVector x;
  double value = 0.0;
  double grad_norm = 0.0;
  int iters = 0;
  bool converged = false;
};

// Barzilai-Borwein step sizes with Armijo backtracking as a safeguard.  The
// objectives are smooth except on measure zero sets (repeated singular
// values at p near 1), so central differences give gradients good to well
// below grad_tol.
OptRun minimize_bb(const std::function<double(const RVector&)>& f, RVector x,
                   const SzegoOptions& opts) {
  double fx = f(x);
  if (x.size() == 0) return {std::move(x), fx, 0.0, 0, true};

  RVector g = num_grad(f, x);
  RVector x_prev, g_prev;
  double step = 1.0 / std::max(1.0, g.norm());
  int it = 0;
  int stagnant = 0;
  bool converged = false;
  for (; it < opts.max_iters; ++it) {
    const double gn = g.norm();
    if (gn <= opts.grad_tol) {
      converged = true;
      break;
    }
    if (it > 0) {
      const RVector s = x - x_prev;
      const RVector y = g - g_prev;
      const double sy = s.dot(y);
      if (sy > 0.0) step = s.squaredNorm() / sy;
    }
    step = std::clamp(step, 1e-12, 1e8);

    double t = step;
    RVector cand;
    double fc = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      cand = x - t * g;
      fc = f(cand);
      if (std::isfinite(fc) && fc <= fx - 1e-4 * t * gn * gn) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;  // descent exhausted at the resolution of the model

    // Accepted steps whose decrease sits at the floor of double precision
    // cannot add up to anything; thirty in a row means the run is done even
    // if the gradient reading never crosses grad_tol.
    stagnant = (fx - fc <= 1e-14 * std::max(1.0, std::abs(fx))) ? stagnant + 1 : 0;

    x_prev = x;
    g_prev = g;
    x = std::move(cand);
    fx = fc;
    g = num_grad(f, x);
    if (stagnant >= 30) break;
  }
  return {std::move(x), fx, g.norm(), it, converged};
}

struct MultistartOutcome {
  OptRun best;
  int converged_restarts = 0;
};

// Restart 0 starts from the origin (a = 0, d = 1); the rest perturb it with
// seeded Gaussian coordinates so reruns are reproducible.
MultistartOutcome multistart(const std::function<double(const RVector&)>& f, int dim, Rng& rng,
                             const SzegoOptions& opts) {
  MultistartOutcome out;
  const int restarts = std::max(1, opts.restarts);
  for (int r = 0; r < restarts; ++r) {
    RVector x0 = RVector::Zero(dim);
    if (r > 0) {
      Rng child = rng.child(r);
      for (int k = 0; k < dim; ++k) x0(k) = 0.5 * child.gaussian();
    }
    OptRun run = minimize_bb(f, std::move(x0), opts);
    if (run.converged) ++out.converged_restarts;
    // Strictly better value wins; a tie within roundoff goes to a certified
    // run so a restart stalled at the gradient noise floor cannot shadow an
    // equally good converged one.
    const double margin = 1e-12 * std::max(1.0, std::abs(run.value));
    const bool better = run.value < out.best.value - margin;
    const bool tie_upgrade =
        run.value < out.best.value + margin && run.converged && !out.best.converged;
    if (r == 0 || better || tie_upgrade) out.best = std::move(run);
  }
  return out;
}

}  // namespace

double szego_l2_objective(const CMatrix& h, const CMatrix& a, const CMatrix& d) {
  const CMatrix x = a + d;
  return std::real(hs_inner(x * h, x));
}

double szego_lp_objective(const CMatrix& h, const CMatrix& a, const CMatrix& d, double p) {
  require_exponent(p, "szego_lp_objective");
  return trace_weight_pow(h, CMatrix(a + d), p);
}

double szego_two_sided_objective(const CMatrix& h, const CMatrix& a, double p, double q,
                                 bool left) {
  require_exponent(p, "szego_two_sided_objective");
  if (!(q > 0.0)) throw PreconditionError("szego_two_sided_objective: q must be positive");
  const CMatrix m = mat_pow(CMatrix(0.5 * (h + h.adjoint())), q / p);
  const CMatrix x = left ? CMatrix(m * a) : CMatrix(a * m);
  return std::pow(trace_abs_pow(x, p), 1.0 / q);
}

SzegoResult szego_l2(const TracialSubalgebra& alg, const CMatrix& h, Rng& rng,
                     const SzegoOptions& opts) {
  require_shape(alg, h, "szego_l2");
  require_psd(h, "szego_l2");

  const int n = alg.n();
  SzegoResult out;
  out.minimizer_a = CMatrix::Zero(n, n);
  out.minimizer_d = CMatrix::Identity(n, n);
  const double scale = op_norm(h);
  if (scale == 0.0) {
    out.converged = true;
    return out;
  }
  const CMatrix hn = (0.5 / scale) * (h + h.adjoint());

  // The minimization over a is least squares for any fixed d: with a =
  // sum c_l g_l over the orthonormal basis of A_0 the objective is
  // c* G c + 2 Re(c* r) + tau(h d^2), G_{ml} = tau(h g_m* g_l).  G depends
  // only on the weight, so it is factored once per call.
  const std::vector<CMatrix>& zb = alg.zero_basis();
  const int K = static_cast<int>(zb.size());
  CMatrix G = CMatrix::Zero(K, K);
  {
    std::vector<CMatrix> gh(K);
    for (int l = 0; l < K; ++l) gh[l] = zb[l] * hn;
    for (int m = 0; m < K; ++m)
      for (int l = 0; l < K; ++l) G(m, l) = hs_inner(gh[l], zb[m]);
    G = 0.5 * (G + CMatrix(G.adjoint()));
  }
  Eigen::CompleteOrthogonalDecomposition<CMatrix> g_fact;
  if (K > 0) g_fact.compute(G);

  const std::vector<CMatrix> hb = traceless_herm_basis(alg);
  const int P = static_cast<int>(hb.size());

  auto d_of = [&](const RVector& theta) {
    const CMatrix s = span_combination(hb, theta, 0, n);
    return mat_exp(CMatrix(0.5 * (s + s.adjoint())));
  };
  auto partial_value = [&](const CMatrix& d, CVector* c_out) {
    const CMatrix dh = d * hn;
    double val = std::real(hs_inner(dh, d));
    if (K == 0) return val;
    CVector r(K);
    for (int m = 0; m < K; ++m) r(m) = hs_inner(dh, zb[m]);
    const CVector c = g_fact.solve(CVector(-r));
    if (c_out) *c_out = c;
    val += std::real(c.dot(CVector(G * c))) + 2.0 * std::real(c.dot(r));
    return val;
  };
  auto objective = [&](const RVector& theta) { return partial_value(d_of(theta), nullptr); };

  MultistartOutcome ms = multistart(objective, P, rng, opts);

  const CMatrix d_best = d_of(ms.best.x);
  CVector c_best = CVector::Zero(K);
  const double val = partial_value(d_best, &c_best);
  out.value = scale * val;
  out.minimizer_d = d_best;
  out.minimizer_a = CMatrix::Zero(n, n);
  for (int l = 0; l < K; ++l) out.minimizer_a += c_best(l) * zb[l];
  out.converged = ms.best.converged;
  out.converged_restarts = ms.converged_restarts;
  out.iterations = ms.best.iters;
  out.grad_norm = ms.best.grad_norm;
  return out;
}

SzegoResult szego_lp(const TracialSubalgebra& alg, const CMatrix& h, double p, Rng& rng,
                     const SzegoOptions& opts) {
  require_shape(alg, h, "szego_lp");
  require_psd(h, "szego_lp");
  require_exponent(p, "szego_lp");

  const int n = alg.n();
  SzegoResult out;
  out.minimizer_a = CMatrix::Zero(n, n);
  out.minimizer_d = CMatrix::Identity(n, n);
  const double scale = op_norm(h);
  if (scale == 0.0) {
    out.converged = true;
    return out;
  }
  const CMatrix hn = (0.5 / scale) * (h + h.adjoint());

  const std::vector<CMatrix>& zb = alg.zero_basis();
  const std::vector<CMatrix> hb = traceless_herm_basis(alg);
  const int K = static_cast<int>(zb.size());
  const int P = static_cast<int>(hb.size());

  // Coordinates: 2K reals for a in A_0, then P for the exponent of d.
  auto assemble = [&](const RVector& xi) {
    const CMatrix a = complex_combination(zb, xi, n);
    const CMatrix s = span_combination(hb, xi, 2 * K, n);
    return std::pair<CMatrix, CMatrix>(a, mat_exp(CMatrix(0.5 * (s + s.adjoint()))));
  };
  auto objective = [&](const RVector& xi) {
    auto [a, d] = assemble(xi);
    return trace_weight_pow(hn, CMatrix(a + d), p);
  };

  MultistartOutcome ms = multistart(objective, 2 * K + P, rng, opts);

  auto [a_best, d_best] = assemble(ms.best.x);
  out.value = scale * ms.best.value;
  out.minimizer_a = a_best;
  out.minimizer_d = d_best;
  out.converged = ms.best.converged;
  out.converged_restarts = ms.converged_restarts;
  out.iterations = ms.best.iters;
  out.grad_norm = ms.best.grad_norm;
  return out;
}

TwoSidedResult szego_lp_two_sided(const TracialSubalgebra& alg, const CMatrix& h, double p,
                                  double q, Rng& rng, const SzegoOptions& opts) {
  require_shape(alg, h, "szego_lp_two_sided");
  require_psd(h, "szego_lp_two_sided");
  require_exponent(p, "szego_lp_two_sided");
  if (!(q > 0.0)) throw PreconditionError("szego_lp_two_sided: q must be positive");

  const int n = alg.n();
  TwoSidedResult out;
  out.left.minimizer_a = out.right.minimizer_a = CMatrix::Identity(n, n);
  out.left.minimizer_d = out.right.minimizer_d = CMatrix::Identity(n, n);
  const double scale = op_norm(h);
  if (scale == 0.0) {
    out.left.converged = out.right.converged = true;
    return out;
  }
  const CMatrix hn = (0.5 / scale) * (h + h.adjoint());
  const CMatrix m = mat_pow(hn, q / p);

  const std::vector<CMatrix>& zb = alg.zero_basis();
  const std::vector<CMatrix> hb = traceless_herm_basis(alg);
  const int K = static_cast<int>(zb.size());
  const int P = static_cast<int>(hb.size());

  // a ranges over A with Phi(a) positive definite of determinant one: a
  // polar rotation of Phi(a) can be pushed into the modulus without changing
  // the trace, and scaling makes the determinant constraint active.
  auto assemble = [&](const RVector& xi) {
    const CMatrix a0 = complex_combination(zb, xi, n);
    const CMatrix s = span_combination(hb, xi, 2 * K, n);
    return std::pair<CMatrix, CMatrix>(a0, mat_exp(CMatrix(0.5 * (s + s.adjoint()))));
  };
  auto run_side = [&](bool left, Rng side_rng) {
    auto objective = [&](const RVector& xi) {
      auto [a0, d] = assemble(xi);
      const CMatrix a = a0 + d;
      const CMatrix x = left ? CMatrix(m * a) : CMatrix(a * m);
      return std::pow(trace_abs_pow(x, p), 1.0 / q);
    };
    MultistartOutcome ms = multistart(objective, 2 * K + P, side_rng, opts);
    auto [a0_best, d_best] = assemble(ms.best.x);
    SzegoResult res;
    res.value = scale * ms.best.value;
    res.minimizer_a = a0_best + d_best;
    res.minimizer_d = d_best;
    res.converged = ms.best.converged;
    res.converged_restarts = ms.converged_restarts;
    res.iterations = ms.best.iters;
    res.grad_norm = ms.best.grad_norm;
    return res;
  };

  out.left = run_side(true, rng.child(1));
  out.right = run_side(false, rng.child(2));
  return out;
}

double det_zero_distance(const TracialSubalgebra& alg, const CMatrix& h, double p, double q) {
  require_shape(alg, h, "det_zero_distance");
  require_psd(h, "det_zero_distance");
  require_exponent(p, "det_zero_distance");
  if (!(q > 0.0)) throw PreconditionError("det_zero_distance: q must be positive");

  const CMatrix m = mat_pow(CMatrix(0.5 * (h + h.adjoint())), q / p);
  std::vector<CMatrix> prods;
  prods.reserve(alg.zero_basis().size());
  for (const CMatrix& g : alg.zero_basis()) prods.push_back(m * g);
  const CMatrix resid = project_out(m, orthonormalize(prods));
  return resid.norm();
}

}  // namespace subdiag
