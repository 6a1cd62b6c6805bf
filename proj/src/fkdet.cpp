#include "subdiag/fkdet.hpp"

#include <cmath>

#include "subdiag/matcore.hpp"

namespace subdiag {

double fk_det(const CMatrix& a) {
  const RVector sv = singular_values(a);
  const int n = static_cast<int>(sv.size());
  if (sv(0) <= 0.0) return 0.0;
  const double cutoff = tol::rank * sv(0);
  double log_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    if (sv(i) <= cutoff) return 0.0;
    log_sum += std::log(sv(i));
  }
  return std::exp(log_sum / n);
}

double fk_det_regularized(const CMatrix& a, double eps) {
  if (eps < 0.0) throw PreconditionError("fk_det_regularized: eps must be nonnegative");
  const RVector sv = singular_values(a);
  const int n = static_cast<int>(sv.size());
  double log_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = sv(i) + eps;
    if (s <= 0.0) return 0.0;
    log_sum += std::log(s);
  }
  return std::exp(log_sum / n);
}

std::optional<DetWitness> det_perturbation_witness(const CMatrix& h, double margin, int grid,
                                                   int grid_max) {
  if (!is_hermitian(h)) throw PreconditionError("det_perturbation_witness: h must be selfadjoint");
  const double scale = op_norm(h);
  if (scale == 0.0) return std::nullopt;

  const int n = static_cast<int>(h.rows());
  const CMatrix one = CMatrix::Identity(n, n);
  constexpr double mag_hi = 0.5, mag_lo = 1e-9;

  for (int points = grid / 2; points <= grid_max / 2; points *= 2) {
    const double ratio = std::pow(mag_lo / mag_hi, 1.0 / (points - 1));
    double m = mag_hi;
    for (int k = 0; k < points; ++k, m *= ratio) {
      for (double sign : {1.0, -1.0}) {
        const double t = sign * m / scale;
        const double det = fk_det(one - t * h);
        if (det < 1.0 - margin) return DetWitness{t, det};
      }
    }
  }
  return std::nullopt;
}

}  // namespace subdiag
