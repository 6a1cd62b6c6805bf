#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace subdiag {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

// Violated mathematical precondition (non-Hermitian weight, singular factor,
// element outside the algebra, ...).  The CLI maps this to exit code 3.
class PreconditionError : public std::runtime_error {
 public:
  explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed file or command line.  The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Shared tolerances.  Each is a relative factor; the comment says what it
// scales against at the point of use.
namespace tol {

inline constexpr double eig = 1e-11;      // Hermiticity checks, x Frobenius norm
inline constexpr double rank = 1e-10;     // rank cutoffs, x sigma_max
inline constexpr double alg = 1e-10;      // algebraic identities, x product of operand norms
inline constexpr double det_rel = 1e-9;   // determinant comparisons, relative
inline constexpr double sub = 1e-8;       // subspace membership and distance
inline constexpr double cross = 1e-8;     // agreement of independent routes

}  // namespace tol

}  // namespace subdiag
