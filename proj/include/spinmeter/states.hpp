#pragma once

// Density-matrix validation and the standard state metrics.

#include <cmath>
#include <limits>
#include <stdexcept>

#include "spinmeter/linalg.hpp"

namespace spinmeter {

// Rejects non-density input: non-square, non-Hermitian, trace away from 1 or
// eigenvalues below -tol.
inline void validate_density(const Matrix& rho, double tol = 1e-8) {
  if (rho.rows() != rho.cols()) throw std::invalid_argument("density: matrix must be square");
  if (!is_hermitian(rho, tol)) throw std::invalid_argument("density: matrix must be Hermitian");
  if (std::abs(rho.trace() - Complex(1.0, 0.0)) > tol) {
    throw std::invalid_argument("density: trace must equal 1");
  }
  if (min_eigenvalue(rho) < -tol) {
    throw std::invalid_argument("density: matrix must be positive semidefinite");
  }
}

inline Matrix projector(const Vector& psi) {
  const double n2 = psi.squaredNorm();
  if (!(n2 > 0.0)) throw std::invalid_argument("projector: zero vector");
  return (psi * psi.adjoint()) / n2;
}

inline Matrix maximally_mixed(int dim) {
  if (dim < 1) throw std::invalid_argument("maximally_mixed: dim must be positive");
  return Matrix::Identity(dim, dim) / static_cast<double>(dim);
}

// Square root of a positive semidefinite operator; tiny negative eigenvalues
// from roundoff are clamped to zero.
inline Matrix psd_sqrt(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(a));
  // Eigenvalues below the decomposition's noise floor are numerically zero;
  // without the cutoff sqrt turns 1e-17 residues into 3e-9 errors.
  const double lmax = std::max(0.0, es.eigenvalues().maxCoeff());
  const double cutoff = 64.0 * std::numeric_limits<double>::epsilon() * lmax;
  Vector roots(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double lambda = es.eigenvalues()(i);
    roots(i) = lambda > cutoff ? std::sqrt(lambda) : 0.0;
  }
  return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().adjoint();
}

// Fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2; 1 iff the states agree,
// 0 for orthogonal supports.  Evaluated as the squared nuclear norm of
// sqrt(sigma) sqrt(rho): the singular values are the eigenvalues of the inner
// square root directly, which avoids taking sqrt of rounding-level residues.
inline double state_fidelity(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
    throw std::invalid_argument("state_fidelity: dimension mismatch");
  }
  const Matrix m = psd_sqrt(sigma) * psd_sqrt(rho);
  const double tr = m.jacobiSvd().singularValues().sum();
  return tr * tr;
}

// Trace distance (1/2) || rho - sigma ||_1.
inline double trace_distance(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
    throw std::invalid_argument("trace_distance: dimension mismatch");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(rho - sigma), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace spinmeter
