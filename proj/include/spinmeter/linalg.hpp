#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "spinmeter/errors.hpp"

namespace spinmeter {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Vec3 = Eigen::Vector3d;

inline Matrix hermitize(const Matrix& a) { return 0.5 * (a + a.adjoint()); }

inline bool is_hermitian(const Matrix& a, double tol = 1e-12) {
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

// Extremal eigenvalues of a Hermitian operator.  The input is hermitized
// first so roundoff asymmetry cannot leak into the eigensolve.
inline double min_eigenvalue(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

inline double max_eigenvalue(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(a.rows() - 1);
}

// exp(-i h) for Hermitian h, by spectral decomposition.
inline Matrix phase_exp(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(h));
  Vector phases(h.rows());
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    phases(i) = std::exp(Complex(0.0, -es.eigenvalues()(i)));
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

// Isometric real coordinates for Hermitian matrices: diagonal first, then
// sqrt(2) * (Re, Im) of each strict upper entry in row-major order.  The map
// preserves the Frobenius inner product, which keeps least-squares problems
// over Hermitian unknowns well scaled.
inline RealVector hermitian_to_real(const Matrix& h) {
  const Eigen::Index d = h.rows();
  if (h.cols() != d) throw std::invalid_argument("hermitian_to_real: square matrix required");
  RealVector x(d * d);
  Eigen::Index pos = 0;
  for (Eigen::Index i = 0; i < d; ++i) x(pos++) = h(i, i).real();
  const double r2 = std::sqrt(2.0);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      x(pos++) = r2 * h(i, j).real();
      x(pos++) = r2 * h(i, j).imag();
    }
  }
  return x;
}

inline Matrix hermitian_from_real(const RealVector& x, Eigen::Index d) {
  if (x.size() != d * d) throw std::invalid_argument("hermitian_from_real: size mismatch");
  Matrix h = Matrix::Zero(d, d);
  Eigen::Index pos = 0;
  for (Eigen::Index i = 0; i < d; ++i) h(i, i) = x(pos++);
  const double inv_r2 = 1.0 / std::sqrt(2.0);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      const double re = x(pos++) * inv_r2;
      const double im = x(pos++) * inv_r2;
      h(i, j) = Complex(re, im);
      h(j, i) = Complex(re, -im);
    }
  }
  return h;
}

}  // namespace spinmeter
