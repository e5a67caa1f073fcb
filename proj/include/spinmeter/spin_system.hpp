#pragma once

// Spin operator algebra and spin coherent states for arbitrary half-integer
// spin s.
//
// Conventions used throughout the library:
//   * hbar = 1; spin operators are dimensionless.
//   * The standard basis |m> is ordered m = s, s-1, ..., -s, so index 0 is
//     the maximal-weight state and S3 = diag(s, s-1, ..., -s).
//   * Rotations act as exp(-i theta . S).

#include <cmath>
#include <stdexcept>

#include "spinmeter/geometry.hpp"
#include "spinmeter/linalg.hpp"

namespace spinmeter {

struct SpinSystem {
  double s = 0.0;
  int two_s = 0;
  int dim = 0;     // 2s + 1
  Matrix sx, sy, sz;

  const Matrix& op(int axis) const {
    switch (axis) {
      case 0: return sx;
      case 1: return sy;
      case 2: return sz;
      default: throw std::invalid_argument("SpinSystem::op: axis must be 0, 1 or 2");
    }
  }

  // n . S for an arbitrary (not necessarily unit) real vector n.
  Matrix dot(const Vec3& n) const { return n.x() * sx + n.y() * sy + n.z() * sz; }
  Matrix dot(const UnitVector& n) const { return dot(n.vec()); }

  // Basis index of the S3 eigenvalue m; m must lie in {s, s-1, ..., -s}.
  int index_of(double m) const {
    const double offset = s - m;
    const int idx = static_cast<int>(std::lround(offset));
    if (std::abs(offset - idx) > 1e-9 || idx < 0 || idx >= dim) {
      throw std::invalid_argument("SpinSystem::index_of: m is not an eigenvalue of S3");
    }
    return idx;
  }

  double m_of(int index) const {
    if (index < 0 || index >= dim) throw std::invalid_argument("SpinSystem::m_of: index out of range");
    return s - index;
  }
};

// Builds the spin-s operator triple from the ladder construction:
//   S+ |m> = sqrt(s(s+1) - m(m+1)) |m+1>,  Sx = (S+ + S-)/2,  Sy = (S+ - S-)/(2i).
inline SpinSystem make_spin_system(double s) {
  const double doubled = 2.0 * s;
  const int two_s = static_cast<int>(std::lround(doubled));
  if (!(s > 0.0) || std::abs(doubled - two_s) > 1e-9 || two_s < 1) {
    throw std::invalid_argument("make_spin_system: s must be a positive half-integer");
  }
  SpinSystem sys;
  sys.s = 0.5 * two_s;
  sys.two_s = two_s;
  sys.dim = two_s + 1;

  Matrix splus = Matrix::Zero(sys.dim, sys.dim);
  for (int i = 1; i < sys.dim; ++i) {
    const double m = sys.m_of(i);  // S+ maps |m> (row index i) up to |m+1> (row index i-1)
    splus(i - 1, i) = std::sqrt(sys.s * (sys.s + 1.0) - m * (m + 1.0));
  }
  const Matrix sminus = splus.adjoint();
  sys.sx = 0.5 * (splus + sminus);
  sys.sy = Complex(0.0, -0.5) * (splus - sminus);
  sys.sz = Matrix::Zero(sys.dim, sys.dim);
  for (int i = 0; i < sys.dim; ++i) sys.sz(i, i) = sys.m_of(i);
  return sys;
}

// Axis-angle vector theta_n with exp(-i theta_n . S) S3 exp(+i theta_n . S) = n . S:
// rotate z into n by the polar angle about the axis z x n.  The section is
// fixed at the poles, where the axis degenerates: theta = 0 at +z and
// pi * (0, 1, 0) at -z.  Only |n, m><n, m| is section independent; no code
// may rely on the phase of a coherent ket.
inline Vec3 rotation_vector(const UnitVector& n) {
  const Vec3 axis_raw = Vec3::UnitZ().cross(n.vec());
  const double axis_norm = axis_raw.norm();
  const double angle = n.theta();
  if (axis_norm < 1e-14) {
    return (n.z() > 0.0) ? Vec3::Zero() : Vec3(0.0, M_PI, 0.0);
  }
  return (angle / axis_norm) * axis_raw;
}

// exp(-i theta . S) for an axis-angle vector theta.
inline Matrix rotation_matrix(const SpinSystem& sys, const Vec3& axis_angle) {
  return phase_exp(sys.dot(axis_angle));
}

struct CoherentKet {
  UnitVector direction;
  double m;
  Vector amplitudes;
};

// |n, m> = exp(-i theta_n . S) |m>, the eigenvector of n . S with eigenvalue m.
inline CoherentKet coherent_ket(const SpinSystem& sys, const UnitVector& n, double m) {
  const int idx = sys.index_of(m);
  const Matrix rot = rotation_matrix(sys, rotation_vector(n));
  return CoherentKet{n, m, rot.col(idx)};
}

// The maximal-weight coherent ket |n> = |n, s>.
inline Vector coherent_ket_max(const SpinSystem& sys, const UnitVector& n) {
  return rotation_matrix(sys, rotation_vector(n)).col(0);
}

inline Complex expectation(const Vector& psi, const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() != psi.size()) {
    throw std::invalid_argument("expectation: dimension mismatch");
  }
  return psi.dot(a * psi);  // Eigen's dot conjugates the left argument
}

inline Complex expectation(const Matrix& rho, const Matrix& a) {
  if (a.rows() != a.cols() || rho.rows() != rho.cols() || a.rows() != rho.rows()) {
    throw std::invalid_argument("expectation: dimension mismatch");
  }
  return (rho * a).trace();
}

inline Vec3 spin_expectation(const Vector& psi, const SpinSystem& sys) {
  return Vec3(expectation(psi, sys.sx).real(), expectation(psi, sys.sy).real(),
              expectation(psi, sys.sz).real());
}

inline Vec3 spin_expectation(const Matrix& rho, const SpinSystem& sys) {
  return Vec3(expectation(rho, sys.sx).real(), expectation(rho, sys.sy).real(),
              expectation(rho, sys.sz).real());
}

// Total spin variance sum_a (<S_a^2> - <S_a>^2); equals s for coherent states.
inline double variance_sum(const Vector& psi, const SpinSystem& sys) {
  double total = 0.0;
  for (int a = 0; a < 3; ++a) {
    const Matrix& sa = sys.op(a);
    const double second = expectation(psi, Matrix(sa * sa)).real();
    const double first = expectation(psi, sa).real();
    total += second - first * first;
  }
  return total;
}

}  // namespace spinmeter
