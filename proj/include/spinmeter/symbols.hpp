#pragma once

// Covariant and contravariant symbols of spin operators on a sphere grid,
// and the Q and P functions of density matrices.
//
// Every operator of the spin-s system has a covariant symbol <n|A|n> and a
// contravariant symbol f with
//   A = (2s+1)/(4 pi) * integral f(n) |n><n| dn,
// where f can always be chosen band limited to harmonic degree <= 2s.  On a
// grid of exactness >= 4s the band-limited f is recovered by least squares.

#include <cmath>
#include <stdexcept>
#include <string>

#include "spinmeter/linalg.hpp"
#include "spinmeter/sphere_grid.hpp"
#include "spinmeter/spin_system.hpp"
#include "spinmeter/states.hpp"

namespace spinmeter {

struct SphereFunction {
  SphereGrid grid;
  RealVector values;  // one real value per grid node
};

// d x K matrix whose k-th column is the maximal-weight coherent ket |n_k>.
inline Matrix coherent_kets(const SpinSystem& sys, const SphereGrid& grid) {
  Matrix kets(sys.dim, grid.size());
  for (int k = 0; k < grid.size(); ++k) {
    kets.col(k) = coherent_ket_max(sys, grid.nodes[k]);
  }
  return kets;
}

namespace detail {

inline void require_operator(const SpinSystem& sys, const Matrix& a, const char* where) {
  if (a.rows() != sys.dim || a.cols() != sys.dim) {
    throw std::invalid_argument(std::string(where) + ": operator dimension does not match system");
  }
  if (!is_hermitian(a, 1e-12)) {
    throw std::invalid_argument(std::string(where) +
                                ": operator must be Hermitian (symbols here are real valued)");
  }
}

}  // namespace detail

// A_cv(n_k) = <n_k|A|n_k>.
inline SphereFunction covariant_symbol(const SpinSystem& sys, const Matrix& a,
                                       const SphereGrid& grid) {
  detail::require_operator(sys, a, "covariant_symbol");
  const Matrix kets = coherent_kets(sys, grid);
  RealVector values(grid.size());
  for (int k = 0; k < grid.size(); ++k) {
    values(k) = kets.col(k).dot(a * kets.col(k)).real();
  }
  return SphereFunction{grid, values};
}

// A = (2s+1)/(4 pi) sum_k w_k f(n_k) |n_k><n_k|.
inline Matrix operator_from_contravariant(const SpinSystem& sys, const SphereFunction& f) {
  if (f.values.size() != f.grid.weights.size()) {
    throw std::invalid_argument("operator_from_contravariant: value count does not match grid");
  }
  const Matrix kets = coherent_kets(sys, f.grid);
  const double scale = (sys.dim) / (4.0 * M_PI);
  const RealVector coeffs = scale * f.grid.weights.cwiseProduct(f.values);
  return kets * coeffs.cast<Complex>().asDiagonal() * kets.adjoint();
}

// Band-limited contravariant symbol of A, by least squares over the
// degree <= 2s subspace sampled on the grid.  The caller must supply a grid
// of exactness >= 4s; the reconstruction is verified and failure is reported
// rather than assumed away.
inline SphereFunction contravariant_symbol(const SpinSystem& sys, const Matrix& a,
                                           const SphereGrid& grid) {
  detail::require_operator(sys, a, "contravariant_symbol");
  if (grid.exactness < 2 * sys.two_s) {
    throw std::invalid_argument("contravariant_symbol: grid exactness below 4s");
  }
  const int n = grid.size();
  const Matrix kets = coherent_kets(sys, grid);
  const double scale = sys.dim / (4.0 * M_PI);

  // design(:, k) = real coordinates of (2s+1)/(4 pi) w_k |n_k><n_k|
  RealMatrix design(sys.dim * sys.dim, n);
  for (int k = 0; k < n; ++k) {
    const Matrix proj = (scale * grid.weights(k)) * (kets.col(k) * kets.col(k).adjoint());
    design.col(k) = hermitian_to_real(proj);
  }

  // Restrict the unknown to band-limited functions f = P c, then solve the
  // normal-free least-squares problem for c.
  const RealMatrix bandlimit = bandlimit_projection(sys.s, grid);
  const RealMatrix restricted = design * bandlimit;
  const RealVector target = hermitian_to_real(a);
  Eigen::CompleteOrthogonalDecomposition<RealMatrix> cod(restricted);
  const RealVector f = bandlimit * cod.solve(target);

  const double residual = (design * f - target).norm();
  if (residual > 1e-8 * std::max(1.0, target.norm())) {
    throw invariant_violation("contravariant_symbol: inversion residual too large");
  }
  const double drift = (bandlimit * f - f).cwiseAbs().maxCoeff();
  if (drift > 1e-8 * std::max(1.0, f.cwiseAbs().maxCoeff())) {
    throw invariant_violation("contravariant_symbol: result escapes the band limit");
  }
  return SphereFunction{grid, f};
}

// Q(n) = (2s+1)/(4 pi) <n|rho|n>: nonnegative, integrates to 1 on the grid.
inline SphereFunction q_function(const SpinSystem& sys, const Matrix& rho,
                                 const SphereGrid& grid) {
  validate_density(rho);
  SphereFunction q = covariant_symbol(sys, rho, grid);
  q.values *= sys.dim / (4.0 * M_PI);
  return q;
}

// P(n) = (2s+1)/(4 pi) * contravariant symbol of rho: integrates to 1 against
// the grid but may go negative.
inline SphereFunction p_function(const SpinSystem& sys, const Matrix& rho,
                                 const SphereGrid& grid) {
  validate_density(rho);
  SphereFunction p = contravariant_symbol(sys, rho, grid);
  p.values *= sys.dim / (4.0 * M_PI);
  return p;
}

}  // namespace spinmeter
