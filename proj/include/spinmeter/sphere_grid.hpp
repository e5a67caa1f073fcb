#pragma once

// Quadrature on the unit 2-sphere and the degree-limited projection kernel.
//
// The grid is a product rule: Gauss-Legendre in cos(theta) times a uniform
// azimuthal rule.  With floor(L/2)+1 polar and L+1 azimuthal nodes it
// integrates every spherical polynomial of total degree <= L exactly, which
// is what makes the coherent-state resolution of identity hold on the grid
// to machine precision.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "spinmeter/geometry.hpp"
#include "spinmeter/linalg.hpp"
#include "spinmeter/spin_system.hpp"

namespace spinmeter {

// Legendre polynomial P_j(x) by the three-term recurrence; P_j(1) = 1 holds
// exactly in floating point.
inline double legendre(int j, double x) {
  if (j < 0) throw std::invalid_argument("legendre: negative degree");
  if (j == 0) return 1.0;
  double prev = 1.0;
  double curr = x;
  for (int k = 1; k < j; ++k) {
    const double next = ((2.0 * k + 1.0) * x * curr - k * prev) / (k + 1.0);
    prev = curr;
    curr = next;
  }
  return curr;
}

// n-point Gauss-Legendre nodes (ascending) and weights on [-1, 1], by Newton
// iteration on P_n starting from the Chebyshev estimates.
inline void gauss_legendre(int n, RealVector& nodes, RealVector& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  nodes.resize(n);
  weights.resize(n);
  // Value and derivative of P_n by the three-term recurrence.
  const auto eval = [n](double z, double& p, double& dp) {
    double p1 = 1.0;
    double p2 = 0.0;
    for (int j = 0; j < n; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
    }
    p = p1;
    dp = n * (z * p1 - p2) / (z * z - 1.0);
  };
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p = 0.0;
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      eval(z, p, dp);
      const double dz = p / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    eval(z, p, dp);  // derivative at the converged node, for the weight
    nodes(i) = -z;
    nodes(n - 1 - i) = z;
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    weights(i) = w;
    weights(n - 1 - i) = w;
  }
}

struct SphereGrid {
  std::vector<UnitVector> nodes;
  RealVector weights;   // steradian measure; the weights sum to 4 pi
  int exactness = 0;    // certified polynomial exactness degree

  int size() const { return static_cast<int>(nodes.size()); }
};

// Product grid exact for spherical polynomials of total degree <= degree.
inline SphereGrid build_grid(int degree) {
  if (degree < 0) throw std::invalid_argument("build_grid: degree must be nonnegative");
  const int n_polar = degree / 2 + 1;
  const int n_azimuth = degree + 1;
  RealVector x, v;
  gauss_legendre(n_polar, x, v);

  SphereGrid grid;
  grid.exactness = degree;
  grid.nodes.reserve(static_cast<std::size_t>(n_polar) * n_azimuth);
  grid.weights.resize(static_cast<Eigen::Index>(n_polar) * n_azimuth);
  const double dphi = 2.0 * M_PI / n_azimuth;
  Eigen::Index pos = 0;
  for (int i = 0; i < n_polar; ++i) {
    const double ct = x(i);
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int j = 0; j < n_azimuth; ++j) {
      const double phi = dphi * j;
      grid.nodes.emplace_back(st * std::cos(phi), st * std::sin(phi), ct);
      grid.weights(pos++) = v(i) * dphi;
    }
  }
  return grid;
}

// Default exactness degree 4s + 2: enough for products of two degree-2s
// symbols plus one extra power of n.
inline int default_grid_degree(double s) {
  const int two_s = static_cast<int>(std::lround(2.0 * s));
  if (std::abs(2.0 * s - two_s) > 1e-9 || two_s < 1) {
    throw std::invalid_argument("default_grid_degree: s must be a positive half-integer");
  }
  return 2 * two_s + 2;
}

inline double integrate(const SphereGrid& grid, const RealVector& values) {
  if (values.size() != grid.weights.size()) {
    throw std::invalid_argument("integrate: value count does not match grid");
  }
  return grid.weights.dot(values);
}

inline Complex integrate(const SphereGrid& grid, const Vector& values) {
  if (values.size() != grid.weights.size()) {
    throw std::invalid_argument("integrate: value count does not match grid");
  }
  return (grid.weights.cast<Complex>().asDiagonal() * values).sum();
}

// Projection kernel onto the spherical harmonics of degree <= 2s:
//   Pi_2s(n, n') = sum_{j=0}^{2s} (2j+1)/(4 pi) P_j(n . n').
// Acts as the identity on degree-limited functions and annihilates higher
// harmonics; it is the integral kernel behind every symbol inversion here.
struct KernelEvaluator {
  int two_s = 0;
  RealVector coeff;  // (2j+1)/(4 pi), j = 0..2s

  explicit KernelEvaluator(double s) {
    two_s = static_cast<int>(std::lround(2.0 * s));
    if (std::abs(2.0 * s - two_s) > 1e-9 || two_s < 1) {
      throw std::invalid_argument("KernelEvaluator: s must be a positive half-integer");
    }
    coeff.resize(two_s + 1);
    for (int j = 0; j <= two_s; ++j) coeff(j) = (2.0 * j + 1.0) / (4.0 * M_PI);
  }

  double operator()(double cos_angle) const {
    const double x = std::clamp(cos_angle, -1.0, 1.0);
    double acc = coeff(0);
    double prev = 1.0;
    double curr = x;
    for (int j = 1; j <= two_s; ++j) {
      acc += coeff(j) * curr;
      const double next = ((2.0 * j + 1.0) * x * curr - j * prev) / (j + 1.0);
      prev = curr;
      curr = next;
    }
    return acc;
  }

  double operator()(const UnitVector& a, const UnitVector& b) const { return (*this)(a.dot(b)); }
};

inline double projection_kernel(double s, const UnitVector& a, const UnitVector& b) {
  return KernelEvaluator(s)(a, b);
}

// Discrete projector P(k, l) = w_l Pi_2s(n_k, n_l).  Idempotent whenever the
// grid is exact to degree 4s, because the kernel reproduces itself under
// integration against another copy.
inline RealMatrix bandlimit_projection(double s, const SphereGrid& grid) {
  const KernelEvaluator kernel(s);
  const int n = grid.size();
  RealMatrix p(n, n);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      p(k, l) = grid.weights(l) * kernel(grid.nodes[k], grid.nodes[l]);
    }
  }
  return p;
}

}  // namespace spinmeter
