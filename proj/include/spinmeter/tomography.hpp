#pragma once

// State reconstruction from the direction POVM: sampling of outcome counts,
// linear inversion over an orthonormal Hermitian operator basis with the
// trace constraint built in, and a positivity projection (eigenvalue clip at
// zero plus trace renormalization).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "spinmeter/linalg.hpp"
#include "spinmeter/measurement.hpp"
#include "spinmeter/states.hpp"
#include "spinmeter/symbols.hpp"

namespace spinmeter {

// Orthonormal Hermitian basis of the d x d matrices under the trace inner
// product.  B_0 = 1/sqrt(d); the rest are traceless: symmetric and
// antisymmetric off-diagonal pairs, then the diagonal ladder.
inline std::vector<Matrix> hermitian_basis(int dim) {
  if (dim < 1) throw std::invalid_argument("hermitian_basis: dim must be positive");
  std::vector<Matrix> basis;
  basis.reserve(static_cast<std::size_t>(dim) * dim);
  basis.push_back(Matrix::Identity(dim, dim) / std::sqrt(static_cast<double>(dim)));
  const double inv_r2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      Matrix sym = Matrix::Zero(dim, dim);
      sym(i, j) = inv_r2;
      sym(j, i) = inv_r2;
      basis.push_back(sym);
      Matrix anti = Matrix::Zero(dim, dim);
      anti(i, j) = Complex(0.0, -inv_r2);
      anti(j, i) = Complex(0.0, inv_r2);
      basis.push_back(anti);
    }
  }
  for (int l = 1; l < dim; ++l) {
    Matrix diag = Matrix::Zero(dim, dim);
    const double norm = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
    for (int i = 0; i < l; ++i) diag(i, i) = norm;
    diag(l, l) = -static_cast<double>(l) * norm;
    basis.push_back(diag);
  }
  return basis;
}

struct OutcomeCounts {
  SphereGrid grid;
  Eigen::VectorXi counts;
  long long total = 0;
  std::uint64_t seed = 0;
};

namespace detail {

// Uniform double in [0, 1) from the top 53 bits of the generator output;
// pinned here so sampled counts are bit-stable across platforms.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

// Draws n outcomes from the probabilities Tr(E_k rho) by inverse transform
// sampling.  Identical (povm, rho, n, seed) inputs give identical counts.
inline OutcomeCounts sample_outcomes(const Povm& povm, const Matrix& rho, long long n,
                                     std::uint64_t seed) {
  validate_density(rho);
  if (rho.rows() != povm.sys.dim) {
    throw std::invalid_argument("sample_outcomes: state dimension mismatch");
  }
  if (n < 1) throw std::invalid_argument("sample_outcomes: sample count must be positive");
  const int nk = povm.nodes();
  RealVector cumulative(nk);
  double acc = 0.0;
  for (int k = 0; k < nk; ++k) {
    acc += std::max(0.0, (povm.effects[k] * rho).trace().real());
    cumulative(k) = acc;
  }
  if (!(acc > 0.0)) throw invariant_violation("sample_outcomes: zero total probability");

  OutcomeCounts out;
  out.grid = povm.grid;
  out.counts = Eigen::VectorXi::Zero(nk);
  out.total = n;
  out.seed = seed;
  std::mt19937_64 rng(seed);
  for (long long i = 0; i < n; ++i) {
    const double u = detail::uniform_unit(rng) * acc;
    const double* begin = cumulative.data();
    const double* it = std::lower_bound(begin, begin + nk, u);
    int k = static_cast<int>(it - begin);
    if (k >= nk) k = nk - 1;
    out.counts(k) += 1;
  }
  return out;
}

struct ReconstructionResult {
  Matrix estimate;
  double residual = 0.0;          // || A x - p ||_2 after the positivity projection
  double design_condition = 0.0;  // singular-value ratio of the design map
  std::optional<double> fidelity_vs_reference;
  std::optional<double> trace_distance_vs_reference;
};

// Linear inversion of node probabilities p_k = Tr(E_k rho).  The design map
// must have full rank (2s+1)^2; otherwise the POVM cannot identify the state.
inline ReconstructionResult reconstruct(const Povm& povm, const RealVector& probabilities,
                                        const Matrix* reference = nullptr) {
  const int nk = povm.nodes();
  if (probabilities.size() != nk) {
    throw std::invalid_argument("reconstruct: one probability per node required");
  }
  const int dim = povm.sys.dim;
  const int d2 = dim * dim;
  const std::vector<Matrix> basis = hermitian_basis(dim);

  RealMatrix design(nk, d2);
  for (int k = 0; k < nk; ++k) {
    for (int alpha = 0; alpha < d2; ++alpha) {
      design(k, alpha) = (povm.effects[k] * basis[alpha]).trace().real();
    }
  }
  Eigen::JacobiSVD<RealMatrix> svd(design);
  const double sv_max = svd.singularValues()(0);
  const double sv_min = svd.singularValues()(svd.singularValues().size() - 1);
  if (!(sv_min > 1e-10 * sv_max) || nk < d2) {
    throw invariant_violation("reconstruct: POVM is not informationally complete");
  }

  // Trace constraint: the coordinate along B_0 = 1/sqrt(d) is fixed.
  const double x0 = 1.0 / std::sqrt(static_cast<double>(dim));
  const RealVector shifted = probabilities - design.col(0) * x0;
  Eigen::CompleteOrthogonalDecomposition<RealMatrix> cod(design.rightCols(d2 - 1));
  RealVector x(d2);
  x(0) = x0;
  x.tail(d2 - 1) = cod.solve(shifted);

  Matrix estimate = Matrix::Zero(dim, dim);
  for (int alpha = 0; alpha < d2; ++alpha) estimate += x(alpha) * basis[alpha];

  // Positivity projection: clip negative eigenvalues, renormalize the trace.
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(estimate));
  RealVector clipped = es.eigenvalues().cwiseMax(0.0);
  const double mass = clipped.sum();
  if (!(mass > 0.0)) throw invariant_violation("reconstruct: estimate has no positive part");
  clipped /= mass;
  estimate = es.eigenvectors() * clipped.cast<Complex>().asDiagonal() *
             es.eigenvectors().adjoint();

  RealVector projected_coords(d2);
  for (int alpha = 0; alpha < d2; ++alpha) {
    projected_coords(alpha) = (estimate * basis[alpha]).trace().real();
  }

  ReconstructionResult result;
  result.estimate = estimate;
  result.residual = (design * projected_coords - probabilities).norm();
  result.design_condition = sv_max / sv_min;
  if (reference != nullptr) {
    result.fidelity_vs_reference = state_fidelity(estimate, *reference);
    result.trace_distance_vs_reference = trace_distance(estimate, *reference);
  }
  return result;
}

inline ReconstructionResult reconstruct(const Povm& povm, const OutcomeCounts& counts,
                                        const Matrix* reference = nullptr) {
  if (counts.counts.size() != povm.nodes()) {
    throw std::invalid_argument("reconstruct: counts do not match the POVM");
  }
  if (counts.total < 1) throw std::invalid_argument("reconstruct: empty counts");
  const RealVector probabilities =
      counts.counts.cast<double>() / static_cast<double>(counts.total);
  return reconstruct(povm, probabilities, reference);
}

struct ReconstructionDiagnostics {
  double fidelity = 0.0;
  double trace_dist = 0.0;
  double q_max_deviation = 0.0;
};

inline ReconstructionDiagnostics reconstruction_diagnostics(const SpinSystem& sys,
                                                            const Matrix& estimate,
                                                            const Matrix& reference,
                                                            const SphereGrid& grid) {
  ReconstructionDiagnostics d;
  d.fidelity = state_fidelity(estimate, reference);
  d.trace_dist = trace_distance(estimate, reference);
  const SphereFunction qe = q_function(sys, estimate, grid);
  const SphereFunction qr = q_function(sys, reference, grid);
  d.q_max_deviation = (qe.values - qr.values).cwiseAbs().maxCoeff();
  return d;
}

}  // namespace spinmeter
