#pragma once

// Measurements whose outcome is a full vector mu = r * n rather than a unit
// direction: the pointer reads both a direction node n_k and a radius node
// r_q.  Smearing the optimal direction measurement with a radial amplitude
// phi(r) keeps the direction marginal optimal while the vector-valued errors
// pick up the radial spread:
//
//   Delta^2 = s + E[(r - s)^2],   E taken in the radial distribution u phi^2,
//
// so Delta > sqrt(s) always, with equality approached as phi concentrates
// at r = s.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "spinmeter/linalg.hpp"
#include "spinmeter/measurement.hpp"
#include "spinmeter/sphere_grid.hpp"
#include "spinmeter/spin_system.hpp"
#include "spinmeter/symbols.hpp"

namespace spinmeter {

struct RadialGrid {
  RealVector radii;
  RealVector weights;  // Gauss-Legendre weights times r^2 (the radial measure)

  int size() const { return static_cast<int>(radii.size()); }
};

// Gauss-Legendre radial rule on [r_min, r_max] with the r^2 measure absorbed
// into the weights.
inline RadialGrid build_radial_grid(double r_min, double r_max, int n) {
  if (!(r_min >= 0.0) || !(r_max > r_min)) {
    throw std::invalid_argument("build_radial_grid: need 0 <= r_min < r_max");
  }
  if (n < 1) throw std::invalid_argument("build_radial_grid: need at least one node");
  RealVector x, v;
  gauss_legendre(n, x, v);
  RadialGrid grid;
  grid.radii.resize(n);
  grid.weights.resize(n);
  const double mid = 0.5 * (r_max + r_min);
  const double half = 0.5 * (r_max - r_min);
  for (int q = 0; q < n; ++q) {
    const double r = mid + half * x(q);
    grid.radii(q) = r;
    grid.weights(q) = v(q) * half * r * r;
  }
  return grid;
}

struct RadialProfile {
  RadialGrid grid;
  double center = 0.0;
  double sigma = 0.0;
  RealVector amplitude;  // phi(r_q), normalized so sum_q u_q phi_q^2 = 1
};

// Gaussian amplitude phi(r) = exp(-(r - center)^2 / (4 sigma^2)), so the
// radial probability density |phi|^2 has standard deviation sigma.
inline RadialProfile make_gaussian_profile(const RadialGrid& grid, double center, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("make_gaussian_profile: sigma must be positive");
  if (!(center >= 0.0)) throw std::invalid_argument("make_gaussian_profile: center must be >= 0");
  RadialProfile profile;
  profile.grid = grid;
  profile.center = center;
  profile.sigma = sigma;
  profile.amplitude.resize(grid.size());
  for (int q = 0; q < grid.size(); ++q) {
    const double dr = grid.radii(q) - center;
    profile.amplitude(q) = std::exp(-dr * dr / (4.0 * sigma * sigma));
  }
  const double mass = grid.weights.dot(profile.amplitude.cwiseAbs2());
  if (!(mass > 0.0)) throw std::invalid_argument("make_gaussian_profile: profile has no mass");
  profile.amplitude /= std::sqrt(mass);
  return profile;
}

// Profile centered at r = s on the window [max(0, s - 5 sigma), s + 5 sigma].
inline RadialProfile make_gaussian_profile_for(double s, double sigma, int radial_nodes = 32) {
  if (!(sigma > 0.0)) throw std::invalid_argument("make_gaussian_profile_for: sigma > 0 required");
  const double lo = std::max(0.0, s - 5.0 * sigma);
  const double hi = s + 5.0 * sigma;
  return make_gaussian_profile(build_radial_grid(lo, hi, radial_nodes), s, sigma);
}

struct Type2Model {
  SpinSystem sys;
  SphereGrid sphere;
  RadialGrid radial;
  std::vector<std::vector<Matrix>> kraus;  // kraus[q][k]: radius x direction outcome
};

// T_{q,k} = sqrt(u_q) phi(r_q) sqrt(w_k (2s+1)/(4 pi)) |n_k><n_k|.
inline Type2Model make_smeared_optimal(const SpinSystem& sys, const SphereGrid& sphere,
                                       const RadialProfile& profile) {
  const Matrix kets = coherent_kets(sys, sphere);
  const int nq = profile.grid.size();
  const int nk = sphere.size();
  Type2Model model{sys, sphere, profile.grid, {}};
  model.kraus.assign(nq, {});
  Matrix total = Matrix::Zero(sys.dim, sys.dim);
  for (int q = 0; q < nq; ++q) {
    const double radial_amp = std::sqrt(profile.grid.weights(q)) * profile.amplitude(q);
    model.kraus[q].reserve(nk);
    for (int k = 0; k < nk; ++k) {
      const Matrix proj = kets.col(k) * kets.col(k).adjoint();
      const Matrix t = (radial_amp * detail::node_amplitude(sys, sphere, k)) * proj;
      total += t.adjoint() * t;
      model.kraus[q].push_back(t);
    }
  }
  if ((total - Matrix::Identity(sys.dim, sys.dim)).cwiseAbs().maxCoeff() > 1e-10) {
    throw invariant_violation("make_smeared_optimal: Kraus completeness sum deviates");
  }
  return model;
}

// Worst-case retrodictive error of a vector-valued model:
//   Delta_ei^2 = lambda_max( sum_{q,k,a} (mu_a - S_a) E_{q,k} (mu_a - S_a) ),
// mu = r_q n_k, E = T* T.
inline double retro_error_type2(const Type2Model& model) {
  const int d = model.sys.dim;
  Matrix h = Matrix::Zero(d, d);
  for (int q = 0; q < model.radial.size(); ++q) {
    for (int k = 0; k < model.sphere.size(); ++k) {
      const Matrix& t = model.kraus[q][k];
      const Matrix e = t.adjoint() * t;
      const Vec3 mu = model.radial.radii(q) * model.sphere.nodes[k].vec();
      for (int a = 0; a < 3; ++a) {
        const Matrix shifted = mu(a) * Matrix::Identity(d, d) - model.sys.op(a);
        h += shifted * e * shifted;
      }
    }
  }
  return std::sqrt(std::max(0.0, max_eigenvalue(h)));
}

// Worst-case predictive error:
//   Delta_ef^2 = lambda_max( sum_{q,k} T* [ sum_a (mu_a - S_a)^2 ] T ).
inline double pred_error_type2(const Type2Model& model) {
  const int d = model.sys.dim;
  Matrix h = Matrix::Zero(d, d);
  for (int q = 0; q < model.radial.size(); ++q) {
    for (int k = 0; k < model.sphere.size(); ++k) {
      const Matrix& t = model.kraus[q][k];
      const Vec3 mu = model.radial.radii(q) * model.sphere.nodes[k].vec();
      Matrix inner = Matrix::Zero(d, d);
      for (int a = 0; a < 3; ++a) {
        const Matrix shifted = mu(a) * Matrix::Identity(d, d) - model.sys.op(a);
        inner += shifted * shifted;
      }
      h += t.adjoint() * inner * t;
    }
  }
  return std::sqrt(std::max(0.0, max_eigenvalue(h)));
}

// Marginal POVM over the direction outcome alone; for smeared-optimal models
// this is exactly the optimal direction POVM.
inline Povm direction_marginal(const Type2Model& model) {
  std::vector<Matrix> effects(model.sphere.size(),
                              Matrix::Zero(model.sys.dim, model.sys.dim));
  for (int q = 0; q < model.radial.size(); ++q) {
    for (int k = 0; k < model.sphere.size(); ++k) {
      const Matrix& t = model.kraus[q][k];
      effects[k] += t.adjoint() * t;
    }
  }
  for (Matrix& e : effects) e = hermitize(e);
  return make_povm(model.sys, model.sphere, std::move(effects));
}

struct ConvergenceRow {
  double sigma = 0.0;
  double delta_ei = 0.0;
  double delta_ef = 0.0;
  double concentration = 0.0;  // radial mass within |r - s| < kConcentrationWindow
};

inline constexpr double kConcentrationWindow = 0.25;

// Errors of the smeared-optimal model for a descending list of radial widths.
// Both errors decrease toward (but never reach) the sqrt(s) floor and the
// radial mass concentrates at r = s.
inline std::vector<ConvergenceRow> convergence_study(const SpinSystem& sys,
                                                     const std::vector<double>& sigmas,
                                                     int grid_degree = -1) {
  if (sigmas.empty()) throw std::invalid_argument("convergence_study: empty sigma list");
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    if (!(sigmas[i] > 0.0)) throw std::invalid_argument("convergence_study: sigma must be > 0");
    if (i > 0 && !(sigmas[i] < sigmas[i - 1])) {
      throw std::invalid_argument("convergence_study: sigma list must be strictly descending");
    }
  }
  const SphereGrid sphere = build_grid(grid_degree < 0 ? default_grid_degree(sys.s) : grid_degree);
  std::vector<ConvergenceRow> rows;
  rows.reserve(sigmas.size());
  for (double sigma : sigmas) {
    const RadialProfile profile = make_gaussian_profile_for(sys.s, sigma);
    const Type2Model model = make_smeared_optimal(sys, sphere, profile);
    ConvergenceRow row;
    row.sigma = sigma;
    row.delta_ei = retro_error_type2(model);
    row.delta_ef = pred_error_type2(model);
    for (int q = 0; q < profile.grid.size(); ++q) {
      if (std::abs(profile.grid.radii(q) - sys.s) < kConcentrationWindow) {
        row.concentration +=
            profile.grid.weights(q) * profile.amplitude(q) * profile.amplitude(q);
      }
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace spinmeter
