#pragma once

// Sphere-valued measurement models and their figures of merit.
//
// A model assigns to every grid node n_k a block of Kraus operators
// T_{k,j} (the node weight is absorbed into T, so completeness reads
// sum_{k,j} T*T = 1 with no extra measure factor).  The induced POVM is
// E_k = sum_j T*T.  Three fidelities grade a model:
//
//   eta_i = lambda_min( sum_k (E_k n_k.S + n_k.S E_k) / 2 )   retrodictive
//   eta_f = lambda_min( sum_{k,j} T* (n_k.S) T )              predictive
//   eta_d = lambda_min( sum_{k,j,a} (T* S_a T S_a + h.c.) / 2 )  disturbance
//
// with error measures  Delta_ei = sqrt(s + s^2 - eta_i^2),
// Delta_ef = sqrt(s + s^2 - eta_f^2),  Delta_d = sqrt(2) sqrt(s + s^2 - eta_d).
// The worst case over input states is the minimal eigenvalue, hence the
// lambda_min above.

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "spinmeter/linalg.hpp"
#include "spinmeter/sphere_grid.hpp"
#include "spinmeter/spin_system.hpp"
#include "spinmeter/states.hpp"
#include "spinmeter/symbols.hpp"

namespace spinmeter {

struct MeasurementModel {
  SpinSystem sys;
  SphereGrid grid;
  std::vector<std::vector<Matrix>> kraus;  // kraus[node][j], node weight absorbed

  int nodes() const { return static_cast<int>(kraus.size()); }
};

// Validates dimensions and the completeness sum before admitting a model.
inline MeasurementModel make_model(SpinSystem sys, SphereGrid grid,
                                   std::vector<std::vector<Matrix>> kraus,
                                   double tol = 1e-10) {
  if (static_cast<int>(kraus.size()) != grid.size()) {
    throw std::invalid_argument("make_model: one Kraus block per grid node required");
  }
  Matrix total = Matrix::Zero(sys.dim, sys.dim);
  for (const auto& block : kraus) {
    for (const Matrix& t : block) {
      if (t.rows() != sys.dim || t.cols() != sys.dim) {
        throw std::invalid_argument("make_model: Kraus operator dimension mismatch");
      }
      total += t.adjoint() * t;
    }
  }
  const double dev = (total - Matrix::Identity(sys.dim, sys.dim)).cwiseAbs().maxCoeff();
  if (dev > tol) {
    throw invariant_violation("make_model: Kraus completeness sum deviates from identity");
  }
  return MeasurementModel{std::move(sys), std::move(grid), std::move(kraus)};
}

struct Povm {
  SpinSystem sys;
  SphereGrid grid;
  std::vector<Matrix> effects;  // one effect per node, sum = identity

  int nodes() const { return static_cast<int>(effects.size()); }
};

inline Povm make_povm(SpinSystem sys, SphereGrid grid, std::vector<Matrix> effects,
                      double tol = 1e-10) {
  if (static_cast<int>(effects.size()) != grid.size()) {
    throw std::invalid_argument("make_povm: one effect per grid node required");
  }
  Matrix total = Matrix::Zero(sys.dim, sys.dim);
  for (const Matrix& e : effects) {
    if (e.rows() != sys.dim || e.cols() != sys.dim) {
      throw std::invalid_argument("make_povm: effect dimension mismatch");
    }
    if (!is_hermitian(e, 1e-10)) {
      throw invariant_violation("make_povm: effect is not Hermitian");
    }
    if (min_eigenvalue(e) < -tol) {
      throw invariant_violation("make_povm: effect has a negative eigenvalue");
    }
    total += e;
  }
  const double dev = (total - Matrix::Identity(sys.dim, sys.dim)).cwiseAbs().maxCoeff();
  if (dev > tol) {
    throw invariant_violation("make_povm: effects do not sum to the identity");
  }
  return Povm{std::move(sys), std::move(grid), std::move(effects)};
}

inline Povm povm_from_model(const MeasurementModel& model) {
  std::vector<Matrix> effects;
  effects.reserve(model.kraus.size());
  for (const auto& block : model.kraus) {
    Matrix e = Matrix::Zero(model.sys.dim, model.sys.dim);
    for (const Matrix& t : block) e += t.adjoint() * t;
    effects.push_back(hermitize(e));
  }
  return make_povm(model.sys, model.grid, std::move(effects));
}

// Outcome density rho_val(n_k) = Tr(E_k rho) / w_k, so that the grid
// integral of the returned function is 1.
inline SphereFunction outcome_distribution(const Povm& povm, const Matrix& rho) {
  validate_density(rho);
  if (rho.rows() != povm.sys.dim) {
    throw std::invalid_argument("outcome_distribution: state dimension mismatch");
  }
  RealVector values(povm.nodes());
  for (int k = 0; k < povm.nodes(); ++k) {
    values(k) = (povm.effects[k] * rho).trace().real() / povm.grid.weights(k);
  }
  return SphereFunction{povm.grid, values};
}

// Isotropy check: Tr(E_k) = (2s+1) w_k / (4 pi) at every node.
struct IsotropyResult {
  bool isotropic = false;
  double max_deviation = 0.0;
};

inline IsotropyResult is_isotropic(const Povm& povm, double tol = 1e-9) {
  double worst = 0.0;
  const double target = 1.0 / (4.0 * M_PI);
  for (int k = 0; k < povm.nodes(); ++k) {
    const double value = povm.effects[k].trace().real() / (povm.sys.dim * povm.grid.weights(k));
    worst = std::max(worst, std::abs(value - target));
  }
  return IsotropyResult{worst <= tol, worst};
}

inline double retrodictive_fidelity(const Povm& povm) {
  Matrix h = Matrix::Zero(povm.sys.dim, povm.sys.dim);
  for (int k = 0; k < povm.nodes(); ++k) {
    const Matrix ns = povm.sys.dot(povm.grid.nodes[k]);
    h += 0.5 * (povm.effects[k] * ns + ns * povm.effects[k]);
  }
  return min_eigenvalue(h);
}

inline double predictive_fidelity(const MeasurementModel& model) {
  Matrix h = Matrix::Zero(model.sys.dim, model.sys.dim);
  for (int k = 0; k < model.nodes(); ++k) {
    const Matrix ns = model.sys.dot(model.grid.nodes[k]);
    for (const Matrix& t : model.kraus[k]) h += t.adjoint() * ns * t;
  }
  return min_eigenvalue(h);
}

inline double disturbance_fidelity(const MeasurementModel& model) {
  Matrix h = Matrix::Zero(model.sys.dim, model.sys.dim);
  for (int k = 0; k < model.nodes(); ++k) {
    for (const Matrix& t : model.kraus[k]) {
      for (int a = 0; a < 3; ++a) {
        const Matrix& sa = model.sys.op(a);
        const Matrix tst = t.adjoint() * sa * t;
        h += 0.5 * (tst * sa + sa * tst);
      }
    }
  }
  return min_eigenvalue(h);
}

struct FidelityReport {
  double eta_i = 0.0;
  double eta_f = 0.0;
  double eta_d = 0.0;
  double delta_ei = 0.0;
  double delta_ef = 0.0;
  double delta_d = 0.0;
};

inline FidelityReport fidelity_report(const MeasurementModel& model) {
  const double s = model.sys.s;
  const double cas = s * (s + 1.0);
  FidelityReport r;
  r.eta_i = retrodictive_fidelity(povm_from_model(model));
  r.eta_f = predictive_fidelity(model);
  r.eta_d = disturbance_fidelity(model);
  r.delta_ei = std::sqrt(std::max(0.0, cas - r.eta_i * r.eta_i));
  r.delta_ef = std::sqrt(std::max(0.0, cas - r.eta_f * r.eta_f));
  r.delta_d = std::sqrt(2.0) * std::sqrt(std::max(0.0, cas - r.eta_d));
  return r;
}

namespace detail {

inline double node_amplitude(const SpinSystem& sys, const SphereGrid& grid, int k) {
  return std::sqrt(grid.weights(k) * sys.dim / (4.0 * M_PI));
}

}  // namespace detail

// Completely optimal model: T_k = sqrt(w_k (2s+1)/(4 pi)) |n_k><n_k|.
// Retrodiction, prediction and disturbance are all extremal simultaneously:
// eta_i = eta_f = s and eta_d = s^2.
inline MeasurementModel make_completely_optimal(const SpinSystem& sys, const SphereGrid& grid) {
  const Matrix kets = coherent_kets(sys, grid);
  std::vector<std::vector<Matrix>> kraus(grid.size());
  for (int k = 0; k < grid.size(); ++k) {
    const Matrix proj = kets.col(k) * kets.col(k).adjoint();
    kraus[k] = {detail::node_amplitude(sys, grid, k) * proj};
  }
  return make_model(sys, grid, std::move(kraus));
}

// Completely optimal model split over internal outcomes: column k of
// xi_profile holds amplitudes f_{k,j} with sum_j |f_{k,j}|^2 = 1, and
// T_{k,j} = f_{k,j} sqrt(w_k (2s+1)/(4 pi)) |n_k><n_k|.  The split changes
// nothing observable at the level of the POVM or the fidelities.
inline MeasurementModel make_completely_optimal(const SpinSystem& sys, const SphereGrid& grid,
                                                const Matrix& xi_profile) {
  if (xi_profile.cols() != grid.size()) {
    throw std::invalid_argument("make_completely_optimal: one profile column per node required");
  }
  for (int k = 0; k < grid.size(); ++k) {
    if (std::abs(xi_profile.col(k).squaredNorm() - 1.0) > 1e-10) {
      throw std::invalid_argument("make_completely_optimal: profile column is not normalized");
    }
  }
  const Matrix kets = coherent_kets(sys, grid);
  std::vector<std::vector<Matrix>> kraus(grid.size());
  for (int k = 0; k < grid.size(); ++k) {
    const Matrix proj = kets.col(k) * kets.col(k).adjoint();
    const double amp = detail::node_amplitude(sys, grid, k);
    kraus[k].reserve(xi_profile.rows());
    for (Eigen::Index j = 0; j < xi_profile.rows(); ++j) {
      kraus[k].push_back((amp * xi_profile(j, k)) * proj);
    }
  }
  return make_model(sys, grid, std::move(kraus));
}

// Retrodictively optimal model with outcome weighting g and repreparation
// kets u_k:  T_k = sqrt(w_k (2s+1)/(4 pi) g(n_k)) |u_k><n_k|.  Completeness
// requires g >= 0 with band-limited part identical to 1, i.e. the projection
// of g onto degree <= 2s harmonics must be the constant function.
inline MeasurementModel make_retrodictively_optimal(const SpinSystem& sys, const SphereGrid& grid,
                                                    const SphereFunction& g,
                                                    const std::vector<Vector>& reprep) {
  if (g.values.size() != grid.weights.size()) {
    throw std::invalid_argument("make_retrodictively_optimal: g does not match the grid");
  }
  if (static_cast<int>(reprep.size()) != grid.size()) {
    throw std::invalid_argument("make_retrodictively_optimal: one repreparation ket per node");
  }
  if (g.values.minCoeff() < -1e-12) {
    throw std::invalid_argument("make_retrodictively_optimal: g must be nonnegative");
  }
  const RealMatrix bandlimit = bandlimit_projection(sys.s, grid);
  const RealVector projected = bandlimit * g.values;
  if ((projected.array() - 1.0).abs().maxCoeff() > 1e-8) {
    throw std::invalid_argument(
        "make_retrodictively_optimal: band-limited part of g is not the unit function");
  }
  const Matrix kets = coherent_kets(sys, grid);
  std::vector<std::vector<Matrix>> kraus(grid.size());
  for (int k = 0; k < grid.size(); ++k) {
    const Vector& u = reprep[k];
    if (u.size() != sys.dim) {
      throw std::invalid_argument("make_retrodictively_optimal: repreparation ket dimension");
    }
    if (std::abs(u.squaredNorm() - 1.0) > 1e-8) {
      throw std::invalid_argument("make_retrodictively_optimal: repreparation ket not normalized");
    }
    const double amp =
        detail::node_amplitude(sys, grid, k) * std::sqrt(std::max(0.0, g.values(k)));
    kraus[k] = {amp * ((u / u.norm()) * kets.col(k).adjoint())};
  }
  return make_model(sys, grid, std::move(kraus));
}

inline MeasurementModel make_retrodictively_optimal(const SpinSystem& sys, const SphereGrid& grid,
                                                    const SphereFunction& g) {
  const Matrix kets = coherent_kets(sys, grid);
  std::vector<Vector> reprep(grid.size());
  for (int k = 0; k < grid.size(); ++k) reprep[k] = kets.col(k);
  return make_retrodictively_optimal(sys, grid, g, reprep);
}

inline MeasurementModel make_retrodictively_optimal(const SpinSystem& sys,
                                                    const SphereGrid& grid) {
  return make_retrodictively_optimal(sys, grid,
                                     SphereFunction{grid, RealVector::Ones(grid.size())});
}

// Predictively optimal model: T_k = sqrt(w_k (2s+1)/(4 pi)) |n_k><h_k| for a
// pointer family h with (2s+1)/(4 pi) sum_k w_k |h_k><h_k| = 1.
inline MeasurementModel make_predictively_optimal(const SpinSystem& sys, const SphereGrid& grid,
                                                  const std::vector<Vector>& pointer) {
  if (static_cast<int>(pointer.size()) != grid.size()) {
    throw std::invalid_argument("make_predictively_optimal: one pointer ket per node");
  }
  Matrix total = Matrix::Zero(sys.dim, sys.dim);
  for (int k = 0; k < grid.size(); ++k) {
    if (pointer[k].size() != sys.dim) {
      throw std::invalid_argument("make_predictively_optimal: pointer ket dimension");
    }
    total += (grid.weights(k) * sys.dim / (4.0 * M_PI)) * (pointer[k] * pointer[k].adjoint());
  }
  if ((total - Matrix::Identity(sys.dim, sys.dim)).cwiseAbs().maxCoeff() > 1e-8) {
    throw std::invalid_argument("make_predictively_optimal: pointer family is not complete");
  }
  const Matrix kets = coherent_kets(sys, grid);
  std::vector<std::vector<Matrix>> kraus(grid.size());
  for (int k = 0; k < grid.size(); ++k) {
    kraus[k] = {detail::node_amplitude(sys, grid, k) * (kets.col(k) * pointer[k].adjoint())};
  }
  return make_model(sys, grid, std::move(kraus), 1e-8);
}

// State update conditioned on the outcome landing in the node set `region`.
// Returns the post-measurement state and the region probability.
inline std::pair<Matrix, double> selective_update(const MeasurementModel& model,
                                                  const Matrix& rho,
                                                  const std::vector<int>& region) {
  validate_density(rho);
  if (rho.rows() != model.sys.dim) {
    throw std::invalid_argument("selective_update: state dimension mismatch");
  }
  if (region.empty()) throw std::invalid_argument("selective_update: empty region");
  std::vector<char> seen(model.kraus.size(), 0);
  Matrix acc = Matrix::Zero(model.sys.dim, model.sys.dim);
  for (int k : region) {
    if (k < 0 || k >= model.nodes()) {
      throw std::invalid_argument("selective_update: region index out of range");
    }
    if (seen[k]) throw std::invalid_argument("selective_update: duplicate region index");
    seen[k] = 1;
    for (const Matrix& t : model.kraus[k]) acc += t * rho * t.adjoint();
  }
  const double p = acc.trace().real();
  if (p <= 1e-14) throw std::invalid_argument("selective_update: region probability vanishes");
  return {hermitize(acc) / p, p};
}

// Nonselective state update rho -> sum_{k,j} T rho T*.
inline Matrix nonselective_update(const MeasurementModel& model, const Matrix& rho) {
  validate_density(rho);
  if (rho.rows() != model.sys.dim) {
    throw std::invalid_argument("nonselective_update: state dimension mismatch");
  }
  Matrix acc = Matrix::Zero(model.sys.dim, model.sys.dim);
  for (const auto& block : model.kraus) {
    for (const Matrix& t : block) acc += t * rho * t.adjoint();
  }
  return hermitize(acc);
}

// Mean values tied together by the measurement: input spin, pointer average
// and output spin.  For weight-one retrodictively optimal models on a grid of
// exactness >= 2s+1 these satisfy <S_in> = (s+1) <n> and <S_out> = s <n>.
struct MeanRelations {
  Vec3 spin_in = Vec3::Zero();
  Vec3 pointer_mean = Vec3::Zero();
  Vec3 spin_out = Vec3::Zero();
};

inline MeanRelations mean_relations(const MeasurementModel& model, const Matrix& rho) {
  MeanRelations r;
  r.spin_in = spin_expectation(rho, model.sys);
  const SphereFunction density = outcome_distribution(povm_from_model(model), rho);
  for (int k = 0; k < model.nodes(); ++k) {
    r.pointer_mean += model.grid.weights(k) * density.values(k) * model.grid.nodes[k].vec();
  }
  r.spin_out = spin_expectation(nonselective_update(model, rho), model.sys);
  return r;
}

// Stinespring dilation: the Kraus blocks stacked into one isometry V, blocks
// ordered node-major and internal-outcome-minor, each of height dim.
// V maps the system into (pointer x internal) x system, and V* V = 1.
inline Matrix dilation_isometry(const MeasurementModel& model) {
  Eigen::Index rows = 0;
  for (const auto& block : model.kraus) rows += static_cast<Eigen::Index>(block.size());
  rows *= model.sys.dim;
  Matrix v(rows, model.sys.dim);
  Eigen::Index offset = 0;
  for (const auto& block : model.kraus) {
    for (const Matrix& t : block) {
      v.block(offset, 0, model.sys.dim, model.sys.dim) = t;
      offset += model.sys.dim;
    }
  }
  const Matrix gram = v.adjoint() * v;
  if ((gram - Matrix::Identity(model.sys.dim, model.sys.dim)).cwiseAbs().maxCoeff() > 1e-10) {
    throw invariant_violation("dilation_isometry: V*V deviates from the identity");
  }
  return v;
}

}  // namespace spinmeter
