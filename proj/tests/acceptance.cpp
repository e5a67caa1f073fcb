// Acceptance gate: ten end-to-end checks with pinned tolerances, one
// [PASS]/[FAIL] line each.  Exit status is the number of failed criteria.
// Usage: spinmeter_acceptance [criterion-number ...]; no arguments runs all.

#include "spinmeter/spinmeter.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

using namespace spinmeter;

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", x);
  return buf;
}

struct Check {
  int failures = 0;
  std::string first;
  void require(bool ok, const std::string& msg) {
    if (ok) return;
    ++failures;
    if (first.empty()) first = msg;
  }
};

const double kSpins[] = {0.5, 1.0, 1.5, 2.0, 2.5};

// 1. The completely optimal model saturates all three fidelity bounds and
//    both uncertainty floors on the default grid.
void c1(Check& c) {
  for (double s : kSpins) {
    const SpinSystem sys = make_spin_system(s);
    const SphereGrid grid = build_grid(default_grid_degree(s));
    const FidelityReport r = fidelity_report(make_completely_optimal(sys, grid));
    c.require(std::abs(r.eta_i - s) <= 1e-9, "eta_i off at s=" + num(s));
    c.require(std::abs(r.eta_f - s) <= 1e-9, "eta_f off at s=" + num(s));
    c.require(std::abs(r.eta_d - s * s) <= 1e-9, "eta_d off at s=" + num(s));
    c.require(std::abs(r.delta_ei - std::sqrt(s)) <= 1e-9, "delta_ei off at s=" + num(s));
    c.require(std::abs(r.delta_ef - std::sqrt(s)) <= 1e-9, "delta_ef off at s=" + num(s));
    c.require(std::abs(r.delta_d - std::sqrt(2.0 * s)) <= 1e-9, "delta_d off at s=" + num(s));
  }
}

// 2. The error relations hold as universal bounds over random models.
void c2(Check& c) {
  auto gen = testutil::rng(0x51c2u);
  for (double s : {0.5, 1.0, 1.5}) {
    const SpinSystem sys = make_spin_system(s);
    const SphereGrid grid = build_grid(default_grid_degree(s));
    for (int trial = 0; trial < 100; ++trial) {
      const MeasurementModel model = testutil::random_isometric_model(sys, grid, 2, gen);
      const double eta_i = retrodictive_fidelity(povm_from_model(model));
      const double eta_f = predictive_fidelity(model);
      c.require(eta_i <= s + 1e-10,
                "eta_i=" + num(eta_i) + " exceeds s=" + num(s) + " at trial " +
                    std::to_string(trial));
      c.require(eta_f <= s + 1e-10,
                "eta_f=" + num(eta_f) + " exceeds s=" + num(s) + " at trial " +
                    std::to_string(trial));
    }
  }
}

// 3. The optimal POVM's outcome density is the Q function; a g-weighted
//    variant keeps eta_i = s but is detectably anisotropic.
void c3(Check& c) {
  auto gen = testutil::rng(0x51c3u);
  for (double s : {0.5, 1.0, 1.5, 2.0}) {
    const SpinSystem sys = make_spin_system(s);
    const SphereGrid grid = build_grid(default_grid_degree(s));
    const Povm povm = povm_from_model(make_completely_optimal(sys, grid));
    for (int trial = 0; trial < 50; ++trial) {
      const Matrix rho = testutil::random_density(sys.dim, gen);
      const double dev =
          (outcome_distribution(povm, rho).values - q_function(sys, rho, grid).values)
              .cwiseAbs()
              .maxCoeff();
      c.require(dev < 1e-10, "outcome density vs Q dev=" + num(dev) + " at s=" + num(s));
    }

    SphereFunction g{grid, RealVector(grid.size())};
    for (int k = 0; k < grid.size(); ++k) {
      g.values(k) = 1.0 + 0.5 * legendre(sys.two_s + 1, grid.nodes[k].z());
    }
    const MeasurementModel weighted = make_retrodictively_optimal(sys, grid, g);
    const IsotropyResult iso = is_isotropic(povm_from_model(weighted));
    const double eta_i = retrodictive_fidelity(povm_from_model(weighted));
    c.require(!iso.isotropic, "g-weighted model not flagged anisotropic at s=" + num(s));
    c.require(std::abs(eta_i - s) <= 1e-9,
              "g-weighted eta_i=" + num(eta_i) + " off at s=" + num(s));
  }
}

// 4. Coherent-state calculus: eigenvector property, resolution of identity,
//    total variance, kernel reproduction.
void c4(Check& c) {
  auto gen = testutil::rng(0x51c4u);
  for (int trial = 0; trial < 200; ++trial) {
    const double s = kSpins[trial % 5];
    const SpinSystem sys = make_spin_system(s);
    const UnitVector n = testutil::random_direction(gen);
    const double m = s - std::floor(testutil::uniform(gen, 0.0, sys.dim - 1e-12));
    const CoherentKet ket = coherent_ket(sys, n, m);
    const double residual = (sys.dot(n) * ket.amplitudes - m * ket.amplitudes).norm();
    c.require(residual < 1e-10, "eigen residual " + num(residual) + " at s=" + num(s));
  }
  for (double s : kSpins) {
    const SpinSystem sys = make_spin_system(s);
    const SphereGrid grid = build_grid(default_grid_degree(s));
    const Matrix kets = coherent_kets(sys, grid);
    Matrix acc = Matrix::Zero(sys.dim, sys.dim);
    for (int k = 0; k < grid.size(); ++k) {
      acc += grid.weights(k) * kets.col(k) * kets.col(k).adjoint();
    }
    acc *= sys.dim / (4.0 * M_PI);
    const double dev = (acc - Matrix::Identity(sys.dim, sys.dim)).cwiseAbs().maxCoeff();
    c.require(dev < 1e-10, "resolution of identity dev=" + num(dev) + " at s=" + num(s));

    const Vector psi = coherent_ket_max(sys, testutil::random_direction(gen));
    const double var = variance_sum(psi, sys);
    c.require(std::abs(var - s) < 1e-10, "total variance " + num(var) + " at s=" + num(s));

    for (int trial = 0; trial < 20; ++trial) {
      const UnitVector a = testutil::random_direction(gen);
      const UnitVector b = testutil::random_direction(gen);
      RealVector slice(grid.size());
      for (int k = 0; k < grid.size(); ++k) {
        slice(k) = projection_kernel(s, a, grid.nodes[k]) * projection_kernel(s, grid.nodes[k], b);
      }
      const double err = std::abs(integrate(grid, slice) - projection_kernel(s, a, b));
      c.require(err < 1e-10, "kernel reproduction err=" + num(err) + " at s=" + num(s));
    }
  }
}

// 5. Symbol duality for the spin components.
void c5(Check& c) {
  for (double s : kSpins) {
    const SpinSystem sys = make_spin_system(s);
    const SphereGrid grid = build_grid(default_grid_degree(s));
    for (int axis = 0; axis < 3; ++axis) {
      const SphereFunction cov = covariant_symbol(sys, sys.op(axis), grid);
      const SphereFunction con = contravariant_symbol(sys, sys.op(axis), grid);
      for (int k = 0; k < grid.size(); ++k) {
        const double nk = grid.nodes[k].vec()(axis);
        c.require(std::abs(cov.values(k) - s * nk) <= 1e-9,
                  "covariant symbol off at s=" + num(s));
        c.require(std::abs(con.values(k) - (s + 1.0) * nk) <= 1e-9,
                  "contravariant symbol off at s=" + num(s));
      }
    }
  }
}

// 6. Mean relations between input spin, pointer and output spin.
void c6(Check& c) {
  auto gen = testutil::rng(0x51c6u);
  for (double s : kSpins) {
    const SpinSystem sys = make_spin_system(s);
    const SphereGrid grid = build_grid(default_grid_degree(s));
    const MeasurementModel model = make_completely_optimal(sys, grid);
    for (int trial = 0; trial < 20; ++trial) {
      const Matrix rho = testutil::random_density(sys.dim, gen);
      const MeanRelations mr = mean_relations(model, rho);
      for (int a = 0; a < 3; ++a) {
        c.require(std::abs(mr.spin_in(a) - (s + 1.0) * mr.pointer_mean(a)) <= 1e-9,
                  "input mean relation off at s=" + num(s));
        c.require(std::abs(mr.spin_out(a) - s * mr.pointer_mean(a)) <= 1e-9,
                  "output mean relation off at s=" + num(s));
      }
    }
  }
}

// 7. Post-selected states have the advertised P function; single-node
//    regions collapse onto the coherent projector.
void c7(Check& c) {
  auto gen = testutil::rng(0x51c7u);
  for (double s : {0.5, 1.0}) {
    const SpinSystem sys = make_spin_system(s);
    const SphereGrid grid = build_grid(default_grid_degree(s));
    const MeasurementModel model = make_completely_optimal(sys, grid);
    const Povm povm = povm_from_model(model);
    for (int trial = 0; trial < 10; ++trial) {
      const Matrix rho = testutil::random_density(sys.dim, gen);
      const SphereFunction density = outcome_distribution(povm, rho);
      std::vector<int> region;
      for (int k = 0; k < grid.size(); ++k) {
        if (testutil::uniform(gen) < 0.3) region.push_back(k);
      }
      if (region.empty()) region.push_back(static_cast<int>(gen() % grid.size()));

      const auto [rho_f, prob] = selective_update(model, rho, region);
      const SphereFunction p = p_function(sys, rho_f, grid);
      for (int j = 0; j < grid.size(); ++j) {
        double predicted = 0.0;
        for (int k : region) {
          predicted += grid.weights(k) * density.values(k) *
                       projection_kernel(s, grid.nodes[j], grid.nodes[k]);
        }
        predicted /= prob;
        c.require(std::abs(p.values(j) - predicted) <= 1e-8,
                  "post-selected P off by " + num(std::abs(p.values(j) - predicted)) +
                      " at s=" + num(s));
      }
    }
    for (int k : {0, grid.size() / 2, grid.size() - 1}) {
      const Matrix rho = testutil::random_density(sys.dim, gen);
      const auto [rho_f, prob] = selective_update(model, rho, {k});
      const Matrix target = projector(coherent_ket_max(sys, grid.nodes[k]));
      c.require((rho_f - target).cwiseAbs().maxCoeff() <= 1e-10,
                "single-node region state off at s=" + num(s));
      (void)prob;
    }
  }
}

// 8. The dilation isometry reproduces the operator-level dynamics.
void c8(Check& c) {
  auto gen = testutil::rng(0x51c8u);
  for (double s : {0.5, 1.0}) {
    const SpinSystem sys = make_spin_system(s);
    const SphereGrid grid = build_grid(default_grid_degree(s));
    for (int variant = 0; variant < 2; ++variant) {
      const MeasurementModel model = variant == 0
                                         ? make_completely_optimal(sys, grid)
                                         : testutil::random_isometric_model(sys, grid, 2, gen);
      const Matrix v = dilation_isometry(model);
      const double iso_dev =
          (v.adjoint() * v - Matrix::Identity(sys.dim, sys.dim)).cwiseAbs().maxCoeff();
      c.require(iso_dev <= 1e-10, "V^dag V deviates by " + num(iso_dev) + " at s=" + num(s));

      for (int trial = 0; trial < 5; ++trial) {
        const Matrix rho = testutil::random_density(sys.dim, gen);
        const Matrix big = v * rho * v.adjoint();
        Matrix traced = Matrix::Zero(sys.dim, sys.dim);
        for (Eigen::Index b = 0; b < big.rows() / sys.dim; ++b) {
          traced += big.block(b * sys.dim, b * sys.dim, sys.dim, sys.dim);
        }
        const double dev = (traced - nonselective_update(model, rho)).cwiseAbs().maxCoeff();
        c.require(dev <= 1e-10, "partial-trace dynamics dev=" + num(dev) + " at s=" + num(s));
      }
    }
  }
}

// 9. Unconstrained-pointer errors decrease strictly toward the sqrt(s) floor.
void c9(Check& c) {
  const SpinSystem sys = make_spin_system(0.5);
  const std::vector<double> sigmas{1.0, 0.5, 0.25, 0.1};
  const auto rows = convergence_study(sys, sigmas);
  const double floor = std::sqrt(0.5);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    c.require(rows[i].delta_ei > floor, "delta_ei at or below floor");
    c.require(rows[i].delta_ef > floor, "delta_ef at or below floor");
    if (i > 0) {
      c.require(rows[i].delta_ei < rows[i - 1].delta_ei, "delta_ei not strictly decreasing");
      c.require(rows[i].delta_ef < rows[i - 1].delta_ef, "delta_ef not strictly decreasing");
    }
  }
  const double gap = rows.back().delta_ei - floor;
  c.require(gap < 0.05, "delta_ei gap " + num(gap) + " at sigma=0.1 not within 0.05");
}

// 10. Tomography: exact round trips, sampled fidelity, N^(-1/2) error scaling.
void c10(Check& c) {
  auto gen = testutil::rng(0x51cau);
  for (double s : kSpins) {
    const SpinSystem sys = make_spin_system(s);
    const SphereGrid grid = build_grid(default_grid_degree(s));
    const Povm povm = povm_from_model(make_completely_optimal(sys, grid));
    for (int trial = 0; trial < 5; ++trial) {
      const Matrix rho = testutil::random_density(sys.dim, gen);
      RealVector probs(grid.size());
      for (int k = 0; k < grid.size(); ++k) {
        probs(k) = std::real((povm.effects[k] * rho).trace());
      }
      const ReconstructionResult res = reconstruct(povm, probs, &rho);
      c.require(*res.trace_distance_vs_reference < 1e-8,
                "exact round-trip distance " + num(*res.trace_distance_vs_reference) +
                    " at s=" + num(s));
    }
  }

  const SpinSystem sys = make_spin_system(0.5);
  const SphereGrid grid = build_grid(default_grid_degree(0.5));
  const Povm povm = povm_from_model(make_completely_optimal(sys, grid));
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix rho = projector(testutil::random_ket(sys.dim, gen));
    const OutcomeCounts counts =
        sample_outcomes(povm, rho, 100000, 1000 + static_cast<std::uint64_t>(trial));
    const ReconstructionResult res = reconstruct(povm, counts, &rho);
    c.require(*res.fidelity_vs_reference > 0.99,
              "sampled fidelity " + num(*res.fidelity_vs_reference) + " at trial " +
                  std::to_string(trial));
  }

  // Log-log slope of the mean trace distance over N; interior state keeps the
  // positivity projection inactive so the scaling is clean.
  Matrix rho = 0.7 * testutil::random_density(sys.dim, gen) +
               0.3 * maximally_mixed(sys.dim);
  rho = hermitize(rho);
  const long long sizes[] = {1000, 10000, 100000};
  double xs[3];
  double ys[3];
  for (int i = 0; i < 3; ++i) {
    double mean = 0.0;
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      const OutcomeCounts counts = sample_outcomes(povm, rho, sizes[i], 2000 + seed);
      const ReconstructionResult res = reconstruct(povm, counts, &rho);
      mean += *res.trace_distance_vs_reference;
    }
    xs[i] = std::log(static_cast<double>(sizes[i]));
    ys[i] = std::log(mean / 6.0);
  }
  const double xbar = (xs[0] + xs[1] + xs[2]) / 3.0;
  const double ybar = (ys[0] + ys[1] + ys[2]) / 3.0;
  double sxy = 0.0;
  double sxx = 0.0;
  for (int i = 0; i < 3; ++i) {
    sxy += (xs[i] - xbar) * (ys[i] - ybar);
    sxx += (xs[i] - xbar) * (xs[i] - xbar);
  }
  const double slope = sxy / sxx;
  c.require(std::abs(slope + 0.5) <= 0.15, "error-scaling slope " + num(slope));
}

struct Criterion {
  int id;
  const char* title;
  std::function<void(Check&)> run;
  double time_limit_s;  // 0 = no limit
};

const Criterion kCriteria[] = {
    {1, "optimal-model bound saturation", c1, 5.0},
    {2, "universal error relations over random models", c2, 30.0},
    {3, "outcome density is the Q function; anisotropy detected", c3, 0.0},
    {4, "coherent-state calculus", c4, 0.0},
    {5, "symbol duality", c5, 0.0},
    {6, "mean relations", c6, 0.0},
    {7, "post-selected P function", c7, 0.0},
    {8, "dilation consistency", c8, 0.0},
    {9, "unconstrained-pointer convergence to the floor", c9, 60.0},
    {10, "tomography round trip and scaling", c10, 0.0},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int id = std::atoi(argv[i]);
    if (id < 1 || id > 10) {
      std::fprintf(stderr, "unknown criterion '%s'\n", argv[i]);
      return 64;
    }
    selected.push_back(id);
  }

  int failed = 0;
  for (const Criterion& crit : kCriteria) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), crit.id) == selected.end()) {
      continue;
    }
    Check check;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      crit.run(check);
    } catch (const std::exception& e) {
      check.require(false, std::string("exception: ") + e.what());
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (crit.time_limit_s > 0.0 && elapsed > crit.time_limit_s) {
      check.require(false, "runtime " + num(elapsed) + " s exceeds " +
                               num(crit.time_limit_s) + " s");
    }
    if (check.failures == 0) {
      std::printf("[PASS] C%-2d %s (%.2f s)\n", crit.id, crit.title, elapsed);
    } else {
      ++failed;
      std::printf("[FAIL] C%-2d %s: %s", crit.id, crit.title, check.first.c_str());
      if (check.failures > 1) std::printf(" (+%d more)", check.failures - 1);
      std::printf(" (%.2f s)\n", elapsed);
    }
  }
  return failed;
}
