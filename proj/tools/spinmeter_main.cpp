// spinmeter: command line driver for the spin measurement library.
//
// Subcommands:
//   error-relations   fidelity and uncertainty table for the completely optimal model
//   qfunction         Q function of a chosen state on the quadrature grid
//   tomography        sample counts from the optimal POVM and reconstruct the state
//   type2             unconstrained-pointer smearing convergence table
//   povm-export       serialize the completely optimal POVM
//
// Exit codes: 0 success, 2 configuration or usage error, 3 violated numerical
// invariant (a constructed object failed its own consistency checks).
//
// JSON reports embed {tool version, config echo, wall_time_ms}.  CSV payloads
// and the counts sidecar embed version + config only, so identical configs and
// seeds reproduce them byte for byte.

#include "spinmeter/spinmeter.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace {

using spinmeter::Json;

// Accepts both decimal ("1.5") and fraction ("3/2") notation; the string must
// be consumed entirely.
double parse_spin(const std::string& text) {
  const auto parse_number = [&text](const std::string& part) {
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (part.empty() || used != part.size()) {
      throw std::invalid_argument("cannot parse number '" + part + "' in '" + text + "'");
    }
    return value;
  };
  const auto slash = text.find('/');
  if (slash == std::string::npos) return parse_number(text);
  const double num = parse_number(text.substr(0, slash));
  const double den = parse_number(text.substr(slash + 1));
  if (den == 0.0) throw std::invalid_argument("zero denominator in '" + text + "'");
  return num / den;
}

// State specs: "mixed", "ket:<m>", "coherent:<theta>,<phi>", "file:<path>".
spinmeter::Matrix parse_state(const std::string& spec, const spinmeter::SpinSystem& sys) {
  using namespace spinmeter;
  if (spec == "mixed") return maximally_mixed(sys.dim);
  if (spec.rfind("ket:", 0) == 0) {
    const double m = parse_spin(spec.substr(4));
    Vector psi = Vector::Zero(sys.dim);
    psi(sys.index_of(m)) = 1.0;
    return projector(psi);
  }
  if (spec.rfind("coherent:", 0) == 0) {
    const std::string args = spec.substr(9);
    const auto comma = args.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("coherent state spec needs 'coherent:<theta>,<phi>'");
    }
    const double theta = parse_spin(args.substr(0, comma));
    const double phi = parse_spin(args.substr(comma + 1));
    return projector(coherent_ket_max(sys, UnitVector::polar(theta, phi)));
  }
  if (spec.rfind("file:", 0) == 0) {
    const std::string path = spec.substr(5);
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open state file " + path);
    Json j;
    try {
      j = Json::parse(in);
    } catch (const std::exception& e) {
      throw std::invalid_argument("cannot parse state file " + path + ": " + e.what());
    }
    return density_from_json(j, sys);
  }
  throw std::invalid_argument("unrecognized state spec '" + spec +
                              "' (mixed | ket:<m> | coherent:<theta>,<phi> | file:<path>)");
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file " + path);
  out << text;
  out.flush();
  if (!out) throw std::invalid_argument("failed while writing " + path);
}

Json run_meta(const char* command, const Json& config, double wall_ms) {
  return Json{{"tool", "spinmeter"},
              {"version", spinmeter::kVersion},
              {"command", command},
              {"config", config},
              {"wall_time_ms", wall_ms}};
}

std::string csv_preamble(const char* command, const Json& config) {
  return std::string("# spinmeter ") + spinmeter::kVersion + " " + command + "\n# config " +
         config.dump() + "\n";
}

double ms_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

int resolve_degree(int requested, double s) {
  return requested > 0 ? requested : spinmeter::default_grid_degree(s);
}

Json degree_echo(int requested) { return requested > 0 ? Json(requested) : Json(); }

struct ErrorRelationsOpts {
  std::vector<std::string> s_list{"1/2", "1", "3/2", "2", "5/2"};
  int grid_degree = 0;
  std::string out;
  std::string format{"json"};
};

void run_error_relations(const ErrorRelationsOpts& o) {
  using namespace spinmeter;
  const auto t0 = std::chrono::steady_clock::now();
  const Json config{{"s", o.s_list},
                    {"grid_degree", degree_echo(o.grid_degree)},
                    {"out", o.out},
                    {"format", o.format}};
  Json rows = Json::array();
  std::ostringstream csv;
  csv << "s,grid_degree,eta_i,eta_f,eta_d,delta_ei,delta_ef,delta_d,"
         "bound_delta,bound_delta_d,saturated\n";
  bool all_saturated = true;
  for (const std::string& text : o.s_list) {
    const double s = parse_spin(text);
    const SpinSystem sys = make_spin_system(s);
    const int degree = resolve_degree(o.grid_degree, s);
    const SphereGrid grid = build_grid(degree);
    const FidelityReport rep = fidelity_report(make_completely_optimal(sys, grid));
    const double bound_delta = std::sqrt(s);
    const double bound_delta_d = std::sqrt(2.0 * s);
    const bool saturated = std::abs(rep.eta_i - s) <= 1e-9 && std::abs(rep.eta_f - s) <= 1e-9 &&
                           std::abs(rep.eta_d - s * s) <= 1e-9;
    all_saturated = all_saturated && saturated;
    rows.push_back(Json{{"s", s},
                        {"grid_degree", degree},
                        {"eta_i", rep.eta_i},
                        {"eta_f", rep.eta_f},
                        {"eta_d", rep.eta_d},
                        {"delta_ei", rep.delta_ei},
                        {"delta_ef", rep.delta_ef},
                        {"delta_d", rep.delta_d},
                        {"bound_delta", bound_delta},
                        {"bound_delta_d", bound_delta_d},
                        {"saturated", saturated}});
    csv << format_double(s) << ',' << degree << ',' << format_double(rep.eta_i) << ','
        << format_double(rep.eta_f) << ',' << format_double(rep.eta_d) << ','
        << format_double(rep.delta_ei) << ',' << format_double(rep.delta_ef) << ','
        << format_double(rep.delta_d) << ',' << format_double(bound_delta) << ','
        << format_double(bound_delta_d) << ',' << (saturated ? 1 : 0) << '\n';
  }
  if (o.format == "json") {
    Json report = run_meta("error-relations", config, ms_since(t0));
    report["rows"] = rows;
    report["all_saturated"] = all_saturated;
    write_text(o.out, report.dump(2) + "\n");
  } else {
    write_text(o.out, csv_preamble("error-relations", config) + csv.str());
  }
}

struct QFunctionOpts {
  std::string s_text;
  std::string state{"mixed"};
  int grid_degree = 0;
  std::string out;
  std::string format{"json"};
};

void run_qfunction(const QFunctionOpts& o) {
  using namespace spinmeter;
  const auto t0 = std::chrono::steady_clock::now();
  const Json config{{"s", o.s_text},
                    {"state", o.state},
                    {"grid_degree", degree_echo(o.grid_degree)},
                    {"out", o.out},
                    {"format", o.format}};
  const SpinSystem sys = make_spin_system(parse_spin(o.s_text));
  const SphereGrid grid = build_grid(resolve_degree(o.grid_degree, sys.s));
  const Matrix rho = parse_state(o.state, sys);
  const SphereFunction q = q_function(sys, rho, grid);

  // The optimal POVM must reproduce Q as its outcome density; check before writing.
  const Povm povm = povm_from_model(make_completely_optimal(sys, grid));
  const double deviation =
      (outcome_distribution(povm, rho).values - q.values).cwiseAbs().maxCoeff();
  if (deviation > 1e-8) {
    throw invariant_violation("qfunction: outcome density deviates from Q by " +
                              format_double(deviation));
  }

  if (o.format == "json") {
    Json report = run_meta("qfunction", config, ms_since(t0));
    report["integral"] = integrate(grid, q.values);
    report["min"] = q.values.minCoeff();
    report["max"] = q.values.maxCoeff();
    report["field"] = sphere_function_to_json(q);
    write_text(o.out, report.dump(2) + "\n");
  } else {
    std::ostringstream csv;
    write_sphere_function_csv(csv, q);
    write_text(o.out, csv_preamble("qfunction", config) + csv.str());
  }
}

struct TomographyOpts {
  std::string s_text;
  std::string state{"mixed"};
  long long samples = 100000;
  std::uint64_t seed = 0;
  int grid_degree = 0;
  std::string out{"tomography"};
};

void run_tomography(const TomographyOpts& o) {
  using namespace spinmeter;
  const auto t0 = std::chrono::steady_clock::now();
  const Json config{{"s", o.s_text},         {"state", o.state},
                    {"samples", o.samples},  {"seed", o.seed},
                    {"grid_degree", degree_echo(o.grid_degree)}, {"out", o.out}};
  const SpinSystem sys = make_spin_system(parse_spin(o.s_text));
  const SphereGrid grid = build_grid(resolve_degree(o.grid_degree, sys.s));
  const Povm povm = povm_from_model(make_completely_optimal(sys, grid));
  const Matrix rho = parse_state(o.state, sys);

  const OutcomeCounts counts = sample_outcomes(povm, rho, o.samples, o.seed);
  const ReconstructionResult result = reconstruct(povm, counts, &rho);
  const ReconstructionDiagnostics diag =
      reconstruction_diagnostics(sys, result.estimate, rho, grid);

  const std::string counts_csv_path = o.out + "_counts.csv";
  const std::string sidecar_path = o.out + "_counts.json";
  const std::string estimate_path = o.out + "_estimate.json";
  const std::string report_path = o.out + "_report.json";

  std::ostringstream counts_csv;
  write_counts_csv(counts_csv, counts);
  write_text(counts_csv_path, csv_preamble("tomography", config) + counts_csv.str());

  Json sidecar = counts_sidecar_json(sys.s, counts);
  sidecar["tool_version"] = kVersion;
  sidecar["config"] = config;
  write_text(sidecar_path, sidecar.dump(2) + "\n");

  Json estimate = density_to_json(sys.s, result.estimate);
  estimate["tool_version"] = kVersion;
  estimate["config"] = config;
  write_text(estimate_path, estimate.dump(2) + "\n");

  Json report = run_meta("tomography", config, ms_since(t0));
  report["fidelity"] = diag.fidelity;
  report["trace_distance"] = diag.trace_dist;
  report["q_max_deviation"] = diag.q_max_deviation;
  report["residual"] = result.residual;
  report["design_condition"] = result.design_condition;
  report["files"] = Json{{"counts_csv", counts_csv_path},
                         {"counts_sidecar", sidecar_path},
                         {"estimate", estimate_path}};
  write_text(report_path, report.dump(2) + "\n");
}

struct Type2Opts {
  std::string s_text{"1/2"};
  std::vector<double> sigmas{1.0, 0.5, 0.25, 0.1};
  int grid_degree = 0;
  std::string out;
  std::string format{"json"};
};

void run_type2(const Type2Opts& o) {
  using namespace spinmeter;
  const auto t0 = std::chrono::steady_clock::now();
  const Json config{{"s", o.s_text},
                    {"sigma", o.sigmas},
                    {"grid_degree", degree_echo(o.grid_degree)},
                    {"out", o.out},
                    {"format", o.format}};
  const SpinSystem sys = make_spin_system(parse_spin(o.s_text));
  const std::vector<ConvergenceRow> rows =
      convergence_study(sys, o.sigmas, o.grid_degree > 0 ? o.grid_degree : -1);
  const double floor = std::sqrt(sys.s);

  if (o.format == "json") {
    Json jrows = Json::array();
    for (const ConvergenceRow& row : rows) {
      jrows.push_back(Json{{"sigma", row.sigma},
                           {"delta_ei", row.delta_ei},
                           {"delta_ef", row.delta_ef},
                           {"concentration", row.concentration}});
    }
    Json report = run_meta("type2", config, ms_since(t0));
    report["floor"] = floor;
    report["rows"] = jrows;
    write_text(o.out, report.dump(2) + "\n");
  } else {
    std::ostringstream csv;
    csv << "sigma,delta_ei,delta_ef,concentration\n";
    for (const ConvergenceRow& row : rows) {
      csv << format_double(row.sigma) << ',' << format_double(row.delta_ei) << ','
          << format_double(row.delta_ef) << ',' << format_double(row.concentration) << '\n';
    }
    write_text(o.out, csv_preamble("type2", config) + "# floor " + format_double(floor) + "\n" +
                          csv.str());
  }
}

struct PovmExportOpts {
  std::string s_text;
  int grid_degree = 0;
  std::string out;
};

void run_povm_export(const PovmExportOpts& o) {
  using namespace spinmeter;
  const auto t0 = std::chrono::steady_clock::now();
  const Json config{{"s", o.s_text}, {"grid_degree", degree_echo(o.grid_degree)}, {"out", o.out}};
  const SpinSystem sys = make_spin_system(parse_spin(o.s_text));
  const SphereGrid grid = build_grid(resolve_degree(o.grid_degree, sys.s));
  Json j = povm_to_json(povm_from_model(make_completely_optimal(sys, grid)));
  j["tool_version"] = kVersion;
  j["config"] = config;
  j["wall_time_ms"] = ms_since(t0);
  write_text(o.out, j.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optimal direction measurements on a spin: fidelity bounds, "
               "phase-space functions, tomography"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(spinmeter::kVersion));

  ErrorRelationsOpts err_opts;
  auto* err_cmd = app.add_subcommand(
      "error-relations", "Fidelity and uncertainty table for the completely optimal model");
  err_cmd->add_option("--s", err_opts.s_list, "Spin values (e.g. 1/2,1,3/2)")->delimiter(',');
  err_cmd->add_option("--grid-degree", err_opts.grid_degree, "Quadrature exactness (default 4s+2)")
      ->check(CLI::PositiveNumber);
  err_cmd->add_option("--out", err_opts.out, "Output path (default stdout)");
  err_cmd->add_option("--format", err_opts.format, "json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  err_cmd->callback([&err_opts]() { run_error_relations(err_opts); });

  QFunctionOpts q_opts;
  auto* q_cmd = app.add_subcommand("qfunction", "Q function of a state on the quadrature grid");
  q_cmd->add_option("--s", q_opts.s_text, "Spin value")->required();
  q_cmd->add_option("--state", q_opts.state,
                    "mixed | ket:<m> | coherent:<theta>,<phi> | file:<path>");
  q_cmd->add_option("--grid-degree", q_opts.grid_degree, "Quadrature exactness (default 4s+2)")
      ->check(CLI::PositiveNumber);
  q_cmd->add_option("--out", q_opts.out, "Output path (default stdout)");
  q_cmd->add_option("--format", q_opts.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
  q_cmd->callback([&q_opts]() { run_qfunction(q_opts); });

  TomographyOpts tomo_opts;
  auto* tomo_cmd = app.add_subcommand(
      "tomography", "Sample counts from the optimal POVM and reconstruct the state");
  tomo_cmd->add_option("--s", tomo_opts.s_text, "Spin value")->required();
  tomo_cmd->add_option("--state", tomo_opts.state,
                       "mixed | ket:<m> | coherent:<theta>,<phi> | file:<path>");
  tomo_cmd->add_option("--samples", tomo_opts.samples, "Number of samples")
      ->check(CLI::PositiveNumber);
  tomo_cmd->add_option("--seed", tomo_opts.seed, "RNG seed (64-bit)");
  tomo_cmd->add_option("--grid-degree", tomo_opts.grid_degree,
                       "Quadrature exactness (default 4s+2)")
      ->check(CLI::PositiveNumber);
  tomo_cmd->add_option("--out", tomo_opts.out,
                       "Output base path; writes <base>_counts.csv, <base>_counts.json, "
                       "<base>_estimate.json, <base>_report.json");
  tomo_cmd->callback([&tomo_opts]() { run_tomography(tomo_opts); });

  Type2Opts t2_opts;
  auto* t2_cmd =
      app.add_subcommand("type2", "Unconstrained-pointer smearing convergence table");
  t2_cmd->add_option("--s", t2_opts.s_text, "Spin value");
  t2_cmd->add_option("--sigma", t2_opts.sigmas, "Descending radial widths (e.g. 1,0.5,0.25,0.1)")
      ->delimiter(',');
  t2_cmd->add_option("--grid-degree", t2_opts.grid_degree, "Quadrature exactness (default 4s+2)")
      ->check(CLI::PositiveNumber);
  t2_cmd->add_option("--out", t2_opts.out, "Output path (default stdout)");
  t2_cmd->add_option("--format", t2_opts.format, "json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  t2_cmd->callback([&t2_opts]() { run_type2(t2_opts); });

  PovmExportOpts povm_opts;
  auto* povm_cmd = app.add_subcommand("povm-export", "Serialize the completely optimal POVM");
  povm_cmd->add_option("--s", povm_opts.s_text, "Spin value")->required();
  povm_cmd->add_option("--grid-degree", povm_opts.grid_degree,
                       "Quadrature exactness (default 4s+2)")
      ->check(CLI::PositiveNumber);
  povm_cmd->add_option("--out", povm_opts.out, "Output path (default stdout)");
  povm_cmd->callback([&povm_opts]() { run_povm_export(povm_opts); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);  // --help / --version
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const spinmeter::invariant_violation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
