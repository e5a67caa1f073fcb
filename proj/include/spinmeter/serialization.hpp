#pragma once

// File formats: a versioned JSON schema for grids, POVMs and models
// ("spinmeter-povm-v1", complex matrices flattened row-major with re/im
// interleaved), JSON + CSV views of sphere functions, and the counts CSV
// with its JSON sidecar.  CSV numbers are written with %.17g so re-imports
// are bit exact; lines starting with '#' are comments.

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "spinmeter/linalg.hpp"
#include "spinmeter/measurement.hpp"
#include "spinmeter/sphere_grid.hpp"
#include "spinmeter/spin_system.hpp"
#include "spinmeter/tomography.hpp"
#include "spinmeter/version.hpp"

namespace spinmeter {

using Json = nlohmann::json;

inline constexpr const char* kPovmSchema = "spinmeter-povm-v1";
inline constexpr const char* kFieldSchema = "spinmeter-field-v1";
inline constexpr const char* kDensitySchema = "spinmeter-density-v1";

inline std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf);
}

inline std::vector<double> matrix_to_flat(const Matrix& m) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(2 * m.rows() * m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      flat.push_back(m(i, j).real());
      flat.push_back(m(i, j).imag());
    }
  }
  return flat;
}

inline Matrix matrix_from_flat(const std::vector<double>& flat, Eigen::Index rows,
                               Eigen::Index cols) {
  if (static_cast<Eigen::Index>(flat.size()) != 2 * rows * cols) {
    throw std::invalid_argument("matrix_from_flat: length does not match shape");
  }
  Matrix m(rows, cols);
  std::size_t pos = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double re = flat[pos++];
      const double im = flat[pos++];
      m(i, j) = Complex(re, im);
    }
  }
  return m;
}

inline Json grid_to_json(const SphereGrid& grid) {
  Json nodes = Json::array();
  for (const UnitVector& n : grid.nodes) nodes.push_back({n.x(), n.y(), n.z()});
  Json weights = Json::array();
  for (Eigen::Index k = 0; k < grid.weights.size(); ++k) weights.push_back(grid.weights(k));
  return Json{{"L", grid.exactness}, {"nodes", nodes}, {"weights", weights}};
}

inline SphereGrid grid_from_json(const Json& j) {
  SphereGrid grid;
  grid.exactness = j.at("L").get<int>();
  for (const auto& node : j.at("nodes")) {
    if (node.size() != 3) throw std::invalid_argument("grid_from_json: node is not a 3-vector");
    grid.nodes.emplace_back(node[0].get<double>(), node[1].get<double>(), node[2].get<double>());
  }
  const auto& weights = j.at("weights");
  if (weights.size() != grid.nodes.size()) {
    throw std::invalid_argument("grid_from_json: weight count does not match nodes");
  }
  grid.weights.resize(static_cast<Eigen::Index>(weights.size()));
  for (Eigen::Index k = 0; k < grid.weights.size(); ++k) {
    grid.weights(k) = weights[static_cast<std::size_t>(k)].get<double>();
  }
  return grid;
}

inline Json povm_to_json(const Povm& povm) {
  Json effects = Json::array();
  for (const Matrix& e : povm.effects) effects.push_back(matrix_to_flat(e));
  return Json{{"schema", kPovmSchema},
              {"s", povm.sys.s},
              {"grid", grid_to_json(povm.grid)},
              {"effects", effects}};
}

inline Json model_to_json(const MeasurementModel& model) {
  Json kraus = Json::array();
  for (const auto& block : model.kraus) {
    Json jblock = Json::array();
    for (const Matrix& t : block) jblock.push_back(matrix_to_flat(t));
    kraus.push_back(jblock);
  }
  return Json{{"schema", kPovmSchema},
              {"s", model.sys.s},
              {"grid", grid_to_json(model.grid)},
              {"kraus", kraus}};
}

namespace detail {

inline void require_schema(const Json& j, const char* schema) {
  if (!j.contains("schema") || j.at("schema").get<std::string>() != schema) {
    throw std::invalid_argument(std::string("expected schema tag ") + schema);
  }
}

}  // namespace detail

inline Povm povm_from_json(const Json& j) {
  detail::require_schema(j, kPovmSchema);
  const SpinSystem sys = make_spin_system(j.at("s").get<double>());
  SphereGrid grid = grid_from_json(j.at("grid"));
  std::vector<Matrix> effects;
  for (const auto& flat : j.at("effects")) {
    effects.push_back(matrix_from_flat(flat.get<std::vector<double>>(), sys.dim, sys.dim));
  }
  return make_povm(sys, std::move(grid), std::move(effects));
}

inline MeasurementModel model_from_json(const Json& j) {
  detail::require_schema(j, kPovmSchema);
  const SpinSystem sys = make_spin_system(j.at("s").get<double>());
  SphereGrid grid = grid_from_json(j.at("grid"));
  std::vector<std::vector<Matrix>> kraus;
  for (const auto& jblock : j.at("kraus")) {
    std::vector<Matrix> block;
    for (const auto& flat : jblock) {
      block.push_back(matrix_from_flat(flat.get<std::vector<double>>(), sys.dim, sys.dim));
    }
    kraus.push_back(std::move(block));
  }
  return make_model(sys, std::move(grid), std::move(kraus));
}

inline Json sphere_function_to_json(const SphereFunction& f) {
  Json values = Json::array();
  for (Eigen::Index k = 0; k < f.values.size(); ++k) values.push_back(f.values(k));
  return Json{{"schema", kFieldSchema}, {"grid", grid_to_json(f.grid)}, {"values", values}};
}

inline SphereFunction sphere_function_from_json(const Json& j) {
  detail::require_schema(j, kFieldSchema);
  SphereFunction f;
  f.grid = grid_from_json(j.at("grid"));
  const auto& values = j.at("values");
  if (static_cast<int>(values.size()) != f.grid.size()) {
    throw std::invalid_argument("sphere_function_from_json: value count mismatch");
  }
  f.values.resize(f.grid.size());
  for (Eigen::Index k = 0; k < f.values.size(); ++k) {
    f.values(k) = values[static_cast<std::size_t>(k)].get<double>();
  }
  return f;
}

inline Json density_to_json(double s, const Matrix& rho) {
  return Json{{"schema", kDensitySchema}, {"s", s}, {"matrix", matrix_to_flat(rho)}};
}

inline Matrix density_from_json(const Json& j, const SpinSystem& sys) {
  detail::require_schema(j, kDensitySchema);
  if (std::abs(j.at("s").get<double>() - sys.s) > 1e-9) {
    throw std::invalid_argument("density_from_json: spin value does not match");
  }
  return matrix_from_flat(j.at("matrix").get<std::vector<double>>(), sys.dim, sys.dim);
}

inline void write_grid_csv(std::ostream& os, const SphereGrid& grid) {
  os << "theta,phi,weight\n";
  for (int k = 0; k < grid.size(); ++k) {
    os << format_double(grid.nodes[k].theta()) << ',' << format_double(grid.nodes[k].phi())
       << ',' << format_double(grid.weights(k)) << '\n';
  }
}

inline void write_sphere_function_csv(std::ostream& os, const SphereFunction& f) {
  os << "theta,phi,value\n";
  for (int k = 0; k < f.grid.size(); ++k) {
    os << format_double(f.grid.nodes[k].theta()) << ',' << format_double(f.grid.nodes[k].phi())
       << ',' << format_double(f.values(k)) << '\n';
  }
}

inline void write_counts_csv(std::ostream& os, const OutcomeCounts& counts) {
  os << "node_index,theta,phi,weight,count\n";
  for (int k = 0; k < counts.grid.size(); ++k) {
    os << k << ',' << format_double(counts.grid.nodes[k].theta()) << ','
       << format_double(counts.grid.nodes[k].phi()) << ','
       << format_double(counts.grid.weights(k)) << ',' << counts.counts(k) << '\n';
  }
}

inline Json counts_sidecar_json(double s, const OutcomeCounts& counts) {
  return Json{{"s", s},
              {"L", counts.grid.exactness},
              {"N", counts.total},
              {"seed", counts.seed}};
}

// Minimal CSV reader for the formats written above: skips '#' comments,
// requires the expected header, returns rows of doubles.
inline std::vector<std::vector<double>> read_csv(std::istream& is,
                                                 const std::string& expected_header) {
  std::string line;
  bool header_seen = false;
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != expected_header) {
        throw std::invalid_argument("read_csv: unexpected header '" + line + "'");
      }
      header_seen = true;
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      row.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument("read_csv: malformed number " + cell);
    }
    rows.push_back(std::move(row));
  }
  if (!header_seen) throw std::invalid_argument("read_csv: missing header");
  return rows;
}

}  // namespace spinmeter
