#include "prony/serialize.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "prony/inverse.hpp"

namespace prony {

namespace {

Json numbers(std::span<const double> v) {
  Json arr = Json::array();
  for (double x : v) arr.push_back(x);
  return arr;
}

std::vector<double> read_numbers(const Json& j, const char* key) {
  if (!j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  const Json& arr = j.at(key);
  if (!arr.is_array()) throw InputError(std::string("field '") + key + "' must be an array");
  std::vector<double> out;
  for (const Json& x : arr) {
    if (!x.is_number()) throw InputError(std::string("field '") + key + "' must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

void check_schema(const Json& j) {
  if (!j.is_object()) throw InputError("expected a JSON object");
  if (j.contains("schema") && (!j.at("schema").is_number_integer() || j.at("schema").get<int>() != kSchemaVersion))
    throw InputError("unsupported schema version");
}

Json optional_signal(const std::optional<Signal>& s) { return s ? to_json(*s) : Json(nullptr); }

// Infinity has no JSON literal; unbounded diameters are written as null.
Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw InputError("bad number '" + s + "' in CSV");
  return v;
}

}  // namespace

Json to_json(const Signal& signal) {
  return Json{{"amplitudes", numbers(signal.amplitudes())}, {"nodes", numbers(signal.nodes())}};
}

Json to_json(const MomentVector& mu) { return Json{{"moments", numbers(mu.values())}}; }

Json to_json(const ClusterFrame& frame) { return Json{{"kappa", frame.kappa}, {"h", frame.h}}; }

Json to_json(const RegularityParams& p) { return Json{{"eta", p.eta}, {"m", p.m}, {"M", p.M}}; }

Json to_json(const ConstantsBundle& c) {
  Json j{{"d", c.d},   {"eta", c.params.eta}, {"m", c.params.m}, {"M", c.params.M},
         {"kappa", c.kappa}, {"C1", c.C1}, {"C2", c.C2}, {"C3", c.C3},
         {"C4", c.C4}, {"C5", c.C5}, {"C6", c.C6}, {"C7", c.C7},
         {"C8", c.C8}, {"r", c.r},   {"R", c.R}};
  if (c.K3) j["K3"] = *c.K3;
  j["K4"] = c.K4;
  return j;
}

Json to_json(const SampleCloud& cloud) {
  Json points = Json::array();
  for (const CloudPoint& p : cloud.points) {
    Json j = to_json(p.signal);
    j["mode"] = to_string(p.mode);
    j["source"] = numbers(p.source.values());
    points.push_back(j);
  }
  return Json{{"seed", cloud.seed}, {"attempted", cloud.attempted}, {"failed", cloud.failed}, {"points", points}};
}

Json to_json(const WorstCaseReport& r) {
  return Json{{"eps", r.eps},
              {"rho", r.rho},
              {"rho_a", r.rho_a},
              {"rho_x", r.rho_x},
              {"samples", r.samples},
              {"failed", r.failed},
              {"seed", r.seed},
              {"argmax_rho", optional_signal(r.argmax_rho)},
              {"argmax_a", optional_signal(r.argmax_a)},
              {"argmax_x", optional_signal(r.argmax_x)}};
}

Json to_json(const SandwichReport& r) {
  return Json{{"frame", to_json(r.frame)},
              {"eps", r.eps},
              {"eps_inner", r.eps_inner},
              {"h_prime", r.h_prime},
              {"regime_warning", r.regime_warning},
              {"outer_worst_ratio", r.outer_worst_ratio},
              {"inner_worst_ratio", r.inner_worst_ratio},
              {"outer_samples", r.outer_samples},
              {"inner_samples", r.inner_samples},
              {"outer_failed", r.outer_failed},
              {"inner_failed", r.inner_failed},
              {"outer_ok", r.outer_ok},
              {"inner_ok", r.inner_ok}};
}

Json to_json(const NeighborhoodReport& r) {
  return Json{{"q", r.q},
              {"radius", r.radius},
              {"worst_distance", r.worst_distance},
              {"cloud_size", r.cloud_size},
              {"leaf_size", r.leaf_size},
              {"ok", r.ok}};
}

Json to_json(const HausdorffEstimate& e) {
  return Json{{"parameter_distance", e.parameter_distance},
              {"moment_distance", e.moment_distance},
              {"moment_formula", e.moment_formula},
              {"lhs_samples", e.lhs_samples},
              {"rhs_samples", e.rhs_samples}};
}

Json to_json(const ImprovedResult& r) {
  Json diag = Json::array();
  for (const LeafDiagnostics& d : r.diagnostics)
    diag.push_back(Json{{"q", d.q},
                        {"radius", d.radius},
                        {"leaf_samples", d.leaf_samples},
                        {"thickened_samples", d.thickened_samples},
                        {"failed", d.failed},
                        {"feasible", d.feasible},
                        {"diameter", finite_or_null(d.diameter)}});
  return Json{{"point_solution", to_json(r.point_solution)},
              {"point_feasible", r.point_feasible},
              {"chosen_q", r.chosen_q},
              {"feasible_diameter", r.feasible_diameter},
              {"improved", to_json(r.improved)},
              {"leaf_distance", r.leaf_distance},
              {"diagnostics", diag}};
}

Json to_json(const SlopeFit& f) {
  return Json{{"exponent", f.exponent}, {"intercept", f.intercept}, {"r_squared", f.r_squared}, {"points", f.points}};
}

Signal signal_from_json(const Json& j) {
  check_schema(j);
  std::vector<double> a = read_numbers(j, "amplitudes");
  std::vector<double> x = read_numbers(j, "nodes");
  if (a.size() != x.size()) throw InputError("amplitudes and nodes differ in length");
  try {
    return Signal(std::move(a), std::move(x));
  } catch (const std::exception& e) {
    throw InputError(std::string("invalid signal: ") + e.what());
  }
}

MomentVector moments_from_json(const Json& j) {
  check_schema(j);
  std::vector<double> mu = read_numbers(j, "moments");
  for (double v : mu)
    if (!std::isfinite(v)) throw InputError("moments must be finite");
  if (mu.empty()) throw InputError("moments must be nonempty");
  return MomentVector(std::move(mu));
}

Json document(const Json& payload) {
  Json doc{{"schema", kSchemaVersion}};
  for (const auto& [key, value] : payload.items()) doc[key] = value;
  return doc;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

void write_cloud_csv(std::ostream& out, const SampleCloud& cloud, std::size_t d,
                     const std::optional<ClusterFrame>& frame) {
  for (std::size_t j = 1; j <= d; ++j) out << "a_" << j << ',';
  for (std::size_t j = 1; j <= d; ++j) out << "x_" << j << ',';
  out << "mode";
  for (std::size_t k = 0; k < 2 * d; ++k) out << ",mu_" << k;
  if (frame) {
    for (std::size_t j = 1; j <= d; ++j) out << ",ga_" << j;
    for (std::size_t j = 1; j <= d; ++j) out << ",gx_" << j;
  }
  out << '\n';
  for (const CloudPoint& p : cloud.points) {
    if (p.signal.size() != d || p.source.size() != 2 * d)
      throw std::invalid_argument("write_cloud_csv: point dimension mismatch");
    for (double a : p.signal.amplitudes()) out << format_double(a) << ',';
    for (double x : p.signal.nodes()) out << format_double(x) << ',';
    out << to_string(p.mode);
    for (double m : p.source.values()) out << ',' << format_double(m);
    if (frame) {
      const Signal g = to_model(p.signal, *frame);
      for (double a : g.amplitudes()) out << ',' << format_double(a);
      for (double x : g.nodes()) out << ',' << format_double(x);
    }
    out << '\n';
  }
}

SampleCloud read_cloud_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("cloud CSV: missing header");
  const std::vector<std::string> header = split(line);
  std::size_t d = 0;
  while (d < header.size() && header[d] == "a_" + std::to_string(d + 1)) ++d;
  if (d == 0) throw InputError("cloud CSV: header must start with a_1");
  const std::size_t width = 2 * d + 1 + 2 * d;
  if (header.size() != width && header.size() != width + 2 * d)
    throw InputError("cloud CSV: unexpected column count");

  SampleCloud cloud;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line);
    if (cells.size() != header.size()) throw InputError("cloud CSV: wrong cell count in row " + std::to_string(row));
    std::vector<double> a(d), x(d), mu(2 * d);
    for (std::size_t j = 0; j < d; ++j) {
      a[j] = parse_double(cells[j]);
      x[j] = parse_double(cells[d + j]);
    }
    SampleMode mode;
    try {
      mode = parse_sample_mode(cells[2 * d]);
    } catch (const std::invalid_argument& e) {
      throw InputError(std::string("cloud CSV: ") + e.what());
    }
    for (std::size_t k = 0; k < 2 * d; ++k) mu[k] = parse_double(cells[2 * d + 1 + k]);
    MomentVector source(std::move(mu));
    Signal s(std::move(a), std::move(x));
    const double tol = 1e-8 * (1.0 + inf_norm(source.values()));
    if (moment_residual(source, s) > tol)
      throw InputError("cloud CSV: row " + std::to_string(row) + " does not reproduce its source moments");
    cloud.points.push_back({std::move(s), std::move(source), mode});
    ++cloud.attempted;
  }
  return cloud;
}

}  // namespace prony
