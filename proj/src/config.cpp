#include "weakkam/config.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "weakkam/error.hpp"
#include "weakkam/io.hpp"

namespace weakkam {
namespace {

void reject_unknown(const Json& j, const std::string& where, const std::set<std::string>& keys) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!keys.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read(const Json& j, const std::string& where, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type (" + j.at(key).dump() + ")");
  }
}

template <typename T>
void read(const Json& j, const std::string& where, const char* key, std::optional<T>& out) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) {
    out.reset();
    return;
  }
  T value{};
  read(j, where, key, value);
  out = value;
}

template <typename T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

// Columns: one integer node index per axis, then the value. A non-numeric
// first line is a header.
std::vector<double> read_potential_table(const std::filesystem::path& path,
                                         const TorusGrid& grid) {
  std::istringstream in(read_text(path));
  std::vector<double> values(grid.node_count(), std::numeric_limits<double>::quiet_NaN());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    const std::string where = path.string() + ":" + std::to_string(lineno);
    if (cells.size() != static_cast<std::size_t>(grid.dim()) + 1) {
      if (lineno == 1) continue;
      throw ConfigError(where + ": expected " + std::to_string(grid.dim() + 1) + " columns");
    }
    Offset index{0, 0};
    double value = 0.0;
    try {
      for (int a = 0; a < grid.dim(); ++a) index[a] = std::stoi(cells[a]);
      value = std::stod(cells.back());
    } catch (const std::exception&) {
      if (lineno == 1) continue;
      throw ConfigError(where + ": malformed row");
    }
    for (int a = 0; a < grid.dim(); ++a) {
      if (index[a] < 0 || index[a] >= grid.size(a)) {
        throw ConfigError(where + ": node index out of range");
      }
    }
    values[grid.node_index(index)] = value;
  }
  for (double v : values) {
    if (std::isnan(v)) throw ConfigError(path.string() + ": table does not cover every node");
  }
  return values;
}

void require_positive(double v, const std::string& name) {
  if (!(v > 0.0)) throw ConfigError(name + " must be positive");
}

void require_decreasing(const std::vector<double>& v, const std::string& name) {
  if (v.empty()) throw ConfigError(name + " must not be empty");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0)) throw ConfigError(name + " entries must be positive");
    if (i > 0 && !(v[i] < v[i - 1])) throw ConfigError(name + " must be strictly decreasing");
  }
}

}  // namespace

TorusGrid ExperimentConfig::grid() const { return TorusGrid::build(problem.dim, problem.sizes); }

LagrangianSpec ExperimentConfig::spec() const {
  const PotentialConfig& pc = problem.potential;
  Potential potential = Potential::zero();
  if (pc.type == "cosine") {
    potential = Potential::cosine(pc.amplitude, pc.frequency);
  } else if (pc.type == "table") {
    std::filesystem::path p = pc.path;
    if (p.is_relative()) p = base_dir / p;
    const std::vector<int> sizes = pc.sizes.empty() ? problem.sizes : pc.sizes;
    const TorusGrid table_grid = TorusGrid::build(problem.dim, sizes);
    potential = Potential::table(table_grid, read_potential_table(p, table_grid));
  }
  Point drift{0.0, 0.0};
  for (std::size_t a = 0; a < problem.drift.size() && a < 2; ++a) drift[a] = problem.drift[a];
  switch (problem.family) {
    case Family::mechanical:
      return LagrangianSpec::mechanical(problem.dim, potential);
    case Family::transport:
      return LagrangianSpec::transport(problem.dim, drift, potential);
    case Family::tabulated:
      return LagrangianSpec::tabulated(problem.dim, potential);
  }
  throw ConfigError("unknown family");
}

ExperimentConfig parse_config(const Json& j) {
  ExperimentConfig c;
  reject_unknown(j, "config", {"problem", "discretization", "schedule", "output"});
  if (j.contains("problem")) {
    const Json& p = j.at("problem");
    reject_unknown(p, "problem", {"family", "potential", "drift", "dim", "sizes"});
    std::string family = to_string(c.problem.family);
    read(p, "problem", "family", family);
    try {
      c.problem.family = family_from_string(family);
    } catch (const Error&) {
      throw ConfigError("problem.family: unknown family '" + family + "'");
    }
    read(p, "problem", "drift", c.problem.drift);
    read(p, "problem", "dim", c.problem.dim);
    read(p, "problem", "sizes", c.problem.sizes);
    if (p.contains("potential")) {
      const Json& v = p.at("potential");
      reject_unknown(v, "problem.potential", {"type", "amplitude", "frequency", "path", "sizes"});
      read(v, "problem.potential", "type", c.problem.potential.type);
      read(v, "problem.potential", "amplitude", c.problem.potential.amplitude);
      read(v, "problem.potential", "frequency", c.problem.potential.frequency);
      read(v, "problem.potential", "path", c.problem.potential.path);
      read(v, "problem.potential", "sizes", c.problem.potential.sizes);
    }
  }
  if (j.contains("discretization")) {
    const Json& d = j.at("discretization");
    reject_unknown(d, "discretization", {"tau", "stencil_radius", "v_search", "quadrature"});
    if (d.contains("tau") && d.at("tau").is_string()) {
      if (d.at("tau").get<std::string>() != "sqrt_h") {
        throw ConfigError("discretization.tau: expected a number, null or \"sqrt_h\"");
      }
    } else {
      read(d, "discretization", "tau", c.discretization.tau);
    }
    read(d, "discretization", "stencil_radius", c.discretization.stencil_radius);
    read(d, "discretization", "v_search", c.discretization.v_search);
    read(d, "discretization", "quadrature", c.discretization.quadrature);
  }
  if (j.contains("schedule")) {
    const Json& s = j.at("schedule");
    const std::string w = "schedule";
    reject_unknown(s, w,
                   {"lambdas", "critical_lambdas", "burn_in", "horizon", "max_window_doublings",
                    "solver_tol", "max_iter", "stabilization_tol", "eps_aubry", "eps_class",
                    "eps_c", "eps_mechanical", "target_stride", "critical_tol", "integral_tol",
                    "plateau_max", "lemma_lambda", "lemma_samples"});
    ScheduleConfig& sc = c.schedule;
    read(s, w, "lambdas", sc.lambdas);
    read(s, w, "critical_lambdas", sc.critical_lambdas);
    read(s, w, "burn_in", sc.burn_in);
    read(s, w, "horizon", sc.horizon);
    read(s, w, "max_window_doublings", sc.max_window_doublings);
    read(s, w, "solver_tol", sc.solver_tol);
    read(s, w, "max_iter", sc.max_iter);
    read(s, w, "stabilization_tol", sc.stabilization_tol);
    read(s, w, "eps_aubry", sc.eps_aubry);
    read(s, w, "eps_class", sc.eps_class);
    read(s, w, "eps_c", sc.eps_c);
    read(s, w, "eps_mechanical", sc.eps_mechanical);
    read(s, w, "target_stride", sc.target_stride);
    read(s, w, "critical_tol", sc.critical_tol);
    read(s, w, "integral_tol", sc.integral_tol);
    read(s, w, "plateau_max", sc.plateau_max);
    read(s, w, "lemma_lambda", sc.lemma_lambda);
    read(s, w, "lemma_samples", sc.lemma_samples);
  }
  read(j, "config", "output", c.output);
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  Json j;
  try {
    j = read_json(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  ExperimentConfig c = parse_config(j);
  c.base_dir = path.parent_path();
  return c;
}

Json to_json(const ExperimentConfig& c) {
  const PotentialConfig& pc = c.problem.potential;
  Json potential = {{"type", pc.type}};
  if (pc.type == "cosine") {
    potential["amplitude"] = pc.amplitude;
    potential["frequency"] = pc.frequency;
  } else if (pc.type == "table") {
    potential["path"] = pc.path;
    if (!pc.sizes.empty()) potential["sizes"] = pc.sizes;
  }
  Json problem = {{"family", to_string(c.problem.family)},
                  {"potential", potential},
                  {"dim", c.problem.dim},
                  {"sizes", c.problem.sizes}};
  if (!c.problem.drift.empty()) problem["drift"] = c.problem.drift;
  const ScheduleConfig& s = c.schedule;
  return {{"problem", problem},
          {"discretization",
           {{"tau", optional_json(c.discretization.tau)},
            {"stencil_radius", optional_json(c.discretization.stencil_radius)},
            {"v_search", optional_json(c.discretization.v_search)},
            {"quadrature", c.discretization.quadrature}}},
          {"schedule",
           {{"lambdas", s.lambdas},
            {"critical_lambdas", s.critical_lambdas},
            {"burn_in", optional_json(s.burn_in)},
            {"horizon", optional_json(s.horizon)},
            {"max_window_doublings", s.max_window_doublings},
            {"solver_tol", s.solver_tol},
            {"max_iter", s.max_iter},
            {"stabilization_tol", s.stabilization_tol},
            {"eps_aubry", s.eps_aubry},
            {"eps_class", optional_json(s.eps_class)},
            {"eps_c", optional_json(s.eps_c)},
            {"eps_mechanical", optional_json(s.eps_mechanical)},
            {"target_stride", s.target_stride},
            {"critical_tol", s.critical_tol},
            {"integral_tol", s.integral_tol},
            {"plateau_max", s.plateau_max},
            {"lemma_lambda", s.lemma_lambda},
            {"lemma_samples", s.lemma_samples}}},
          {"output", c.output}};
}

void validate(const ExperimentConfig& c) {
  const ProblemConfig& p = c.problem;
  if (p.dim != 1 && p.dim != 2) throw ConfigError("problem.dim must be 1 or 2");
  if (p.sizes.size() != static_cast<std::size_t>(p.dim)) {
    throw ConfigError("problem.sizes must have one entry per dimension");
  }
  for (int n : p.sizes) {
    if (n < 2) throw ConfigError("problem.sizes entries must be >= 2");
  }
  const std::string& type = p.potential.type;
  if (type != "zero" && type != "cosine" && type != "table") {
    throw ConfigError("problem.potential.type must be zero, cosine or table");
  }
  if (type == "cosine" && p.potential.frequency < 1) {
    throw ConfigError("problem.potential.frequency must be >= 1");
  }
  if (type == "table" && p.potential.path.empty()) {
    throw ConfigError("problem.potential.path is required for table potentials");
  }
  if (!p.potential.sizes.empty() && p.potential.sizes.size() != static_cast<std::size_t>(p.dim)) {
    throw ConfigError("problem.potential.sizes must have one entry per dimension");
  }
  if (p.family == Family::transport) {
    if (p.drift.size() != static_cast<std::size_t>(p.dim)) {
      throw ConfigError("problem.drift must have one entry per dimension");
    }
  } else if (!p.drift.empty()) {
    throw ConfigError("problem.drift is only meaningful for the transport family");
  }
  const DiscretizationConfig& d = c.discretization;
  if (d.tau) require_positive(*d.tau, "discretization.tau");
  if (d.v_search) require_positive(*d.v_search, "discretization.v_search");
  if (d.quadrature != "trapezoid" && d.quadrature != "left") {
    throw ConfigError("discretization.quadrature must be trapezoid or left");
  }
  if (d.stencil_radius && *d.stencil_radius < 1) {
    throw ConfigError("discretization.stencil_radius must be >= 1");
  }
  const ScheduleConfig& s = c.schedule;
  require_decreasing(s.lambdas, "schedule.lambdas");
  require_decreasing(s.critical_lambdas, "schedule.critical_lambdas");
  if (s.critical_lambdas.size() < 3) {
    throw ConfigError("schedule.critical_lambdas needs at least 3 entries");
  }
  if (s.burn_in && *s.burn_in == 0) throw ConfigError("schedule.burn_in must be positive");
  if (s.horizon && s.burn_in && *s.horizon < *s.burn_in) {
    throw ConfigError("schedule.horizon must be >= burn_in");
  }
  if (s.max_iter == 0) throw ConfigError("schedule.max_iter must be positive");
  if (s.target_stride == 0) throw ConfigError("schedule.target_stride must be positive");
  require_positive(s.solver_tol, "schedule.solver_tol");
  require_positive(s.stabilization_tol, "schedule.stabilization_tol");
  require_positive(s.eps_aubry, "schedule.eps_aubry");
  if (s.eps_class) require_positive(*s.eps_class, "schedule.eps_class");
  if (s.eps_c) require_positive(*s.eps_c, "schedule.eps_c");
  if (s.eps_mechanical) require_positive(*s.eps_mechanical, "schedule.eps_mechanical");
  require_positive(s.critical_tol, "schedule.critical_tol");
  require_positive(s.integral_tol, "schedule.integral_tol");
  require_positive(s.plateau_max, "schedule.plateau_max");
  require_positive(s.lemma_lambda, "schedule.lemma_lambda");
  if (c.output.empty()) throw ConfigError("output must not be empty");
}

}  // namespace weakkam
