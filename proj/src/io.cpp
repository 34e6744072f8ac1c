#include "weakkam/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "weakkam/error.hpp"

namespace weakkam {
namespace {

void ensure_parent(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
}

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  std::filesystem::path p = path;
  p += ".json";
  return p;
}

Json number_array(std::span<const double> values) {
  Json a = Json::array();
  for (double v : values) a.push_back(json_number(v));
  return a;
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";  // folds −0
  return fmt::format("{:.17g}", value);
}

Json json_number(double value) {
  if (std::isfinite(value)) return value == 0.0 ? Json(0.0) : Json(value);
  return format_double(value);
}

double number_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw Error("expected a number, got " + j.dump());
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw Error("failed writing " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_json(const std::filesystem::path& path, const Json& j) {
  write_text(path, j.dump(2) + "\n");
}

Json read_json(const std::filesystem::path& path) {
  try {
    return Json::parse(read_text(path));
  } catch (const Json::parse_error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::string grid_function_csv(const TorusGrid& grid, std::span<const double> values) {
  std::string out = grid.dim() == 1 ? "node,x,value\n" : "node,x,y,value\n";
  for (NodeIndex i = 0; i < values.size(); ++i) {
    const Point p = grid.coordinate(i);
    out += std::to_string(i) + "," + format_double(p[0]) + ",";
    if (grid.dim() == 2) out += format_double(p[1]) + ",";
    out += format_double(values[i]) + "\n";
  }
  return out;
}

std::vector<double> read_grid_function_csv(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  std::vector<double> values;
  bool header = true;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    const std::string cell = line.substr(line.rfind(',') + 1);
    try {
      std::size_t used = 0;
      const double v = std::stod(cell, &used);
      if (used != cell.size()) throw std::invalid_argument(cell);
      values.push_back(v);
    } catch (const std::exception&) {
      throw Error(path.string() + ":" + std::to_string(lineno) + ": bad value '" + cell + "'");
    }
  }
  return values;
}

void write_binary(const std::filesystem::path& path, std::span<const double> values,
                  std::vector<std::size_t> shape, Json metadata) {
  static_assert(std::endian::native == std::endian::little, "little-endian host required");
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!out) throw Error("failed writing " + path.string());
  Json side = std::move(metadata);
  side["dtype"] = "float64-le";
  side["shape"] = shape;
  side["count"] = values.size();
  write_json(sidecar_path(path), side);
}

BinaryData read_binary(const std::filesystem::path& path) {
  BinaryData d;
  d.metadata = read_json(sidecar_path(path));
  if (d.metadata.value("dtype", "") != "float64-le") {
    throw Error(path.string() + ": unsupported dtype in sidecar");
  }
  d.shape = d.metadata.at("shape").get<std::vector<std::size_t>>();
  const auto count = d.metadata.at("count").get<std::size_t>();
  const std::string raw = read_text(path);
  if (raw.size() != count * sizeof(double)) {
    throw Error(path.string() + ": expected " + std::to_string(count) + " values, file holds " +
                std::to_string(raw.size()) + " bytes");
  }
  d.values.resize(count);
  std::memcpy(d.values.data(), raw.data(), raw.size());
  return d;
}

std::vector<double> read_values(const std::filesystem::path& path) {
  if (path.extension() == ".bin") return read_binary(path).values;
  return read_grid_function_csv(path);
}

std::string measure_csv(const OccupationMeasure& measure) {
  std::string out = "tail,offset,weight\n";
  for (const EdgeWeight& e : measure.entries) {
    out += fmt::format("{},{},{}\n", e.tail, e.offset, format_double(e.weight));
  }
  return out;
}

std::string trajectory_csv(const TrajectorySample& traj) {
  std::string out = "step,node,offset,speed\n";
  for (std::size_t i = 0; i < traj.offsets.size(); ++i) {
    out += fmt::format("{},{},{},{}\n", i, traj.nodes[i], traj.offsets[i],
                       format_double(traj.speeds[i]));
  }
  return out;
}

std::string convergence_csv(std::span<const ConvergenceRow> rows) {
  std::string out = "lambda,sup_error,min_neg_lambda_u,max_neg_lambda_u,lipschitz_quotient\n";
  for (const ConvergenceRow& r : rows) {
    out += fmt::format("{},{},{},{},{}\n", format_double(r.lambda), format_double(r.sup_error),
                       format_double(r.min_neg_lambda_u), format_double(r.max_neg_lambda_u),
                       format_double(r.lipschitz_quotient));
  }
  return out;
}

std::string aubry_csv(const TorusGrid& grid, const AubryReport& report) {
  std::vector<int> cls(grid.node_count(), -1);
  for (std::size_t c = 0; c < report.classes.size(); ++c) {
    for (NodeIndex y : report.classes[c]) cls[y] = static_cast<int>(c);
  }
  std::string out = grid.dim() == 1 ? "node,x,diagonal,class\n" : "node,x,y,diagonal,class\n";
  for (NodeIndex i = 0; i < grid.node_count(); ++i) {
    const Point p = grid.coordinate(i);
    out += std::to_string(i) + "," + format_double(p[0]) + ",";
    if (grid.dim() == 2) out += format_double(p[1]) + ",";
    out += format_double(report.diagonal[i]) + "," + std::to_string(cls[i]) + "\n";
  }
  return out;
}

std::string matrix_csv(const DenseMatrix& m) {
  std::string out = "row,col,value\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      out += fmt::format("{},{},{}\n", i, j, format_double(m(i, j)));
    }
  }
  return out;
}

void write_barrier(const std::filesystem::path& bin_path, const BarrierMatrix& h) {
  write_binary(bin_path, h.values.data(), {h.size(), h.size()}, to_json(h));
}

Json to_json(const StabilityBounds& b) {
  return {{"level", json_number(b.level)},     {"kappa", json_number(b.kappa)},
          {"A_kappa", json_number(b.A_kappa)}, {"C0", json_number(b.C0)},
          {"alpha", json_number(b.alpha)},     {"v_search", json_number(b.v_search)}};
}

Json to_json(const VelocityStencil& s, const TorusGrid& grid) {
  return {{"tau", json_number(s.tau)},
          {"radius", s.radius},
          {"offsets", s.size()},
          {"zero_index", s.zero_index},
          {"max_speed", json_number(s.max_speed(grid))},
          {"radius_capped", s.radius_capped}};
}

Json to_json(const CriticalEstimate& e) {
  Json rows = Json::array();
  for (const CriticalEstimateRow& r : e.rows) {
    rows.push_back({{"lambda", json_number(r.lambda)},
                    {"min_neg_lambda_u", json_number(r.min_neg_lambda_u)},
                    {"max_neg_lambda_u", json_number(r.max_neg_lambda_u)},
                    {"midpoint", json_number(r.midpoint)},
                    {"spread", json_number(r.spread)},
                    {"iterations", r.iterations}});
  }
  return {{"c_est", json_number(e.c_est)}, {"rows", rows}, {"spread_shrinks", e.spread_shrinks}};
}

Json to_json(const DiscountedSolution& s) {
  return {{"lambda", json_number(s.lambda)},     {"tau", json_number(s.tau)},
          {"beta", json_number(s.beta)},         {"shift", json_number(s.shift)},
          {"iterations", s.iterations},          {"residual", json_number(s.residual)},
          {"tol", json_number(s.tol)},           {"nodes", s.values.size()},
          {"policy", s.policy}};
}

Json to_json(const MeanCycle& c) {
  return {{"mean", json_number(c.mean)},
          {"karp_value", json_number(c.karp_value)},
          {"nodes", c.nodes},
          {"offsets", c.offsets}};
}

Json to_json(const MatherSolveResult& r) {
  Json support = Json::array();
  for (const EdgeWeight& e : r.support) {
    support.push_back({{"tail", e.tail}, {"offset", e.offset}, {"weight", json_number(e.weight)}});
  }
  return {{"value", json_number(r.value)},
          {"mass", json_number(r.measure.mass())},
          {"conservation_residual", json_number(r.conservation_residual)},
          {"iterations", r.iterations},
          {"support", support}};
}

Json to_json(const LimitFunctionResult& r) {
  Json certs = Json::array();
  for (std::size_t t = 0; t < r.certificates.size(); ++t) {
    Json entries = Json::array();
    for (const EdgeWeight& e : r.certificates[t].entries) {
      entries.push_back({{"tail", e.tail}, {"offset", e.offset}, {"weight", json_number(e.weight)}});
    }
    certs.push_back({{"target", r.targets[t]}, {"measure", entries}});
  }
  return {{"method", r.method},
          {"eps", json_number(r.eps)},
          {"targets", r.targets.size()},
          {"base_nodes", r.base_nodes},
          {"values", number_array(r.values)},
          {"certificates", certs}};
}

Json to_json(const CheckFlag& f) {
  return {{"name", f.name},
          {"status", to_string(f.status)},
          {"measured", json_number(f.measured)},
          {"threshold", json_number(f.threshold)}};
}

Json to_json(const LimitReport& r) {
  Json convergence = Json::array();
  for (const ConvergenceRow& row : r.convergence) {
    convergence.push_back({{"lambda", json_number(row.lambda)},
                           {"sup_error", json_number(row.sup_error)},
                           {"min_neg_lambda_u", json_number(row.min_neg_lambda_u)},
                           {"max_neg_lambda_u", json_number(row.max_neg_lambda_u)},
                           {"lipschitz_quotient", json_number(row.lipschitz_quotient)}});
  }
  Json lemma = Json::array();
  for (const LemmaCheck& c : r.lemma) {
    lemma.push_back({{"lambda", json_number(c.lambda)},
                     {"node", c.node},
                     {"u_lambda", json_number(c.u_lambda)},
                     {"u0", json_number(c.u0)},
                     {"integral", json_number(c.integral)},
                     {"tol", json_number(c.tol)},
                     {"slack", json_number(c.slack)},
                     {"passed", c.passed}});
  }
  Json flags = Json::array();
  for (const CheckFlag& f : r.flags) flags.push_back(to_json(f));
  return {{"subsolution_violation", json_number(r.subsolution_violation)},
          {"mather_integrals", number_array(r.mather_integrals)},
          {"perturbed_integrals", number_array(r.perturbed_integrals)},
          {"lambda_integrals", number_array(r.lambda_integrals)},
          {"monotonicity_violation", json_number(r.monotonicity_violation)},
          {"plateau",
           {{"onset", r.plateau.onset},
            {"value", json_number(r.plateau.plateau)},
            {"prefix_nonincreasing", r.plateau.prefix_nonincreasing},
            {"worst_increase", json_number(r.plateau.worst_increase)}}},
          {"convergence", convergence},
          {"lemma", lemma},
          {"flags", flags},
          {"passed", r.passed()}};
}

Json to_json(const BarrierMatrix& h) {
  return {{"kind", h.kind == BarrierMatrix::Kind::peierls ? "peierls" : "finite_horizon"},
          {"steps", h.steps},
          {"burn_in", h.burn_in},
          {"horizon", h.horizon},
          {"residual", json_number(h.residual)},
          {"stable", h.stable},
          {"tau", json_number(h.tau)},
          {"shift", json_number(h.shift)}};
}

}  // namespace weakkam
