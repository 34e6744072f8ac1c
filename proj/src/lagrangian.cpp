#include "weakkam/lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "weakkam/error.hpp"

namespace weakkam {
namespace {

double norm(const Point& v) { return std::hypot(v[0], v[1]); }

double periodic_interp_1d(std::span<const double> row, double x) {
  const int n = static_cast<int>(row.size());
  double s = (x - std::floor(x)) * n;
  int i = static_cast<int>(std::floor(s));
  const double t = s - i;
  i %= n;
  const int j = (i + 1) % n;
  return (1.0 - t) * row[i] + t * row[j];
}

}  // namespace

Potential Potential::zero() { return Potential{}; }

Potential Potential::cosine(double amplitude, int frequency) {
  if (frequency < 1) throw InvalidArgument("cosine potential frequency must be >= 1");
  Potential p;
  p.kind_ = Kind::cosine;
  p.amplitude_ = amplitude;
  p.frequency_ = frequency;
  return p;
}

Potential Potential::table(const TorusGrid& grid, std::vector<double> values) {
  if (values.size() != grid.node_count()) {
    throw InvalidArgument("potential table has " + std::to_string(values.size()) +
                          " values for a grid of " + std::to_string(grid.node_count()) +
                          " nodes");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidArgument("potential table contains a non-finite value");
  }
  Potential p;
  p.kind_ = Kind::table;
  p.table_dim_ = grid.dim();
  p.table_sizes_ = {grid.size(0), grid.dim() == 2 ? grid.size(1) : 1};
  p.table_ = std::move(values);
  return p;
}

double Potential::operator()(const Point& x, int dim) const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::cosine: {
      double s = 0.0;
      for (int a = 0; a < dim; ++a) {
        s += std::cos(2.0 * std::numbers::pi * frequency_ * x[a]);
      }
      return amplitude_ * s;
    }
    case Kind::table: {
      if (table_dim_ == 1) return periodic_interp_1d(table_, x[0]);
      // bilinear: interpolate along axis 1 on the two bracketing rows of axis 0
      const int n0 = table_sizes_[0];
      const int n1 = table_sizes_[1];
      const double s = (x[0] - std::floor(x[0])) * n0;
      int i = static_cast<int>(std::floor(s));
      const double t = s - i;
      i %= n0;
      const int j = (i + 1) % n0;
      std::span<const double> all(table_);
      const double a = periodic_interp_1d(all.subspan(static_cast<std::size_t>(i) * n1, n1), x[1]);
      const double b = periodic_interp_1d(all.subspan(static_cast<std::size_t>(j) * n1, n1), x[1]);
      return (1.0 - t) * a + t * b;
    }
  }
  return 0.0;
}

std::string to_string(Family family) {
  switch (family) {
    case Family::mechanical:
      return "mechanical";
    case Family::transport:
      return "transport";
    case Family::tabulated:
      return "tabulated";
  }
  return "unknown";
}

Family family_from_string(const std::string& name) {
  if (name == "mechanical") return Family::mechanical;
  if (name == "transport") return Family::transport;
  if (name == "tabulated") return Family::tabulated;
  throw ConfigError("unknown Lagrangian family '" + name + "'");
}

LagrangianSpec LagrangianSpec::mechanical(int dim, Potential potential) {
  if (dim != 1 && dim != 2) throw InvalidArgument("Lagrangian dimension must be 1 or 2");
  LagrangianSpec s;
  s.family_ = Family::mechanical;
  s.dim_ = dim;
  s.potential_ = std::move(potential);
  s.v_search_ = std::numeric_limits<double>::infinity();
  return s;
}

LagrangianSpec LagrangianSpec::transport(int dim, Point drift, Potential potential) {
  LagrangianSpec s = mechanical(dim, std::move(potential));
  s.family_ = Family::transport;
  if (dim == 1) drift[1] = 0.0;
  s.drift_ = drift;
  return s;
}

LagrangianSpec LagrangianSpec::tabulated(int dim, Potential potential) {
  LagrangianSpec s = mechanical(dim, std::move(potential));
  s.family_ = Family::tabulated;
  return s;
}

LagrangianSpec LagrangianSpec::with_momentum_box(double half_width, double step) const {
  if (!(half_width > 0.0) || !(step > 0.0)) {
    throw InvalidArgument("momentum box half-width and step must be positive");
  }
  LagrangianSpec s = *this;
  const auto cells = static_cast<long>(std::ceil(half_width / step));
  s.momentum_half_width_ = cells * step;
  s.momentum_step_ = step;
  s.momentum_grid_.resize(2 * cells + 1);
  for (long i = -cells; i <= cells; ++i) s.momentum_grid_[i + cells] = i * step;
  return s;
}

LagrangianSpec LagrangianSpec::with_search_box(double v_search) const {
  if (!(v_search > 0.0)) throw InvalidArgument("velocity search box must be positive");
  LagrangianSpec s = *this;
  s.v_search_ = v_search;
  return s;
}

double LagrangianSpec::kinetic_conjugate(double v) const {
  if (momentum_grid_.empty()) {
    throw InvalidArgument("tabulated Lagrangian needs a momentum box (with_momentum_box)");
  }
  // The sampled objective p·v − ½p² is concave along the grid, so its
  // maximiser is the first node where the forward difference turns negative.
  const auto objective = [&](std::size_t j) {
    const double p = momentum_grid_[j];
    return p * v - 0.5 * p * p;
  };
  std::size_t lo = 0;
  std::size_t hi = momentum_grid_.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (objective(mid + 1) > objective(mid)) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return objective(lo);
}

double LagrangianSpec::lagrangian(const Point& x, const Point& v) const {
  const double V = potential_(x, dim_);
  switch (family_) {
    case Family::mechanical:
      return 0.5 * (v[0] * v[0] + v[1] * v[1]) - V;
    case Family::transport: {
      const double a = v[0] - drift_[0];
      const double b = v[1] - drift_[1];
      return 0.5 * (a * a + b * b) - V;
    }
    case Family::tabulated: {
      double k = 0.0;
      for (int a = 0; a < dim_; ++a) k += kinetic_conjugate(v[a]);
      return k - V;
    }
  }
  return 0.0;
}

double LagrangianSpec::hamiltonian(const Point& x, const Point& p) const {
  const double V = potential_(x, dim_);
  const double kinetic = 0.5 * (p[0] * p[0] + p[1] * p[1]);
  if (family_ == Family::transport) return kinetic + drift_[0] * p[0] + drift_[1] * p[1] + V;
  return kinetic + V;
}

double eval_lagrangian(const LagrangianSpec& spec, const Point& x, const Point& v) {
  const double speed = norm(v);
  if (speed > spec.v_search()) {
    throw BoundViolation("velocity " + std::to_string(speed) + " exceeds the search box " +
                         std::to_string(spec.v_search()));
  }
  return spec.lagrangian(x, v);
}

LegendreResult legendre_transform_report(std::span<const double> h_samples,
                                         std::span<const Point> p_grid,
                                         std::span<const Point> v_grid, int dim) {
  if (h_samples.size() != p_grid.size() || p_grid.empty()) {
    throw InvalidArgument("legendre_transform: need one finite sample per momentum node");
  }
  for (double h : h_samples) {
    if (!std::isfinite(h)) throw InvalidArgument("legendre_transform: non-finite sample");
  }
  Point lo{0.0, 0.0};
  Point hi{0.0, 0.0};
  for (int a = 0; a < dim; ++a) {
    lo[a] = hi[a] = p_grid[0][a];
    for (const Point& p : p_grid) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  }
  LegendreResult out;
  out.values.resize(v_grid.size());
  out.argmax.resize(v_grid.size());
  for (std::size_t i = 0; i < v_grid.size(); ++i) {
    const Point& v = v_grid[i];
    double best = -std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t j = 0; j < p_grid.size(); ++j) {
      const double val = p_grid[j][0] * v[0] + p_grid[j][1] * v[1] - h_samples[j];
      if (val > best) {
        best = val;
        arg = j;
      }
    }
    out.values[i] = best;
    out.argmax[i] = arg;
    for (int a = 0; a < dim; ++a) {
      if (p_grid[arg][a] == lo[a] || p_grid[arg][a] == hi[a]) {
        out.truncated.push_back(i);
        break;
      }
    }
  }
  return out;
}

std::vector<double> legendre_transform(std::span<const double> h_samples,
                                       std::span<const Point> p_grid,
                                       std::span<const Point> v_grid, int dim) {
  LegendreResult r = legendre_transform_report(h_samples, p_grid, v_grid, dim);
  if (!r.truncated.empty()) {
    const Point& v = v_grid[r.truncated.front()];
    throw TruncationError("momentum grid too narrow: maximiser on the boundary for v = (" +
                          std::to_string(v[0]) + ", " + std::to_string(v[1]) + ")");
  }
  return std::move(r.values);
}

std::vector<double> legendre_transform(std::span<const double> h_samples,
                                       std::span<const double> p_grid,
                                       std::span<const double> v_grid) {
  std::vector<Point> p(p_grid.size());
  std::vector<Point> v(v_grid.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = {p_grid[i], 0.0};
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = {v_grid[i], 0.0};
  return legendre_transform(h_samples, p, v, 1);
}

}  // namespace weakkam
