#include "weakkam/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "weakkam/error.hpp"

namespace weakkam {
namespace {

std::vector<Point> spatial_samples(const TorusGrid& grid, int density) {
  const int m0 = grid.size(0) * density;
  const int m1 = grid.dim() == 2 ? grid.size(1) * density : 1;
  std::vector<Point> xs;
  xs.reserve(static_cast<std::size_t>(m0) * m1);
  for (int i = 0; i < m0; ++i) {
    for (int j = 0; j < m1; ++j) {
      xs.push_back({static_cast<double>(i) / m0, grid.dim() == 2 ? static_cast<double>(j) / m1 : 0.0});
    }
  }
  return xs;
}

std::vector<Point> momentum_directions(int dim, int rays) {
  if (dim == 1) return {{1.0, 0.0}, {-1.0, 0.0}};
  std::vector<Point> dirs;
  for (int k = 0; k < rays; ++k) {
    const double t = 2.0 * std::numbers::pi * k / rays;
    dirs.push_back({std::cos(t), std::sin(t)});
  }
  return dirs;
}

// sup{r ≥ 0 : H(x, r e) ≤ c}, or -1 when the ray misses the sublevel.
double ray_extent(const LagrangianSpec& spec, const Point& x, const Point& e, double c,
                  int samples) {
  const auto H = [&](double r) { return spec.hamiltonian(x, {r * e[0], r * e[1]}); };
  double r_hi = 1.0;
  while (H(r_hi) <= c) {
    r_hi *= 2.0;
    if (r_hi > 1e8) throw InvalidArgument("Hamiltonian is not coercive along a sampled ray");
  }
  int last_in = -1;
  for (int j = 0; j <= samples; ++j) {
    if (H(r_hi * j / samples) <= c) last_in = j;
  }
  if (last_in < 0) return -1.0;
  double lo = r_hi * last_in / samples;
  double hi = r_hi * (last_in + 1) / samples;
  for (int it = 0; it < 80 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (H(mid) <= c) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

struct VelocityScan {
  double max_excess = -std::numeric_limits<double>::infinity();
  double min_lagrangian = std::numeric_limits<double>::infinity();
  bool on_boundary = false;
};

VelocityScan scan_velocities(const LagrangianSpec& spec, const std::vector<Point>& xs,
                             double kappa, double half_width, int samples) {
  const int dim = spec.dim();
  VelocityScan scan;
  std::vector<double> axis(samples);
  for (int i = 0; i < samples; ++i) {
    axis[i] = -half_width + 2.0 * half_width * i / (samples - 1);
  }
  const int m1 = dim == 2 ? samples : 1;
  for (const Point& x : xs) {
    for (int i = 0; i < samples; ++i) {
      for (int j = 0; j < m1; ++j) {
        const Point v{axis[i], dim == 2 ? axis[j] : 0.0};
        const double L = spec.lagrangian(x, v);
        const double excess = (kappa + 1.0) * std::hypot(v[0], v[1]) - L;
        scan.min_lagrangian = std::min(scan.min_lagrangian, L);
        if (excess > scan.max_excess) {
          scan.max_excess = excess;
          scan.on_boundary = i == 0 || i == samples - 1 || (dim == 2 && (j == 0 || j == m1 - 1));
        }
      }
    }
  }
  return scan;
}

}  // namespace

double critical_value_upper_bound(const LagrangianSpec& spec, const TorusGrid& grid,
                                  int density) {
  double c = -std::numeric_limits<double>::infinity();
  for (const Point& x : spatial_samples(grid, density)) {
    c = std::max(c, spec.hamiltonian(x, {0.0, 0.0}));
  }
  return c;
}

StabilityBounds stability_bounds(const LagrangianSpec& spec, double c, const TorusGrid& grid,
                                 const SamplingOptions& options) {
  if (spec.dim() != grid.dim()) throw InvalidArgument("spec and grid dimensions differ");
  const std::vector<Point> xs = spatial_samples(grid, options.density);
  const std::vector<Point> dirs = momentum_directions(spec.dim(), options.momentum_rays_2d);

  StabilityBounds b;
  b.level = c;
  bool found = false;
  for (const Point& x : xs) {
    for (const Point& e : dirs) {
      const double r = ray_extent(spec, x, e, c, options.ray_samples);
      if (r >= 0.0) {
        found = true;
        b.kappa = std::max(b.kappa, r);
      }
    }
  }
  if (!found) {
    throw NoSublevel("no sampled momentum satisfies H(x,p) <= " + std::to_string(c));
  }

  LagrangianSpec sampled = spec;
  if (spec.family() == Family::tabulated && !spec.momentum_half_width()) {
    sampled = spec.with_momentum_box(b.kappa + 1.0);
  }
  const double drift = std::hypot(spec.drift()[0], spec.drift()[1]);
  double half_width = 2.0 * (b.kappa + 1.0) + drift + 1.0;
  const int samples = spec.dim() == 1 ? options.velocity_samples : options.velocity_samples_2d;
  VelocityScan scan = scan_velocities(sampled, xs, b.kappa, half_width, samples);
  for (int grow = 0; grow < 10 && scan.on_boundary; ++grow) {
    half_width *= 2.0;
    scan = scan_velocities(sampled, xs, b.kappa, half_width, samples);
  }
  b.A_kappa = scan.max_excess;

  double rest = -std::numeric_limits<double>::infinity();
  for (const Point& x : xs) rest = std::max(rest, sampled.lagrangian(x, {0.0, 0.0}) + c);
  b.C0 = std::max(std::abs(scan.min_lagrangian + c), rest);
  b.alpha = b.A_kappa + b.C0;
  b.v_search = 2.0 * b.alpha;
  return b;
}

LagrangianSpec configure_spec(const LagrangianSpec& spec, const StabilityBounds& bounds) {
  LagrangianSpec s = spec.with_search_box(bounds.v_search);
  if (s.family() == Family::tabulated && !s.momentum_half_width()) {
    s = s.with_momentum_box(bounds.kappa + 1.0);
  }
  return s;
}

Point VelocityStencil::velocity(const TorusGrid& grid, std::size_t j) const {
  const Offset& k = offsets.at(j);
  Point v{0.0, 0.0};
  for (int a = 0; a < grid.dim(); ++a) v[a] = k[a] * grid.spacing(a) / tau;
  return v;
}

double VelocityStencil::max_speed(const TorusGrid& grid) const {
  double s = 0.0;
  for (std::size_t j = 0; j < offsets.size(); ++j) {
    const Point v = velocity(grid, j);
    s = std::max(s, std::hypot(v[0], v[1]));
  }
  return s;
}

VelocityStencil make_stencil(const TorusGrid& grid, double tau, int radius) {
  if (!(tau > 0.0)) throw InvalidArgument("stencil time step must be positive");
  if (radius < 0) throw InvalidArgument("stencil radius must be non-negative");
  VelocityStencil s;
  s.tau = tau;
  s.radius = radius;
  const int r1 = grid.dim() == 2 ? radius : 0;
  for (int i = -radius; i <= radius; ++i) {
    for (int j = -r1; j <= r1; ++j) {
      if (i == 0 && j == 0) s.zero_index = s.offsets.size();
      s.offsets.push_back({i, j});
    }
  }
  return s;
}

VelocityStencil default_stencil(const TorusGrid& grid, double alpha) {
  if (!(alpha > 0.0)) throw InvalidArgument("velocity bound alpha must be positive");
  const double tau = std::sqrt(grid.max_spacing());
  int radius = static_cast<int>(std::ceil(alpha * tau / grid.min_spacing()));
  const int limit = (grid.min_size() - 1) / 2;
  bool capped = false;
  if (radius > limit) {
    radius = limit;
    capped = true;
  }
  VelocityStencil s = make_stencil(grid, tau, std::max(radius, 1));
  s.radius_capped = capped;
  return s;
}

}  // namespace weakkam
