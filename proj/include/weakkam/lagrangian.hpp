#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "weakkam/grid.hpp"

namespace weakkam {

/// Potential V(x) on the torus: zero, a sum of cosines, or a node table with
/// periodic multilinear interpolation.
class Potential {
 public:
  enum class Kind { zero, cosine, table };

  static Potential zero();
  /// V(x) = amplitude * sum_a cos(2π frequency x_a).
  static Potential cosine(double amplitude, int frequency);
  /// Node values on `grid`, row-major as in TorusGrid.
  static Potential table(const TorusGrid& grid, std::vector<double> values);

  Kind kind() const noexcept { return kind_; }
  double amplitude() const noexcept { return amplitude_; }
  int frequency() const noexcept { return frequency_; }
  const std::vector<double>& values() const noexcept { return table_; }
  const std::array<int, 2>& table_sizes() const noexcept { return table_sizes_; }

  double operator()(const Point& x, int dim) const;

 private:
  Kind kind_ = Kind::zero;
  double amplitude_ = 0.0;
  int frequency_ = 1;
  int table_dim_ = 1;
  std::array<int, 2> table_sizes_{1, 1};
  std::vector<double> table_;
};

enum class Family { mechanical, transport, tabulated };

std::string to_string(Family family);
Family family_from_string(const std::string& name);

/// A Lagrangian L(x,v) with its Hamiltonian H(x,p).
///
///   mechanical:  L = ½|v|² − V(x),        H = ½|p|² + V(x)
///   transport:   L = ½|v − ω|² − V(x),    H = ½|p|² + ω·p + V(x)
///   tabulated:   H = ½|p|² + V(x) sampled on a momentum box, and L is its
///                numerical Fenchel transform on that box.
class LagrangianSpec {
 public:
  static LagrangianSpec mechanical(int dim, Potential potential);
  static LagrangianSpec transport(int dim, Point drift, Potential potential = Potential::zero());
  static LagrangianSpec tabulated(int dim, Potential potential);

  Family family() const noexcept { return family_; }
  int dim() const noexcept { return dim_; }
  const Potential& potential() const noexcept { return potential_; }
  const Point& drift() const noexcept { return drift_; }

  /// Closed form (or transformed table); no search-box check.
  double lagrangian(const Point& x, const Point& v) const;
  double hamiltonian(const Point& x, const Point& p) const;

  /// True when argmin_v L(x,·) = 0 at every x.
  bool minimized_at_zero_velocity() const noexcept { return family_ != Family::transport; }

  /// Momentum box used by the tabulated family's transform.
  LagrangianSpec with_momentum_box(double half_width, double step = 1e-3) const;
  std::optional<double> momentum_half_width() const noexcept { return momentum_half_width_; }

  LagrangianSpec with_search_box(double v_search) const;
  /// Half-width of the admissible velocity box (infinite when unset).
  double v_search() const noexcept { return v_search_; }

 private:
  double kinetic_conjugate(double v) const;

  Family family_ = Family::mechanical;
  int dim_ = 1;
  Potential potential_;
  Point drift_{0.0, 0.0};
  std::optional<double> momentum_half_width_;
  double momentum_step_ = 1e-3;
  std::vector<double> momentum_grid_;
  double v_search_ = std::numeric_limits<double>::infinity();
};

/// L(x,v) with ‖v‖ ≤ v_search enforced; throws BoundViolation otherwise.
double eval_lagrangian(const LagrangianSpec& spec, const Point& x, const Point& v);

/// Result of a discrete Fenchel transform.
struct LegendreResult {
  std::vector<double> values;
  /// Index into the momentum grid of the maximiser for each velocity.
  std::vector<std::size_t> argmax;
  /// Velocities whose maximiser lies on the boundary of the momentum grid.
  std::vector<std::size_t> truncated;
};

/// L(v) = max over p_grid of p·v − H(p) for each v in v_grid. Never throws on
/// truncation; inspect `truncated`.
LegendreResult legendre_transform_report(std::span<const double> h_samples,
                                         std::span<const Point> p_grid,
                                         std::span<const Point> v_grid, int dim);

/// Same as legendre_transform_report but throws TruncationError if any
/// maximiser lands on the boundary of p_grid.
std::vector<double> legendre_transform(std::span<const double> h_samples,
                                       std::span<const Point> p_grid,
                                       std::span<const Point> v_grid, int dim);

/// One-dimensional convenience overload.
std::vector<double> legendre_transform(std::span<const double> h_samples,
                                       std::span<const double> p_grid,
                                       std::span<const double> v_grid);

}  // namespace weakkam
