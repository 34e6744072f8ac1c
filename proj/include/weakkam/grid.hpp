#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace weakkam {

/// Point or vector in the (at most two-dimensional) torus; unused axes are 0.
using Point = std::array<double, 2>;
/// Integer lattice displacement; unused axes are 0.
using Offset = std::array<int, 2>;
using NodeIndex = std::size_t;

/// Periodic node lattice on [0,1)^d, d in {1,2}.
///
/// Node i along axis a sits at coordinate i / n_a. Nodes are numbered in
/// row-major order with axis 0 slowest.
class TorusGrid {
 public:
  /// Rejects dim outside {1,2}, a size list of the wrong length, or n_i < 2.
  static TorusGrid build(int dim, std::span<const int> sizes);

  int dim() const noexcept { return dim_; }
  int size(int axis) const { return sizes_[axis]; }
  double spacing(int axis) const { return 1.0 / sizes_[axis]; }
  /// Largest spacing over the active axes.
  double max_spacing() const;
  double min_spacing() const;
  int min_size() const;
  std::size_t node_count() const noexcept { return count_; }

  Offset multi_index(NodeIndex node) const;
  NodeIndex node_index(Offset index) const;  // wraps each axis periodically
  Point coordinate(NodeIndex node) const;

  /// node ⊕ k, with periodic wrap.
  NodeIndex shift(NodeIndex node, Offset k) const;

  /// Lattice displacement to ⊖ from, each axis in [-n/2, n/2).
  Offset lattice_displacement(NodeIndex from, NodeIndex to) const;
  /// Coordinate displacement to ⊖ from, each axis in [-1/2, 1/2).
  Point displacement(NodeIndex from, NodeIndex to) const;
  /// Euclidean length of the wrap-around displacement.
  double distance(NodeIndex a, NodeIndex b) const;

  /// Nearest-lattice neighbours (±1 along each active axis).
  std::vector<NodeIndex> neighbours(NodeIndex node) const;

  bool operator==(const TorusGrid&) const = default;

 private:
  TorusGrid(int dim, std::array<int, 2> sizes);

  int dim_ = 1;
  std::array<int, 2> sizes_{1, 1};
  std::size_t count_ = 1;
};

/// Real values on the nodes of a grid.
using GridFunction = std::vector<double>;

double sup_norm(std::span<const double> values);
double sup_distance(std::span<const double> a, std::span<const double> b);

/// max over nearest-neighbour pairs of |u(x) - u(y)| / d(x,y).
double lipschitz_quotient(const TorusGrid& grid, std::span<const double> u);

}  // namespace weakkam
