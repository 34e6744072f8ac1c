#include "weakkam/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "weakkam/error.hpp"

namespace weakkam {
namespace {

int wrap(int value, int n) {
  const int r = value % n;
  return r < 0 ? r + n : r;
}

}  // namespace

TorusGrid::TorusGrid(int dim, std::array<int, 2> sizes) : dim_(dim), sizes_(sizes) {
  count_ = static_cast<std::size_t>(sizes_[0]) * static_cast<std::size_t>(sizes_[1]);
}

TorusGrid TorusGrid::build(int dim, std::span<const int> sizes) {
  if (dim != 1 && dim != 2) {
    throw InvalidArgument("grid dimension must be 1 or 2, got " + std::to_string(dim));
  }
  if (sizes.size() != static_cast<std::size_t>(dim)) {
    throw InvalidArgument("expected " + std::to_string(dim) + " grid sizes, got " +
                          std::to_string(sizes.size()));
  }
  std::array<int, 2> n{1, 1};
  for (int a = 0; a < dim; ++a) {
    if (sizes[a] < 2) {
      throw InvalidArgument("grid size along axis " + std::to_string(a) +
                            " must be at least 2, got " + std::to_string(sizes[a]));
    }
    n[a] = sizes[a];
  }
  return TorusGrid(dim, n);
}

double TorusGrid::max_spacing() const {
  double h = 0.0;
  for (int a = 0; a < dim_; ++a) h = std::max(h, spacing(a));
  return h;
}

double TorusGrid::min_spacing() const {
  double h = 1.0;
  for (int a = 0; a < dim_; ++a) h = std::min(h, spacing(a));
  return h;
}

int TorusGrid::min_size() const {
  int n = sizes_[0];
  for (int a = 1; a < dim_; ++a) n = std::min(n, sizes_[a]);
  return n;
}

Offset TorusGrid::multi_index(NodeIndex node) const {
  if (dim_ == 1) return {static_cast<int>(node), 0};
  return {static_cast<int>(node / sizes_[1]), static_cast<int>(node % sizes_[1])};
}

NodeIndex TorusGrid::node_index(Offset index) const {
  const int i0 = wrap(index[0], sizes_[0]);
  if (dim_ == 1) return static_cast<NodeIndex>(i0);
  const int i1 = wrap(index[1], sizes_[1]);
  return static_cast<NodeIndex>(i0) * sizes_[1] + static_cast<NodeIndex>(i1);
}

Point TorusGrid::coordinate(NodeIndex node) const {
  const Offset idx = multi_index(node);
  Point p{0.0, 0.0};
  for (int a = 0; a < dim_; ++a) p[a] = static_cast<double>(idx[a]) / sizes_[a];
  return p;
}

NodeIndex TorusGrid::shift(NodeIndex node, Offset k) const {
  Offset idx = multi_index(node);
  for (int a = 0; a < dim_; ++a) idx[a] += k[a];
  return node_index(idx);
}

Offset TorusGrid::lattice_displacement(NodeIndex from, NodeIndex to) const {
  const Offset a = multi_index(from);
  const Offset b = multi_index(to);
  Offset d{0, 0};
  for (int axis = 0; axis < dim_; ++axis) {
    const int n = sizes_[axis];
    int r = wrap(b[axis] - a[axis], n);
    if (2 * r >= n) r -= n;
    d[axis] = r;
  }
  return d;
}

Point TorusGrid::displacement(NodeIndex from, NodeIndex to) const {
  const Offset d = lattice_displacement(from, to);
  Point p{0.0, 0.0};
  for (int a = 0; a < dim_; ++a) p[a] = static_cast<double>(d[a]) / sizes_[a];
  return p;
}

double TorusGrid::distance(NodeIndex a, NodeIndex b) const {
  const Point d = displacement(a, b);
  return std::hypot(d[0], d[1]);
}

std::vector<NodeIndex> TorusGrid::neighbours(NodeIndex node) const {
  std::vector<NodeIndex> out;
  for (int a = 0; a < dim_; ++a) {
    Offset k{0, 0};
    k[a] = 1;
    out.push_back(shift(node, k));
    k[a] = -1;
    out.push_back(shift(node, k));
  }
  return out;
}

double sup_norm(std::span<const double> values) {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double sup_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("sup_distance: size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double lipschitz_quotient(const TorusGrid& grid, std::span<const double> u) {
  if (u.size() != grid.node_count()) {
    throw InvalidArgument("lipschitz_quotient: function size does not match grid");
  }
  double q = 0.0;
  for (NodeIndex x = 0; x < grid.node_count(); ++x) {
    for (NodeIndex y : grid.neighbours(x)) {
      q = std::max(q, std::abs(u[x] - u[y]) / grid.distance(x, y));
    }
  }
  return q;
}

}  // namespace weakkam
