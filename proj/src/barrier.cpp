#include "weakkam/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "weakkam/error.hpp"
#include "weakkam/parallel.hpp"

namespace weakkam {

DenseMatrix kernel_matrix(const ActionKernel& kernel) {
  const std::size_t n = kernel.node_count();
  DenseMatrix m(n);
  for (NodeIndex x = 0; x < n; ++x) {
    for (std::size_t j = 0; j < kernel.edges_per_node(); ++j) {
      double& entry = m(x, kernel.head(x, j));
      entry = std::min(entry, kernel.cost(x, j));
    }
  }
  return m;
}

BarrierMatrix minplus_power(const ActionKernel& kernel, std::size_t n) {
  BarrierMatrix b;
  b.values = minplus_power(kernel_matrix(kernel), n);
  b.kind = BarrierMatrix::Kind::finite_horizon;
  b.steps = n;
  b.tau = kernel.tau();
  b.shift = kernel.shift();
  return b;
}

std::size_t default_burn_in(const TorusGrid& grid) {
  int n = grid.size(0);
  if (grid.dim() == 2) n = std::max(n, grid.size(1));
  return 4 * static_cast<std::size_t>(n);
}

BarrierMatrix peierls_barrier(const ActionKernel& kernel, std::size_t burn_in,
                              std::size_t horizon, double tol) {
  if (burn_in == 0 || horizon < burn_in) {
    throw InvalidArgument("peierls_barrier: need 1 <= burn_in <= horizon");
  }
  const DenseMatrix k = kernel_matrix(kernel);
  const DenseMatrix head = minplus_power(k, burn_in);
  const std::size_t width = horizon - burn_in;
  const DenseMatrix window = minplus_window_power(k, width);
  // head ⊗ (I ⊕ K)^w = min over n in [N0, N0 + w] of K^n
  DenseMatrix values = minplus_product(head, window);
  DenseMatrix doubled = minplus_product(values, window);
  if (width == 0) doubled = elementwise_min(values, minplus_product(values, k));

  BarrierMatrix b;
  b.kind = BarrierMatrix::Kind::peierls;
  b.burn_in = burn_in;
  b.horizon = horizon;
  b.residual = sup_difference(values, doubled);
  b.stable = b.residual <= tol;
  b.values = std::move(values);
  b.tau = kernel.tau();
  b.shift = kernel.shift();
  return b;
}

std::vector<NodeIndex> aubry_set(const BarrierMatrix& h, double eps) {
  std::vector<NodeIndex> nodes;
  for (NodeIndex y = 0; y < h.size(); ++y) {
    if (h(y, y) <= eps) nodes.push_back(y);
  }
  if (nodes.empty()) {
    throw EmptyAubrySet("no node has h(y,y) <= " + std::to_string(eps) +
                        "; the critical shift or eps is misconfigured");
  }
  return nodes;
}

DenseMatrix mather_distance(const BarrierMatrix& h, const std::vector<NodeIndex>& nodes) {
  DenseMatrix d(nodes.size());
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    for (std::size_t b = a; b < nodes.size(); ++b) {
      const double v = h(nodes[a], nodes[b]) + h(nodes[b], nodes[a]);
      d(a, b) = v;
      d(b, a) = v;
    }
  }
  return d;
}

std::vector<std::vector<NodeIndex>> mather_classes(const BarrierMatrix& h,
                                                   const std::vector<NodeIndex>& aubry,
                                                   double eps) {
  if (aubry.empty()) throw EmptyAubrySet("mather_classes: empty Aubry set");
  std::vector<std::size_t> parent(aubry.size());
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](std::size_t a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  };
  const DenseMatrix d = mather_distance(h, aubry);
  for (std::size_t a = 0; a < aubry.size(); ++a) {
    for (std::size_t b = a + 1; b < aubry.size(); ++b) {
      if (d(a, b) <= eps) {
        const std::size_t ra = find(a);
        const std::size_t rb = find(b);
        if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
      }
    }
  }
  std::vector<std::vector<NodeIndex>> classes;
  std::vector<std::size_t> slot(aubry.size(), SIZE_MAX);
  for (std::size_t a = 0; a < aubry.size(); ++a) {
    const std::size_t r = find(a);
    if (slot[r] == SIZE_MAX) {
      slot[r] = classes.size();
      classes.emplace_back();
    }
    classes[slot[r]].push_back(aubry[a]);
  }
  return classes;
}

double default_class_eps(const BarrierMatrix& h, const ActionKernel& kernel,
                         const std::vector<NodeIndex>& aubry) {
  const TorusGrid& grid = kernel.grid();
  double slope = 0.0;
  for (NodeIndex y : aubry) {
    for (NodeIndex z : grid.neighbours(y)) {
      const double d = grid.distance(y, z);
      slope = std::max({slope, std::abs(h(y, z)) / d, std::abs(h(z, y)) / d});
    }
  }
  return 10.0 * (grid.max_spacing() + kernel.tau()) * slope;
}

AubryReport analyse_aubry(const BarrierMatrix& h, const ActionKernel& kernel, double eps_aubry,
                          double eps_class) {
  AubryReport r;
  r.eps_aubry = eps_aubry;
  r.nodes = aubry_set(h, eps_aubry);
  r.diagonal.resize(h.size());
  for (NodeIndex y = 0; y < h.size(); ++y) r.diagonal[y] = h(y, y);
  r.eps_class = eps_class > 0.0 ? eps_class : default_class_eps(h, kernel, r.nodes);
  r.classes = mather_classes(h, r.nodes, r.eps_class);
  r.delta = mather_distance(h, r.nodes);
  return r;
}

double verify_subsolution(std::span<const double> u, const ActionKernel& kernel) {
  if (u.size() != kernel.node_count()) {
    throw InvalidArgument("verify_subsolution: function size does not match the kernel");
  }
  double worst = -kInfinity;
  for (NodeIndex y = 0; y < kernel.node_count(); ++y) {
    for (std::size_t j = 0; j < kernel.edges_per_node(); ++j) {
      const NodeIndex x = kernel.head(y, j);
      worst = std::max(worst, u[x] - u[y] - kernel.cost(y, j));
    }
  }
  return worst;
}

double fixed_point_residual(const BarrierMatrix& h, const ActionKernel& kernel) {
  const std::size_t n = kernel.node_count();
  std::vector<double> worst(n, 0.0);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    std::vector<double> next(n);
    for (NodeIndex y = begin; y < end; ++y) {
      std::fill(next.begin(), next.end(), kInfinity);
      for (NodeIndex z = 0; z < n; ++z) {
        const double hz = h(y, z);
        if (hz == kInfinity) continue;
        for (std::size_t j = 0; j < kernel.edges_per_node(); ++j) {
          const NodeIndex x = kernel.head(z, j);
          next[x] = std::min(next[x], hz + kernel.cost(z, j));
        }
      }
      for (NodeIndex x = 0; x < n; ++x) {
        if (next[x] == h(y, x)) continue;
        if (!std::isfinite(next[x]) || !std::isfinite(h(y, x))) {
          worst[y] = kInfinity;
        } else {
          worst[y] = std::max(worst[y], std::abs(next[x] - h(y, x)));
        }
      }
    }
  });
  return *std::max_element(worst.begin(), worst.end());
}

}  // namespace weakkam
