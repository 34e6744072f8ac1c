#include "weakkam/mather.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "weakkam/error.hpp"
#include "weakkam/parallel.hpp"
#include "weakkam/simplex.hpp"

namespace weakkam {
namespace {

constexpr std::size_t kTargetBlock = 8;

// Circulation constraints: one conservation row per node, then the mass row,
// then (optionally) the near-optimality band with its slack column last.
std::shared_ptr<lp::Problem> circulation_problem(const ActionKernel& kernel, bool with_band,
                                                 double c_est, double eps_c) {
  const std::size_t n = kernel.node_count();
  const std::size_t S = kernel.edges_per_node();
  auto p = std::make_shared<lp::Problem>();
  p->rows = n + 1 + (with_band ? 1 : 0);
  p->rhs.assign(p->rows, 0.0);
  p->rhs[n] = 1.0;
  if (with_band) p->rhs[n + 1] = eps_c;
  p->columns.resize(n * S + (with_band ? 1 : 0));
  for (NodeIndex x = 0; x < n; ++x) {
    for (std::size_t j = 0; j < S; ++j) {
      auto& entries = p->columns[kernel.edge(x, j)].entries;
      const NodeIndex y = kernel.head(x, j);
      if (y != x) {
        // row order keeps entries sorted for a fixed pivot sequence
        if (x < y) {
          entries.emplace_back(x, -1.0);
          entries.emplace_back(y, 1.0);
        } else {
          entries.emplace_back(y, 1.0);
          entries.emplace_back(x, -1.0);
        }
      }
      entries.emplace_back(n, 1.0);
      if (with_band) entries.emplace_back(n + 1, kernel.lagrangian(x, j) + c_est);
    }
  }
  if (with_band) p->columns.back().entries.emplace_back(n + 1, 1.0);
  return p;
}

// Self-loops and nearest-neighbour steps; the solver activates further
// columns by pricing.
std::vector<std::size_t> seed_columns(const ActionKernel& kernel, bool with_band) {
  std::vector<std::size_t> seed;
  const VelocityStencil& st = kernel.stencil();
  for (NodeIndex x = 0; x < kernel.node_count(); ++x) {
    for (std::size_t j = 0; j < st.size(); ++j) {
      if (std::abs(st.offsets[j][0]) <= 1 && std::abs(st.offsets[j][1]) <= 1) {
        seed.push_back(kernel.edge(x, j));
      }
    }
  }
  if (with_band) seed.push_back(kernel.edge_count());
  return seed;
}

OccupationMeasure measure_from(const ActionKernel& kernel, const std::vector<double>& x) {
  OccupationMeasure m;
  const std::size_t S = kernel.edges_per_node();
  const std::size_t edges = kernel.edge_count();
  for (std::size_t e = 0; e < edges; ++e) {
    if (x[e] > 0.0) m.entries.push_back({e / S, e % S, x[e]});
  }
  return m;
}

}  // namespace

OccupationMeasure MeanCycle::measure() const {
  OccupationMeasure m;
  const double w = 1.0 / static_cast<double>(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) m.entries.push_back({nodes[i], offsets[i], w});
  return m;
}

MeanCycle min_mean_cycle(const ActionKernel& kernel) {
  const std::size_t n = kernel.node_count();
  const std::size_t S = kernel.edges_per_node();
  const double inf = std::numeric_limits<double>::infinity();
  // D[k][v]: minimal cost of a k-edge walk ending at v from any start.
  std::vector<double> D((n + 1) * n, inf);
  std::vector<std::size_t> pred_offset((n + 1) * n, 0);
  std::fill(D.begin(), D.begin() + static_cast<std::ptrdiff_t>(n), 0.0);
  for (std::size_t k = 1; k <= n; ++k) {
    const double* prev = D.data() + (k - 1) * n;
    double* cur = D.data() + k * n;
    std::size_t* pred = pred_offset.data() + k * n;
    for (NodeIndex v = 0; v < n; ++v) {
      double best = inf;
      std::size_t arg = 0;
      for (std::size_t j = 0; j < S; ++j) {
        const NodeIndex u = kernel.tail_into(v, j);
        if (prev[u] == inf) continue;
        const double c = prev[u] + kernel.lagrangian(u, j);
        if (c < best) {
          best = c;
          arg = j;
        }
      }
      cur[v] = best;
      pred[v] = arg;
    }
  }
  double karp = inf;
  NodeIndex best_v = 0;
  for (NodeIndex v = 0; v < n; ++v) {
    const double dn = D[n * n + v];
    if (dn == inf) continue;
    double worst = -inf;
    for (std::size_t k = 0; k < n; ++k) {
      const double dk = D[k * n + v];
      if (dk == inf) continue;
      worst = std::max(worst, (dn - dk) / static_cast<double>(n - k));
    }
    if (worst < karp) {
      karp = worst;
      best_v = v;
    }
  }
  if (karp == inf) throw Error("min_mean_cycle: kernel graph has no cycle");

  // Walk the optimal n-edge walk backwards; any cycle on it is optimal.
  std::vector<NodeIndex> walk(n + 1);
  std::vector<std::size_t> walk_offset(n + 1, 0);
  walk[n] = best_v;
  for (std::size_t k = n; k >= 1; --k) {
    const std::size_t j = pred_offset[k * n + walk[k]];
    walk_offset[k] = j;
    walk[k - 1] = kernel.tail_into(walk[k], j);
  }
  std::vector<std::ptrdiff_t> last_seen(n, -1);
  std::size_t start = 0;
  std::size_t stop = 0;
  for (std::size_t k = 0; k <= n; ++k) {
    if (last_seen[walk[k]] >= 0) {
      start = static_cast<std::size_t>(last_seen[walk[k]]);
      stop = k;
      break;
    }
    last_seen[walk[k]] = static_cast<std::ptrdiff_t>(k);
  }
  MeanCycle cycle;
  cycle.karp_value = karp;
  double total = 0.0;
  for (std::size_t k = start; k < stop; ++k) {
    const std::size_t j = walk_offset[k + 1];
    cycle.nodes.push_back(walk[k]);
    cycle.offsets.push_back(j);
    total += kernel.lagrangian(walk[k], j);
  }
  cycle.mean = total / static_cast<double>(cycle.nodes.size());
  return cycle;
}

MatherSolveResult solve_mather_lp(const ActionKernel& kernel) {
  auto problem = circulation_problem(kernel, false, 0.0, 0.0);
  lp::RevisedSimplex simplex(problem, {}, seed_columns(kernel, false));
  const std::vector<double>& costs = kernel.lagrangians();
  if (simplex.optimize(costs) != lp::Status::optimal) {
    throw Error("Mather LP did not reach optimality");
  }
  MatherSolveResult r;
  r.measure = measure_from(kernel, simplex.solution());
  r.value = r.measure.action(kernel);
  r.support = r.measure.entries;
  r.projected = r.measure.projected(kernel);
  r.conservation_residual = closedness_residual(r.measure, kernel);
  r.iterations = simplex.iterations();
  return r;
}

double default_eps_c(double c_est, double min_mean) {
  return 10.0 * std::abs(c_est + min_mean) + 1e-6;
}

LimitFunctionResult compute_u0(const BarrierMatrix& h, const ActionKernel& kernel, double c_est,
                               double eps_c, const std::vector<NodeIndex>& targets) {
  const std::size_t n = kernel.node_count();
  if (h.size() != n) throw InvalidArgument("compute_u0: barrier does not match the kernel");
  if (!(eps_c >= 0.0)) throw InvalidArgument("compute_u0: eps_c must be non-negative");
  for (NodeIndex x : targets) {
    if (x >= n) throw InvalidArgument("compute_u0: target outside the grid");
  }
  auto problem = circulation_problem(kernel, true, c_est, eps_c);
  std::unique_ptr<lp::RevisedSimplex> base;
  try {
    base = std::make_unique<lp::RevisedSimplex>(problem, lp::Options{},
                                                 seed_columns(kernel, true));
  } catch (const InfeasibleError&) {
    throw InfeasibleError("no closed measure has action <= -c_est + eps_c; increase eps_c (" +
                          std::to_string(eps_c) + ")");
  }
  std::vector<double> mather_costs = kernel.lagrangians();
  mather_costs.push_back(0.0);
  if (base->optimize(mather_costs) != lp::Status::optimal) {
    throw Error("compute_u0: Mather objective did not reach optimality");
  }

  LimitFunctionResult out;
  out.method = "lp";
  out.eps = eps_c;
  out.targets = targets;
  out.values.assign(n, std::numeric_limits<double>::quiet_NaN());
  out.certificates.resize(targets.size());
  const std::size_t S = kernel.edges_per_node();
  std::vector<double> values(targets.size());
  // Targets are processed in fixed blocks; inside a block each program
  // starts from the previous target's optimal basis. Block boundaries do not
  // depend on the worker count.
  const std::size_t blocks = (targets.size() + kTargetBlock - 1) / kTargetBlock;
  parallel_for(blocks, [&](std::size_t begin, std::size_t end) {
    std::vector<double> costs(kernel.edge_count() + 1, 0.0);
    for (std::size_t block = begin; block < end; ++block) {
      lp::RevisedSimplex simplex = *base;
      const std::size_t last = std::min(targets.size(), (block + 1) * kTargetBlock);
      for (std::size_t t = block * kTargetBlock; t < last; ++t) {
        const NodeIndex x = targets[t];
        for (std::size_t e = 0; e < kernel.edge_count(); ++e) {
          const double v = h(e / S, x);
          if (!std::isfinite(v)) throw Error("compute_u0: barrier has an infinite entry");
          costs[e] = v;
        }
        if (simplex.optimize(costs) != lp::Status::optimal) {
          throw Error("compute_u0: target program did not reach optimality");
        }
        out.certificates[t] = measure_from(kernel, simplex.solution());
        values[t] = simplex.objective(costs);
      }
    }
  });
  for (std::size_t t = 0; t < targets.size(); ++t) out.values[targets[t]] = values[t];
  return out;
}

LimitFunctionResult u0_mechanical(const BarrierMatrix& h, const ActionKernel& kernel,
                                  const LagrangianSpec& spec, double c_est, double eps) {
  if (!spec.minimized_at_zero_velocity()) {
    throw InvalidArgument("u0_mechanical requires a Lagrangian minimised at zero velocity");
  }
  const std::size_t n = kernel.node_count();
  const std::size_t zero = kernel.stencil().zero_index;
  LimitFunctionResult out;
  out.method = "mechanical-shortcut";
  out.eps = eps;
  for (NodeIndex y = 0; y < n; ++y) {
    if (std::abs(kernel.lagrangian(y, zero) + c_est) <= eps) out.base_nodes.push_back(y);
  }
  if (out.base_nodes.empty()) {
    throw InvalidArgument("u0_mechanical: no node has |L(y,0) + c| <= eps");
  }
  out.values.assign(n, std::numeric_limits<double>::infinity());
  out.targets.resize(n);
  for (NodeIndex x = 0; x < n; ++x) {
    out.targets[x] = x;
    for (NodeIndex y : out.base_nodes) out.values[x] = std::min(out.values[x], h(y, x));
  }
  return out;
}

}  // namespace weakkam
