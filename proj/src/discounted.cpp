#include "weakkam/discounted.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "weakkam/error.hpp"
#include "weakkam/minplus.hpp"
#include "weakkam/parallel.hpp"

namespace weakkam {
namespace {

// Sweeps smaller than this many edge relaxations run on one thread.
constexpr std::size_t kParallelSweepWork = 1u << 18;

// Incoming edges of every node with their discounted one-step cost.
struct IncomingEdges {
  std::size_t per_node = 0;
  std::vector<NodeIndex> tail;
  std::vector<double> weighted_cost;
};

IncomingEdges incoming_edges(const ActionKernel& kernel, double lambda) {
  const double w = discounted_step_weight(lambda, kernel.tau());
  const std::size_t n = kernel.node_count();
  const std::size_t S = kernel.edges_per_node();
  IncomingEdges in;
  in.per_node = S;
  in.tail.resize(n * S);
  in.weighted_cost.resize(n * S);
  for (NodeIndex x = 0; x < n; ++x) {
    for (std::size_t j = 0; j < S; ++j) {
      const NodeIndex y = kernel.tail_into(x, j);
      in.tail[x * S + j] = y;
      in.weighted_cost[x * S + j] = w * kernel.cost(y, j);
    }
  }
  return in;
}

// One Jacobi sweep; returns the sup change. Ties keep the lowest offset index.
double sweep(const IncomingEdges& in, double beta, const GridFunction& u, GridFunction& next,
             std::vector<std::size_t>* policy) {
  const std::size_t n = u.size();
  const std::size_t S = in.per_node;
  std::vector<double> change(n, 0.0);
  parallel_for(
      n,
      [&](std::size_t begin, std::size_t end) {
        for (NodeIndex x = begin; x < end; ++x) {
          const double* cost = in.weighted_cost.data() + x * S;
          const NodeIndex* tail = in.tail.data() + x * S;
          double best = kInfinity;
          std::size_t arg = 0;
          for (std::size_t j = 0; j < S; ++j) {
            const double v = cost[j] + beta * u[tail[j]];
            if (v < best) {
              best = v;
              arg = j;
            }
          }
          next[x] = best;
          if (policy) (*policy)[x] = arg;
          change[x] = std::abs(best - u[x]);
        }
      },
      kParallelSweepWork / std::max<std::size_t>(S, 1));
  return *std::max_element(change.begin(), change.end());
}

}  // namespace

double discounted_step_weight(double lambda, double tau) {
  return -std::expm1(-lambda * tau) / (lambda * tau);
}

DiscountedSolution solve_discounted(const ActionKernel& kernel, double lambda,
                                    const DiscountedOptions& options) {
  if (!(lambda > 0.0)) throw InvalidArgument("discount rate lambda must be positive");
  if (!(options.tol > 0.0)) throw InvalidArgument("solver tolerance must be positive");
  const std::size_t n = kernel.node_count();
  const double beta = std::exp(-lambda * kernel.tau());
  const double one_minus_beta = -std::expm1(-lambda * kernel.tau());
  const IncomingEdges in = incoming_edges(kernel, lambda);

  GridFunction u = options.initial.empty() ? GridFunction(n, 0.0) : options.initial;
  if (u.size() != n) throw InvalidArgument("initial iterate does not match the grid");
  GridFunction next(n);
  const double target = options.tol * one_minus_beta;
  double residual = kInfinity;
  std::size_t it = 0;
  while (it < options.max_iter) {
    residual = sweep(in, beta, u, next, nullptr);
    u.swap(next);
    ++it;
    if (residual <= target) break;
  }
  if (residual > target) {
    throw ConvergenceError("discounted value iteration did not converge in " +
                               std::to_string(options.max_iter) + " sweeps (lambda = " +
                               std::to_string(lambda) + ")",
                           residual);
  }
  DiscountedSolution sol;
  sol.lambda = lambda;
  sol.tau = kernel.tau();
  sol.beta = beta;
  sol.shift = kernel.shift();
  sol.policy.resize(n);
  sweep(in, beta, u, next, &sol.policy);
  sol.values = std::move(u);
  sol.iterations = it;
  sol.residual = residual;
  sol.tol = options.tol;
  return sol;
}

DiscountedSolution solve_discounted(const TorusGrid& grid, const LagrangianSpec& spec,
                                    double lambda, const VelocityStencil& stencil, double c,
                                    const DiscountedOptions& options) {
  return solve_discounted(build_kernel(grid, spec, stencil, c), lambda, options);
}

GridFunction discounted_iterate(const ActionKernel& kernel, double lambda, std::size_t steps,
                                const GridFunction& initial) {
  if (!(lambda > 0.0)) throw InvalidArgument("discount rate lambda must be positive");
  if (initial.size() != kernel.node_count()) {
    throw InvalidArgument("initial iterate does not match the grid");
  }
  const double beta = std::exp(-lambda * kernel.tau());
  const IncomingEdges in = incoming_edges(kernel, lambda);
  GridFunction u = initial;
  GridFunction next(u.size());
  for (std::size_t i = 0; i < steps; ++i) {
    sweep(in, beta, u, next, nullptr);
    u.swap(next);
  }
  return u;
}

CriticalEstimate critical_value_estimate(const ActionKernel& kernel,
                                         const std::vector<double>& lambdas, double tol) {
  if (lambdas.size() < 3) throw InvalidArgument("critical_value_estimate needs >= 3 lambdas");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0) || (i > 0 && !(lambdas[i] < lambdas[i - 1]))) {
      throw InvalidArgument("lambda schedule must be positive and strictly decreasing");
    }
  }
  const ActionKernel unshifted = kernel.shift() == 0.0 ? kernel : kernel.reshifted(0.0);
  CriticalEstimate est;
  for (double lambda : lambdas) {
    DiscountedOptions options;
    options.tol = tol;
    const DiscountedSolution sol = solve_discounted(unshifted, lambda, options);
    CriticalEstimateRow row;
    row.lambda = lambda;
    row.min_neg_lambda_u = kInfinity;
    row.max_neg_lambda_u = -kInfinity;
    for (double v : sol.values) {
      row.min_neg_lambda_u = std::min(row.min_neg_lambda_u, -lambda * v);
      row.max_neg_lambda_u = std::max(row.max_neg_lambda_u, -lambda * v);
    }
    row.midpoint = 0.5 * (row.min_neg_lambda_u + row.max_neg_lambda_u);
    row.spread = row.max_neg_lambda_u - row.min_neg_lambda_u;
    row.iterations = sol.iterations;
    if (!est.rows.empty() && row.spread > est.rows.back().spread && row.spread > 1e-12) {
      est.spread_shrinks = false;
    }
    est.rows.push_back(row);
  }
  const CriticalEstimateRow& a = est.rows[est.rows.size() - 2];
  const CriticalEstimateRow& b = est.rows.back();
  const double ratio = a.lambda / b.lambda;
  est.c_est = (ratio * b.midpoint - a.midpoint) / (ratio - 1.0);
  return est;
}

TrajectorySample backward_trajectory(const DiscountedSolution& sol, const ActionKernel& kernel,
                                     NodeIndex x0, std::size_t steps) {
  if (x0 >= kernel.node_count()) throw InvalidArgument("trajectory start outside the grid");
  if (sol.policy.size() != kernel.node_count()) {
    throw InvalidArgument("solution does not match the kernel");
  }
  TrajectorySample t;
  t.start = x0;
  t.nodes.reserve(steps + 1);
  t.nodes.push_back(x0);
  for (std::size_t i = 0; i < steps; ++i) {
    const NodeIndex x = t.nodes.back();
    const std::size_t j = sol.policy[x];
    const Point v = kernel.stencil().velocity(kernel.grid(), j);
    const double speed = std::hypot(v[0], v[1]);
    t.offsets.push_back(j);
    t.speeds.push_back(speed);
    t.max_speed = std::max(t.max_speed, speed);
    t.nodes.push_back(kernel.tail_into(x, j));
  }
  return t;
}

double calibration_residual(const DiscountedSolution& sol, const ActionKernel& kernel,
                            const TrajectorySample& traj) {
  const std::size_t N = traj.offsets.size();
  if (traj.nodes.size() != N + 1) throw InvalidArgument("malformed trajectory");
  const double w = discounted_step_weight(sol.lambda, kernel.tau());
  double discount = 1.0;
  double total = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const NodeIndex tail = traj.nodes[i + 1];
    if (kernel.head(tail, traj.offsets[i]) != traj.nodes[i]) {
      throw InvalidArgument("trajectory step " + std::to_string(i) + " is not a kernel edge");
    }
    total += discount * w * kernel.cost(tail, traj.offsets[i]);
    discount *= sol.beta;
  }
  return discount * sol.values[traj.nodes[N]] + total - sol.values[traj.nodes[0]];
}

std::size_t occupation_steps(double lambda, double tau, double threshold) {
  return static_cast<std::size_t>(std::ceil(-std::log(threshold) / (lambda * tau)));
}

DiscountedOccupationMeasure discounted_occupation_measure(const DiscountedSolution& sol,
                                                          const ActionKernel& kernel,
                                                          NodeIndex x0, std::size_t steps) {
  if (steps == 0) throw InvalidArgument("occupation measure needs at least one step");
  DiscountedOccupationMeasure out;
  out.trajectory = backward_trajectory(sol, kernel, x0, steps);
  const double one_minus_beta = -std::expm1(-sol.lambda * kernel.tau());
  std::map<std::size_t, double> weights;
  double discount = 1.0;
  for (std::size_t i = 0; i < steps; ++i) {
    const NodeIndex tail = out.trajectory.nodes[i + 1];
    const std::size_t j = out.trajectory.offsets[i];
    const double w = one_minus_beta * discount;
    weights[kernel.edge(tail, j)] += w;
    out.discounted_action += w * kernel.cost(tail, j) / kernel.tau();
    discount *= sol.beta;
  }
  out.tail = discount;
  out.tail_warning = out.tail > out.tail_threshold;
  out.expected_action = sol.lambda * sol.values[x0] -
                        discount * sol.lambda * sol.values[out.trajectory.nodes.back()];
  const double mass = 1.0 - discount;
  const std::size_t S = kernel.edges_per_node();
  for (const auto& [edge, w] : weights) {
    out.measure.entries.push_back({edge / S, edge % S, w / mass});
  }
  return out;
}

}  // namespace weakkam
