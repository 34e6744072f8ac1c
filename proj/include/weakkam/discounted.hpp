#pragma once

#include <optional>
#include <vector>

#include "weakkam/kernel.hpp"
#include "weakkam/measure.hpp"

namespace weakkam {

/// Fixed point of the one-step discounted dynamic programming operator
///
///   u(x) = min_j [ ((1−β)/λ)·(L(y_j, v_j) + c) + β·u(y_j) ],  y_j = x ⊖ k_j,
///
/// with β = e^{−λτ}, i.e. the kernel cost of the edge y_j → x scaled by
/// (1−β)/(λτ).
struct DiscountedSolution {
  double lambda = 0.0;
  double tau = 0.0;
  double beta = 0.0;
  double shift = 0.0;
  GridFunction values;
  /// Offset index of the edge arriving at each node (lowest index on ties).
  std::vector<std::size_t> policy;
  std::size_t iterations = 0;
  double residual = 0.0;
  double tol = 0.0;
};

struct DiscountedOptions {
  double tol = 1e-10;
  std::size_t max_iter = 5'000'000;
  /// Initial iterate; u ≡ 0 when empty.
  GridFunction initial;
};

/// Jacobi value iteration until the sup update is ≤ tol·(1−β). Throws
/// ConvergenceError carrying the last residual when max_iter is exhausted.
DiscountedSolution solve_discounted(const ActionKernel& kernel, double lambda,
                                    const DiscountedOptions& options = {});

/// Convenience overload that builds the kernel first.
DiscountedSolution solve_discounted(const TorusGrid& grid, const LagrangianSpec& spec,
                                    double lambda, const VelocityStencil& stencil, double c,
                                    const DiscountedOptions& options = {});

/// `steps` applications of the operator to `initial` (the discounted value of
/// the truncated horizon with terminal cost `initial`).
GridFunction discounted_iterate(const ActionKernel& kernel, double lambda, std::size_t steps,
                                const GridFunction& initial);

/// Weight (1−β)/(λτ) that turns an edge cost into its discounted contribution.
double discounted_step_weight(double lambda, double tau);

struct CriticalEstimateRow {
  double lambda = 0.0;
  double min_neg_lambda_u = 0.0;
  double max_neg_lambda_u = 0.0;
  double midpoint = 0.0;
  double spread = 0.0;
  std::size_t iterations = 0;
};

struct CriticalEstimate {
  double c_est = 0.0;
  std::vector<CriticalEstimateRow> rows;
  bool spread_shrinks = true;  ///< false → discretization too coarse (warning)
};

/// Solves with shift 0 for each λ (strictly decreasing, ≥ 3 entries) and
/// Richardson-extrapolates the midpoint of −λu_λ from the last two entries.
CriticalEstimate critical_value_estimate(const ActionKernel& kernel,
                                         const std::vector<double>& lambdas, double tol);

/// Backward trajectory: nodes[0] = x0 and nodes[i+1] → nodes[i] is the policy
/// edge into nodes[i], with offset index offsets[i].
struct TrajectorySample {
  NodeIndex start = 0;
  std::vector<NodeIndex> nodes;
  std::vector<std::size_t> offsets;
  std::vector<double> speeds;
  double max_speed = 0.0;
};

TrajectorySample backward_trajectory(const DiscountedSolution& sol, const ActionKernel& kernel,
                                     NodeIndex x0, std::size_t steps);

/// e^{−λNτ}u(x_N) + Σ discounted step costs − u(x_0). Works for any chain of
/// kernel edges, not only policy trajectories.
double calibration_residual(const DiscountedSolution& sol, const ActionKernel& kernel,
                            const TrajectorySample& traj);

struct DiscountedOccupationMeasure {
  OccupationMeasure measure;  ///< weights (1−β)β^i, renormalized
  double tail = 0.0;          ///< β^N
  double tail_threshold = 1e-8;
  bool tail_warning = false;
  /// Σ_i (1−β)β^i (L_i + c) before renormalization.
  double discounted_action = 0.0;
  /// λu(x0) − β^N λu(x_N): the value the discounted action must equal.
  double expected_action = 0.0;
  TrajectorySample trajectory;
};

/// Steps needed for β^N ≤ threshold.
std::size_t occupation_steps(double lambda, double tau, double threshold = 1e-8);

DiscountedOccupationMeasure discounted_occupation_measure(const DiscountedSolution& sol,
                                                          const ActionKernel& kernel,
                                                          NodeIndex x0, std::size_t steps);

}  // namespace weakkam
