#pragma once

#include <string>
#include <vector>

#include "weakkam/barrier.hpp"
#include "weakkam/kernel.hpp"
#include "weakkam/measure.hpp"

namespace weakkam {

/// Cycle of kernel edges; edge i leaves nodes[i] with stencil offset offsets[i].
struct MeanCycle {
  double mean = 0.0;  ///< mean of L over the cycle's edges (per unit time)
  double karp_value = 0.0;  ///< Karp's min-max formula, before cycle extraction
  std::vector<NodeIndex> nodes;
  std::vector<std::size_t> offsets;

  /// Uniform unit-mass measure on the cycle's edges.
  OccupationMeasure measure() const;
};

/// Karp's minimum mean cycle on the per-unit-time costs L(x, v_k). −mean is
/// the discrete critical value of the kernel.
MeanCycle min_mean_cycle(const ActionKernel& kernel);

struct MatherSolveResult {
  OccupationMeasure measure;
  double value = 0.0;                  ///< Σ m·L, ≈ −c(H)
  std::vector<EdgeWeight> support;     ///< edges with positive weight
  std::vector<double> projected;       ///< μ(y) = Σ_k m(y,k)
  double conservation_residual = 0.0;
  std::size_t iterations = 0;
};

/// Minimises Σ m·L over unit-mass circulations m ≥ 0 on the kernel graph.
MatherSolveResult solve_mather_lp(const ActionKernel& kernel);

struct LimitFunctionResult {
  GridFunction values;                   ///< NaN on nodes that were not targets
  std::vector<NodeIndex> targets;
  std::vector<OccupationMeasure> certificates;  ///< minimising measure per target (lp)
  std::vector<NodeIndex> base_nodes;     ///< Y for the mechanical shortcut
  std::string method;                    ///< "lp" or "mechanical-shortcut"
  double eps = 0.0;
};

/// eps_c = 10·|c_est − (−min mean)| + 1e−6.
double default_eps_c(double c_est, double min_mean);

/// For every target x: min Σ_y μ(y)·h(y,x) over unit-mass circulations with
/// Σ m·L ≤ −c_est + eps_c (μ the position marginal). Per-target programs
/// start from a shared optimal basis of the Mather objective and run in
/// parallel. Throws InfeasibleError when eps_c is too small.
LimitFunctionResult compute_u0(const BarrierMatrix& h, const ActionKernel& kernel, double c_est,
                               double eps_c, const std::vector<NodeIndex>& targets);

/// u₀(x) = min{h(y,x) : |L(y,0) + c_est| ≤ eps}. Only for Lagrangians
/// minimised at zero velocity (mechanical, tabulated).
LimitFunctionResult u0_mechanical(const BarrierMatrix& h, const ActionKernel& kernel,
                                  const LagrangianSpec& spec, double c_est, double eps);

}  // namespace weakkam
