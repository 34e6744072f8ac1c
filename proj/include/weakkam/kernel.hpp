#pragma once

#include <string>
#include <vector>

#include "weakkam/bounds.hpp"
#include "weakkam/grid.hpp"
#include "weakkam/lagrangian.hpp"

namespace weakkam {

/// Quadrature of the action over one step of constant velocity v from x to y:
/// left evaluates L(x,v), trapezoid ½(L(x,v) + L(y,v)).
enum class Quadrature { left, trapezoid };
std::string to_string(Quadrature rule);
Quadrature quadrature_from_string(const std::string& name);

/// One-step action graph. Edge (x, j) goes from x to x ⊕ k_j and costs
/// τ·(L_j + c), where L_j is the quadrature of L along the step.
class ActionKernel {
 public:
  ActionKernel(TorusGrid grid, VelocityStencil stencil, double shift,
               std::vector<double> lagrangian);

  const TorusGrid& grid() const noexcept { return grid_; }
  const VelocityStencil& stencil() const noexcept { return stencil_; }
  double tau() const noexcept { return stencil_.tau; }
  double shift() const noexcept { return shift_; }
  std::size_t node_count() const noexcept { return grid_.node_count(); }
  std::size_t edges_per_node() const noexcept { return stencil_.size(); }
  std::size_t edge_count() const noexcept { return lagrangian_.size(); }

  /// Flat edge id for (tail, offset index).
  std::size_t edge(NodeIndex tail, std::size_t j) const noexcept {
    return tail * stencil_.size() + j;
  }
  NodeIndex head(NodeIndex tail, std::size_t j) const { return heads_[edge(tail, j)]; }
  /// Tail of the edge with offset j that arrives at `head`.
  NodeIndex tail_into(NodeIndex head, std::size_t j) const { return tails_[edge(head, j)]; }

  double cost(NodeIndex tail, std::size_t j) const noexcept { return cost_[edge(tail, j)]; }
  double lagrangian(NodeIndex tail, std::size_t j) const noexcept {
    return lagrangian_[edge(tail, j)];
  }
  const std::vector<double>& costs() const noexcept { return cost_; }
  const std::vector<double>& lagrangians() const noexcept { return lagrangian_; }

  /// Same graph with a different shift c.
  ActionKernel reshifted(double shift) const;

  /// True when the stencil's largest speed covers the velocity bound α used
  /// to build it.
  bool covers_alpha() const noexcept { return covers_alpha_; }
  void set_covers_alpha(bool value) noexcept { covers_alpha_ = value; }

 private:
  TorusGrid grid_;
  VelocityStencil stencil_;
  double shift_;
  std::vector<double> lagrangian_;
  std::vector<double> cost_;
  std::vector<NodeIndex> heads_;
  std::vector<NodeIndex> tails_;
  bool covers_alpha_ = true;
};

/// Builds the kernel at shift c. Rejects stencils whose displacements reach
/// half the torus (ambiguous wrap) and velocities outside the spec's search
/// box.
ActionKernel build_kernel(const TorusGrid& grid, const LagrangianSpec& spec,
                          const VelocityStencil& stencil, double c, double alpha = 0.0,
                          Quadrature rule = Quadrature::trapezoid);

}  // namespace weakkam
