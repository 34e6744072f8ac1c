#pragma once

#include <vector>

#include "weakkam/kernel.hpp"

namespace weakkam {

struct EdgeWeight {
  NodeIndex tail = 0;
  std::size_t offset = 0;  ///< index into the kernel's stencil
  double weight = 0.0;
};

/// Nonnegative weights on kernel edges; the discrete analogue of a measure on
/// the tangent bundle. Closed ⟺ inflow = outflow at every node.
struct OccupationMeasure {
  std::vector<EdgeWeight> entries;

  double mass() const;
  /// Σ m(x,k)·L(x,v_k).
  double action(const ActionKernel& kernel) const;
  /// Position marginal μ(y) = Σ_k m(y,k).
  std::vector<double> projected(const ActionKernel& kernel) const;
  /// Σ_y μ(y)·f(y).
  double integrate(const ActionKernel& kernel, std::span<const double> f) const;
  /// Nodes carrying positive projected mass.
  std::vector<NodeIndex> support_nodes(const ActionKernel& kernel, double threshold = 0.0) const;
  OccupationMeasure normalized() const;
};

/// max over nodes |inflow − outflow|.
double closedness_residual(const OccupationMeasure& measure, const ActionKernel& kernel);

}  // namespace weakkam
