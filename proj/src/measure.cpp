#include "weakkam/measure.hpp"

#include <algorithm>
#include <cmath>

#include "weakkam/error.hpp"

namespace weakkam {

double OccupationMeasure::mass() const {
  double m = 0.0;
  for (const EdgeWeight& e : entries) m += e.weight;
  return m;
}

double OccupationMeasure::action(const ActionKernel& kernel) const {
  double s = 0.0;
  for (const EdgeWeight& e : entries) s += e.weight * kernel.lagrangian(e.tail, e.offset);
  return s;
}

std::vector<double> OccupationMeasure::projected(const ActionKernel& kernel) const {
  std::vector<double> mu(kernel.node_count(), 0.0);
  for (const EdgeWeight& e : entries) mu.at(e.tail) += e.weight;
  return mu;
}

double OccupationMeasure::integrate(const ActionKernel& kernel, std::span<const double> f) const {
  if (f.size() != kernel.node_count()) throw InvalidArgument("integrate: size mismatch");
  double s = 0.0;
  for (const EdgeWeight& e : entries) s += e.weight * f[e.tail];
  return s;
}

std::vector<NodeIndex> OccupationMeasure::support_nodes(const ActionKernel& kernel,
                                                        double threshold) const {
  const std::vector<double> mu = projected(kernel);
  std::vector<NodeIndex> nodes;
  for (NodeIndex y = 0; y < mu.size(); ++y) {
    if (mu[y] > threshold) nodes.push_back(y);
  }
  return nodes;
}

OccupationMeasure OccupationMeasure::normalized() const {
  const double m = mass();
  if (!(m > 0.0)) throw InvalidArgument("cannot normalize a measure of zero mass");
  OccupationMeasure out = *this;
  for (EdgeWeight& e : out.entries) e.weight /= m;
  return out;
}

double closedness_residual(const OccupationMeasure& measure, const ActionKernel& kernel) {
  std::vector<double> balance(kernel.node_count(), 0.0);
  for (const EdgeWeight& e : measure.entries) {
    const NodeIndex head = kernel.head(e.tail, e.offset);
    if (head == e.tail) continue;
    balance[head] += e.weight;
    balance.at(e.tail) -= e.weight;
  }
  double worst = 0.0;
  for (double b : balance) worst = std::max(worst, std::abs(b));
  return worst;
}

}  // namespace weakkam
