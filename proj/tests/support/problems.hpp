#pragma once

#include <vector>

#include "weakkam/kernel.hpp"
#include "weakkam/lagrangian.hpp"

namespace fixture {

inline weakkam::TorusGrid line(int n) {
  const std::vector<int> sizes{n};
  return weakkam::TorusGrid::build(1, sizes);
}

inline weakkam::LagrangianSpec pendulum(int frequency = 1) {
  return weakkam::LagrangianSpec::mechanical(1, weakkam::Potential::cosine(1.0, frequency));
}

inline weakkam::LagrangianSpec free_particle() {
  return weakkam::LagrangianSpec::mechanical(1, weakkam::Potential::zero());
}

/// Kernel on an n-node circle with stencil {−K..K} and step τ at shift c.
inline weakkam::ActionKernel kernel(const weakkam::LagrangianSpec& spec, int n, int radius,
                                    double tau, double c,
                                    weakkam::Quadrature rule = weakkam::Quadrature::trapezoid) {
  const weakkam::TorusGrid g = line(n);
  return weakkam::build_kernel(g, spec, weakkam::make_stencil(g, tau, radius), c, 0.0, rule);
}

/// Kernel with the default τ = √h and a radius large enough for the pendulum.
inline weakkam::ActionKernel default_kernel(const weakkam::LagrangianSpec& spec, int n, double c,
                                            double alpha = 7.5) {
  const weakkam::TorusGrid g = line(n);
  return weakkam::build_kernel(g, spec, weakkam::default_stencil(g, alpha), c, alpha);
}

}  // namespace fixture
