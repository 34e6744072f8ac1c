#include "weakkam/kernel.hpp"

#include <cmath>
#include <string>

#include "weakkam/error.hpp"
#include "weakkam/parallel.hpp"

namespace weakkam {

ActionKernel::ActionKernel(TorusGrid grid, VelocityStencil stencil, double shift,
                           std::vector<double> lagrangian)
    : grid_(std::move(grid)),
      stencil_(std::move(stencil)),
      shift_(shift),
      lagrangian_(std::move(lagrangian)) {
  const std::size_t n = grid_.node_count();
  const std::size_t S = stencil_.size();
  if (lagrangian_.size() != n * S) throw InvalidArgument("kernel: wrong number of edge values");
  cost_.resize(n * S);
  heads_.resize(n * S);
  tails_.resize(n * S);
  for (NodeIndex x = 0; x < n; ++x) {
    for (std::size_t j = 0; j < S; ++j) {
      const Offset k = stencil_.offsets[j];
      cost_[edge(x, j)] = stencil_.tau * (lagrangian_[edge(x, j)] + shift_);
      heads_[edge(x, j)] = grid_.shift(x, k);
      tails_[edge(x, j)] = grid_.shift(x, {-k[0], -k[1]});
    }
  }
}

ActionKernel ActionKernel::reshifted(double shift) const {
  ActionKernel k(grid_, stencil_, shift, lagrangian_);
  k.covers_alpha_ = covers_alpha_;
  return k;
}

std::string to_string(Quadrature rule) {
  return rule == Quadrature::left ? "left" : "trapezoid";
}

Quadrature quadrature_from_string(const std::string& name) {
  if (name == "left") return Quadrature::left;
  if (name == "trapezoid") return Quadrature::trapezoid;
  throw InvalidArgument("unknown quadrature rule '" + name + "'");
}

ActionKernel build_kernel(const TorusGrid& grid, const LagrangianSpec& spec,
                          const VelocityStencil& stencil, double c, double alpha,
                          Quadrature rule) {
  if (spec.dim() != grid.dim()) throw InvalidArgument("spec and grid dimensions differ");
  if (!(stencil.tau > 0.0)) throw InvalidArgument("kernel time step must be positive");
  for (const Offset& k : stencil.offsets) {
    for (int a = 0; a < grid.dim(); ++a) {
      if (2 * std::abs(k[a]) >= grid.size(a)) {
        throw InvalidArgument("stencil displacement " + std::to_string(k[a]) +
                              " reaches half the torus along axis " + std::to_string(a) +
                              " (ambiguous wrap)");
      }
    }
  }
  const std::size_t n = grid.node_count();
  const std::size_t S = stencil.size();
  std::vector<double> L(n * S);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (NodeIndex x = begin; x < end; ++x) {
      const Point px = grid.coordinate(x);
      for (std::size_t j = 0; j < S; ++j) {
        const Point v = stencil.velocity(grid, j);
        double value = eval_lagrangian(spec, px, v);
        if (rule == Quadrature::trapezoid) {
          const Point py = grid.coordinate(grid.shift(x, stencil.offsets[j]));
          value = 0.5 * (value + eval_lagrangian(spec, py, v));
        }
        L[x * S + j] = value;
      }
    }
  });
  ActionKernel kernel(grid, stencil, c, std::move(L));
  kernel.set_covers_alpha(stencil.max_speed(grid) >= alpha);
  return kernel;
}

}  // namespace weakkam
