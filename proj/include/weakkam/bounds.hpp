#pragma once

#include <vector>

#include "weakkam/grid.hpp"
#include "weakkam/lagrangian.hpp"

namespace weakkam {

/// Constants that size every downstream discretization.
struct StabilityBounds {
  double level = 0.0;      ///< c at which the bounds were computed
  double kappa = 0.0;      ///< sup{‖p‖ : H(x,p) ≤ c}, the momentum bound
  double A_kappa = 0.0;    ///< max (κ+1)‖v‖ − L(x,v) over the samples
  double C0 = 0.0;         ///< bound on ‖λu_λ‖∞
  double alpha = 0.0;      ///< velocity bound of calibrated curves, A_κ + C0
  double v_search = 0.0;   ///< half-width of the velocity search box, 2α
};

/// Sampling densities for the sup/inf estimates in stability_bounds.
struct SamplingOptions {
  int density = 10;          ///< spatial samples per grid node and axis
  int velocity_samples = 2001;  ///< per axis in 1-D
  int velocity_samples_2d = 101;  ///< per axis in 2-D
  int momentum_rays_2d = 72;
  int ray_samples = 400;     ///< coarse samples along a momentum ray before bisection
};

/// Computes κ_c, A_κ, C0, α and the velocity search box at level c by dense
/// sampling on a refinement of `grid`. Throws NoSublevel when no sampled
/// momentum satisfies H(x,p) ≤ c.
StabilityBounds stability_bounds(const LagrangianSpec& spec, double c, const TorusGrid& grid,
                                 const SamplingOptions& options = {});

/// Upper bound max_x H(x,0) ≥ c(H) used to size bounds before c(H) is known.
double critical_value_upper_bound(const LagrangianSpec& spec, const TorusGrid& grid,
                                  int density = 10);

/// Returns `spec` with its velocity search box (and, for tabulated specs,
/// the momentum box of half-width κ + 1) configured from `bounds`.
LagrangianSpec configure_spec(const LagrangianSpec& spec, const StabilityBounds& bounds);

/// Time step and integer offsets; velocity of offset k is (k_a h_a)/τ.
struct VelocityStencil {
  double tau = 0.0;
  int radius = 0;
  std::vector<Offset> offsets;  ///< lexicographic, symmetric, contains 0
  std::size_t zero_index = 0;
  bool radius_capped = false;   ///< radius reduced to keep wraps unambiguous

  Point velocity(const TorusGrid& grid, std::size_t j) const;
  double max_speed(const TorusGrid& grid) const;
  std::size_t size() const noexcept { return offsets.size(); }
};

/// Box stencil {−K..K}^d with time step τ.
VelocityStencil make_stencil(const TorusGrid& grid, double tau, int radius);

/// τ = √h and K = ceil(α τ / h), reduced to the largest radius below half the
/// torus when α τ exceeds it (flagged by radius_capped).
VelocityStencil default_stencil(const TorusGrid& grid, double alpha);

}  // namespace weakkam
