#pragma once

#include <cstddef>
#include <vector>

#include "weakkam/kernel.hpp"
#include "weakkam/minplus.hpp"

namespace weakkam {

/// Dense node×node action values: either a finite-horizon h_{nτ} or the
/// windowed-minimum approximation of the Peierls barrier.
struct BarrierMatrix {
  enum class Kind { finite_horizon, peierls };

  DenseMatrix values;
  Kind kind = Kind::finite_horizon;
  std::size_t steps = 0;     ///< n for h_{nτ}
  std::size_t burn_in = 0;   ///< N0 for the Peierls window
  std::size_t horizon = 0;   ///< N1 for the Peierls window
  double residual = 0.0;     ///< sup change when the window doubles
  bool stable = true;
  double tau = 0.0;
  double shift = 0.0;

  double operator()(NodeIndex y, NodeIndex x) const noexcept { return values(y, x); }
  std::size_t size() const noexcept { return values.size(); }
};

/// Dense cost matrix of the kernel (+∞ off the stencil).
DenseMatrix kernel_matrix(const ActionKernel& kernel);

/// h_{nτ}: entry (x,y) is the minimal cost over n-edge paths x → y.
BarrierMatrix minplus_power(const ActionKernel& kernel, std::size_t n);

/// Entry-wise minimum of h_{nτ} over n in [burn_in, horizon]. The residual is
/// the sup change when the window is extended to [burn_in, 2·horizon − burn_in];
/// the result is flagged unstable when it exceeds tol.
BarrierMatrix peierls_barrier(const ActionKernel& kernel, std::size_t burn_in,
                              std::size_t horizon, double tol);

/// Default window: N0 = 4·max n_i, N1 = 2·N0.
std::size_t default_burn_in(const TorusGrid& grid);

/// {y : h(y,y) ≤ eps}, ascending. Throws EmptyAubrySet when empty.
std::vector<NodeIndex> aubry_set(const BarrierMatrix& h, double eps);

/// δ_M(x,y) = h(x,y) + h(y,x) restricted to `nodes`.
DenseMatrix mather_distance(const BarrierMatrix& h, const std::vector<NodeIndex>& nodes);

/// Connected components of {δ_M ≤ eps} on the Aubry nodes, each sorted and
/// ordered by smallest member.
std::vector<std::vector<NodeIndex>> mather_classes(const BarrierMatrix& h,
                                                   const std::vector<NodeIndex>& aubry,
                                                   double eps);

/// 10·(h + τ)·ℓ with ℓ the largest one-cell slope of h next to the Aubry set.
double default_class_eps(const BarrierMatrix& h, const ActionKernel& kernel,
                         const std::vector<NodeIndex>& aubry);

struct AubryReport {
  std::vector<NodeIndex> nodes;
  std::vector<double> diagonal;  ///< h(y,y) for every node
  std::vector<std::vector<NodeIndex>> classes;
  DenseMatrix delta;             ///< δ_M on `nodes`
  double eps_aubry = 0.0;
  double eps_class = 0.0;
};

AubryReport analyse_aubry(const BarrierMatrix& h, const ActionKernel& kernel, double eps_aubry,
                          double eps_class);

/// max over edges y → x of u(x) − u(y) − cost(y → x); ≤ tol certifies a
/// discrete critical subsolution.
double verify_subsolution(std::span<const double> u, const ActionKernel& kernel);

/// Worst |min_z[h(y,z) + cost(z→x)] − h(y,x)| over all entries.
double fixed_point_residual(const BarrierMatrix& h, const ActionKernel& kernel);

}  // namespace weakkam
