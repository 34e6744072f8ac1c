#pragma once

#include <span>
#include <string>
#include <vector>

#include "weakkam/discounted.hpp"
#include "weakkam/mather.hpp"

namespace weakkam {

enum class CheckStatus { pass, fail, warn };
std::string to_string(CheckStatus status);

/// One verification outcome with the measured quantity and its threshold.
struct CheckFlag {
  std::string name;
  CheckStatus status = CheckStatus::pass;
  double measured = 0.0;
  double threshold = 0.0;
};

struct ConvergenceRow {
  double lambda = 0.0;
  double sup_error = 0.0;         ///< ‖u_λ − u₀‖∞ over the target nodes
  double min_neg_lambda_u = 0.0;
  double max_neg_lambda_u = 0.0;
  double lipschitz_quotient = 0.0;
};

/// Spot check u_λ(x) ≥ u₀(x) − ∫u₀ dμ̃ − tol with μ̃ the discounted occupation
/// measure of the backward optimal trajectory from x.
struct LemmaCheck {
  double lambda = 0.0;
  NodeIndex node = 0;
  double u_lambda = 0.0;
  double u0 = 0.0;
  double integral = 0.0;  ///< ∫u₀ dμ̃
  double tol = 0.0;
  double slack = 0.0;     ///< u_λ(x) − (u₀(x) − ∫u₀ dμ̃) + tol, ≥ 0 on pass
  bool passed = true;
};

/// Locates the discretization floor of a nonincreasing-then-flat sequence:
/// p is the first index of the minimum, the prefix [0, p] must be
/// nonincreasing (within slack) and the plateau is max over i ≥ p.
struct PlateauAnalysis {
  std::size_t onset = 0;
  double plateau = 0.0;
  bool prefix_nonincreasing = true;
  double worst_increase = 0.0;
};
PlateauAnalysis analyse_plateau(std::span<const double> errors, double slack = 0.0);

struct LimitOptions {
  double subsolution_tol = 1e-9;
  double integral_tol = 1e-6;
  double maximality_delta = 0.01;
  double plateau_max = 0.1;
  double lemma_lambda = 0.01;
  std::size_t lemma_samples = 8;
  double occupation_threshold = 1e-8;
};

struct LimitReport {
  double subsolution_violation = 0.0;               ///< (a)
  std::vector<double> mather_integrals;             ///< (b) ∫u₀ dμ per measure
  std::vector<double> perturbed_integrals;          ///< (c) ∫(u₀ + δ) dμ
  std::vector<ConvergenceRow> convergence;          ///< (d)
  PlateauAnalysis plateau;
  std::vector<double> lambda_integrals;             ///< max_μ ∫u_λ dμ per λ
  /// max over consecutive λi > λi+1 and nodes of u_λi − u_λi+1 − (tol_i + tol_i+1)
  double monotonicity_violation = 0.0;
  std::vector<LemmaCheck> lemma;                    ///< (e)
  std::vector<CheckFlag> flags;

  bool passed() const;
};

/// Verification battery for u₀ and the discounted family. `solutions` must
/// be ordered by strictly decreasing λ; `lemma_solutions` (optional) are
/// searched first for the λ closest to options.lemma_lambda.
LimitReport verify_limit(const LimitFunctionResult& u0,
                         std::span<const DiscountedSolution> solutions,
                         std::span<const MatherSolveResult> mather, const ActionKernel& kernel,
                         const LimitOptions& options = {},
                         std::span<const DiscountedSolution> lemma_solutions = {});

/// Single lemma spot check at node x. The tolerance is pinned by the exact
/// discrete identity along the trajectory: (1 − F + β^N)·osc(u₀) +
/// β^N·‖u_λ‖∞ + F·max(viol,0)/(1−β) + solver tol, F = (1−β)/(λτ).
LemmaCheck lemma_check(const DiscountedSolution& sol, std::span<const double> u0,
                       const ActionKernel& kernel, NodeIndex x, double subsolution_violation,
                       double occupation_threshold = 1e-8);

}  // namespace weakkam
