#include "weakkam/limit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "weakkam/error.hpp"

namespace weakkam {
namespace {

bool all_finite(std::span<const double> u) {
  return std::all_of(u.begin(), u.end(), [](double v) { return std::isfinite(v); });
}

double oscillation(std::span<const double> u) {
  const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
  return *hi - *lo;
}

CheckFlag flag_le(std::string name, double measured, double threshold) {
  return {std::move(name), measured <= threshold ? CheckStatus::pass : CheckStatus::fail,
          measured, threshold};
}

// Integral against the projected measure; NaN when it touches a node
// without a value.
double projected_integral(const OccupationMeasure& m, std::span<const double> u) {
  double total = 0.0;
  for (const EdgeWeight& e : m.entries) {
    if (e.weight == 0.0) continue;
    total += e.weight * u[e.tail];
  }
  return total;
}

}  // namespace

std::string to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::pass:
      return "pass";
    case CheckStatus::fail:
      return "fail";
    case CheckStatus::warn:
      return "warn";
  }
  return "fail";
}

PlateauAnalysis analyse_plateau(std::span<const double> errors, double slack) {
  PlateauAnalysis p;
  if (errors.empty()) return p;
  p.onset = static_cast<std::size_t>(std::min_element(errors.begin(), errors.end()) -
                                     errors.begin());
  for (std::size_t i = 0; i < p.onset; ++i) {
    const double rise = errors[i + 1] - errors[i];
    p.worst_increase = std::max(p.worst_increase, rise);
    if (rise > slack) p.prefix_nonincreasing = false;
  }
  p.plateau = *std::max_element(errors.begin() + static_cast<std::ptrdiff_t>(p.onset),
                                errors.end());
  return p;
}

bool LimitReport::passed() const {
  return std::none_of(flags.begin(), flags.end(),
                      [](const CheckFlag& f) { return f.status == CheckStatus::fail; });
}

LemmaCheck lemma_check(const DiscountedSolution& sol, std::span<const double> u0,
                       const ActionKernel& kernel, NodeIndex x, double subsolution_violation,
                       double occupation_threshold) {
  const std::size_t steps = occupation_steps(sol.lambda, kernel.tau(), occupation_threshold);
  const DiscountedOccupationMeasure occ = discounted_occupation_measure(sol, kernel, x, steps);
  const double one_minus_beta = -std::expm1(-sol.lambda * kernel.tau());
  const double F = discounted_step_weight(sol.lambda, kernel.tau());
  LemmaCheck c;
  c.lambda = sol.lambda;
  c.node = x;
  c.u_lambda = sol.values[x];
  c.u0 = u0[x];
  c.integral = projected_integral(occ.measure, u0);
  c.tol = (1.0 - F + occ.tail) * oscillation(u0) + occ.tail * sup_norm(sol.values) +
          F * std::max(subsolution_violation, 0.0) / one_minus_beta + sol.tol + 1e-12;
  c.slack = c.u_lambda - (c.u0 - c.integral) + c.tol;
  c.passed = c.slack >= 0.0;
  return c;
}

LimitReport verify_limit(const LimitFunctionResult& u0,
                         std::span<const DiscountedSolution> solutions,
                         std::span<const MatherSolveResult> mather, const ActionKernel& kernel,
                         const LimitOptions& options,
                         std::span<const DiscountedSolution> lemma_solutions) {
  const std::size_t n = kernel.node_count();
  if (u0.values.size() != n) throw InvalidArgument("verify_limit: u0 does not match the kernel");
  for (std::size_t i = 0; i < solutions.size(); ++i) {
    if (solutions[i].values.size() != n) {
      throw InvalidArgument("verify_limit: solution does not match the kernel");
    }
    if (i > 0 && !(solutions[i].lambda < solutions[i - 1].lambda)) {
      throw InvalidArgument("verify_limit: solutions must have strictly decreasing lambda");
    }
  }
  LimitReport r;
  const bool complete = all_finite(u0.values);

  // (a)
  if (complete) {
    r.subsolution_violation = verify_subsolution(u0.values, kernel);
    r.flags.push_back(
        flag_le("u0_subsolution", r.subsolution_violation, options.subsolution_tol));
  } else {
    r.subsolution_violation = std::numeric_limits<double>::quiet_NaN();
    r.flags.push_back({"u0_subsolution", CheckStatus::warn, r.subsolution_violation,
                       options.subsolution_tol});
  }

  // (b), (c)
  double worst_integral = -std::numeric_limits<double>::infinity();
  for (const MatherSolveResult& m : mather) {
    const double mass = m.measure.mass();
    const double v = projected_integral(m.measure, u0.values);
    r.mather_integrals.push_back(v);
    r.perturbed_integrals.push_back(v + options.maximality_delta * mass);
    worst_integral = std::max(worst_integral, v);
  }
  if (!mather.empty()) {
    if (std::isnan(worst_integral)) {
      r.flags.push_back({"u0_mather_constraint", CheckStatus::warn, worst_integral,
                         options.integral_tol});
    } else {
      r.flags.push_back(flag_le("u0_mather_constraint", worst_integral, options.integral_tol));
    }
    // the perturbed function must violate the constraint for some measure
    const double worst_perturbed =
        *std::max_element(r.perturbed_integrals.begin(), r.perturbed_integrals.end());
    r.flags.push_back({"u0_maximality_probe",
                       worst_perturbed > options.integral_tol ? CheckStatus::pass
                                                              : CheckStatus::fail,
                       worst_perturbed, options.integral_tol});
  }

  // (d)
  std::vector<double> errors;
  for (const DiscountedSolution& sol : solutions) {
    ConvergenceRow row;
    row.lambda = sol.lambda;
    row.min_neg_lambda_u = std::numeric_limits<double>::infinity();
    row.max_neg_lambda_u = -std::numeric_limits<double>::infinity();
    for (NodeIndex x = 0; x < n; ++x) {
      const double nl = -sol.lambda * sol.values[x];
      row.min_neg_lambda_u = std::min(row.min_neg_lambda_u, nl);
      row.max_neg_lambda_u = std::max(row.max_neg_lambda_u, nl);
      if (std::isfinite(u0.values[x])) {
        row.sup_error = std::max(row.sup_error, std::abs(sol.values[x] - u0.values[x]));
      }
    }
    row.lipschitz_quotient = lipschitz_quotient(kernel.grid(), sol.values);
    errors.push_back(row.sup_error);
    r.convergence.push_back(row);

    double worst = -std::numeric_limits<double>::infinity();
    for (const MatherSolveResult& m : mather) {
      worst = std::max(worst, projected_integral(m.measure, sol.values));
    }
    r.lambda_integrals.push_back(worst);
  }
  if (!solutions.empty()) {
    r.plateau = analyse_plateau(errors);
    r.flags.push_back({"convergence_prefix_nonincreasing",
                       r.plateau.prefix_nonincreasing ? CheckStatus::pass : CheckStatus::fail,
                       r.plateau.worst_increase, 0.0});
    r.flags.push_back(flag_le("convergence_plateau", r.plateau.plateau, options.plateau_max));
    if (!mather.empty()) {
      const double worst =
          *std::max_element(r.lambda_integrals.begin(), r.lambda_integrals.end());
      r.flags.push_back(flag_le("u_lambda_mather_constraint", worst, options.integral_tol));
    }
  }
  r.monotonicity_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < solutions.size(); ++i) {
    const double tol = solutions[i - 1].tol + solutions[i].tol;
    for (NodeIndex x = 0; x < n; ++x) {
      const double excess = solutions[i - 1].values[x] - solutions[i].values[x] - tol;
      r.monotonicity_violation = std::max(r.monotonicity_violation, excess);
    }
  }
  if (solutions.size() > 1) {
    r.flags.push_back(flag_le("monotone_in_lambda", r.monotonicity_violation, 0.0));
  } else {
    r.monotonicity_violation = 0.0;
  }

  // (e)
  const DiscountedSolution* chosen = nullptr;
  auto consider = [&](std::span<const DiscountedSolution> pool) {
    for (const DiscountedSolution& s : pool) {
      if (!chosen || std::abs(std::log(s.lambda / options.lemma_lambda)) <
                         std::abs(std::log(chosen->lambda / options.lemma_lambda))) {
        chosen = &s;
      }
    }
  };
  consider(lemma_solutions);
  if (!chosen) consider(solutions);
  if (chosen && options.lemma_samples > 0) {
    if (!complete) {
      r.flags.push_back({"lemma_inequality", CheckStatus::warn,
                         std::numeric_limits<double>::quiet_NaN(), 0.0});
    } else {
      double worst = std::numeric_limits<double>::infinity();
      const std::size_t samples = std::min(options.lemma_samples, n);
      for (std::size_t s = 0; s < samples; ++s) {
        const NodeIndex x = s * n / samples;
        r.lemma.push_back(lemma_check(*chosen, u0.values, kernel, x,
                                      r.subsolution_violation, options.occupation_threshold));
        worst = std::min(worst, r.lemma.back().slack);
      }
      r.flags.push_back({"lemma_inequality", worst >= 0.0 ? CheckStatus::pass : CheckStatus::fail,
                         worst, 0.0});
    }
  }
  return r;
}

}  // namespace weakkam
