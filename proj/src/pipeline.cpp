#include "weakkam/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "weakkam/error.hpp"

namespace weakkam {
namespace {

CheckFlag flag_le(std::string name, double measured, double threshold) {
  return {std::move(name), measured <= threshold ? CheckStatus::pass : CheckStatus::fail,
          measured, threshold};
}

CheckFlag flag_warn(std::string name, bool ok, double measured, double threshold) {
  return {std::move(name), ok ? CheckStatus::pass : CheckStatus::warn, measured, threshold};
}

Json flags_json(const std::vector<CheckFlag>& flags) {
  Json a = Json::array();
  for (const CheckFlag& f : flags) a.push_back(to_json(f));
  return a;
}

Json values_json(std::span<const double> values) {
  Json a = Json::array();
  for (double v : values) a.push_back(json_number(v));
  return a;
}

bool none_failed(const std::vector<CheckFlag>& flags) {
  return std::none_of(flags.begin(), flags.end(),
                      [](const CheckFlag& f) { return f.status == CheckStatus::fail; });
}

}  // namespace

bool RunReport::passed() const { return none_failed(flags); }

int cell_distance(const TorusGrid& grid, const std::vector<NodeIndex>& from,
                  const std::vector<NodeIndex>& to) {
  if (to.empty()) return std::numeric_limits<int>::max();
  int worst = 0;
  for (NodeIndex a : from) {
    int best = std::numeric_limits<int>::max();
    for (NodeIndex b : to) {
      const Offset d = grid.lattice_displacement(a, b);
      best = std::min(best, std::max(std::abs(d[0]), std::abs(d[1])));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

Pipeline::Pipeline(ExperimentConfig config) : config_(std::move(config)) { validate(config_); }

template <typename F>
auto Pipeline::stage(const std::string& name, F&& fn) {
  const auto start = std::chrono::steady_clock::now();
  try {
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      timings_.push_back(
          {name, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()});
    } else {
      auto result = fn();
      timings_.push_back(
          {name, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()});
      return result;
    }
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

std::filesystem::path Pipeline::output_dir() const {
  return config_.output;
}

const TorusGrid& Pipeline::grid() {
  if (!grid_) grid_ = stage("grid", [&] { return config_.grid(); });
  return *grid_;
}

double Pipeline::bound_level() {
  if (!bound_level_) {
    const TorusGrid& g = grid();
    bound_level_ = stage("bounds", [&] {
      return critical_value_upper_bound(config_.spec(), g);
    });
  }
  return *bound_level_;
}

const StabilityBounds& Pipeline::bounds() {
  if (!bounds_) {
    const double level = bound_level();
    bounds_ = stage("bounds", [&] { return stability_bounds(config_.spec(), level, grid()); });
  }
  return *bounds_;
}

const LagrangianSpec& Pipeline::spec() {
  if (!spec_) {
    const StabilityBounds& b = bounds();
    spec_ = stage("bounds", [&] {
      LagrangianSpec s = configure_spec(config_.spec(), b);
      if (config_.discretization.v_search) s = s.with_search_box(*config_.discretization.v_search);
      return s;
    });
  }
  return *spec_;
}

const VelocityStencil& Pipeline::stencil() {
  if (!stencil_) {
    const double alpha = bounds().alpha;
    const TorusGrid& g = grid();
    stencil_ = stage("stencil", [&] {
      const DiscretizationConfig& d = config_.discretization;
      if (!d.tau && !d.stencil_radius) return default_stencil(g, alpha);
      const double tau = d.tau ? *d.tau : std::sqrt(g.max_spacing());
      if (d.stencil_radius) return make_stencil(g, tau, *d.stencil_radius);
      int radius = static_cast<int>(std::ceil(alpha * tau / g.min_spacing()));
      const int limit = (g.min_size() - 1) / 2;
      const bool capped = radius > limit;
      VelocityStencil s = make_stencil(g, tau, std::max(1, std::min(radius, limit)));
      s.radius_capped = capped;
      return s;
    });
  }
  return *stencil_;
}

const ActionKernel& Pipeline::base_kernel() {
  if (!base_kernel_) {
    const LagrangianSpec& s = spec();
    const VelocityStencil& st = stencil();
    const double alpha = bounds().alpha;
    base_kernel_ = stage("kernel", [&] {
      return build_kernel(grid(), s, st, 0.0, alpha,
                          quadrature_from_string(config_.discretization.quadrature));
    });
  }
  return *base_kernel_;
}

const CriticalEstimate& Pipeline::critical() {
  if (!critical_) {
    const ActionKernel& k = base_kernel();
    critical_ = stage("critical", [&] {
      return critical_value_estimate(k, config_.schedule.critical_lambdas,
                                     config_.schedule.solver_tol);
    });
  }
  return *critical_;
}

const MeanCycle& Pipeline::cycle() {
  if (!cycle_) {
    const ActionKernel& k = base_kernel();
    cycle_ = stage("min_mean_cycle", [&] { return min_mean_cycle(k); });
  }
  return *cycle_;
}

double Pipeline::discrete_critical_value() { return -cycle().mean; }

const ActionKernel& Pipeline::kernel() {
  if (!kernel_) {
    const double c = discrete_critical_value();
    const ActionKernel& k = base_kernel();
    kernel_ = stage("kernel", [&] { return k.reshifted(c); });
  }
  return *kernel_;
}

const BarrierMatrix& Pipeline::barrier() {
  if (!barrier_) {
    const ActionKernel& k = kernel();
    barrier_ = stage("peierls", [&] {
      const ScheduleConfig& s = config_.schedule;
      const std::size_t burn_in = s.burn_in ? *s.burn_in : default_burn_in(k.grid());
      std::size_t horizon = s.horizon ? *s.horizon : 2 * burn_in;
      BarrierMatrix h = peierls_barrier(k, burn_in, horizon, s.stabilization_tol);
      while (!h.stable && doublings_ < s.max_window_doublings) {
        horizon = 2 * horizon - burn_in;
        ++doublings_;
        h = peierls_barrier(k, burn_in, horizon, s.stabilization_tol);
      }
      return h;
    });
  }
  return *barrier_;
}

std::size_t Pipeline::window_doublings() {
  barrier();
  return doublings_;
}

const AubryReport& Pipeline::aubry() {
  if (!aubry_) {
    const BarrierMatrix& h = barrier();
    const ActionKernel& k = kernel();
    aubry_ = stage("aubry", [&] {
      const ScheduleConfig& s = config_.schedule;
      return analyse_aubry(h, k, s.eps_aubry, s.eps_class ? *s.eps_class : 0.0);
    });
  }
  return *aubry_;
}

const MatherSolveResult& Pipeline::mather() {
  if (!mather_) {
    const ActionKernel& k = kernel();
    mather_ = stage("mather", [&] { return solve_mather_lp(k); });
  }
  return *mather_;
}

double Pipeline::eps_c() {
  if (config_.schedule.eps_c) return *config_.schedule.eps_c;
  return default_eps_c(critical().c_est, cycle().mean);
}

const LimitFunctionResult& Pipeline::u0() {
  if (!u0_) {
    const BarrierMatrix& h = barrier();
    const ActionKernel& k = kernel();
    const double c_est = critical().c_est;
    const double eps = eps_c();
    u0_ = stage("u0", [&] {
      std::vector<NodeIndex> targets;
      for (NodeIndex x = 0; x < k.node_count(); x += config_.schedule.target_stride) {
        targets.push_back(x);
      }
      // the band is measured against L + c_est on the kernel's own graph
      return compute_u0(h, k, c_est, eps, targets);
    });
  }
  return *u0_;
}

const std::optional<LimitFunctionResult>& Pipeline::u0_shortcut() {
  if (!shortcut_done_) {
    const LagrangianSpec& s = spec();
    if (s.minimized_at_zero_velocity()) {
      const BarrierMatrix& h = barrier();
      const ActionKernel& k = kernel();
      const double c_est = critical().c_est;
      const double eps = config_.schedule.eps_mechanical ? *config_.schedule.eps_mechanical
                                                         : eps_c();
      shortcut_ = stage("u0", [&] { return u0_mechanical(h, k, s, c_est, eps); });
    }
    shortcut_done_ = true;
  }
  return shortcut_;
}

const DiscountedSolution& Pipeline::discounted(double lambda) {
  auto it = discounted_.find(lambda);
  if (it != discounted_.end()) return it->second;
  const ActionKernel& k = kernel();
  DiscountedSolution sol = stage("discounted", [&] {
    DiscountedOptions options;
    options.tol = config_.schedule.solver_tol;
    options.max_iter = config_.schedule.max_iter;
    return solve_discounted(k, lambda, options);
  });
  return discounted_.emplace(lambda, std::move(sol)).first->second;
}

std::vector<DiscountedSolution> Pipeline::schedule_solutions() {
  std::vector<DiscountedSolution> out;
  for (double lambda : config_.schedule.lambdas) out.push_back(discounted(lambda));
  return out;
}

LimitReport Pipeline::verify(const LimitFunctionResult& u) {
  const std::vector<DiscountedSolution> sols = schedule_solutions();
  const DiscountedSolution& lemma = discounted(config_.schedule.lemma_lambda);
  const MatherSolveResult& m = mather();
  const ActionKernel& k = kernel();
  return stage("verify", [&] {
    LimitOptions options;
    options.integral_tol = config_.schedule.integral_tol;
    options.plateau_max = config_.schedule.plateau_max;
    options.lemma_lambda = config_.schedule.lemma_lambda;
    options.lemma_samples = config_.schedule.lemma_samples;
    options.subsolution_tol = config_.schedule.stabilization_tol;
    const std::vector<MatherSolveResult> measures{m};
    return verify_limit(u, sols, measures, k, options, std::span(&lemma, 1));
  });
}

std::vector<CheckFlag> Pipeline::pipeline_flags() {
  std::vector<CheckFlag> flags;
  const ScheduleConfig& s = config_.schedule;
  const double c_est = critical().c_est;
  const double c_discrete = discrete_critical_value();
  flags.push_back(flag_le("critical_cross_check", std::abs(c_est - c_discrete), s.critical_tol));
  flags.push_back(flag_warn("critical_spread_shrinks", critical().spread_shrinks,
                            critical().rows.back().spread, critical().rows.front().spread));
  flags.push_back(flag_warn("stencil_covers_alpha", kernel().covers_alpha(),
                            stencil().max_speed(grid()), bounds().alpha));
  flags.push_back({"peierls_stable", barrier().stable ? CheckStatus::pass : CheckStatus::fail,
                   barrier().residual, s.stabilization_tol});
  flags.push_back(flag_le("barrier_fixed_point", fixed_point_residual(barrier(), kernel()),
                          s.stabilization_tol));
  const MatherSolveResult& m = mather();
  flags.push_back(flag_le("mather_lp_vs_cycle", std::abs(m.value - cycle().mean), 1e-8));
  flags.push_back(flag_le("mather_conservation", m.conservation_residual, 1e-9));
  flags.push_back(flag_le("mather_mass", std::abs(m.measure.mass() - 1.0), 1e-9));
  std::vector<NodeIndex> support;
  for (NodeIndex y = 0; y < m.projected.size(); ++y) {
    if (m.projected[y] > 0.0) support.push_back(y);
  }
  flags.push_back(flag_le("mather_support_near_aubry",
                          cell_distance(grid(), support, aubry().nodes), 1.0));
  const std::optional<LimitFunctionResult>& shortcut = u0_shortcut();
  if (shortcut) {
    const LimitFunctionResult& lp = u0();
    double delta = 0.0;
    for (NodeIndex x : lp.targets) delta = std::max(delta, std::abs(lp.values[x] - shortcut->values[x]));
    // one grid cell of slope plus the near-optimality band
    const double lip = lipschitz_quotient(grid(), shortcut->values);
    const double tol = lip * grid().max_spacing() + std::max(lp.eps, shortcut->eps) + 1e-9;
    flags.push_back(flag_le("u0_methods_agree", delta, tol));
  }
  return flags;
}

Json Pipeline::base_document() {
  Json doc;
  doc["schema"] = "weakkam-report";
  doc["version"] = 1;
  doc["config"] = to_json(config_);
  return doc;
}

RunReport Pipeline::run() {
  RunReport report;
  const std::filesystem::path out = output_dir();
  write_bounds();
  write_critical();
  write_barrier_artifacts();
  write_mather();
  write_u0();
  const LimitReport verification = verify(u0());
  for (const DiscountedSolution& s : schedule_solutions()) write_discounted(s.lambda);
  write_text(out / "convergence.csv", convergence_csv(verification.convergence));

  report.flags = pipeline_flags();
  report.flags.insert(report.flags.end(), verification.flags.begin(), verification.flags.end());

  Json doc = base_document();
  doc["grid"] = {{"dim", grid().dim()}, {"nodes", grid().node_count()},
                 {"sizes", config_.problem.sizes}};
  Json b = to_json(bounds());
  b["bound_level"] = json_number(bound_level());
  doc["bounds"] = b;
  Json st = to_json(stencil(), grid());
  st["covers_alpha"] = kernel().covers_alpha();
  doc["stencil"] = st;
  Json crit = to_json(critical());
  crit["min_mean_cycle"] = to_json(cycle());
  crit["c_discrete"] = json_number(discrete_critical_value());
  crit["cross_check_delta"] = json_number(std::abs(critical().c_est - discrete_critical_value()));
  doc["critical"] = crit;
  Json bar = to_json(barrier());
  bar["window_doublings"] = doublings_;
  doc["barrier"] = bar;
  doc["aubry"] = {{"nodes", aubry().nodes},
                  {"classes", aubry().classes},
                  {"eps_aubry", json_number(aubry().eps_aubry)},
                  {"eps_class", json_number(aubry().eps_class)}};
  Json mj = to_json(mather());
  mj["projected"] = values_json(mather().projected);
  doc["mather"] = mj;
  Json uj = {{"eps_c", json_number(eps_c())},
             {"method", u0().method},
             {"values", values_json(u0().values)}};
  if (u0_shortcut()) {
    uj["shortcut"] = {{"eps", json_number(u0_shortcut()->eps)},
                      {"base_nodes", u0_shortcut()->base_nodes},
                      {"values", values_json(u0_shortcut()->values)}};
  }
  doc["u0"] = uj;
  Json discounted_meta = Json::array();
  for (const DiscountedSolution& s : schedule_solutions()) {
    Json d = to_json(s);
    d.erase("policy");
    discounted_meta.push_back(d);
  }
  doc["discounted"] = discounted_meta;
  doc["verification"] = to_json(verification);
  doc["flags"] = flags_json(report.flags);
  doc["passed"] = report.passed();
  report.document = doc;
  report.timings = timings_;
  write_json(out / "report.json", doc);
  return report;
}

void Pipeline::write_bounds() {
  Json doc = base_document();
  Json b = to_json(bounds());
  b["bound_level"] = json_number(bound_level());
  doc["bounds"] = b;
  doc["stencil"] = to_json(stencil(), grid());
  write_json(output_dir() / "bounds.json", doc);
}

void Pipeline::write_critical() {
  Json doc = base_document();
  Json crit = to_json(critical());
  crit["min_mean_cycle"] = to_json(cycle());
  crit["c_discrete"] = json_number(discrete_critical_value());
  crit["cross_check_delta"] = json_number(std::abs(critical().c_est - discrete_critical_value()));
  doc["critical"] = crit;
  write_json(output_dir() / "critical.json", doc);
}

void Pipeline::write_barrier_artifacts() {
  const std::filesystem::path out = output_dir();
  write_barrier(out / "barrier.bin", barrier());
  write_text(out / "aubry.csv", aubry_csv(grid(), aubry()));
}

void Pipeline::write_discounted(double lambda) {
  const DiscountedSolution& s = discounted(lambda);
  const std::string stem = "u_lambda_" + format_double(lambda);
  const std::filesystem::path out = output_dir();
  write_binary(out / (stem + ".bin"), s.values, {s.values.size()}, to_json(s));
  write_text(out / (stem + ".csv"), grid_function_csv(grid(), s.values));
  const NodeIndex x0 = grid().node_count() / 2;
  const std::size_t steps = occupation_steps(lambda, s.tau);
  write_text(out / (stem + "_trajectory.csv"),
             trajectory_csv(backward_trajectory(s, kernel(), x0, steps)));
}

void Pipeline::write_mather() {
  const std::filesystem::path out = output_dir();
  write_text(out / "mather_measure.csv", measure_csv(mather().measure));
  Json doc = base_document();
  Json mj = to_json(mather());
  mj["projected"] = values_json(mather().projected);
  mj["min_mean_cycle"] = to_json(cycle());
  doc["mather"] = mj;
  write_json(out / "mather.json", doc);
}

void Pipeline::write_u0() {
  const std::filesystem::path out = output_dir();
  const LimitFunctionResult& u = u0();
  write_text(out / "u0.csv", grid_function_csv(grid(), u.values));
  write_binary(out / "u0.bin", u.values, {u.values.size()},
               {{"method", u.method}, {"eps", json_number(u.eps)}});
  Json doc = base_document();
  doc["u0"] = to_json(u);
  if (u0_shortcut()) {
    doc["u0_shortcut"] = to_json(*u0_shortcut());
    write_text(out / "u0_shortcut.csv", grid_function_csv(grid(), u0_shortcut()->values));
  }
  write_json(out / "u0.json", doc);
}

RunReport Pipeline::verify_external(const std::vector<double>& values) {
  if (values.size() != grid().node_count()) {
    throw StageError("verify", "u0 has " + std::to_string(values.size()) +
                                   " values for a grid of " +
                                   std::to_string(grid().node_count()) + " nodes");
  }
  LimitFunctionResult u;
  u.values = values;
  u.method = "external";
  for (NodeIndex x = 0; x < values.size(); ++x) {
    if (std::isfinite(values[x])) u.targets.push_back(x);
  }
  const LimitReport verification = verify(u);
  RunReport report;
  report.flags = verification.flags;
  Json doc = base_document();
  doc["verification"] = to_json(verification);
  doc["flags"] = flags_json(report.flags);
  doc["passed"] = report.passed();
  report.document = doc;
  report.timings = timings_;
  write_json(output_dir() / "verify.json", doc);
  write_text(output_dir() / "convergence.csv", convergence_csv(verification.convergence));
  return report;
}

}  // namespace weakkam
