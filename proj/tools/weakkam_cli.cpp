#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "weakkam/config.hpp"
#include "weakkam/error.hpp"
#include "weakkam/io.hpp"
#include "weakkam/parallel.hpp"
#include "weakkam/pipeline.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitError = 1;
constexpr int kExitVerificationFailed = 2;
constexpr int kExitUsage = 64;

struct Options {
  std::string config;
  std::vector<double> lambdas;
  std::vector<int> grid;
  std::string out;
  unsigned threads = 0;
  std::string u0;
};

weakkam::ExperimentConfig load(const Options& o) {
  weakkam::ExperimentConfig c = weakkam::load_config(o.config);
  if (!o.grid.empty()) {
    c.problem.sizes = o.grid;
    if (c.problem.sizes.size() == 1 && c.problem.dim == 2) c.problem.sizes.push_back(o.grid[0]);
  }
  if (!o.lambdas.empty()) c.schedule.lambdas = o.lambdas;
  if (!o.out.empty()) c.output = o.out;
  weakkam::validate(c);
  return c;
}

void print_flags(const std::vector<weakkam::CheckFlag>& flags) {
  for (const weakkam::CheckFlag& f : flags) {
    fmt::print("{:<36} {:<4} measured={} threshold={}\n", f.name, weakkam::to_string(f.status),
               weakkam::format_double(f.measured), weakkam::format_double(f.threshold));
  }
}

void print_timings(const weakkam::Pipeline& p) {
  for (const weakkam::StageTiming& t : p.timings()) {
    fmt::print(stderr, "time {:<16} {:.3f}s\n", t.stage, t.seconds);
  }
}

int run_command(const std::string& command, const Options& o) {
  weakkam::Pipeline p(load(o));
  int code = kExitPass;
  if (command == "bounds") {
    p.write_bounds();
    const weakkam::StabilityBounds& b = p.bounds();
    fmt::print("level    {}\nkappa    {}\nA_kappa  {}\nC0       {}\nalpha    {}\nv_search {}\n",
               weakkam::format_double(b.level), weakkam::format_double(b.kappa),
               weakkam::format_double(b.A_kappa), weakkam::format_double(b.C0),
               weakkam::format_double(b.alpha), weakkam::format_double(b.v_search));
    fmt::print("tau      {}\nradius   {}{}\n", weakkam::format_double(p.stencil().tau),
               p.stencil().radius, p.stencil().radius_capped ? " (capped)" : "");
  } else if (command == "critical") {
    p.write_critical();
    const double c_est = p.critical().c_est;
    const double c_disc = p.discrete_critical_value();
    const double delta = std::abs(c_est - c_disc);
    fmt::print("c_est = {}\nmin_mean_cycle = {}\ncross_check_delta = {}\n",
               weakkam::format_double(c_est), weakkam::format_double(-c_disc),
               weakkam::format_double(delta));
    if (!p.critical().spread_shrinks) fmt::print("warning: spread of -lambda*u does not shrink\n");
    if (delta > p.config().schedule.critical_tol) code = kExitVerificationFailed;
  } else if (command == "peierls") {
    p.write_barrier_artifacts();
    const weakkam::BarrierMatrix& h = p.barrier();
    fmt::print("window [{}, {}] residual {} ({})\n", h.burn_in, h.horizon,
               weakkam::format_double(h.residual), h.stable ? "stable" : "unstable");
    fmt::print("aubry nodes {} classes {}\n", p.aubry().nodes.size(), p.aubry().classes.size());
    if (!h.stable) code = kExitVerificationFailed;
  } else if (command == "discounted") {
    std::vector<double> lambdas = o.lambdas.empty() ? p.config().schedule.lambdas : o.lambdas;
    for (double lambda : lambdas) {
      p.write_discounted(lambda);
      const weakkam::DiscountedSolution& s = p.discounted(lambda);
      fmt::print("lambda {} iterations {} residual {}\n", weakkam::format_double(lambda),
                 s.iterations, weakkam::format_double(s.residual));
    }
  } else if (command == "mather") {
    p.write_mather();
    const weakkam::MatherSolveResult& m = p.mather();
    const double delta = std::abs(m.value - p.cycle().mean);
    fmt::print("value {}\nmin_mean_cycle {}\nconservation_residual {}\nsupport_edges {}\n",
               weakkam::format_double(m.value), weakkam::format_double(p.cycle().mean),
               weakkam::format_double(m.conservation_residual), m.support.size());
    if (delta > 1e-8 || m.conservation_residual > 1e-9) code = kExitVerificationFailed;
  } else if (command == "u0") {
    p.write_u0();
    fmt::print("u0 ({}) written to {}\n", p.u0().method, (p.output_dir() / "u0.csv").string());
  } else if (command == "converge") {
    const weakkam::RunReport r = p.run();
    print_flags(r.flags);
    fmt::print("{}\n", r.passed() ? "PASS" : "FAIL");
    if (!r.passed()) code = kExitVerificationFailed;
  } else if (command == "verify") {
    const weakkam::RunReport r = p.verify_external(weakkam::read_values(o.u0));
    print_flags(r.flags);
    fmt::print("{}\n", r.passed() ? "PASS" : "FAIL");
    if (!r.passed()) code = kExitVerificationFailed;
  }
  print_timings(p);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discounted weak KAM limits on periodic grids"};
  app.require_subcommand(1);
  Options o;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"bounds", "Stability bounds and stencil"},
      {"critical", "Critical value estimate with min-mean-cycle cross-check"},
      {"peierls", "Peierls barrier, Aubry set and Mather classes"},
      {"discounted", "Discounted solutions for the given lambdas"},
      {"mather", "Mather measure linear program"},
      {"u0", "Limit function u0"},
      {"converge", "Full pipeline with report"},
      {"verify", "Verify an externally supplied u0"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", o.config, "Experiment configuration (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--lambda", o.lambdas, "Discount rate(s); replaces the schedule");
    sub->add_option("--grid", o.grid, "Grid size per axis")->delimiter(',');
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--threads", o.threads, "Worker threads (default WEAKKAM_THREADS or 1)")
        ->check(CLI::Range(1u, 1024u));
    if (name == "verify") {
      sub->add_option("--u0", o.u0, "u0 values (.csv or .bin with .bin.json sidecar)")
          ->required()
          ->check(CLI::ExistingFile);
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  if (o.threads > 0) weakkam::set_thread_count(o.threads);
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run_command(command, o);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitError;
  }
}
