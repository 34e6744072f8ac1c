#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "weakkam/barrier.hpp"
#include "weakkam/bounds.hpp"
#include "weakkam/config.hpp"
#include "weakkam/discounted.hpp"
#include "weakkam/io.hpp"
#include "weakkam/limit.hpp"
#include "weakkam/mather.hpp"

namespace weakkam {

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

/// Outcome of a run. `document` is the deterministic report.json content;
/// timings are kept out of it.
struct RunReport {
  Json document;
  std::vector<CheckFlag> flags;
  std::vector<StageTiming> timings;

  bool passed() const;
};

/// Largest lattice distance (in cells, max over axes) from a node of `from`
/// to the nearest node of `to`.
int cell_distance(const TorusGrid& grid, const std::vector<NodeIndex>& from,
                  const std::vector<NodeIndex>& to);

/// Lazily evaluated experiment stages. Each accessor computes its stage (and
/// the stages it depends on) once; failures are rethrown as StageError.
class Pipeline {
 public:
  explicit Pipeline(ExperimentConfig config);

  const ExperimentConfig& config() const noexcept { return config_; }
  std::filesystem::path output_dir() const;

  const TorusGrid& grid();
  /// Upper bound max_x H(x,0) ≥ c(H) at which the bounds are sized.
  double bound_level();
  const StabilityBounds& bounds();
  /// Lagrangian with the velocity search box (and momentum box) configured.
  const LagrangianSpec& spec();
  const VelocityStencil& stencil();
  /// Kernel at shift 0.
  const ActionKernel& base_kernel();
  const CriticalEstimate& critical();
  const MeanCycle& cycle();
  /// −(min mean cycle): the exact critical value of the discrete graph.
  double discrete_critical_value();
  /// Kernel shifted by the discrete critical value.
  const ActionKernel& kernel();
  const BarrierMatrix& barrier();
  std::size_t window_doublings();
  const AubryReport& aubry();
  const MatherSolveResult& mather();
  double eps_c();
  const LimitFunctionResult& u0();
  /// Mechanical shortcut; empty for families not minimised at v = 0.
  const std::optional<LimitFunctionResult>& u0_shortcut();
  const DiscountedSolution& discounted(double lambda);
  std::vector<DiscountedSolution> schedule_solutions();
  LimitReport verify(const LimitFunctionResult& u0);

  /// Full run: every stage, all artifacts written, report returned.
  RunReport run();

  void write_bounds();
  void write_critical();
  void write_barrier_artifacts();
  void write_discounted(double lambda);
  void write_mather();
  void write_u0();
  /// Verification of an externally supplied u₀; writes verify.json.
  RunReport verify_external(const std::vector<double>& values);

  const std::vector<StageTiming>& timings() const noexcept { return timings_; }

 private:
  template <typename F>
  auto stage(const std::string& name, F&& fn);
  std::vector<CheckFlag> pipeline_flags();
  Json base_document();

  ExperimentConfig config_;
  std::optional<TorusGrid> grid_;
  std::optional<double> bound_level_;
  std::optional<StabilityBounds> bounds_;
  std::optional<LagrangianSpec> spec_;
  std::optional<VelocityStencil> stencil_;
  std::optional<ActionKernel> base_kernel_;
  std::optional<CriticalEstimate> critical_;
  std::optional<MeanCycle> cycle_;
  std::optional<ActionKernel> kernel_;
  std::optional<BarrierMatrix> barrier_;
  std::size_t doublings_ = 0;
  std::optional<AubryReport> aubry_;
  std::optional<MatherSolveResult> mather_;
  std::optional<LimitFunctionResult> u0_;
  bool shortcut_done_ = false;
  std::optional<LimitFunctionResult> shortcut_;
  std::map<double, DiscountedSolution> discounted_;
  std::vector<StageTiming> timings_;
};

}  // namespace weakkam
