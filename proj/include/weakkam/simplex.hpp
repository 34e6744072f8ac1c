#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace weakkam::lp {

struct SparseColumn {
  std::vector<std::pair<std::size_t, double>> entries;  ///< (row, coefficient)
};

/// Equality-form problem: A x = b, x ≥ 0. Costs are supplied per solve so
/// one feasible basis can be reused for several objectives.
struct Problem {
  std::size_t rows = 0;
  std::vector<double> rhs;
  std::vector<SparseColumn> columns;
};

struct Options {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-11;
  double pivot_tol = 1e-9;
  std::size_t max_iter = 2'000'000;
  std::size_t refactor_every = 64;
  /// Consecutive degenerate pivots after which pricing falls back to Bland.
  std::size_t degenerate_switch = 1000;
  /// Columns activated per pricing round of the outer loop.
  std::size_t max_add = 64;
};

enum class Status { optimal, unbounded, iteration_limit };

/// Dense revised simplex over an active subset of the problem's columns.
///
/// Inside the active set, entering columns are priced by most negative
/// reduced cost; during runs of degenerate pivots pricing switches to Bland's
/// rule (lowest-index improving column) so the method cannot cycle. Ratio
/// ties leave the lowest-index basic variable. When the active set is
/// optimal, every inactive column is priced with the current duals and the
/// most negative ones are activated; a solve ends only when no column of the
/// full problem has negative reduced cost, so results are optimal for the
/// full problem.
///
/// Construction runs phase 1 from an all-artificial basis and throws
/// InfeasibleError when the problem has no feasible point; optimize() then
/// runs phase 2 from the current basis. Copies are independent warm starts.
class RevisedSimplex {
 public:
  /// `initial_columns` seeds the active set (all columns when empty).
  explicit RevisedSimplex(std::shared_ptr<const Problem> problem, Options options = {},
                          std::vector<std::size_t> initial_columns = {});
  RevisedSimplex(const RevisedSimplex&);
  RevisedSimplex& operator=(const RevisedSimplex&);
  RevisedSimplex(RevisedSimplex&&) noexcept;
  RevisedSimplex& operator=(RevisedSimplex&&) noexcept;
  ~RevisedSimplex();

  Status optimize(std::span<const double> costs);

  /// Structural variable values of the current basic solution.
  std::vector<double> solution() const;
  double objective(std::span<const double> costs) const;
  std::size_t iterations() const noexcept;
  std::size_t active_columns() const noexcept;
  /// max |A x − b| of the current basic solution.
  double primal_residual() const;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

}  // namespace weakkam::lp
