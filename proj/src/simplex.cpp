#include "weakkam/simplex.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "weakkam/error.hpp"

namespace weakkam::lp {

// Variable ids: structural column j of the problem is j, the artificial of
// row i is N + i. Lower ids come first in every tie-break.
struct RevisedSimplex::State {
  std::shared_ptr<const Problem> problem;
  Options options;
  std::size_t m = 0;
  std::size_t N = 0;
  std::vector<double> row_sign;      // rows flipped so that b ≥ 0
  std::vector<double> b;
  std::vector<std::size_t> active;   // sorted structural ids
  std::vector<char> is_active;
  std::vector<std::size_t> basis;    // variable id per basis row
  std::vector<std::ptrdiff_t> position;  // basis row per variable, −1 if nonbasic
  Eigen::MatrixXd binv;
  Eigen::VectorXd xb;
  std::size_t iterations = 0;
  std::size_t since_refactor = 0;

  bool artificial(std::size_t var) const { return var >= N; }

  // Column of variable `var` after row sign flips, as (row, value) pairs.
  template <typename F>
  void for_column(std::size_t var, F&& f) const {
    if (artificial(var)) {
      f(var - N, 1.0);
      return;
    }
    for (const auto& [row, value] : problem->columns[var].entries) f(row, row_sign[row] * value);
  }

  double reduced_cost(std::size_t var, double cost, const Eigen::RowVectorXd& y) const {
    double d = cost;
    for_column(var, [&](std::size_t row, double value) {
      d -= y(static_cast<Eigen::Index>(row)) * value;
    });
    return d;
  }

  Eigen::VectorXd ftran(std::size_t var) const {
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    for_column(var, [&](std::size_t row, double value) {
      alpha += value * binv.col(static_cast<Eigen::Index>(row));
    });
    return alpha;
  }

  void activate(std::size_t j) {
    if (is_active[j]) return;
    is_active[j] = 1;
    active.insert(std::lower_bound(active.begin(), active.end(), j), j);
  }

  void refactor() {
    const auto mm = static_cast<Eigen::Index>(m);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(mm, mm);
    for (std::size_t i = 0; i < m; ++i) {
      for_column(basis[i], [&](std::size_t row, double value) {
        B(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(i)) = value;
      });
    }
    binv = B.partialPivLu().inverse();
    Eigen::Map<const Eigen::VectorXd> rhs(b.data(), mm);
    xb = binv * rhs;
    for (Eigen::Index i = 0; i < xb.size(); ++i) {
      if (xb(i) < 0.0 && xb(i) > -options.feasibility_tol) xb(i) = 0.0;
    }
    since_refactor = 0;
  }

  void pivot(std::size_t row, std::size_t entering, const Eigen::VectorXd& alpha) {
    const auto r = static_cast<Eigen::Index>(row);
    const double theta = xb(r) / alpha(r);
    xb -= theta * alpha;
    xb(r) = theta;
    const Eigen::RowVectorXd pivot_row = binv.row(r) / alpha(r);
    binv -= alpha * pivot_row;
    binv.row(r) = pivot_row;
    position[basis[row]] = -1;
    basis[row] = entering;
    position[entering] = static_cast<std::ptrdiff_t>(row);
    ++iterations;
    if (++since_refactor >= options.refactor_every) refactor();
  }

  Eigen::RowVectorXd duals(const std::vector<double>& costs) const {
    Eigen::VectorXd cb(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) cb(static_cast<Eigen::Index>(i)) = costs[basis[i]];
    return cb.transpose() * binv;
  }

  // Simplex iterations over the active set. `costs` is indexed by variable
  // id (size N + m).
  Status run_active(const std::vector<double>& costs, bool allow_artificial) {
    std::size_t degenerate_run = 0;
    const std::size_t none = N + m;
    for (;;) {
      if (iterations >= options.max_iter) return Status::iteration_limit;
      const Eigen::RowVectorXd y = duals(costs);
      const bool bland = degenerate_run >= options.degenerate_switch;
      std::size_t entering = none;
      double most_negative = -options.optimality_tol;
      auto consider = [&](std::size_t var) {
        if (position[var] >= 0) return false;
        const double d = reduced_cost(var, costs[var], y);
        if (d < most_negative) {
          most_negative = d;
          entering = var;
          return bland;
        }
        return false;
      };
      bool stop = false;
      for (std::size_t j : active) {
        if ((stop = consider(j))) break;
      }
      if (!stop && allow_artificial) {
        for (std::size_t i = 0; i < m; ++i) {
          if (consider(N + i)) break;
        }
      }
      if (entering == none) return Status::optimal;

      const Eigen::VectorXd alpha = ftran(entering);
      std::size_t leave = m;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        const double a = alpha(static_cast<Eigen::Index>(i));
        if (a <= options.pivot_tol) continue;
        const double ratio = std::max(0.0, xb(static_cast<Eigen::Index>(i))) / a;
        if (leave == m) {
          best = ratio;
          leave = i;
          continue;
        }
        const double slack = 1e-12 * std::max(1.0, std::abs(best));
        if (ratio < best - slack) {
          best = ratio;
          leave = i;
        } else if (ratio <= best + slack && basis[i] < basis[leave]) {
          best = std::min(best, ratio);
          leave = i;
        }
      }
      if (leave == m) return Status::unbounded;
      degenerate_run = best <= options.feasibility_tol ? degenerate_run + 1 : 0;
      pivot(leave, entering, alpha);
    }
  }

  // Active-set simplex plus pricing of the inactive columns.
  Status solve(const std::vector<double>& costs, bool allow_artificial) {
    for (;;) {
      const Status status = run_active(costs, allow_artificial);
      if (status != Status::optimal) return status;
      if (active.size() == N) return status;
      const Eigen::RowVectorXd y = duals(costs);
      std::vector<std::pair<double, std::size_t>> candidates;
      for (std::size_t j = 0; j < N; ++j) {
        if (is_active[j]) continue;
        const double d = reduced_cost(j, costs[j], y);
        if (d < -options.optimality_tol) candidates.emplace_back(d, j);
      }
      if (candidates.empty()) return status;
      const std::size_t take = std::min(candidates.size(), std::max<std::size_t>(options.max_add, 1));
      std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                        candidates.end());
      for (std::size_t k = 0; k < take; ++k) activate(candidates[k].second);
    }
  }
};

RevisedSimplex::RevisedSimplex(std::shared_ptr<const Problem> problem, Options options,
                               std::vector<std::size_t> initial_columns)
    : state_(std::make_unique<State>()) {
  State& s = *state_;
  s.problem = std::move(problem);
  s.options = options;
  s.m = s.problem->rows;
  s.N = s.problem->columns.size();
  if (s.problem->rhs.size() != s.m) throw InvalidArgument("simplex: rhs size mismatch");
  s.row_sign.assign(s.m, 1.0);
  s.b = s.problem->rhs;
  for (std::size_t i = 0; i < s.m; ++i) {
    if (s.b[i] < 0.0) {
      s.row_sign[i] = -1.0;
      s.b[i] = -s.b[i];
    }
  }
  for (const SparseColumn& col : s.problem->columns) {
    for (const auto& entry : col.entries) {
      if (entry.first >= s.m) throw InvalidArgument("simplex: column entry outside the row range");
    }
  }
  s.is_active.assign(s.N, 0);
  if (initial_columns.empty()) {
    s.active.resize(s.N);
    for (std::size_t j = 0; j < s.N; ++j) s.active[j] = j;
    std::fill(s.is_active.begin(), s.is_active.end(), 1);
  } else {
    for (std::size_t j : initial_columns) {
      if (j >= s.N) throw InvalidArgument("simplex: initial column out of range");
      s.activate(j);
    }
  }
  s.basis.resize(s.m);
  s.position.assign(s.N + s.m, -1);
  for (std::size_t i = 0; i < s.m; ++i) {
    s.basis[i] = s.N + i;
    s.position[s.N + i] = static_cast<std::ptrdiff_t>(i);
  }
  s.refactor();

  std::vector<double> phase1(s.N + s.m, 0.0);
  std::fill(phase1.begin() + static_cast<std::ptrdiff_t>(s.N), phase1.end(), 1.0);
  const Status status = s.solve(phase1, true);
  if (status == Status::iteration_limit) throw Error("simplex phase 1 hit the iteration limit");
  s.refactor();
  double infeasibility = 0.0;
  for (std::size_t i = 0; i < s.m; ++i) {
    if (s.artificial(s.basis[i])) infeasibility += std::abs(s.xb(static_cast<Eigen::Index>(i)));
  }
  if (infeasibility > s.options.feasibility_tol) {
    throw InfeasibleError("linear program is infeasible (phase 1 residual " +
                          std::to_string(infeasibility) + ")");
  }
  // Drive zero-level artificials out of the basis; rows where no active
  // column has a nonzero entry are redundant and keep their artificial.
  for (std::size_t i = 0; i < s.m; ++i) {
    if (!s.artificial(s.basis[i])) continue;
    const Eigen::RowVectorXd row = s.binv.row(static_cast<Eigen::Index>(i));
    for (std::size_t j : s.active) {
      if (s.position[j] >= 0) continue;
      double a = 0.0;
      s.for_column(j, [&](std::size_t r, double value) {
        a += row(static_cast<Eigen::Index>(r)) * value;
      });
      if (std::abs(a) > s.options.pivot_tol) {
        s.pivot(i, j, s.ftran(j));
        break;
      }
    }
  }
  s.refactor();
}

RevisedSimplex::RevisedSimplex(const RevisedSimplex& other)
    : state_(std::make_unique<State>(*other.state_)) {}

RevisedSimplex& RevisedSimplex::operator=(const RevisedSimplex& other) {
  if (this != &other) state_ = std::make_unique<State>(*other.state_);
  return *this;
}

RevisedSimplex::RevisedSimplex(RevisedSimplex&&) noexcept = default;
RevisedSimplex& RevisedSimplex::operator=(RevisedSimplex&&) noexcept = default;
RevisedSimplex::~RevisedSimplex() = default;

Status RevisedSimplex::optimize(std::span<const double> costs) {
  State& s = *state_;
  if (costs.size() != s.N) throw InvalidArgument("simplex: cost vector size mismatch");
  std::vector<double> full(s.N + s.m, 0.0);
  std::copy(costs.begin(), costs.end(), full.begin());
  const Status status = s.solve(full, false);
  s.refactor();
  return status;
}

std::vector<double> RevisedSimplex::solution() const {
  const State& s = *state_;
  std::vector<double> x(s.N, 0.0);
  for (std::size_t i = 0; i < s.m; ++i) {
    if (!s.artificial(s.basis[i])) x[s.basis[i]] = std::max(0.0, s.xb(static_cast<Eigen::Index>(i)));
  }
  return x;
}

double RevisedSimplex::objective(std::span<const double> costs) const {
  const std::vector<double> x = solution();
  double v = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) v += costs[j] * x[j];
  return v;
}

std::size_t RevisedSimplex::iterations() const noexcept { return state_->iterations; }

std::size_t RevisedSimplex::active_columns() const noexcept { return state_->active.size(); }

double RevisedSimplex::primal_residual() const {
  const State& s = *state_;
  const std::vector<double> x = solution();
  std::vector<double> r(s.m, 0.0);
  for (std::size_t j = 0; j < s.N; ++j) {
    if (x[j] == 0.0) continue;
    for (const auto& [row, value] : s.problem->columns[j].entries) r[row] += value * x[j];
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < s.m; ++i) worst = std::max(worst, std::abs(r[i] - s.problem->rhs[i]));
  return worst;
}

}  // namespace weakkam::lp
