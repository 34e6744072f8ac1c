#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "weakkam/grid.hpp"
#include "weakkam/kernel.hpp"
#include "weakkam/lagrangian.hpp"

namespace weakkam {

struct PotentialConfig {
  std::string type = "zero";  ///< zero | cosine | table
  double amplitude = 1.0;
  int frequency = 1;
  std::string path;           ///< CSV for tables, relative to the config file
  std::vector<int> sizes;     ///< table grid; defaults to the problem grid
};

struct ProblemConfig {
  Family family = Family::mechanical;
  PotentialConfig potential;
  std::vector<double> drift;
  int dim = 1;
  std::vector<int> sizes{64};
};

struct DiscretizationConfig {
  std::optional<double> tau;            ///< null → √h
  std::optional<int> stencil_radius;    ///< null → ceil(α τ / h), capped
  std::optional<double> v_search;       ///< null → 2α
  std::string quadrature = "trapezoid"; ///< trapezoid | left
};

struct ScheduleConfig {
  std::vector<double> lambdas{0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125,
                              0.00390625, 0.001953125};
  std::vector<double> critical_lambdas{0.4, 0.2, 0.1, 0.05};
  std::optional<std::size_t> burn_in;   ///< null → 4·max n
  std::optional<std::size_t> horizon;   ///< null → 2·burn_in
  std::size_t max_window_doublings = 4;
  double solver_tol = 1e-10;
  std::size_t max_iter = 5'000'000;
  double stabilization_tol = 1e-9;
  double eps_aubry = 1e-8;
  std::optional<double> eps_class;      ///< null → 10·(h + τ)·ℓ
  std::optional<double> eps_c;          ///< null → 10·|c_est − (−min mean)| + 1e−6
  std::optional<double> eps_mechanical;  ///< null → same rule as eps_c
  std::size_t target_stride = 1;
  double critical_tol = 0.05;
  double integral_tol = 1e-6;
  double plateau_max = 0.1;
  double lemma_lambda = 0.01;
  std::size_t lemma_samples = 8;
};

struct ExperimentConfig {
  ProblemConfig problem;
  DiscretizationConfig discretization;
  ScheduleConfig schedule;
  std::string output = "out";
  /// Directory used to resolve relative paths; not serialized.
  std::filesystem::path base_dir;

  TorusGrid grid() const;
  /// Builds the Lagrangian (loading table potentials from disk).
  LagrangianSpec spec() const;
};

/// Throws ConfigError on unknown keys, wrong types or invalid values.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);
/// Throws ConfigError: positive tolerances, strictly decreasing λ lists,
/// consistent dimensions.
void validate(const ExperimentConfig& config);

}  // namespace weakkam
