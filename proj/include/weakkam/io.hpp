#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "weakkam/barrier.hpp"
#include "weakkam/bounds.hpp"
#include "weakkam/discounted.hpp"
#include "weakkam/limit.hpp"
#include "weakkam/mather.hpp"

namespace weakkam {

using Json = nlohmann::json;

/// 17 significant digits; "inf", "-inf", "nan" for non-finite values.
std::string format_double(double value);
/// Finite values as numbers, non-finite ones as the strings above.
Json json_number(double value);
double number_from_json(const Json& j);

void write_text(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);
/// Pretty-printed JSON with a trailing newline.
void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

/// Columns node, x[, y], value.
std::string grid_function_csv(const TorusGrid& grid, std::span<const double> values);
/// Reads the last column of a CSV with a header row.
std::vector<double> read_grid_function_csv(const std::filesystem::path& path);

/// Raw little-endian float64 dump plus `<path>.json` sidecar carrying the
/// shape and any extra metadata.
void write_binary(const std::filesystem::path& path, std::span<const double> values,
                  std::vector<std::size_t> shape, Json metadata = Json::object());
struct BinaryData {
  std::vector<double> values;
  std::vector<std::size_t> shape;
  Json metadata;
};
/// Throws Error when the file size disagrees with the sidecar.
BinaryData read_binary(const std::filesystem::path& path);
/// Dispatch on extension: .bin → read_binary, anything else → CSV.
std::vector<double> read_values(const std::filesystem::path& path);

/// Columns tail, offset, weight (offset = stencil index).
std::string measure_csv(const OccupationMeasure& measure);
/// Columns step, node, offset, speed.
std::string trajectory_csv(const TrajectorySample& traj);
/// Columns lambda, sup_error, min_neg_lambda_u, max_neg_lambda_u, lipschitz_quotient.
std::string convergence_csv(std::span<const ConvergenceRow> rows);
/// Columns node, x[, y], diagonal, class (−1 outside the Aubry set).
std::string aubry_csv(const TorusGrid& grid, const AubryReport& report);
/// Columns row, col, value.
std::string matrix_csv(const DenseMatrix& m);

void write_barrier(const std::filesystem::path& bin_path, const BarrierMatrix& h);

Json to_json(const StabilityBounds& b);
Json to_json(const VelocityStencil& s, const TorusGrid& grid);
Json to_json(const CriticalEstimate& e);
Json to_json(const DiscountedSolution& s);  ///< metadata only, values go to binary
Json to_json(const MeanCycle& c);
Json to_json(const MatherSolveResult& r);
Json to_json(const LimitFunctionResult& r);
Json to_json(const CheckFlag& f);
Json to_json(const LimitReport& r);
Json to_json(const BarrierMatrix& h);  ///< metadata only

}  // namespace weakkam
