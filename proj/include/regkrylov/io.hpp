#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "regkrylov/diagnostics.hpp"
#include "regkrylov/problems.hpp"
#include "regkrylov/solvers.hpp"

namespace regkrylov {

using json = nlohmann::ordered_json;

/// Problem document; binary arrays are base64 of little-endian float64.
json problem_to_json(const DiscretizedProblem& p);
DiscretizedProblem problem_from_json(const json& doc);

std::string encode_doubles(std::span<const double> values);
Vector decode_doubles(const std::string& text);

/// Columns k, residual_norm, solution_norm, relative_error (%.17g; empty when unknown).
std::string trace_to_csv(const IterateTrace& trace);

struct CsvRow {
  std::size_t k = 0;
  double residual_norm = 0.0;
  double solution_norm = 0.0;
  std::optional<double> relative_error;
};
std::vector<CsvRow> parse_trace_csv(const std::string& text);

json diagnostics_to_json(const DiagnosticsReport& report);

/// 8-bit binary PGM of an m×m column-stacked image, rescaled linearly to [0, 255].
std::string to_pgm(std::span<const double> image, std::size_t m);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

/// Shortest text that reads back to the same double.
std::string format_double(double v);

}  // namespace regkrylov
