#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "regkrylov/io.hpp"
#include "regkrylov/problems.hpp"
#include "regkrylov/solvers.hpp"

namespace regkrylov {

struct DiagnosticsToggles {
  bool gamma = false;
  bool sintheta = false;
  bool filters = false;
  bool decay = false;
  bool lcurve = true;
};

struct ExperimentConfig {
  ProblemName problem = ProblemName::shaw;
  std::size_t n = 0;
  BlurParams blur;
  SyntheticSpec synthetic;
  std::vector<double> noise_levels;  // empty: one noise-free cell
  std::vector<std::uint64_t> seeds{1};
  std::vector<SolverId> solvers;
  std::size_t k_max = 30;
  DiagnosticsToggles diagnostics;
  HybridRule hybrid = HybridRule::lcurve();
  std::filesystem::path output_dir = "out";
};

/// Validates and fills defaults; throws ConfigError with the offending field.
ExperimentConfig parse_config(const json& doc);
json config_to_json(const ExperimentConfig& cfg);

struct CellSummary {
  SolverId solver = SolverId::minres;
  double noise_level = 0.0;
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  std::optional<double> best_error;
  std::optional<std::size_t> semiconvergence_index;
  std::optional<std::size_t> lcurve_corner;
  std::size_t matvecs = 0;
  bool breakdown = false;
  std::string trace_file;
  std::string diagnostics_file;
};

struct RunReport {
  json config;
  std::vector<CellSummary> cells;
  std::vector<std::string> manifest;  // relative to output_dir
  std::vector<std::string> notes;     // diagnostics that stopped early
};

json report_to_json(const RunReport& report);

/// Runs every (noise level, seed, solver) cell and writes traces,
/// diagnostics and summary.json into cfg.output_dir.
RunReport run(const ExperimentConfig& cfg);

/// Figure ids accepted by reproduce.
const std::vector<std::string>& figure_ids();

/// Writes CSV series and a gnuplot script for one figure; returns the files written.
std::vector<std::string> reproduce(const std::string& figure, bool full, const std::filesystem::path& out_dir);

}  // namespace regkrylov
