#pragma once

// CSV and JSON serialization of trajectories and analysis reports, and
// atomic file output.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "flocsim/analysis_multi.hpp"
#include "flocsim/analysis_single.hpp"
#include "flocsim/numerics.hpp"

namespace flocsim::io {

/// Writes to a sibling temp file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// `t,<columns>` with one row per entry of `grid`, sampled by dense output.
std::string trajectory_csv(const numerics::Trajectory& trajectory,
                           const std::vector<std::string>& columns,
                           const std::vector<double>& grid);

/// `x,phi,gamma` on `points` values of x in [0, x_max]; phi is empty where
/// it does not exist.
std::string nullclines_csv(const ReducedModel& model, std::size_t points);

/// `branch,S,x`.
std::string separatrix_csv(const single::Separatrix& separatrix);

std::string equilibria_json(const single::EquilibriumReport& report);
std::string hypotheses_json(const single::HypothesisReport& report);
std::string multi_equilibrium_json(const multi::DiagonalMultiModel& model,
                                   const std::optional<multi::MultiEquilibrium>& equilibrium);

/// Checks that `json_text` is a report written by this module: the schema
/// version, the `report` tag and the fields that tag requires. Throws
/// ConfigError otherwise and returns the tag.
std::string validate_report_json(const std::string& json_text);

} // namespace flocsim::io
