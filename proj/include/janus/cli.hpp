#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "janus/controller.hpp"
#include "janus/sim_engine.hpp"

namespace janus::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDivergence = 3;

/// Frozen trace.csv header.
const std::vector<std::string>& trace_columns();

std::string format_double(double v);

std::string trace_csv(const SimTrace& trace);
nlohmann::json path_json(const PathSummary& path);
nlohmann::json summary_json(const std::string& label, const ScenarioConfig& config,
                            const SimTrace& trace, const PathSummary& path);
nlohmann::json ensemble_json(const std::string& label, const ScenarioConfig& config,
                             const EnsembleSummary& ensemble);
std::string frontier_csv(const std::vector<FrontierPoint>& points);
nlohmann::json equilibrium_json(const EquilibriumReport& report);

using OutputFile = std::pair<std::string, std::string>;

/// Writes every file to a temporary name first and renames only after all
/// writes succeeded.
void write_outputs(const std::filesystem::path& dir, const std::vector<OutputFile>& files);

/// Entry point. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace janus::cli
