#pragma once

#include <filesystem>
#include <iosfwd>

#include <json.hpp>

#include "aoi/core_model.hpp"

namespace aoi {

using json = nlohmann::json;

// {"n_users": N, "horizon": T, "m_levels": M, "thresholds": [[row per user]]}
json pattern_to_json(const ChannelPattern& pattern);
ChannelPattern pattern_from_json(const json& j);
ChannelPattern load_pattern(const std::filesystem::path& path);
void save_pattern(const ChannelPattern& pattern, const std::filesystem::path& path);

/// Accepts a bare array of costs, {"costs": [...]}, or {"linear": {"c1", "step", "m_levels"}}.
CostSchedule costs_from_json(const json& j);

/// One row per slot: slot, decision, tx_cost, avg_age_cost (slot numbers start at 1).
void write_run_csv(const RunResult& run, std::ostream& out);
json run_summary_json(const RunResult& run);

json read_json_file(const std::filesystem::path& path);

}  // namespace aoi
