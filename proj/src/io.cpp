#include "aoi/io.hpp"

#include <fstream>
#include <ostream>

#include <fmt/format.h>

#include "aoi/errors.hpp"

namespace aoi {

json pattern_to_json(const ChannelPattern& pattern) {
  json rows = json::array();
  for (int i = 0; i < pattern.users(); ++i) {
    json row = json::array();
    for (int t = 0; t < pattern.horizon(); ++t) row.push_back(pattern.thresholds()(i, t));
    rows.push_back(std::move(row));
  }
  return {{"n_users", pattern.users()},
          {"horizon", pattern.horizon()},
          {"m_levels", pattern.levels()},
          {"thresholds", std::move(rows)}};
}

ChannelPattern pattern_from_json(const json& j) {
  try {
    const int users = j.at("n_users").get<int>();
    const int horizon = j.at("horizon").get<int>();
    const int levels = j.at("m_levels").get<int>();
    const json& rows = j.at("thresholds");
    if (users < 0 || horizon < 0) throw ConfigError("pattern dimensions must be non-negative");
    if (static_cast<int>(rows.size()) != users)
      throw ConfigError(fmt::format("pattern declares {} users but has {} rows", users, rows.size()));
    ThresholdMatrix thresholds(users, horizon);
    for (int i = 0; i < users; ++i) {
      const json& row = rows.at(static_cast<std::size_t>(i));
      if (static_cast<int>(row.size()) != horizon)
        throw ConfigError(fmt::format("pattern row {} has {} slots, expected {}", i, row.size(), horizon));
      for (int t = 0; t < horizon; ++t) thresholds(i, t) = row.at(static_cast<std::size_t>(t)).get<int>();
    }
    return ChannelPattern(std::move(thresholds), levels);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed channel pattern: ") + e.what());
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

ChannelPattern load_pattern(const std::filesystem::path& path) { return pattern_from_json(read_json_file(path)); }

void save_pattern(const ChannelPattern& pattern, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << pattern_to_json(pattern).dump() << '\n';
}

CostSchedule costs_from_json(const json& j) {
  try {
    if (j.is_array()) return CostSchedule(j.get<std::vector<double>>());
    if (j.contains("costs")) return CostSchedule(j.at("costs").get<std::vector<double>>());
    if (j.contains("linear")) {
      const json& lin = j.at("linear");
      return CostSchedule::linear(lin.at("c1").get<double>(), lin.value("step", 5.0), lin.at("m_levels").get<int>());
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed cost schedule: ") + e.what());
  }
  throw ConfigError("cost schedule must be an array, {\"costs\": [...]} or {\"linear\": {...}}");
}

void write_run_csv(const RunResult& run, std::ostream& out) {
  out << "slot,decision,tx_cost,avg_age_cost\n";
  for (std::size_t t = 0; t < run.decisions.size(); ++t)
    out << fmt::format("{},{},{},{}\n", t + 1, run.decisions[t], run.tx_cost[t], run.avg_age_cost[t]);
}

json run_summary_json(const RunResult& run) {
  return {{"total_cost", run.total_cost},
          {"time_avg_total_cost", run.time_avg_total_cost},
          {"time_avg_age", run.time_avg_age}};
}

}  // namespace aoi
