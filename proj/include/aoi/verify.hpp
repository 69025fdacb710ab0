#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "aoi/core_model.hpp"

namespace aoi {

struct Instance {
  ChannelPattern pattern;
  CostSchedule costs;
};

struct InstanceShape {
  int max_users = 5;
  int max_horizon = 100;
  int max_levels = 4;
  double c1_min = 1.0;
  double c1_max = 60.0;
};

/// Random instance with N, T, M drawn uniformly up to the caps. Costs mix
/// fractional and integral C_1, flat and increasing schedules. Thresholds mix
/// iid, shared and bursty patterns.
Instance random_instance(std::mt19937_64& engine, const InstanceShape& shape);

struct VerifyConfig {
  int instances = 300;
  InstanceShape shape{5, 60, 4, 1.0, 60.0};
  int oracle_instances = 60;
  InstanceShape oracle_shape{3, 10, 3, 1.0, 20.0};
  int mc_instances = 8;
  int mc_draws = 2000;
  std::uint64_t seed = 1;
  /// Test hook: "flip_additive_sign" negates the additive term of the x update.
  std::string inject_fault;

  static VerifyConfig from_json(const nlohmann::json& j);
};

struct CheckResult {
  std::string name;
  bool passed = true;
  int cases = 0;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool passed() const;
};

/// Runs the invariant checks over randomized instances. Zero instances is a usage error.
VerifyReport verify_suite(const VerifyConfig& config);

/// One JSON object per line: {"check", "passed", "cases", "detail"}.
void write_verify_report(const VerifyReport& report, std::ostream& out);

}  // namespace aoi
