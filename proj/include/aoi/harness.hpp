#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "aoi/channel_gen.hpp"
#include "aoi/core_model.hpp"
#include "aoi/offline_oracle.hpp"

namespace aoi {

struct ChannelSource {
  enum class Kind { file, markov, adversarial };
  Kind kind = Kind::markov;
  std::filesystem::path file;
  MarkovChannelSpec markov = MarkovChannelSpec::lazy();
  std::string family;
  AdversarialParams adversarial;
};

struct ExperimentConfig {
  std::vector<std::string> schedulers{"online", "agnostic", "greedy1", "greedy2"};
  ChannelSource channel;
  int users = 5;
  int horizon = 10000;
  int levels = 4;
  /// Either an explicit schedule or the rule C_k = C_1 + cost_step (k - 1), swept over c1_values.
  std::optional<std::vector<double>> explicit_costs;
  std::vector<double> c1_values{30.0};
  double cost_step = 5.0;
  int repetitions = 1;
  std::uint64_t seed = 1;
  std::filesystem::path output_csv;
  std::optional<std::filesystem::path> trace_dir;
  bool oracle = false;
  OracleCaps oracle_caps;

  /// Relative file paths resolve against `base_dir`.
  static ExperimentConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  void validate() const;
  std::vector<CostSchedule> cost_schedules() const;
};

struct ExperimentRow {
  std::string scheduler;
  std::uint64_t seed = 0;
  int rep = 0;
  int users = 0;
  int horizon = 0;
  int levels = 0;
  double c1 = 0.0;
  double total_cost = 0.0;
  double time_avg_total_cost = 0.0;
  double time_avg_age = 0.0;
  std::optional<double> opt_cost;
  double dual_lb = 0.0;
  std::optional<double> ratio_vs_opt;
  double ratio_vs_dual_lb = 0.0;
  double theorem_bound = 0.0;
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;
  std::vector<std::string> warnings;
};

/// Rows come out ordered by (C_1, rep, scheduler) whatever the worker count.
/// Workers default to AOI_WORKERS or the hardware thread count.
ExperimentResult run_experiment(const ExperimentConfig& config, std::optional<int> workers = std::nullopt);

void write_experiment_csv(const std::vector<ExperimentRow>& rows, std::ostream& out);

int worker_count_from_env();

}  // namespace aoi
