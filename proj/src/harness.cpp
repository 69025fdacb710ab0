#include "aoi/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "aoi/errors.hpp"
#include "aoi/io.hpp"
#include "aoi/primal_dual.hpp"
#include "aoi/random.hpp"
#include "aoi/schedulers.hpp"

namespace aoi {

namespace {

constexpr std::uint64_t kChannelStream = 0x6368616e6e656cULL;
constexpr std::uint64_t kSchedulerStream = 0x7363686564ULL;

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  ExperimentConfig config;
  try {
    if (j.contains("schedulers")) config.schedulers = j.at("schedulers").get<std::vector<std::string>>();
    config.users = j.value("n_users", config.users);
    config.horizon = j.value("horizon", config.horizon);
    config.levels = j.value("m_levels", config.levels);
    config.repetitions = j.value("repetitions", config.repetitions);
    config.seed = j.value("seed", config.seed);
    config.oracle = j.value("oracle", config.oracle);
    if (j.contains("output_csv")) config.output_csv = resolve(base_dir, j.at("output_csv").get<std::string>());
    if (j.contains("trace_dir")) config.trace_dir = resolve(base_dir, j.at("trace_dir").get<std::string>());
    if (j.contains("oracle_caps")) {
      config.oracle_caps.max_users = j.at("oracle_caps").value("max_users", config.oracle_caps.max_users);
      config.oracle_caps.max_horizon = j.at("oracle_caps").value("max_horizon", config.oracle_caps.max_horizon);
    }

    if (j.contains("channel")) {
      const auto& ch = j.at("channel");
      if (ch.contains("file")) {
        config.channel.kind = ChannelSource::Kind::file;
        config.channel.file = resolve(base_dir, ch.at("file").get<std::string>());
      } else if (ch.contains("markov")) {
        config.channel.kind = ChannelSource::Kind::markov;
        config.channel.markov = markov_spec_from_json(ch.at("markov"));
      } else if (ch.contains("adversarial")) {
        const auto& adv = ch.at("adversarial");
        config.channel.kind = ChannelSource::Kind::adversarial;
        config.channel.family = adv.at("family").get<std::string>();
        config.channel.adversarial.level = adv.value("level", 1);
        config.channel.adversarial.burst_length = adv.value("burst_length", 16);
      } else {
        throw ConfigError("channel must name a \"file\", \"markov\" spec or \"adversarial\" family");
      }
    } else {
      config.channel.markov = MarkovChannelSpec::lazy(config.levels);
    }
    config.channel.adversarial.m_levels = config.levels;

    if (j.contains("costs")) {
      const auto& costs = j.at("costs");
      if (costs.contains("explicit")) {
        config.explicit_costs = costs.at("explicit").get<std::vector<double>>();
      } else if (costs.contains("linear")) {
        const auto& lin = costs.at("linear");
        config.cost_step = lin.value("step", config.cost_step);
        if (lin.contains("c1_values"))
          config.c1_values = lin.at("c1_values").get<std::vector<double>>();
        else
          config.c1_values = {lin.at("c1").get<double>()};
      } else {
        throw ConfigError("costs must be {\"explicit\": [...]} or {\"linear\": {\"c1\" | \"c1_values\", \"step\"}}");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed experiment config: ") + e.what());
  }
  config.validate();
  return config;
}

void ExperimentConfig::validate() const {
  if (schedulers.empty()) throw ConfigError("config lists no schedulers");
  for (const auto& name : schedulers)
    if (std::find(scheduler_names().begin(), scheduler_names().end(), name) == scheduler_names().end())
      throw ConfigError(fmt::format("unknown scheduler '{}' (expected online, agnostic, greedy1 or greedy2)", name));
  if (repetitions < 1) throw ConfigError("repetitions must be at least 1");
  if (users < 1) throw ConfigError("n_users must be at least 1");
  if (horizon < 1) throw ConfigError("horizon must be at least 1");
  if (levels < 1) throw ConfigError("m_levels must be at least 1");
  if (channel.kind == ChannelSource::Kind::file && !std::filesystem::exists(channel.file))
    throw ConfigError("channel file " + channel.file.string() + " does not exist");
  if (channel.kind == ChannelSource::Kind::markov && channel.markov.m_levels != levels)
    throw ConfigError(fmt::format("Markov spec has {} states but m_levels is {}", channel.markov.m_levels, levels));
  if (explicit_costs && static_cast<int>(explicit_costs->size()) != levels)
    throw ConfigError(fmt::format("explicit cost list has {} entries but m_levels is {}", explicit_costs->size(), levels));
  if (!explicit_costs && c1_values.empty()) throw ConfigError("linear cost rule needs at least one C_1 value");
  (void)cost_schedules();
}

std::vector<CostSchedule> ExperimentConfig::cost_schedules() const {
  if (explicit_costs) return {CostSchedule(*explicit_costs)};
  std::vector<CostSchedule> schedules;
  for (double c1 : c1_values) schedules.push_back(CostSchedule::linear(c1, cost_step, levels));
  return schedules;
}

int worker_count_from_env() {
  if (const char* env = std::getenv("AOI_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ExperimentResult run_experiment(const ExperimentConfig& config, std::optional<int> workers) {
  config.validate();
  const auto schedules = config.cost_schedules();
  std::optional<ChannelPattern> file_pattern;
  if (config.channel.kind == ChannelSource::Kind::file) {
    file_pattern = load_pattern(config.channel.file);
    if (file_pattern->levels() != config.levels)
      throw ConfigError(fmt::format("pattern file has M={} but m_levels is {}", file_pattern->levels(), config.levels));
  }
  if (config.trace_dir) std::filesystem::create_directories(*config.trace_dir);

  struct Cell {
    std::size_t schedule;
    int rep;
  };
  std::vector<Cell> cells;
  for (std::size_t s = 0; s < schedules.size(); ++s)
    for (int rep = 0; rep < config.repetitions; ++rep) cells.push_back({s, rep});

  std::vector<std::vector<ExperimentRow>> cell_rows(cells.size());
  std::vector<std::string> cell_warnings(cells.size());

  auto pattern_for = [&](int rep) {
    if (file_pattern) return *file_pattern;
    const std::uint64_t channel_seed =
        derive_seed(derive_seed(config.seed, kChannelStream), static_cast<std::uint64_t>(rep));
    if (config.channel.kind == ChannelSource::Kind::markov) {
      MarkovChannelSpec spec = config.channel.markov;
      spec.seed = derive_seed(spec.seed, channel_seed);
      return gen_markov(spec, config.users, config.horizon);
    }
    return gen_adversarial(config.channel.family, config.channel.adversarial, config.users, config.horizon,
                           channel_seed);
  };

  auto run_cell = [&](std::size_t index) {
    const Cell& cell = cells[index];
    const CostSchedule& costs = schedules[cell.schedule];
    // Channel realizations depend on the repetition only, so every C_1 sees the same channels.
    const ChannelPattern pattern = pattern_for(cell.rep);

    std::optional<double> opt;
    if (config.oracle) {
      try {
        opt = solve_opt_dp(pattern, costs, config.oracle_caps).opt_cost;
      } catch (const CapacityError& e) {
        cell_warnings[index] = e.what();
      }
    }
    const double dual_lb = dual_lower_bound(pattern, costs);
    const double bound = competitive_bound(costs);

    for (std::size_t s = 0; s < config.schedulers.size(); ++s) {
      const std::string& name = config.schedulers[s];
      const std::uint64_t u_seed =
          derive_seed(derive_seed(config.seed, kSchedulerStream + s), static_cast<std::uint64_t>(index));
      auto scheduler = make_scheduler(name, costs, pattern.users(), u_seed);
      const RunResult run = simulate(*scheduler, pattern, costs);

      ExperimentRow row;
      row.scheduler = name;
      row.seed = config.seed;
      row.rep = cell.rep;
      row.users = pattern.users();
      row.horizon = pattern.horizon();
      row.levels = pattern.levels();
      row.c1 = costs.c1();
      row.total_cost = run.total_cost;
      row.time_avg_total_cost = run.time_avg_total_cost;
      row.time_avg_age = run.time_avg_age;
      row.opt_cost = opt;
      row.dual_lb = dual_lb;
      if (opt && *opt > 0.0) row.ratio_vs_opt = run.total_cost / *opt;
      row.ratio_vs_dual_lb = run.total_cost / dual_lb;
      row.theorem_bound = bound;
      cell_rows[index].push_back(std::move(row));

      if (config.trace_dir) {
        const std::string stem = fmt::format("{}_c1_{}_rep_{}", name, costs.c1(), cell.rep);
        std::ofstream csv(*config.trace_dir / (stem + ".csv"));
        write_run_csv(run, csv);
        std::ofstream summary(*config.trace_dir / (stem + ".json"));
        summary << run_summary_json(run).dump(2) << '\n';
      }
    }
  };

  const int pool = std::clamp(workers.value_or(worker_count_from_env()), 1, static_cast<int>(cells.size()));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(pool));
  {
    std::vector<std::jthread> threads;
    for (int w = 0; w < pool; ++w) {
      threads.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < cells.size(); i = next++) run_cell(i);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
          next = cells.size();
        }
      });
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  ExperimentResult result;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (auto& row : cell_rows[i]) result.rows.push_back(std::move(row));
    if (!cell_warnings[i].empty())
      result.warnings.push_back(fmt::format("C_1={} rep {}: {}; reporting dual_lb only", schedules[cells[i].schedule].c1(),
                                            cells[i].rep, cell_warnings[i]));
  }
  return result;
}

void write_experiment_csv(const std::vector<ExperimentRow>& rows, std::ostream& out) {
  out << "scheduler,seed,rep,N,T,M,C1,total_cost,time_avg_total_cost,time_avg_age,opt_cost,dual_lb,ratio_vs_opt,"
         "ratio_vs_dual_lb,theorem_bound\n";
  auto optional = [](const std::optional<double>& v) { return v ? fmt::format("{}", *v) : std::string(); };
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.scheduler, r.seed, r.rep, r.users, r.horizon,
                       r.levels, r.c1, r.total_cost, r.time_avg_total_cost, r.time_avg_age, optional(r.opt_cost),
                       r.dual_lb, optional(r.ratio_vs_opt), r.ratio_vs_dual_lb, r.theorem_bound);
  }
}

}  // namespace aoi
