// Command-line front end: run experiments, verify invariants, generate channels, solve offline optima.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "aoi/channel_gen.hpp"
#include "aoi/errors.hpp"
#include "aoi/harness.hpp"
#include "aoi/io.hpp"
#include "aoi/offline_oracle.hpp"
#include "aoi/primal_dual.hpp"
#include "aoi/verify.hpp"

namespace {

int cmd_run(const std::string& config_path) {
  const std::filesystem::path path(config_path);
  const auto config = aoi::ExperimentConfig::from_json(aoi::read_json_file(path), path.parent_path());
  const auto result = aoi::run_experiment(config);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  if (config.output_csv.empty()) {
    aoi::write_experiment_csv(result.rows, std::cout);
  } else {
    std::ofstream out(config.output_csv);
    if (!out) throw aoi::ConfigError("cannot write " + config.output_csv.string());
    aoi::write_experiment_csv(result.rows, out);
    std::cerr << "wrote " << result.rows.size() << " rows to " << config.output_csv.string() << '\n';
  }
  return 0;
}

int cmd_verify(const std::string& config_path) {
  const auto config = config_path.empty() ? aoi::VerifyConfig{}
                                          : aoi::VerifyConfig::from_json(aoi::read_json_file(config_path));
  const auto report = aoi::verify_suite(config);
  aoi::write_verify_report(report, std::cout);
  return report.passed() ? 0 : 1;
}

int cmd_gen_channel(const std::string& spec_path, const std::string& out_path, int users, int horizon) {
  const auto spec = aoi::markov_spec_from_json(aoi::read_json_file(spec_path));
  aoi::save_pattern(aoi::gen_markov(spec, users, horizon), out_path);
  return 0;
}

int cmd_opt(const std::string& pattern_path, const std::string& costs_path, const std::string& trace_out,
            const std::string& pd_dump, const aoi::OracleCaps& caps) {
  const auto pattern = aoi::load_pattern(pattern_path);
  const auto costs = aoi::costs_from_json(aoi::read_json_file(costs_path));

  aoi::json summary;
  summary["dual_lb"] = aoi::dual_lower_bound(pattern, costs);
  summary["theorem_bound"] = aoi::competitive_bound(costs);
  try {
    const auto opt = aoi::solve_opt_dp(pattern, costs, caps);
    summary["opt_cost"] = opt.opt_cost;
    summary["decisions"] = opt.decisions;
    summary["states_expanded"] = opt.states_expanded;
    summary["wall_seconds"] = opt.wall_seconds;
    if (!trace_out.empty()) {
      std::ofstream out(trace_out);
      aoi::write_run_csv(aoi::total_cost(opt.decisions, pattern, costs), out);
    }
  } catch (const aoi::CapacityError& e) {
    std::cerr << "warning: " << e.what() << '\n';
    summary["opt_cost"] = nullptr;
  }

  if (!pd_dump.empty()) {
    std::ofstream dump(pd_dump);
    aoi::PrimalDual pd(costs, pattern.users());
    pd.set_observer([&](const aoi::IterationRecord& r) {
      if (r.triggered) dump << aoi::iteration_json_line(r) << '\n';
    });
    for (int t = 0; t < pattern.horizon(); ++t) pd.step(t, pattern.slot(t));
  }
  std::cout << summary.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Age-of-information broadcast scheduling simulator"};
  app.require_subcommand(1);

  std::string run_config;
  auto* run = app.add_subcommand("run", "Simulate schedulers and write the results CSV");
  run->add_option("--config", run_config, "Experiment config JSON")->required()->check(CLI::ExistingFile);

  std::string verify_config;
  auto* verify = app.add_subcommand("verify", "Check primal-dual and competitive-ratio invariants on random instances");
  verify->add_option("--config", verify_config, "Verify config JSON")->check(CLI::ExistingFile);

  std::string spec_path, out_path;
  int users = 5, horizon = 10000;
  auto* gen = app.add_subcommand("gen-channel", "Sample a channel pattern from a Markov spec");
  gen->add_option("--spec", spec_path, "Markov spec JSON")->required()->check(CLI::ExistingFile);
  gen->add_option("--out", out_path, "Output pattern JSON")->required();
  gen->add_option("--users", users, "Number of users")->check(CLI::PositiveNumber);
  gen->add_option("--horizon", horizon, "Number of slots")->check(CLI::NonNegativeNumber);

  std::string pattern_path, costs_path, trace_out, pd_dump;
  aoi::OracleCaps caps;
  auto* opt = app.add_subcommand("opt", "Exact offline optimum and dual lower bound for one pattern");
  opt->add_option("--pattern", pattern_path, "Pattern JSON")->required()->check(CLI::ExistingFile);
  opt->add_option("--costs", costs_path, "Cost schedule JSON")->required()->check(CLI::ExistingFile);
  opt->add_option("--trace-out", trace_out, "Write the optimal trace as per-slot CSV");
  opt->add_option("--pd-dump", pd_dump, "Write triggered primal-dual iterations as JSON lines");
  opt->add_option("--max-users", caps.max_users, "Exact solver user cap");
  opt->add_option("--max-horizon", caps.max_horizon, "Exact solver horizon cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(run_config);
    if (*verify) return cmd_verify(verify_config);
    if (*gen) return cmd_gen_channel(spec_path, out_path, users, horizon);
    if (*opt) return cmd_opt(pattern_path, costs_path, trace_out, pd_dump, caps);
  } catch (const aoi::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
