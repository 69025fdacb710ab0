#include "aoi/verify.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>

#include <fmt/format.h>

#include "aoi/channel_gen.hpp"
#include "aoi/errors.hpp"
#include "aoi/offline_oracle.hpp"
#include "aoi/primal_dual.hpp"
#include "aoi/random.hpp"
#include "aoi/schedulers.hpp"

namespace aoi {

Instance random_instance(std::mt19937_64& engine, const InstanceShape& shape) {
  const int users = uniform_int(engine, 1, shape.max_users);
  const int horizon = uniform_int(engine, 1, shape.max_horizon);
  const int levels = uniform_int(engine, 1, shape.max_levels);

  double c1 = shape.c1_min + (shape.c1_max - shape.c1_min) * unit_uniform(engine);
  if (unit_uniform(engine) < 0.3) c1 = std::max(std::ceil(shape.c1_min), std::floor(c1));
  std::vector<double> costs{c1};
  const double flavour = unit_uniform(engine);
  for (int k = 1; k < levels; ++k) {
    double step = 0.0;
    if (flavour < 0.3)
      step = 0.0;
    else if (flavour < 0.6)
      step = 5.0;
    else
      step = 10.0 * unit_uniform(engine);
    costs.push_back(costs.back() + step);
  }

  AdversarialParams params;
  params.m_levels = levels;
  const std::uint64_t seed = engine();
  const double family = unit_uniform(engine);
  ChannelPattern pattern = [&] {
    if (family < 0.5) return gen_adversarial("iid_uniform", params, users, horizon, seed);
    if (family < 0.7) return gen_adversarial("correlated_group", params, users, horizon, seed);
    if (family < 0.85) {
      params.burst_length = uniform_int(engine, 1, 8);
      return gen_adversarial("worst_burst", params, users, horizon, seed);
    }
    params.level = unit_uniform(engine) < 0.5 ? 1 : levels;
    return gen_adversarial("constant", params, users, horizon, seed);
  }();
  return {std::move(pattern), CostSchedule(std::move(costs))};
}

VerifyConfig VerifyConfig::from_json(const nlohmann::json& j) {
  VerifyConfig config;
  auto shape_from = [](const nlohmann::json& s, InstanceShape shape) {
    shape.max_users = s.value("max_users", shape.max_users);
    shape.max_horizon = s.value("max_horizon", shape.max_horizon);
    shape.max_levels = s.value("max_levels", shape.max_levels);
    shape.c1_min = s.value("c1_min", shape.c1_min);
    shape.c1_max = s.value("c1_max", shape.c1_max);
    return shape;
  };
  try {
    config.instances = j.value("instances", config.instances);
    config.oracle_instances = j.value("oracle_instances", config.oracle_instances);
    config.mc_instances = j.value("mc_instances", config.mc_instances);
    config.mc_draws = j.value("mc_draws", config.mc_draws);
    config.seed = j.value("seed", config.seed);
    config.inject_fault = j.value("inject_fault", std::string());
    if (j.contains("shape")) config.shape = shape_from(j.at("shape"), config.shape);
    if (j.contains("oracle_shape")) config.oracle_shape = shape_from(j.at("oracle_shape"), config.oracle_shape);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed verify config: ") + e.what());
  }
  return config;
}

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

namespace {

class Tally {
 public:
  explicit Tally(std::string name) { result_.name = std::move(name); }
  void pass() { ++result_.cases; }
  void check(bool ok, const std::function<std::string()>& describe) {
    ++result_.cases;
    if (!ok && result_.passed) {
      result_.passed = false;
      result_.detail = describe();
    }
  }
  CheckResult result() const { return result_; }

 private:
  CheckResult result_;
};

// Packet-level queue model: each queue gets packet t every slot and empties on reception.
std::vector<AgeVector> virtual_queue_sizes(const ChannelPattern& pattern, const std::vector<Level>& decisions) {
  std::vector<std::deque<int>> queues(static_cast<std::size_t>(pattern.users()));
  std::vector<AgeVector> sizes;
  for (int t = 0; t < pattern.horizon(); ++t) {
    AgeVector size(pattern.users());
    for (int i = 0; i < pattern.users(); ++i) {
      auto& q = queues[static_cast<std::size_t>(i)];
      q.push_back(t);
      if (decode_indicator(pattern, i, decisions[static_cast<std::size_t>(t)], t)) q.clear();
      size(i) = static_cast<std::int64_t>(q.size());
    }
    sizes.push_back(std::move(size));
  }
  return sizes;
}

struct MonteCarlo {
  double mean = 0.0;
  double std_error = 0.0;
};

MonteCarlo monte_carlo_cost(const Instance& inst, std::string_view scheduler, int draws, std::uint64_t seed) {
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int r = 0; r < draws; ++r) {
    auto s = make_scheduler(scheduler, inst.costs, inst.pattern.users(), derive_seed(seed, static_cast<std::uint64_t>(r)));
    const double j = simulate(*s, inst.pattern, inst.costs).total_cost;
    sum += j;
    sum_sq += j * j;
  }
  MonteCarlo mc;
  mc.mean = sum / draws;
  const double var = draws > 1 ? std::max(0.0, (sum_sq - draws * mc.mean * mc.mean) / (draws - 1)) : 0.0;
  mc.std_error = std::sqrt(var / draws);
  return mc;
}

}  // namespace

VerifyReport verify_suite(const VerifyConfig& config) {
  if (config.instances < 1 || config.oracle_instances < 0 || config.mc_instances < 0 || config.mc_draws < 1)
    throw UsageError("verify needs at least one instance and one Monte-Carlo draw");
  if (!config.inject_fault.empty() && config.inject_fault != "flip_additive_sign")
    throw UsageError("unknown fault '" + config.inject_fault + "'");

  PrimalDual::Options pd_options;
  pd_options.flip_additive_sign = config.inject_fault == "flip_additive_sign";

  Tally primal_feasible("primal_feasibility");
  Tally dual_feasible("dual_feasibility");
  Tally lockstep("lockstep_identity");
  Tally recount("objective_recount");
  Tally budget("dual_load_budget");
  Tally queues("virtual_queue_equivalence");
  Tally coupling("rounding_coupling");
  Tally theorem1("theorem1_ratio");
  Tally weak_duality("weak_duality");
  Tally sandwich("oracle_sandwich");
  Tally theorem2_online("theorem2_online");
  Tally theorem2_agnostic("theorem2_agnostic");

  std::mt19937_64 engine(derive_seed(config.seed, 0));
  for (int n = 0; n < config.instances; ++n) {
    const Instance inst = random_instance(engine, config.shape);
    const ChannelPattern& pattern = inst.pattern;
    const double bound = competitive_bound(inst.costs);

    PrimalDual pd(inst.costs, pattern.users(), pd_options);
    bool lockstep_ok = true;
    std::string lockstep_detail;
    pd.set_observer([&](const IterationRecord& r) {
      if (lockstep_ok && std::abs(r.primal - bound * r.dual) > 1e-6 * (1.0 + r.primal)) {
        lockstep_ok = false;
        lockstep_detail = fmt::format("instance {}: slot {}, packet {}: primal {} vs (1+1/theta) dual {}", n, r.t + 1,
                                      r.j + 1, r.primal, bound * r.dual);
      }
    });
    for (int t = 0; t < pattern.horizon(); ++t) pd.step(t, pattern.thresholds().col(t));
    const PdSolution& sol = pd.solution();
    lockstep.check(lockstep_ok, [&] { return lockstep_detail; });

    const auto pf = check_primal_feasible(sol, pattern);
    primal_feasible.check(pf.feasible, [&] { return fmt::format("instance {}: {}", n, pf.witness); });
    const auto df = check_dual_feasible(sol, pattern, inst.costs);
    dual_feasible.check(df.feasible, [&] { return fmt::format("instance {}: {}", n, df.witness); });
    budget.check(df.max_dual_load <= std::floor(inst.costs.c1()), [&] {
      return fmt::format("instance {}: {} open windows exceed floor(C_1) = {}", n, df.max_dual_load,
                         std::floor(inst.costs.c1()));
    });
    const double p = primal_objective(sol, inst.costs);
    const double d = dual_objective(sol);
    recount.check(std::abs(p - pd.primal()) <= 1e-9 * (1.0 + p) &&
                      std::abs(d - static_cast<double>(sol.triggers.size())) <= 1e-9 * (1.0 + d),
                  [&] { return fmt::format("instance {}: recomputed primal {} / dual {} vs running {} / {}", n, p, d,
                                           pd.primal(), pd.dual()); });

    std::vector<Level> decisions(static_cast<std::size_t>(pattern.horizon()));
    for (auto& dcs : decisions) dcs = uniform_int(engine, 0, pattern.levels());
    const auto sizes = virtual_queue_sizes(pattern, decisions);
    AgeState ages = AgeState::initial(pattern.users());
    bool same = true;
    for (int t = 0; t < pattern.horizon(); ++t) {
      ages = advance_age(ages, pattern, decisions[static_cast<std::size_t>(t)]);
      same = same && ages.ages == sizes[static_cast<std::size_t>(t)];
    }
    queues.check(same, [&] { return fmt::format("instance {}: queue sizes diverge from ages", n); });

    if (!pd_options.flip_additive_sign) {
      OnlineScheduler online(inst.costs, pattern.users(), unit_uniform(engine));
      simulate(online, pattern, inst.costs);
      coupling.check(online.state().primal_dual().solution().x == sol.x,
                     [&] { return fmt::format("instance {}: scheduler x trace differs from the primal-dual run", n); });
    }
  }

  std::mt19937_64 oracle_engine(derive_seed(config.seed, 1));
  for (int n = 0; n < config.oracle_instances; ++n) {
    const Instance inst = random_instance(oracle_engine, config.oracle_shape);
    const double bound = competitive_bound(inst.costs);
    const OptResult opt = solve_opt_dp(inst.pattern, inst.costs);
    const PdSolution sol = run_primal_dual(inst.pattern, inst.costs, pd_options);
    const double p = primal_objective(sol, inst.costs);
    const double d = dual_objective(sol);
    theorem1.check(p <= bound * opt.opt_cost + 1e-6,
                   [&] { return fmt::format("instance {}: primal {} > {} * OPT {}", n, p, bound, opt.opt_cost); });
    weak_duality.check(d <= opt.opt_cost + 1e-6,
                       [&] { return fmt::format("instance {}: dual {} > OPT {}", n, d, opt.opt_cost); });
    double worst_heuristic = 0.0;
    bool below_all = true;
    for (const auto& name : scheduler_names()) {
      auto s = make_scheduler(name, inst.costs, inst.pattern.users(), oracle_engine());
      const double j = simulate(*s, inst.pattern, inst.costs).total_cost;
      worst_heuristic = std::max(worst_heuristic, j);
      below_all = below_all && opt.opt_cost <= j + 1e-9;
    }
    sandwich.check(below_all && dual_lower_bound(inst.pattern, inst.costs) <= opt.opt_cost + 1e-6, [&] {
      return fmt::format("instance {}: dual_lb <= OPT {} <= heuristics (max {}) fails", n, opt.opt_cost, worst_heuristic);
    });

    if (n < config.mc_instances) {
      const MonteCarlo online = monte_carlo_cost(inst, "online", config.mc_draws, oracle_engine());
      const double online_slack = 3.0 * online.std_error + 1e-9;
      theorem2_online.check(online.mean <= bound * opt.opt_cost + online_slack && online.mean <= p + online_slack, [&] {
        return fmt::format("instance {}: mean cost {} vs {} * OPT {} and primal {} (3 SE = {})", n, online.mean, bound,
                           opt.opt_cost, p, online_slack);
      });
      const MonteCarlo agnostic = monte_carlo_cost(inst, "agnostic", config.mc_draws, oracle_engine());
      const double agnostic_slack = 3.0 * agnostic.std_error + 1e-9;
      PrimalDual::Options top = pd_options;
      top.k_override = inst.costs.levels();
      const double p_top = primal_objective(run_primal_dual(inst.pattern, inst.costs, top), inst.costs);
      theorem2_agnostic.check(
          agnostic.mean <= bound * opt.opt_cost + agnostic_slack && agnostic.mean <= p_top + agnostic_slack, [&] {
            return fmt::format("instance {}: mean cost {} vs {} * OPT {} and level-M primal {} (3 SE = {})", n,
                               agnostic.mean, bound, opt.opt_cost, p_top, agnostic_slack);
          });
    }
  }

  VerifyReport report;
  for (const Tally* t : {&primal_feasible, &dual_feasible, &lockstep, &recount, &budget, &queues, &coupling, &theorem1,
                         &weak_duality, &sandwich, &theorem2_online, &theorem2_agnostic})
    report.checks.push_back(t->result());
  return report;
}

void write_verify_report(const VerifyReport& report, std::ostream& out) {
  for (const auto& check : report.checks) {
    const nlohmann::json line = {
        {"check", check.name}, {"passed", check.passed}, {"cases", check.cases}, {"detail", check.detail}};
    out << line.dump() << '\n';
  }
  out << nlohmann::json{{"check", "summary"}, {"passed", report.passed()}}.dump() << '\n';
}

}  // namespace aoi
