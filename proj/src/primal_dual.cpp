#include "aoi/primal_dual.hpp"

#include <algorithm>

#include <fmt/format.h>
#include <json.hpp>

namespace aoi {

PrimalDual::PrimalDual(const CostSchedule& costs, int users, Options options)
    : costs_(costs), options_(options) {
  if (users < 1) throw UsageError("primal-dual state needs at least one user");
  if (options_.k_override && (*options_.k_override < 1 || *options_.k_override > costs.levels()))
    throw UsageError("override level outside [1, M]");
  if (options_.window && *options_.window < 0) throw UsageError("loop window must be non-negative");
  solution_.theta = compute_theta(costs);
  solution_.users = users;
}

void PrimalDual::step(int t, SlotThresholds slot_thresholds) {
  if (options_.k_override) {
    step_at_level(t, *options_.k_override);
    return;
  }
  if (slot_thresholds.size() != solution_.users) throw UsageError("slot thresholds do not match the user count");
  step_at_level(t, aoi::k_star(slot_thresholds));
}

void PrimalDual::step_at_level(int t, Level k) {
  if (t != slots())
    throw UsageError(fmt::format("slot {} cannot be processed next; expected slot {}", t, slots()));
  if (k < 1 || k > costs_.levels()) throw UsageError(fmt::format("level {} outside [1, M]", k));

  const double cost = costs_[k];
  const double theta = solution_.theta;
  const double additive = (options_.flip_additive_sign ? -1.0 : 1.0) / (theta * cost);
  const double before_slot = prefix_.back();
  const int first = options_.window ? std::max(t - *options_.window, 0) : 0;

  double x_t = 0.0;
  for (int j = first; j <= t; ++j) {
    const double window = (before_slot - prefix_[static_cast<std::size_t>(j)]) + x_t;
    const bool open = window < kFlushThreshold;
    if (open) {
      const double z = 1.0 - window;
      const double dx = window / cost + additive;
      x_t += dx;
      solution_.triggers.push_back({j, t, z, 1.0 / solution_.users});
      primal_ += cost * dx + z;
      dual_ += 1.0;
    }
    if (observer_) observer_({t, j, k, window, x_t, open, primal_, dual_});
  }
  last_iterations_ = t - first + 1;
  solution_.k_star.push_back(k);
  solution_.x.push_back(x_t);
  prefix_.push_back(before_slot + x_t);
}

double PrimalDual::window_sum(int j, int t) const {
  if (j < 0 || j > t || t >= slots()) throw UsageError("window outside processed slots");
  return prefix_[static_cast<std::size_t>(t) + 1] - prefix_[static_cast<std::size_t>(j)];
}

PdSolution run_primal_dual(const ChannelPattern& pattern, const CostSchedule& costs, PrimalDual::Options options) {
  PrimalDual pd(costs, std::max(pattern.users(), 1), options);
  for (int t = 0; t < pattern.horizon(); ++t) pd.step(t, pattern.thresholds().col(t));
  return pd.solution();
}

double primal_objective(const PdSolution& solution, const CostSchedule& costs) {
  double value = 0.0;
  for (int t = 0; t < solution.slots(); ++t)
    value += costs[solution.k_star[static_cast<std::size_t>(t)]] * solution.x[static_cast<std::size_t>(t)];
  // (1/N) * N users * z
  for (const Trigger& trig : solution.triggers) value += trig.z;
  return value;
}

double dual_objective(const PdSolution& solution) {
  double value = 0.0;
  for (const Trigger& trig : solution.triggers) value += solution.users * trig.y;
  return value;
}

namespace {

// Offsets into the (t, j)-ordered trigger list: slot t owns [offsets[t], offsets[t+1]).
std::vector<std::size_t> slot_offsets(const PdSolution& solution) {
  std::vector<std::size_t> offsets(static_cast<std::size_t>(solution.slots()) + 1, 0);
  for (const Trigger& trig : solution.triggers) ++offsets[static_cast<std::size_t>(trig.t) + 1];
  for (std::size_t t = 1; t < offsets.size(); ++t) offsets[t] += offsets[t - 1];
  return offsets;
}

void check_shape(const PdSolution& solution, const ChannelPattern& pattern) {
  if (solution.slots() > pattern.horizon()) throw UsageError("solution covers more slots than the pattern");
  if (solution.k_star.size() != solution.x.size()) throw UsageError("solution k_star and x differ in length");
  if (solution.users != pattern.users()) throw UsageError("solution and pattern disagree on the user count");
  for (std::size_t i = 1; i < solution.triggers.size(); ++i) {
    const Trigger& a = solution.triggers[i - 1];
    const Trigger& b = solution.triggers[i];
    if (a.t > b.t || (a.t == b.t && a.j >= b.j)) throw UsageError("triggers must be sorted by (t, j) and unique");
  }
  for (const Trigger& trig : solution.triggers)
    if (trig.j < 0 || trig.j > trig.t || trig.t >= solution.slots()) throw UsageError("trigger outside its slot range");
}

}  // namespace

FeasibilityReport check_primal_feasible(const PdSolution& solution, const ChannelPattern& pattern, double tolerance) {
  check_shape(solution, pattern);
  FeasibilityReport report;
  const int horizon = solution.slots();

  for (int t = 0; t < horizon; ++t) {
    const double x = solution.x[static_cast<std::size_t>(t)];
    if (x < -tolerance) {
      report = {false, fmt::format("x at slot {} is negative ({})", t + 1, x), -1, solution.k_star[t], -1, t, x, 0.0};
      return report;
    }
  }
  for (const Trigger& trig : solution.triggers) {
    if (trig.z < -tolerance) {
      report = {false, fmt::format("z for packet {} at slot {} is negative ({})", trig.j + 1, trig.t + 1, trig.z),
                -1, -1, trig.j, trig.t, trig.z, 0.0};
      return report;
    }
  }

  const auto offsets = slot_offsets(solution);
  std::vector<double> covered(static_cast<std::size_t>(horizon) + 1);
  std::vector<double> z_of_packet(static_cast<std::size_t>(horizon));
  for (int i = 0; i < solution.users; ++i) {
    // covered[t] = sum over tau < t of 1_{i,k*_tau}(tau) x(tau)
    covered[0] = 0.0;
    for (int t = 0; t < horizon; ++t) {
      const bool decodes = decode_indicator(pattern, i, solution.k_star[static_cast<std::size_t>(t)], t);
      covered[static_cast<std::size_t>(t) + 1] =
          covered[static_cast<std::size_t>(t)] + (decodes ? solution.x[static_cast<std::size_t>(t)] : 0.0);
    }
    for (int t = 0; t < horizon; ++t) {
      std::fill(z_of_packet.begin(), z_of_packet.begin() + t + 1, 0.0);
      for (std::size_t n = offsets[static_cast<std::size_t>(t)]; n < offsets[static_cast<std::size_t>(t) + 1]; ++n)
        z_of_packet[static_cast<std::size_t>(solution.triggers[n].j)] = solution.triggers[n].z;
      for (int j = 0; j <= t; ++j) {
        const double lhs = z_of_packet[static_cast<std::size_t>(j)] +
                           (covered[static_cast<std::size_t>(t) + 1] - covered[static_cast<std::size_t>(j)]);
        if (lhs < 1.0 - tolerance) {
          return {false,
                  fmt::format("covering constraint violated for user {}, packet {}, slot {}: {} < 1", i + 1, j + 1,
                              t + 1, lhs),
                  i, -1, j, t, lhs, 1.0};
        }
      }
    }
  }
  return report;
}

FeasibilityReport check_dual_feasible(const PdSolution& solution, const ChannelPattern& pattern,
                                      const CostSchedule& costs, double tolerance) {
  check_shape(solution, pattern);
  if (costs.levels() != pattern.levels()) throw UsageError("cost schedule and pattern disagree on M");
  FeasibilityReport report;
  const int horizon = solution.slots();
  const double cap = 1.0 / solution.users;

  for (const Trigger& trig : solution.triggers) {
    if (trig.y < -tolerance || trig.y > cap + tolerance) {
      return {false, fmt::format("y for packet {} at slot {} is outside [0, 1/N] ({})", trig.j + 1, trig.t + 1, trig.y),
              -1, -1, trig.j, trig.t, trig.y, cap};
    }
  }

  // load[t] = Sum_{j<=t} Sum_{tau>=t} y(j, tau) for one user; count[t] the number of such triggers.
  std::vector<double> load_delta(static_cast<std::size_t>(horizon) + 1, 0.0);
  std::vector<int> count_delta(static_cast<std::size_t>(horizon) + 1, 0);
  for (const Trigger& trig : solution.triggers) {
    load_delta[static_cast<std::size_t>(trig.j)] += trig.y;
    load_delta[static_cast<std::size_t>(trig.t) + 1] -= trig.y;
    ++count_delta[static_cast<std::size_t>(trig.j)];
    --count_delta[static_cast<std::size_t>(trig.t) + 1];
  }

  double load = 0.0;
  int count = 0;
  for (int t = 0; t < horizon; ++t) {
    load += load_delta[static_cast<std::size_t>(t)];
    count += count_delta[static_cast<std::size_t>(t)];
    report.max_dual_load = std::max(report.max_dual_load, count);
    if (!report.feasible) continue;
    for (Level k = 1; k <= pattern.levels(); ++k) {
      int reached = 0;
      for (int i = 0; i < pattern.users(); ++i) reached += decode_indicator(pattern, i, k, t) ? 1 : 0;
      const double lhs = reached * load;
      if (lhs > costs[k] + tolerance) {
        const int max_load = report.max_dual_load;
        report = {false, fmt::format("packing constraint violated at level {}, slot {}: {} > C_{} = {}", k, t + 1, lhs,
                                     k, costs[k]),
                  -1, k, -1, t, lhs, costs[k], max_load};
        break;
      }
    }
  }
  return report;
}

std::string iteration_json_line(const IterationRecord& record) {
  const nlohmann::json line = {{"t", record.t + 1},
                               {"j", record.j + 1},
                               {"k_star", record.k_star},
                               {"window_sum_before", record.window_before},
                               {"x_after", record.x_after},
                               {"primal_so_far", record.primal},
                               {"dual_so_far", record.dual}};
  return line.dump();
}

}  // namespace aoi
