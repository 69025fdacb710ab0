#include "aoi/offline_oracle.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <limits>
#include <unordered_map>

#include <fmt/format.h>

#include "aoi/errors.hpp"
#include "aoi/primal_dual.hpp"

namespace aoi {

namespace {

__extension__ typedef __int128 Exact;

using AgeKey = std::vector<std::int32_t>;

struct AgeKeyHash {
  std::size_t operator()(const AgeKey& key) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::int32_t a : key) {
      h ^= static_cast<std::uint32_t>(a);
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

struct Layer {
  std::vector<AgeKey> states;
  std::vector<std::int64_t> age_sum;
  std::vector<int> successor;  // states.size() * (M + 1), index into the next layer
};

// Slot costs scaled by N * 2^shift become integers, so traces compare without rounding.
// Empty when C_M is too large for the scaled totals to fit.
std::optional<std::vector<Exact>> exact_costs(const CostSchedule& costs, int users, int horizon) {
  int min_exp = 0;
  std::frexp(costs.c1(), &min_exp);
  const int shift = 53 - min_exp;
  const double n = users;
  const double t = horizon;
  const double bits = std::log2(t * n * (costs.cmax() + t * n)) + shift + 1.0;
  if (shift < 0 || bits > 120) return std::nullopt;
  std::vector<Exact> scaled(static_cast<std::size_t>(costs.levels()) + 1, 0);
  for (int d = 1; d <= costs.levels(); ++d)
    scaled[static_cast<std::size_t>(d)] =
        static_cast<Exact>(std::ldexp(costs[d], shift)) * static_cast<Exact>(users);
  scaled.push_back(Exact{1} << shift);  // weight of one unit of age
  return scaled;
}

// Backward pass over the reachable layers. Ties go to the smallest d, so the
// returned trace is the lexicographically smallest optimum under Value's order.
template <typename Value, typename SlotCost>
std::vector<Level> backward(const std::vector<Layer>& layers, int levels, SlotCost slot_cost) {
  const auto choices = static_cast<std::size_t>(levels + 1);
  const std::size_t horizon = layers.size() - 1;
  std::vector<Value> next_value(layers.back().states.size(), Value(0));
  std::vector<std::vector<Level>> best_choice(horizon);
  for (std::size_t t = horizon; t-- > 0;) {
    const Layer& here = layers[t];
    const Layer& next = layers[t + 1];
    std::vector<Value> value(here.states.size());
    auto& choice = best_choice[t];
    choice.resize(here.states.size());
    for (std::size_t s = 0; s < here.states.size(); ++s) {
      std::optional<Value> best;
      Level arg = 0;
      for (Level d = 0; d <= levels; ++d) {
        const auto succ = static_cast<std::size_t>(here.successor[s * choices + static_cast<std::size_t>(d)]);
        const Value v = slot_cost(d, next.age_sum[succ]) + next_value[succ];
        if (!best || v < *best) {
          best = v;
          arg = d;
        }
      }
      value[s] = *best;
      choice[s] = arg;
    }
    next_value = std::move(value);
  }

  std::vector<Level> decisions;
  std::size_t state = 0;
  for (std::size_t t = 0; t < horizon; ++t) {
    const Level d = best_choice[t][state];
    decisions.push_back(d);
    state = static_cast<std::size_t>(layers[t].successor[state * choices + static_cast<std::size_t>(d)]);
  }
  return decisions;
}

}  // namespace

OptResult solve_opt_dp(const ChannelPattern& pattern, const CostSchedule& costs, const OracleCaps& caps) {
  const int users = pattern.users();
  const int horizon = pattern.horizon();
  const int levels = pattern.levels();
  if (users > caps.max_users || horizon > caps.max_horizon)
    throw CapacityError(fmt::format(
        "instance with N={} and T={} exceeds the exact solver caps (N <= {}, T <= {}); use dual_lower_bound instead",
        users, horizon, caps.max_users, caps.max_horizon));
  if (costs.levels() != levels) throw UsageError("cost schedule and pattern disagree on M");

  const auto start = std::chrono::steady_clock::now();
  const auto choices = static_cast<std::size_t>(levels + 1);
  std::vector<Layer> layers(static_cast<std::size_t>(horizon) + 1);
  layers[0].states.push_back(AgeKey(static_cast<std::size_t>(users), 0));
  layers[0].age_sum.push_back(0);

  OptResult result;
  if (horizon == 0) return result;
  for (int t = 0; t < horizon; ++t) {
    Layer& here = layers[static_cast<std::size_t>(t)];
    Layer& next = layers[static_cast<std::size_t>(t) + 1];
    std::unordered_map<AgeKey, int, AgeKeyHash> index;
    here.successor.resize(here.states.size() * choices);
    for (std::size_t s = 0; s < here.states.size(); ++s) {
      for (Level d = 0; d <= levels; ++d) {
        AgeKey ages = here.states[s];
        std::int64_t sum = 0;
        for (int i = 0; i < users; ++i) {
          auto& a = ages[static_cast<std::size_t>(i)];
          a = (d != 0 && d >= pattern.thresholds()(i, t)) ? 0 : a + 1;
          sum += a;
        }
        auto [it, inserted] = index.try_emplace(ages, static_cast<int>(next.states.size()));
        if (inserted) {
          next.states.push_back(std::move(ages));
          next.age_sum.push_back(sum);
        }
        here.successor[s * choices + static_cast<std::size_t>(d)] = it->second;
      }
    }
    result.states_expanded += here.states.size();
  }

  if (const auto exact = exact_costs(costs, users, horizon)) {
    const auto& scaled = *exact;
    const Exact age_unit = scaled.back();
    result.decisions = backward<Exact>(layers, levels, [&](Level d, std::int64_t age_sum) {
      return scaled[static_cast<std::size_t>(d)] + age_unit * age_sum;
    });
  } else {
    const double n = users > 0 ? users : 1;
    result.decisions = backward<double>(layers, levels, [&](Level d, std::int64_t age_sum) {
      return costs[d] + static_cast<double>(age_sum) / n;
    });
  }
  // Re-score the trace slot by slot so opt_cost sums in the same order as total_cost.
  result.opt_cost = total_cost(result.decisions, pattern, costs).total_cost;
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

double dual_lower_bound(const ChannelPattern& pattern, const CostSchedule& costs) {
  if (pattern.horizon() == 0 || pattern.users() == 0) return 0.0;
  return dual_objective(run_primal_dual(pattern, costs));
}

}  // namespace aoi
