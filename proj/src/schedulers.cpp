#include "aoi/schedulers.hpp"

#include <algorithm>
#include <random>

#include <fmt/format.h>

#include "aoi/random.hpp"

namespace aoi {

double draw_unit_uniform(std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  return unit_uniform(engine);
}

RoundingState::RoundingState(const CostSchedule& costs, int users, double u, PrimalDual::Options options)
    : pd_(costs, users, options), u_(u) {
  if (!(u >= 0.0 && u < 1.0)) throw UsageError("u must lie in [0, 1)");
}

Level RoundingState::step(int t, SlotThresholds slot_thresholds) {
  pd_.step(t, slot_thresholds);
  x_pre_sum_ = x_sum_;
  x_sum_ += std::min(pd_.x(t), 1.0);
  if (x_pre_sum_ <= u_ && u_ < x_sum_) {
    u_ += 1.0;
    return pd_.k_star(t);
  }
  return 0;
}

CostSchedule AgnosticScheduler::extremes(const CostSchedule& costs) {
  if (costs.levels() == 1) return CostSchedule({costs.c1()});
  return CostSchedule({costs.c1(), costs.cmax()});
}

namespace {

PrimalDual::Options top_level_only(int levels) {
  PrimalDual::Options options;
  options.k_override = levels;
  return options;
}

}  // namespace

AgnosticScheduler::AgnosticScheduler(const CostSchedule& costs, double u)
    : levels_(costs.levels()), state_(extremes(costs), 1, u, top_level_only(extremes(costs).levels())) {}

Level AgnosticScheduler::decide(int t) {
  static const Eigen::VectorXi kNoObservation(0);
  return state_.step(t, kNoObservation) == 0 ? 0 : levels_;
}

namespace {

template <typename Score>
Level argmin_level(const CostSchedule& costs, Score score) {
  Level best = 0;
  double best_value = score(0);
  for (Level d = 1; d <= costs.levels(); ++d) {
    const double value = score(d);
    if (value < best_value) {
      best = d;
      best_value = value;
    }
  }
  return best;
}

}  // namespace

Level greedy1_step(const AgeVector& ages, SlotThresholds slot_thresholds, const CostSchedule& costs) {
  const double n = static_cast<double>(ages.size());
  return argmin_level(costs, [&](Level d) {
    return costs[d] + static_cast<double>(advance_age(ages, slot_thresholds, d).sum()) / n;
  });
}

Level greedy2_step(const AgeVector& ages, const AgeVector& cumulative, SlotThresholds slot_thresholds,
                   const CostSchedule& costs) {
  const double n = static_cast<double>(ages.size());
  return argmin_level(costs, [&](Level d) {
    const AgeVector next = advance_age(ages, slot_thresholds, d);
    std::int64_t g = 0;
    for (Eigen::Index i = 0; i < next.size(); ++i) g += next(i) == 0 ? 0 : cumulative(i) + next(i);
    return costs[d] + static_cast<double>(g) / n;
  });
}

Level Greedy1Scheduler::decide(int, SlotThresholds slot_thresholds) {
  const Level d = greedy1_step(ages_, slot_thresholds, costs_);
  ages_ = advance_age(ages_, slot_thresholds, d);
  return d;
}

Level Greedy2Scheduler::decide(int, SlotThresholds slot_thresholds) {
  const Level d = greedy2_step(ages_, cumulative_, slot_thresholds, costs_);
  ages_ = advance_age(ages_, slot_thresholds, d);
  for (Eigen::Index i = 0; i < ages_.size(); ++i) cumulative_(i) = ages_(i) == 0 ? 0 : cumulative_(i) + ages_(i);
  return d;
}

std::unique_ptr<Scheduler> make_scheduler(std::string_view name, const CostSchedule& costs, int users,
                                          std::uint64_t seed) {
  if (name == "online") return std::make_unique<OnlineScheduler>(costs, users, draw_unit_uniform(seed));
  if (name == "agnostic") return std::make_unique<AgnosticScheduler>(costs, draw_unit_uniform(seed));
  if (name == "greedy1") return std::make_unique<Greedy1Scheduler>(costs, users);
  if (name == "greedy2") return std::make_unique<Greedy2Scheduler>(costs, users);
  throw UsageError(fmt::format("unknown scheduler '{}' (expected online, agnostic, greedy1 or greedy2)", name));
}

RunResult simulate(Scheduler& scheduler, const ChannelPattern& pattern, const CostSchedule& costs) {
  std::vector<Level> decisions;
  decisions.reserve(static_cast<std::size_t>(pattern.horizon()));
  for (int t = 0; t < pattern.horizon(); ++t) {
    const Eigen::VectorXi observed = pattern.thresholds().col(t);
    const Level d = scheduler.decide(t, observed);
    if (d < 0 || d > pattern.levels()) throw UsageError(fmt::format("scheduler returned level {} out of range", d));
    decisions.push_back(d);
  }
  return total_cost(decisions, pattern, costs);
}

}  // namespace aoi
