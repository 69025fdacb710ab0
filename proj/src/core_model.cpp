#include "aoi/core_model.hpp"

#include <cmath>
#include <string>

#include "aoi/errors.hpp"

namespace aoi {

CostSchedule::CostSchedule(std::vector<double> costs) : costs_(std::move(costs)) {
  if (costs_.empty()) throw ConfigError("cost schedule needs at least one power level");
  for (std::size_t k = 0; k < costs_.size(); ++k) {
    if (!std::isfinite(costs_[k])) throw ConfigError("cost C_" + std::to_string(k + 1) + " is not finite");
    if (k > 0 && costs_[k] < costs_[k - 1])
      throw ConfigError("costs must be non-decreasing in the power level (C_" + std::to_string(k + 1) +
                        " < C_" + std::to_string(k) + ")");
  }
  // floor(C_1) >= 1 keeps theta positive.
  if (costs_.front() < 1.0) throw ConfigError("C_1 must be at least 1");
}

CostSchedule CostSchedule::linear(double c1, double step, int levels) {
  if (levels < 1) throw ConfigError("linear cost schedule needs at least one level");
  std::vector<double> costs(static_cast<std::size_t>(levels));
  for (int k = 0; k < levels; ++k) costs[static_cast<std::size_t>(k)] = c1 + step * k;
  return CostSchedule(std::move(costs));
}

double CostSchedule::operator[](Level k) const {
  if (k < 0 || k > levels()) throw UsageError("power level " + std::to_string(k) + " out of range");
  return k == 0 ? 0.0 : costs_[static_cast<std::size_t>(k - 1)];
}

ChannelPattern::ChannelPattern(ThresholdMatrix thresholds, int levels)
    : thresholds_(std::move(thresholds)), levels_(levels) {
  if (levels_ < 1) throw ConfigError("channel pattern needs at least one power level");
  if (thresholds_.size() > 0 && (thresholds_.minCoeff() < 1 || thresholds_.maxCoeff() > levels_))
    throw ConfigError("channel thresholds must lie in [1, " + std::to_string(levels_) + "]");
}

int ChannelPattern::threshold(int user, int slot) const {
  if (user < 0 || user >= users()) throw UsageError("user index " + std::to_string(user) + " out of range");
  if (slot < 0 || slot >= horizon()) throw UsageError("slot index " + std::to_string(slot) + " out of range");
  return thresholds_(user, slot);
}

Eigen::VectorXi ChannelPattern::slot(int t) const {
  if (t < 0 || t >= horizon()) throw UsageError("slot index " + std::to_string(t) + " out of range");
  return thresholds_.col(t);
}

ChannelPattern ChannelPattern::slice(int first, int count) const {
  if (first < 0 || count < 0 || first + count > horizon()) throw UsageError("slice outside the horizon");
  return ChannelPattern(thresholds_.middleCols(first, count), levels_);
}

bool decode_indicator(const ChannelPattern& pattern, int user, Level k, int slot) {
  if (k < 0 || k > pattern.levels()) throw UsageError("power level " + std::to_string(k) + " out of range");
  const int threshold = pattern.threshold(user, slot);
  return k != 0 && k >= threshold;
}

Level k_star(const ChannelPattern& pattern, int slot) {
  if (slot < 0 || slot >= pattern.horizon()) throw UsageError("slot index " + std::to_string(slot) + " out of range");
  return pattern.users() == 0 ? 1 : pattern.thresholds().col(slot).maxCoeff();
}

Level k_star(SlotThresholds slot_thresholds) {
  return slot_thresholds.size() == 0 ? 1 : slot_thresholds.maxCoeff();
}

AgeVector advance_age(const AgeVector& ages, SlotThresholds slot_thresholds, Level d) {
  if (ages.size() != slot_thresholds.size()) throw UsageError("age vector and slot thresholds differ in length");
  AgeVector next(ages.size());
  for (Eigen::Index i = 0; i < ages.size(); ++i) next(i) = (d != 0 && d >= slot_thresholds(i)) ? 0 : ages(i) + 1;
  return next;
}

AgeState advance_age(const AgeState& state, const ChannelPattern& pattern, Level d) {
  if (d < 0 || d > pattern.levels()) throw UsageError("power level " + std::to_string(d) + " out of range");
  if (state.slot >= pattern.horizon()) throw UsageError("age state is already at the end of the horizon");
  return {advance_age(state.ages, pattern.thresholds().col(state.slot), d), state.slot + 1};
}

RunResult total_cost(std::span<const Level> decisions, const ChannelPattern& pattern, const CostSchedule& costs,
                     const AgeVector& initial_ages) {
  const int horizon = pattern.horizon();
  if (static_cast<int>(decisions.size()) != horizon)
    throw UsageError("decision trace has " + std::to_string(decisions.size()) + " slots, pattern has " +
                     std::to_string(horizon));
  if (costs.levels() != pattern.levels()) throw UsageError("cost schedule and pattern disagree on M");

  RunResult result;
  result.decisions.assign(decisions.begin(), decisions.end());
  result.tx_cost.reserve(decisions.size());
  result.avg_age_cost.reserve(decisions.size());

  AgeState state{initial_ages.size() == 0 ? AgeVector(AgeVector::Zero(pattern.users())) : initial_ages, 0};
  if (state.ages.size() != pattern.users()) throw UsageError("initial ages do not match the user count");

  const double n = pattern.users();
  double age_sum = 0.0;
  for (int t = 0; t < horizon; ++t) {
    state = advance_age(state, pattern, decisions[static_cast<std::size_t>(t)]);
    const double tx = costs[decisions[static_cast<std::size_t>(t)]];
    const double age = n > 0 ? static_cast<double>(state.ages.sum()) / n : 0.0;
    result.tx_cost.push_back(tx);
    result.avg_age_cost.push_back(age);
    result.total_cost += tx + age;
    age_sum += age;
  }
  result.final_ages = state.ages;
  if (horizon > 0) {
    result.time_avg_total_cost = result.total_cost / horizon;
    result.time_avg_age = age_sum / horizon;
  }
  return result;
}

}  // namespace aoi
