#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace aoi {

/// Power level index. 0 is idle, 1..M are transmit powers.
using Level = int;

using ThresholdMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;
using AgeVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;
using SlotThresholds = Eigen::Ref<const Eigen::VectorXi>;

/// Transmission costs C_1..C_M, non-decreasing, with C_1 >= 1. Level 0 costs nothing.
class CostSchedule {
 public:
  explicit CostSchedule(std::vector<double> costs);

  /// C_k = c1 + step * (k - 1) for k = 1..levels.
  static CostSchedule linear(double c1, double step, int levels);

  int levels() const { return static_cast<int>(costs_.size()); }
  double operator[](Level k) const;
  double c1() const { return costs_.front(); }
  double cmax() const { return costs_.back(); }
  std::span<const double> costs() const { return costs_; }

 private:
  std::vector<double> costs_;
};

/// Per-user, per-slot minimum decodable power level.
///
/// Column t holds the thresholds of slot t for every user, so a user decodes
/// a broadcast at level k in slot t iff k >= threshold(user, t). Every entry
/// lies in [1, M]: level M always reaches everyone.
class ChannelPattern {
 public:
  ChannelPattern(ThresholdMatrix thresholds, int levels);

  int users() const { return static_cast<int>(thresholds_.rows()); }
  int horizon() const { return static_cast<int>(thresholds_.cols()); }
  int levels() const { return levels_; }

  int threshold(int user, int slot) const;
  Eigen::VectorXi slot(int t) const;
  const ThresholdMatrix& thresholds() const { return thresholds_; }

  /// Slots [first, first + count) as a standalone pattern.
  ChannelPattern slice(int first, int count) const;

  friend bool operator==(const ChannelPattern& a, const ChannelPattern& b) {
    return a.levels_ == b.levels_ && a.thresholds_ == b.thresholds_;
  }

 private:
  ThresholdMatrix thresholds_;
  int levels_;
};

bool decode_indicator(const ChannelPattern& pattern, int user, Level k, int slot);

/// Smallest level that reaches every user in slot t (the largest threshold).
Level k_star(const ChannelPattern& pattern, int slot);
Level k_star(SlotThresholds slot_thresholds);

/// Ages at the end of slot `slot - 1`; `slot` is the next slot to play.
struct AgeState {
  AgeVector ages;
  int slot = 0;

  static AgeState initial(int users) { return {AgeVector::Zero(users), 0}; }
};

/// Applies decision d in the state's next slot: decoding users reset to 0, the rest age by one.
AgeState advance_age(const AgeState& state, const ChannelPattern& pattern, Level d);
AgeVector advance_age(const AgeVector& ages, SlotThresholds slot_thresholds, Level d);

struct RunResult {
  std::vector<Level> decisions;
  std::vector<double> tx_cost;
  std::vector<double> avg_age_cost;
  AgeVector final_ages;
  double total_cost = 0.0;
  double time_avg_total_cost = 0.0;
  double time_avg_age = 0.0;
};

/// Replays the age dynamics from `initial_ages` (zero when empty) and sums
/// transmission plus user-averaged age cost over every slot of `pattern`.
RunResult total_cost(std::span<const Level> decisions, const ChannelPattern& pattern,
                     const CostSchedule& costs, const AgeVector& initial_ages = {});

}  // namespace aoi
