#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "aoi/core_model.hpp"
#include "aoi/primal_dual.hpp"

namespace aoi {

/// Per-slot decision maker. The simulator hands over slot t's thresholds only
/// after slots 0..t-1 were decided, so no scheduler sees the future.
class Scheduler {
 public:
  virtual ~Scheduler() = default;
  virtual std::string_view name() const = 0;
  /// Decision d(t) in [0, M]. Channel-agnostic schedulers ignore `slot_thresholds`.
  virtual Level decide(int t, SlotThresholds slot_thresholds) = 0;
};

/// Uniform double in [0, 1) from the top 53 bits of one mt19937_64 draw.
double draw_unit_uniform(std::uint64_t seed);

/// Randomized rounding of the primal-dual mass x_{k*_t}(t).
///
/// u is drawn once. The scheduler transmits in slot t iff some integer shift
/// u + n falls in [x_pre_sum, x_sum), where x_sum accumulates min{x, 1}.
/// Since u moves up by one per transmission, the test reduces to x_pre_sum <= u < x_sum.
class RoundingState {
 public:
  RoundingState(const CostSchedule& costs, int users, double u, PrimalDual::Options options = {});

  /// Runs the x update for slot t and returns the level to transmit at, or 0.
  Level step(int t, SlotThresholds slot_thresholds);

  double u() const { return u_; }
  double x_pre_sum() const { return x_pre_sum_; }
  double x_sum() const { return x_sum_; }
  const PrimalDual& primal_dual() const { return pd_; }

 private:
  PrimalDual pd_;
  double u_;
  double x_pre_sum_ = 0.0;
  double x_sum_ = 0.0;
};

/// Channel-aware randomized online scheduler: transmits at k*_t with probability min{x_{k*_t}(t), 1}.
class OnlineScheduler final : public Scheduler {
 public:
  OnlineScheduler(const CostSchedule& costs, int users, double u) : state_(costs, users, u) {}
  std::string_view name() const override { return "online"; }
  Level decide(int t, SlotThresholds slot_thresholds) override { return state_.step(t, slot_thresholds); }
  const RoundingState& state() const { return state_; }

 private:
  RoundingState state_;
};

/// Channel-agnostic variant: always runs at level M and needs only C_1 and C_M.
class AgnosticScheduler final : public Scheduler {
 public:
  AgnosticScheduler(const CostSchedule& costs, double u);
  std::string_view name() const override { return "agnostic"; }
  Level decide(int t, SlotThresholds /*unused*/) override { return decide(t); }
  Level decide(int t);
  const RoundingState& state() const { return state_; }

 private:
  static CostSchedule extremes(const CostSchedule& costs);
  int levels_;
  RoundingState state_;
};

/// Greedy 1: argmin over d of C_d + (1/N) Sum_i a_i(t), ties to the smallest d.
Level greedy1_step(const AgeVector& ages, SlotThresholds slot_thresholds, const CostSchedule& costs);

/// Greedy 2: argmin over d of C_d + (1/N) Sum_i g_i(t) with g_i(t) = 0 on reception,
/// g_i(t-1) + a_i(t) otherwise. Ties go to the smallest d.
Level greedy2_step(const AgeVector& ages, const AgeVector& cumulative, SlotThresholds slot_thresholds,
                   const CostSchedule& costs);

class Greedy1Scheduler final : public Scheduler {
 public:
  Greedy1Scheduler(const CostSchedule& costs, int users) : costs_(costs), ages_(AgeVector::Zero(users)) {}
  std::string_view name() const override { return "greedy1"; }
  Level decide(int t, SlotThresholds slot_thresholds) override;

 private:
  CostSchedule costs_;
  AgeVector ages_;
};

class Greedy2Scheduler final : public Scheduler {
 public:
  Greedy2Scheduler(const CostSchedule& costs, int users)
      : costs_(costs), ages_(AgeVector::Zero(users)), cumulative_(AgeVector::Zero(users)) {}
  std::string_view name() const override { return "greedy2"; }
  Level decide(int t, SlotThresholds slot_thresholds) override;
  const AgeVector& cumulative() const { return cumulative_; }

 private:
  CostSchedule costs_;
  AgeVector ages_;
  AgeVector cumulative_;
};

inline const std::vector<std::string>& scheduler_names() {
  static const std::vector<std::string> names{"online", "agnostic", "greedy1", "greedy2"};
  return names;
}

/// Builds a scheduler by name; `seed` feeds the single u draw of the randomized ones.
std::unique_ptr<Scheduler> make_scheduler(std::string_view name, const CostSchedule& costs, int users,
                                          std::uint64_t seed);

/// Feeds the pattern one slot at a time and scores the resulting trace.
RunResult simulate(Scheduler& scheduler, const ChannelPattern& pattern, const CostSchedule& costs);

}  // namespace aoi
