#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "aoi/core_model.hpp"
#include "aoi/errors.hpp"

namespace aoi {

/// theta = (1 + 1/C_M)^floor(C_1) - 1, evaluated as expm1(floor(C_1) * log1p(1/C_M)).
template <typename Scalar>
Scalar compute_theta(Scalar c1, Scalar cmax) {
  using std::expm1, std::floor, std::log1p;
  if (!(c1 >= Scalar(1))) throw ConfigError("theta needs C_1 >= 1");
  return expm1(floor(c1) * log1p(Scalar(1) / cmax));
}

inline double compute_theta(const CostSchedule& costs) { return compute_theta(costs.c1(), costs.cmax()); }

/// Competitive bound 1 + 1/theta.
inline double competitive_bound(const CostSchedule& costs) { return 1.0 + 1.0 / compute_theta(costs); }

/// A packet window counts as flushed once its cumulative mass reaches 1. The
/// comparison keeps a 1e-12 slack so that windows which are exactly 1 in real
/// arithmetic but round to 1 - ulp do not trigger a spurious iteration.
inline constexpr double kFlushThreshold = 1.0 - 1e-12;

/// One iteration (packet j, slot t) whose window was still open. z and y are
/// the per-user values; every user carries the same value.
struct Trigger {
  int j = 0;
  int t = 0;
  double z = 0.0;
  double y = 0.0;
};

/// Fractional primal/dual solution after some number of slots.
///
/// Only x_{k*_t}(t) is ever non-zero in slot t; `x[t]` stores it. z_{i,j}(t)
/// and y_{i,j}(t) are non-zero only for triggered (j, t) pairs.
struct PdSolution {
  double theta = 0.0;
  int users = 0;
  std::vector<Level> k_star;
  std::vector<double> x;
  std::vector<Trigger> triggers;  // ordered by (t, j)

  int slots() const { return static_cast<int>(x.size()); }
};

struct IterationRecord {
  int t = 0;
  int j = 0;
  Level k_star = 0;
  double window_before = 0.0;
  double x_after = 0.0;
  bool triggered = false;
  double primal = 0.0;
  double dual = 0.0;
};

/// Online primal-dual state machine over the covering program and its packing dual.
///
/// Slots must be fed in order. Each slot raises x at the cheapest level that
/// reaches every user (or at a fixed override level) once per still-open packet.
class PrimalDual {
 public:
  struct Options {
    /// Use this level every slot instead of the channel-derived k*_t.
    std::optional<Level> k_override;
    /// Start the packet loop at max(t - window, 0) instead of 0.
    std::optional<int> window;
    /// Test hook: subtracts the additive 1/(theta C) term instead of adding it.
    bool flip_additive_sign = false;
  };
  using Observer = std::function<void(const IterationRecord&)>;

  PrimalDual(const CostSchedule& costs, int users, Options options);
  PrimalDual(const CostSchedule& costs, int users) : PrimalDual(costs, users, Options{}) {}

  /// floor(sqrt(C_1)), the loop window used by the shortened packet loop.
  static int sqrt_window(const CostSchedule& costs) { return static_cast<int>(std::floor(std::sqrt(costs.c1()))); }

  /// Processes slot t (0-based). t must equal slots().
  void step(int t, SlotThresholds slot_thresholds);
  /// Processes slot t at an explicit level, bypassing the k*_t search.
  void step_at_level(int t, Level k);

  void set_observer(Observer observer) { observer_ = std::move(observer); }

  int slots() const { return solution_.slots(); }
  double theta() const { return solution_.theta; }
  double x(int t) const { return solution_.x.at(static_cast<std::size_t>(t)); }
  Level k_star(int t) const { return solution_.k_star.at(static_cast<std::size_t>(t)); }
  /// Sum of x over slots j..t of completed slots.
  double window_sum(int j, int t) const;

  /// Objective values accumulated iteration by iteration.
  double primal() const { return primal_; }
  double dual() const { return dual_; }
  /// Packet iterations evaluated in the most recent slot.
  int last_slot_iterations() const { return last_iterations_; }

  const PdSolution& solution() const { return solution_; }

 private:
  CostSchedule costs_;
  Options options_;
  PdSolution solution_;
  std::vector<double> prefix_{0.0};  // prefix_[t] = sum of x over slots < t
  double primal_ = 0.0;
  double dual_ = 0.0;
  int last_iterations_ = 0;
  Observer observer_;
};

/// Runs the state machine over every slot of the pattern.
PdSolution run_primal_dual(const ChannelPattern& pattern, const CostSchedule& costs,
                           PrimalDual::Options options = {});

/// Sum_t C_{k*_t} x_{k*_t}(t) + (1/N) Sum_t Sum_i Sum_{j<=t} z_{i,j}(t).
double primal_objective(const PdSolution& solution, const CostSchedule& costs);
/// Sum of all y_{i,j}(t).
double dual_objective(const PdSolution& solution);

struct FeasibilityReport {
  bool feasible = true;
  std::string witness;  // empty when feasible
  int user = -1;
  int level = -1;
  int j = -1;
  int t = -1;
  double lhs = 0.0;
  double rhs = 0.0;
  int max_dual_load = 0;  // max over t of #{triggered (j, tau) : j <= t <= tau}

  explicit operator bool() const { return feasible; }
};

/// Covering constraints z_{i,j}(t) + Sum_{tau=j..t} Sum_k 1_{i,k}(tau) x_k(tau) >= 1 and non-negativity.
FeasibilityReport check_primal_feasible(const PdSolution& solution, const ChannelPattern& pattern,
                                        double tolerance = 1e-9);
/// Packing constraints Sum_i 1_{i,k}(t) Sum_{j<=t} Sum_{tau>=t} y_{i,j}(tau) <= C_k and 0 <= y <= 1/N.
FeasibilityReport check_dual_feasible(const PdSolution& solution, const ChannelPattern& pattern,
                                      const CostSchedule& costs, double tolerance = 1e-9);

/// Debug record {t, j, k_star, window_sum_before, x_after, primal_so_far, dual_so_far}, slots 1-based.
std::string iteration_json_line(const IterationRecord& record);

}  // namespace aoi
