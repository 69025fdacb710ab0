#pragma once

#include <cstddef>
#include <vector>

#include "aoi/core_model.hpp"

namespace aoi {

struct OracleCaps {
  int max_users = 4;
  int max_horizon = 30;
};

struct OptResult {
  double opt_cost = 0.0;
  std::vector<Level> decisions;
  std::size_t states_expanded = 0;
  double wall_seconds = 0.0;
};

/// Exact min over all decision traces of the total cost, by dynamic programming
/// over reachable age vectors. Every level 0..M is allowed in every slot. The
/// returned trace is the lexicographically smallest optimal one.
/// Throws CapacityError above the caps.
OptResult solve_opt_dp(const ChannelPattern& pattern, const CostSchedule& costs, const OracleCaps& caps = {});

/// Dual objective of the channel-aware primal-dual run: a lower bound on the
/// optimum that is available at any size.
double dual_lower_bound(const ChannelPattern& pattern, const CostSchedule& costs);

}  // namespace aoi
