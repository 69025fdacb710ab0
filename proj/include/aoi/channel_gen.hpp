#pragma once

#include <cstdint>
#include <string_view>

#include <Eigen/Core>
#include <json.hpp>

#include "aoi/core_model.hpp"

namespace aoi {

/// Markov-modulated threshold chain over the M channel states.
struct MarkovChannelSpec {
  int m_levels = 4;
  Eigen::MatrixXd transition;  // row-stochastic, M x M; row/col k-1 is threshold k
  Eigen::VectorXd initial;     // distribution of the first slot's state
  bool correlated = false;     // one shared trajectory for all users
  std::uint64_t seed = 0;

  /// Throws ConfigError unless the matrix is M x M, non-negative, and rows and
  /// the initial distribution sum to 1 within 1e-12.
  void validate() const;

  /// Lazy chain standing in for the unpublished numerical-study chain: stay
  /// with probability `stay`, otherwise move to one of the other states
  /// uniformly. Uniform initial state.
  static MarkovChannelSpec lazy(int m_levels = 4, double stay = 0.7, std::uint64_t seed = 0);
};

nlohmann::json markov_spec_to_json(const MarkovChannelSpec& spec);
/// {"m_levels", "transition", "initial" (optional, uniform), "seed", "correlated" (optional)}
MarkovChannelSpec markov_spec_from_json(const nlohmann::json& j);

/// Independent trajectory per user (or one shared one when correlated); deterministic in the seed.
ChannelPattern gen_markov(const MarkovChannelSpec& spec, int users, int horizon);

struct AdversarialParams {
  int m_levels = 4;
  int level = 1;          // constant family
  int burst_length = 16;  // worst_burst run length at level M
};

/// Families: constant, worst_burst, correlated_group, iid_uniform. Unknown names throw UsageError.
ChannelPattern gen_adversarial(std::string_view family, const AdversarialParams& params, int users, int horizon,
                               std::uint64_t seed);

}  // namespace aoi
