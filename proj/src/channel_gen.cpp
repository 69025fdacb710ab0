#include "aoi/channel_gen.hpp"

#include <cmath>
#include <random>

#include <fmt/format.h>

#include "aoi/errors.hpp"
#include "aoi/random.hpp"

namespace aoi {

namespace {

constexpr double kStochasticTolerance = 1e-12;

// Inverse-CDF draw; returns a 0-based state.
int sample_state(std::mt19937_64& engine, const Eigen::Ref<const Eigen::VectorXd>& probabilities) {
  const double u = unit_uniform(engine);
  double cumulative = 0.0;
  int last_positive = 0;
  for (Eigen::Index k = 0; k < probabilities.size(); ++k) {
    if (probabilities(k) <= 0.0) continue;
    cumulative += probabilities(k);
    last_positive = static_cast<int>(k);
    if (u < cumulative) return last_positive;
  }
  return last_positive;
}

void check_dimensions(int users, int horizon) {
  if (users < 1) throw UsageError("need at least one user");
  if (horizon < 0) throw UsageError("horizon must be non-negative");
}

}  // namespace

void MarkovChannelSpec::validate() const {
  if (m_levels < 1) throw ConfigError("Markov channel needs at least one state");
  if (transition.rows() != m_levels || transition.cols() != m_levels)
    throw ConfigError(fmt::format("transition matrix must be {0}x{0}", m_levels));
  if (initial.size() != m_levels) throw ConfigError(fmt::format("initial distribution must have {} entries", m_levels));
  if (!transition.allFinite() || (transition.array() < 0.0).any())
    throw ConfigError("transition probabilities must be finite and non-negative");
  for (Eigen::Index r = 0; r < transition.rows(); ++r)
    if (std::abs(transition.row(r).sum() - 1.0) > kStochasticTolerance)
      throw ConfigError(fmt::format("transition row {} sums to {}, not 1", r + 1, transition.row(r).sum()));
  if (!initial.allFinite() || (initial.array() < 0.0).any() || std::abs(initial.sum() - 1.0) > kStochasticTolerance)
    throw ConfigError("initial distribution must be non-negative and sum to 1");
}

MarkovChannelSpec MarkovChannelSpec::lazy(int m_levels, double stay, std::uint64_t seed) {
  if (m_levels < 1) throw ConfigError("Markov channel needs at least one state");
  MarkovChannelSpec spec;
  spec.m_levels = m_levels;
  spec.seed = seed;
  if (m_levels == 1) {
    spec.transition = Eigen::MatrixXd::Ones(1, 1);
  } else {
    spec.transition = Eigen::MatrixXd::Constant(m_levels, m_levels, (1.0 - stay) / (m_levels - 1));
    spec.transition.diagonal().setConstant(stay);
  }
  spec.initial = Eigen::VectorXd::Constant(m_levels, 1.0 / m_levels);
  return spec;
}

nlohmann::json markov_spec_to_json(const MarkovChannelSpec& spec) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < spec.transition.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < spec.transition.cols(); ++c) row.push_back(spec.transition(r, c));
    rows.push_back(std::move(row));
  }
  nlohmann::json initial = nlohmann::json::array();
  for (Eigen::Index k = 0; k < spec.initial.size(); ++k) initial.push_back(spec.initial(k));
  return {{"m_levels", spec.m_levels},
          {"transition", std::move(rows)},
          {"initial", std::move(initial)},
          {"seed", spec.seed},
          {"correlated", spec.correlated}};
}

MarkovChannelSpec markov_spec_from_json(const nlohmann::json& j) {
  MarkovChannelSpec spec;
  try {
    spec.m_levels = j.at("m_levels").get<int>();
    if (spec.m_levels < 1) throw ConfigError("m_levels must be at least 1");
    const auto& rows = j.at("transition");
    if (static_cast<int>(rows.size()) != spec.m_levels)
      throw ConfigError(fmt::format("transition must have {} rows", spec.m_levels));
    spec.transition.resize(spec.m_levels, spec.m_levels);
    for (int r = 0; r < spec.m_levels; ++r) {
      const auto& row = rows.at(static_cast<std::size_t>(r));
      if (static_cast<int>(row.size()) != spec.m_levels)
        throw ConfigError(fmt::format("transition row {} must have {} entries", r + 1, spec.m_levels));
      for (int c = 0; c < spec.m_levels; ++c) spec.transition(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
    if (j.contains("initial")) {
      const auto values = j.at("initial").get<std::vector<double>>();
      spec.initial = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    } else {
      spec.initial = Eigen::VectorXd::Constant(spec.m_levels, 1.0 / spec.m_levels);
    }
    spec.seed = j.value("seed", std::uint64_t{0});
    spec.correlated = j.value("correlated", false);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed Markov channel spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

ChannelPattern gen_markov(const MarkovChannelSpec& spec, int users, int horizon) {
  spec.validate();
  check_dimensions(users, horizon);
  ThresholdMatrix thresholds(users, horizon);
  const int trajectories = spec.correlated ? 1 : users;
  for (int i = 0; i < trajectories; ++i) {
    std::mt19937_64 engine(derive_seed(spec.seed, static_cast<std::uint64_t>(i)));
    int state = sample_state(engine, spec.initial);
    for (int t = 0; t < horizon; ++t) {
      thresholds(i, t) = state + 1;
      state = sample_state(engine, spec.transition.row(state).transpose());
    }
  }
  for (int i = trajectories; i < users; ++i) thresholds.row(i) = thresholds.row(0);
  return ChannelPattern(std::move(thresholds), spec.m_levels);
}

ChannelPattern gen_adversarial(std::string_view family, const AdversarialParams& params, int users, int horizon,
                               std::uint64_t seed) {
  check_dimensions(users, horizon);
  const int m = params.m_levels;
  if (m < 1) throw ConfigError("m_levels must be at least 1");
  ThresholdMatrix thresholds(users, horizon);

  if (family == "constant") {
    if (params.level < 1 || params.level > m) throw ConfigError(fmt::format("constant level must lie in [1, {}]", m));
    thresholds.setConstant(params.level);
  } else if (family == "iid_uniform") {
    std::mt19937_64 engine(derive_seed(seed, 0));
    for (int i = 0; i < users; ++i)
      for (int t = 0; t < horizon; ++t) thresholds(i, t) = uniform_int(engine, 1, m);
  } else if (family == "correlated_group") {
    std::mt19937_64 engine(derive_seed(seed, 0));
    for (int t = 0; t < horizon; ++t) thresholds.col(t).setConstant(uniform_int(engine, 1, m));
  } else if (family == "worst_burst") {
    if (params.burst_length < 1) throw ConfigError("burst_length must be positive");
    // Alternates runs of threshold M (length burst_length) with calm runs of
    // random length in [1, burst_length] and uniform thresholds.
    for (int i = 0; i < users; ++i) {
      std::mt19937_64 engine(derive_seed(seed, static_cast<std::uint64_t>(i)));
      bool burst = uniform_int(engine, 0, 1) == 1;
      int remaining = uniform_int(engine, 1, params.burst_length);
      for (int t = 0; t < horizon; ++t) {
        if (remaining == 0) {
          burst = !burst;
          remaining = burst ? params.burst_length : uniform_int(engine, 1, params.burst_length);
        }
        thresholds(i, t) = burst ? m : uniform_int(engine, 1, m);
        --remaining;
      }
    }
  } else {
    throw UsageError(fmt::format(
        "unknown channel family '{}' (expected constant, worst_burst, correlated_group or iid_uniform)", family));
  }
  return ChannelPattern(std::move(thresholds), m);
}

}  // namespace aoi
