#include <doctest.h>

#include <random>
#include <sstream>

#include "aoi/core_model.hpp"
#include "aoi/errors.hpp"
#include "aoi/io.hpp"
#include "aoi/random.hpp"

using namespace aoi;

namespace {

ChannelPattern pattern_of(std::initializer_list<std::initializer_list<int>> rows, int levels) {
  const int users = static_cast<int>(rows.size());
  const int horizon = static_cast<int>(rows.begin()->size());
  ThresholdMatrix m(users, horizon);
  int i = 0;
  for (const auto& row : rows) {
    int t = 0;
    for (int v : row) m(i, t++) = v;
    ++i;
  }
  return ChannelPattern(m, levels);
}

ChannelPattern random_pattern(std::mt19937_64& rng, int users, int horizon, int levels) {
  ThresholdMatrix m(users, horizon);
  for (int i = 0; i < users; ++i)
    for (int t = 0; t < horizon; ++t) m(i, t) = uniform_int(rng, 1, levels);
  return ChannelPattern(m, levels);
}

// Straight transcription of the age recursion and the cost sum, kept apart from total_cost.
double replay_oracle(const ChannelPattern& p, const std::vector<Level>& d, const std::vector<double>& c) {
  std::vector<long> a(static_cast<std::size_t>(p.users()), 0);
  double j = 0.0;
  for (int t = 0; t < p.horizon(); ++t) {
    const int k = d[static_cast<std::size_t>(t)];
    double sum = 0.0;
    for (int i = 0; i < p.users(); ++i) {
      const bool got = k > 0 && p.thresholds()(i, t) <= k;
      a[static_cast<std::size_t>(i)] = got ? 0 : a[static_cast<std::size_t>(i)] + 1;
      sum += static_cast<double>(a[static_cast<std::size_t>(i)]);
    }
    j += (k == 0 ? 0.0 : c[static_cast<std::size_t>(k - 1)]) + sum / p.users();
  }
  return j;
}

}  // namespace

TEST_CASE("cost schedule validation") {
  CHECK_THROWS_AS(CostSchedule({}), ConfigError);
  CHECK_THROWS_AS(CostSchedule({0.5, 2.0}), ConfigError);
  CHECK_THROWS_AS(CostSchedule({3.0, 2.0}), ConfigError);
  const CostSchedule c({1.0, 2.5, 2.5});
  CHECK(c[0] == 0.0);
  CHECK(c[2] == 2.5);
  CHECK(c.levels() == 3);
  CHECK_THROWS_AS(c[4], UsageError);

  const CostSchedule lin = CostSchedule::linear(30, 5, 4);
  CHECK(lin[1] == 30);
  CHECK(lin[4] == 45);
}

TEST_CASE("channel pattern rejects thresholds outside [1, M]") {
  ThresholdMatrix m(1, 2);
  m << 1, 4;
  CHECK_THROWS_AS(ChannelPattern(m, 3), ConfigError);
  m << 0, 1;
  CHECK_THROWS_AS(ChannelPattern(m, 3), ConfigError);
}

TEST_CASE("decode_indicator") {
  const auto p = pattern_of({{2, 1}}, 3);
  CHECK(decode_indicator(p, 0, 3, 0));
  CHECK_FALSE(decode_indicator(p, 0, 1, 0));
  CHECK_FALSE(decode_indicator(p, 0, 0, 1));
  CHECK_THROWS_AS(decode_indicator(p, 1, 1, 0), UsageError);
  CHECK_THROWS_AS(decode_indicator(p, 0, 4, 0), UsageError);
  CHECK_THROWS_AS(decode_indicator(p, 0, 1, 2), UsageError);
}

TEST_CASE("k_star is the largest threshold in the slot") {
  CHECK(k_star(pattern_of({{2}, {1}, {3}}, 3), 0) == 3);
  CHECK(k_star(pattern_of({{1}, {1}}, 4), 0) == 1);
  CHECK(k_star(pattern_of({{2}}, 2), 0) == 2);
  CHECK_THROWS_AS(k_star(pattern_of({{2}}, 2), 1), UsageError);
}

TEST_CASE("advance_age") {
  const auto p = pattern_of({{1}, {2}}, 2);
  AgeState s{AgeVector(2), 0};
  s.ages << 3, 0;
  CHECK(advance_age(s, p, 2).ages == AgeVector::Zero(2));
  AgeVector idle(2);
  idle << 4, 1;
  CHECK(advance_age(s, p, 0).ages == idle);

  s.ages << 2, 5;
  AgeVector partial(2);
  partial << 0, 6;
  const auto next = advance_age(s, p, 1);
  CHECK(next.ages == partial);
  CHECK(next.slot == 1);
  CHECK_THROWS_AS(advance_age(next, p, 1), UsageError);
}

TEST_CASE("total_cost hand replays") {
  SUBCASE("transmit then idle") {
    const auto p = pattern_of({{1, 1}}, 1);
    const std::vector<Level> d{1, 0};
    const auto r = total_cost(d, p, CostSchedule({7.0}));
    CHECK(r.total_cost == doctest::Approx(7.0 + 1.0));
    CHECK(r.tx_cost == std::vector<double>{7.0, 0.0});
    CHECK(r.avg_age_cost == std::vector<double>{0.0, 1.0});
    CHECK(r.time_avg_total_cost == doctest::Approx(4.0));
    CHECK(r.time_avg_age == doctest::Approx(0.5));
  }
  SUBCASE("all idle") {
    const auto p = pattern_of({{1, 1, 1}}, 1);
    const std::vector<Level> d{0, 0, 0};
    CHECK(total_cost(d, p, CostSchedule({2.0})).total_cost == 6.0);
  }
  SUBCASE("length mismatch") {
    const auto p = pattern_of({{1, 1, 1}}, 1);
    const std::vector<Level> d{0, 0};
    CHECK_THROWS_AS(total_cost(d, p, CostSchedule({2.0})), UsageError);
  }
  SUBCASE("random instances agree with an independent replay") {
    std::mt19937_64 rng(11);
    for (int n = 0; n < 200; ++n) {
      const int m = uniform_int(rng, 1, 4);
      const auto p = random_pattern(rng, 2, 3 + n % 20, m);
      std::vector<double> c{1.0 + 10 * unit_uniform(rng)};
      for (int k = 1; k < m; ++k) c.push_back(c.back() + 3 * unit_uniform(rng));
      std::vector<Level> d(static_cast<std::size_t>(p.horizon()));
      for (auto& v : d) v = uniform_int(rng, 0, m);
      CHECK(total_cost(d, p, CostSchedule(c)).total_cost == doctest::Approx(replay_oracle(p, d, c)).epsilon(1e-12));
    }
  }
}

TEST_CASE("total_cost is additive over a slot split") {
  std::mt19937_64 rng(5);
  for (int n = 0; n < 100; ++n) {
    const auto p = random_pattern(rng, 3, 30, 3);
    const CostSchedule c({2.0, 3.5, 9.0});
    std::vector<Level> d(30);
    for (auto& v : d) v = uniform_int(rng, 0, 3);
    const int split = uniform_int(rng, 0, 30);
    const auto whole = total_cost(d, p, c);
    const auto head = total_cost(std::span(d).first(static_cast<std::size_t>(split)), p.slice(0, split), c);
    const auto tail =
        total_cost(std::span(d).subspan(static_cast<std::size_t>(split)), p.slice(split, 30 - split), c, head.final_ages);
    CHECK(whole.total_cost == doctest::Approx(head.total_cost + tail.total_cost).epsilon(1e-12));
  }
}

TEST_CASE("raising one decision never increases later ages") {
  std::mt19937_64 rng(9);
  for (int n = 0; n < 200; ++n) {
    const auto p = random_pattern(rng, 3, 15, 4);
    std::vector<Level> d(15);
    for (auto& v : d) v = uniform_int(rng, 0, 3);
    auto raised = d;
    const auto slot = static_cast<std::size_t>(uniform_int(rng, 0, 14));
    raised[slot] = uniform_int(rng, d[slot], 4);
    AgeState a = AgeState::initial(3), b = AgeState::initial(3);
    for (int t = 0; t < 15; ++t) {
      a = advance_age(a, p, d[static_cast<std::size_t>(t)]);
      b = advance_age(b, p, raised[static_cast<std::size_t>(t)]);
      CHECK((b.ages.array() <= a.ages.array()).all());
    }
  }
}

TEST_CASE("pattern JSON round trip and run CSV") {
  std::mt19937_64 rng(3);
  const auto p = random_pattern(rng, 3, 7, 4);
  const auto j = pattern_to_json(p);
  CHECK(j.at("n_users") == 3);
  CHECK(j.at("horizon") == 7);
  CHECK(j.at("m_levels") == 4);
  CHECK(pattern_from_json(j) == p);

  auto bad = j;
  bad["thresholds"][0].erase(0);
  CHECK_THROWS_AS(pattern_from_json(bad), ConfigError);

  const auto p1 = pattern_of({{1, 1}}, 1);
  const std::vector<Level> d{1, 0};
  std::ostringstream csv;
  write_run_csv(total_cost(d, p1, CostSchedule({2.0})), csv);
  CHECK(csv.str() == "slot,decision,tx_cost,avg_age_cost\n1,1,2,0\n2,0,0,1\n");
  CHECK(run_summary_json(total_cost(d, p1, CostSchedule({2.0}))).at("total_cost") == 3.0);
}
