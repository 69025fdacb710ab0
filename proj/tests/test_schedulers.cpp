#include <doctest.h>

#include <cmath>
#include <random>

#include "aoi/random.hpp"
#include "aoi/schedulers.hpp"
#include "aoi/verify.hpp"

using namespace aoi;

namespace {

Eigen::VectorXi slot_of(std::initializer_list<int> values) {
  Eigen::VectorXi v(static_cast<Eigen::Index>(values.size()));
  int i = 0;
  for (int x : values) v(i++) = x;
  return v;
}

AgeVector ages_of(std::initializer_list<std::int64_t> values) {
  AgeVector v(static_cast<Eigen::Index>(values.size()));
  int i = 0;
  for (auto x : values) v(i++) = x;
  return v;
}

// Exhaustive argmin with ties to the smallest level, scoring end-of-slot ages from scratch.
Level brute_greedy(const AgeVector& ages, const AgeVector& g, const Eigen::VectorXi& th, const CostSchedule& c,
                   bool cumulative) {
  Level best = -1;
  double best_value = 0.0;
  for (Level d = 0; d <= c.levels(); ++d) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < ages.size(); ++i) {
      const bool got = d > 0 && th(i) <= d;
      const double a = got ? 0.0 : static_cast<double>(ages(i) + 1);
      sum += cumulative ? (got ? 0.0 : static_cast<double>(g(i)) + a) : a;
    }
    const double value = c[d] + sum / static_cast<double>(ages.size());
    if (best < 0 || value < best_value) {
      best = d;
      best_value = value;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("u draw is deterministic and in [0, 1)") {
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const double u = draw_unit_uniform(s);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(u == draw_unit_uniform(s));
  }
  CHECK_THROWS_AS(RoundingState(CostSchedule({2.0}), 1, 1.0), UsageError);
}

TEST_CASE("online rounding edge cases") {
  SUBCASE("first slot at C_1 = 1 carries unit mass") {
    OnlineScheduler s(CostSchedule({1.0}), 1, 0.999);
    CHECK(s.decide(0, slot_of({1})) == 1);
    CHECK(s.state().primal_dual().x(0) == 1.0);
  }
  SUBCASE("unit clipped mass always transmits") {
    for (double u : {0.0, 0.3, 0.999999}) {
      OnlineScheduler s(CostSchedule({1.0, 4.0}), 2, u);
      CHECK(s.decide(0, slot_of({1, 2})) == 2);
      CHECK(s.state().u() == doctest::Approx(u + 1.0));
    }
  }
  SUBCASE("interval bookkeeping") {
    const CostSchedule c({20.0, 25.0});
    OnlineScheduler s(c, 2, 0.5);
    for (int t = 0; t < 30; ++t) {
      const double before = s.state().x_sum();
      s.decide(t, slot_of({1, 2}));
      const double clipped = s.state().x_sum() - s.state().x_pre_sum();
      CHECK(s.state().x_pre_sum() == before);
      CHECK(clipped == doctest::Approx(std::min(s.state().primal_dual().x(t), 1.0)));
      CHECK(clipped >= 0.0);
      CHECK(clipped <= 1.0);
    }
  }
}

TEST_CASE("online x trace matches the primal-dual run") {
  std::mt19937_64 rng(31);
  for (int n = 0; n < 100; ++n) {
    const Instance inst = random_instance(rng, {5, 80, 4, 1.0, 60.0});
    OnlineScheduler s(inst.costs, inst.pattern.users(), unit_uniform(rng));
    simulate(s, inst.pattern, inst.costs);
    CHECK(s.state().primal_dual().solution().x == run_primal_dual(inst.pattern, inst.costs).x);
  }
}

TEST_CASE("agnostic scheduler ignores the channel") {
  std::mt19937_64 rng(37);
  const CostSchedule c({12.0, 17.0, 22.0});
  for (int n = 0; n < 20; ++n) {
    const double u = unit_uniform(rng);
    const Instance a = random_instance(rng, {4, 50, 3, 12.0, 12.0});
    const Instance b = random_instance(rng, {4, 50, 3, 12.0, 12.0});
    AgnosticScheduler sa(c, u), sb(c, u), sc(c, u);
    for (int t = 0; t < 50; ++t) {
      const Level da = sa.decide(t, Eigen::VectorXi::Constant(4, 1 + t % 3));
      const Level db = sb.decide(t, Eigen::VectorXi::Constant(2, 3));
      const Level dc = sc.decide(t);
      CHECK(da == db);
      CHECK(da == dc);
      CHECK((da == 0 || da == 3));
    }
  }

  SUBCASE("first slot closed form") {
    const double mass = 1.0 / (compute_theta(c) * c.cmax());
    AgnosticScheduler below(c, mass * 0.99);
    CHECK(below.decide(0) == 3);
    AgnosticScheduler above(c, std::min(mass * 1.01, 0.999));
    CHECK(above.decide(0) == 0);
  }
  SUBCASE("middle levels do not matter") {
    const double u = 0.42;
    AgnosticScheduler x(CostSchedule({12.0, 13.0, 22.0}), u), y(CostSchedule({12.0, 21.0, 22.0}), u);
    for (int t = 0; t < 200; ++t) CHECK(x.decide(t) == y.decide(t));
  }
}

TEST_CASE("greedy 1") {
  const CostSchedule c({2.0, 3.0});
  CHECK(greedy1_step(ages_of({0, 0, 0}), slot_of({1, 2, 1}), c) == 0);
  CHECK(greedy1_step(ages_of({10}), slot_of({1}), c) == 1);
  // Idle costs exactly C_1 here (ages 1 and 1 -> average 1 + ... ): tie goes to idle.
  CHECK(greedy1_step(ages_of({0}), slot_of({1}), CostSchedule({1.0})) == 0);

  std::mt19937_64 rng(41);
  for (int n = 0; n < 2000; ++n) {
    const int users = uniform_int(rng, 1, 5);
    const int levels = uniform_int(rng, 1, 4);
    AgeVector a(users);
    Eigen::VectorXi th(users);
    for (int i = 0; i < users; ++i) {
      a(i) = uniform_int(rng, 0, 30);
      th(i) = uniform_int(rng, 1, levels);
    }
    std::vector<double> cv{1.0 + uniform_int(rng, 0, 20)};
    for (int k = 1; k < levels; ++k) cv.push_back(cv.back() + uniform_int(rng, 0, 5));
    const CostSchedule cs(cv);
    CHECK(greedy1_step(a, th, cs) == brute_greedy(a, a, th, cs, false));
    CHECK(greedy1_step(a, th, cs) == greedy1_step(a, th, cs));
  }
}

TEST_CASE("greedy 2") {
  CHECK(greedy2_step(ages_of({0, 0}), ages_of({0, 0}), slot_of({1, 1}), CostSchedule({1.0, 2.0})) == 0);

  SUBCASE("N=1 with g = 1 + 2 + 3 after three idle slots, C_1 = 5") {
    // Idling in slot 4 would cost 6 + 4 = 10 > 5.
    CHECK(greedy2_step(ages_of({3}), ages_of({6}), slot_of({1}), CostSchedule({5.0})) == 1);
  }
  SUBCASE("from zero state the scheduler transmits once g + a exceeds C_1") {
    Greedy2Scheduler s(CostSchedule({5.0}), 1);
    std::vector<Level> d;
    for (int t = 0; t < 4; ++t) d.push_back(s.decide(t, slot_of({1})));
    // Slot 3: idling costs g = 1 + 2 + 3 = 6 > 5.
    CHECK(d == std::vector<Level>{0, 0, 1, 0});
    CHECK(s.cumulative()(0) == 1);
  }

  std::mt19937_64 rng(43);
  for (int n = 0; n < 2000; ++n) {
    const int users = uniform_int(rng, 1, 5);
    const int levels = uniform_int(rng, 1, 4);
    AgeVector a(users), g(users);
    Eigen::VectorXi th(users);
    for (int i = 0; i < users; ++i) {
      a(i) = uniform_int(rng, 0, 20);
      g(i) = a(i) * (a(i) + 1) / 2;
      th(i) = uniform_int(rng, 1, levels);
    }
    std::vector<double> cv{1.0 + uniform_int(rng, 0, 60)};
    for (int k = 1; k < levels; ++k) cv.push_back(cv.back() + uniform_int(rng, 0, 5));
    const CostSchedule cs(cv);
    CHECK(greedy2_step(a, g, th, cs) == brute_greedy(a, g, th, cs, true));
  }
}

TEST_CASE("schedulers never look ahead") {
  std::mt19937_64 rng(47);
  for (int n = 0; n < 40; ++n) {
    const Instance inst = random_instance(rng, {4, 40, 4, 1.0, 30.0});
    const int horizon = inst.pattern.horizon();
    const int cut = uniform_int(rng, 0, horizon);
    ThresholdMatrix shuffled = inst.pattern.thresholds();
    for (int t = cut; t < horizon; ++t) shuffled.col(t) = shuffled.col(cut + uniform_int(rng, 0, horizon - 1 - cut));
    const ChannelPattern other(shuffled, inst.pattern.levels());
    const std::uint64_t seed = rng();
    for (const auto& name : scheduler_names()) {
      auto a = make_scheduler(name, inst.costs, inst.pattern.users(), seed);
      auto b = make_scheduler(name, inst.costs, inst.pattern.users(), seed);
      const auto ra = simulate(*a, inst.pattern, inst.costs);
      const auto rb = simulate(*b, other, inst.costs);
      for (int t = 0; t < cut; ++t)
        CHECK(ra.decisions[static_cast<std::size_t>(t)] == rb.decisions[static_cast<std::size_t>(t)]);
    }
  }
}

TEST_CASE("make_scheduler") {
  const CostSchedule c({3.0});
  for (const auto& name : scheduler_names()) CHECK(make_scheduler(name, c, 2, 1)->name() == name);
  CHECK_THROWS_AS(make_scheduler("mdp", c, 2, 1), UsageError);
}

TEST_CASE("marginal transmit frequency tracks min{x, 1}") {
  // Monte Carlo over u on one fixed instance; 3 sigma binomial band per slot.
  std::mt19937_64 rng(53);
  const Instance inst = random_instance(rng, {3, 15, 3, 2.0, 10.0});
  const auto sol = run_primal_dual(inst.pattern, inst.costs);
  const int runs = 20000;
  std::vector<int> hits(static_cast<std::size_t>(inst.pattern.horizon()), 0);
  for (int r = 0; r < runs; ++r) {
    OnlineScheduler s(inst.costs, inst.pattern.users(), unit_uniform(rng));
    const auto run = simulate(s, inst.pattern, inst.costs);
    for (std::size_t t = 0; t < hits.size(); ++t) hits[t] += run.decisions[t] != 0 ? 1 : 0;
  }
  for (std::size_t t = 0; t < hits.size(); ++t) {
    const double p = std::min(sol.x[t], 1.0);
    const double sigma = std::sqrt(p * (1.0 - p) / runs);
    CHECK(std::abs(hits[t] / static_cast<double>(runs) - p) <= 3.0 * sigma + 1e-12);
  }
}
