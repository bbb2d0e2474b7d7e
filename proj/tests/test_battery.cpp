#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "ehmac/battery.hpp"

using Catch::Approx;
using namespace ehmac;

namespace {

Pmf bernoulli(double p, double high = 1.0) {
  return {{0.0, 1.0 - p}, {high, p}};
}

}  // namespace

TEST_CASE("step follows the battery recursion") {
  BatteryState s{{0.0}, {2.0}};
  REQUIRE(step(s, {0.0}, {1.5}).levels[0] == Approx(1.5));

  BatteryState full{{2.0}, {2.0}};
  REQUIRE(step(full, {2.0}, {3.0}).levels[0] == Approx(2.0));

  BatteryState mid{{1.0}, {2.0}};
  REQUIRE(step(mid, {0.5}, {5.0}).levels[0] == Approx(2.0));
}

TEST_CASE("overspend names the user and amounts") {
  BatteryState s{{0.5, 1.0}, {2.0, 2.0}};
  try {
    step(s, {0.0, 1.2}, {0.0, 0.0});
    FAIL("expected AdmissibilityError");
  } catch (const AdmissibilityError& e) {
    const std::string msg = e.what();
    REQUIRE(msg.find("user 2") != std::string::npos);
    REQUIRE(msg.find("1.2") != std::string::npos);
  }
}

TEST_CASE("full-fraction policy drains a deterministic battery every slot") {
  const double cap = 2.0;
  const auto model = build_iid_product({{{cap, 1.0}}}, {cap});
  const auto traj = simulate_trajectory(
      model, {PolicySpec::fixed_fraction(1.0)}, 16, 3u);
  for (int t = 0; t < 16; ++t) {
    REQUIRE(traj.levels[0][t] == Approx(cap));
    REQUIRE(traj.spends[0][t] == Approx(cap));
  }
}

TEST_CASE("greedy on on/off arrivals empties the battery each slot") {
  const auto model = build_iid_product({bernoulli(0.5)}, {1.0});
  const auto traj =
      simulate_trajectory(model, {PolicySpec::greedy()}, 64, 11u);
  for (int t = 0; t < 64; ++t) {
    REQUIRE(traj.levels[0][t] == Approx(traj.arrivals[0][t]));
    REQUIRE(traj.spends[0][t] == Approx(traj.arrivals[0][t]));
  }
}

TEST_CASE("zero policy accumulates arrivals up to the cap") {
  const auto model = build_iid_product({bernoulli(0.6, 0.5)}, {1.2});
  const auto traj =
      simulate_trajectory(model, {PolicySpec::constant_power(0.0)}, 48, 17u);
  double cumulative = 0.0;
  for (int t = 0; t < 48; ++t) {
    cumulative = std::min(cumulative + traj.arrivals[0][t], 1.2);
    REQUIRE(traj.levels[0][t] == Approx(cumulative).margin(1e-12));
    REQUIRE(traj.spends[0][t] == 0.0);
  }
}

TEST_CASE("every trajectory respects spend <= level <= cap and conservation") {
  Xoshiro256pp gen(4242);
  const std::vector<PolicySpec> pool = {
      PolicySpec::fixed_fraction(0.37), PolicySpec::greedy(),
      PolicySpec::constant_power(0.4),
      PolicySpec::quantized_fixed_fraction(0.8, 5)};
  for (int trial = 0; trial < 40; ++trial) {
    const double cap = 0.5 + 2.0 * gen.uniform01();
    const auto model = build_iid_product(
        {{{0.0, 0.3}, {cap * gen.uniform01(), 0.4}, {cap, 0.3}},
         bernoulli(0.5, cap)},
        {cap, cap});
    const std::vector<PolicySpec> policies = {pool[gen.next() % pool.size()],
                                              pool[gen.next() % pool.size()]};
    const auto traj = simulate_trajectory(model, policies, 64, gen.next());
    for (int i = 0; i < 2; ++i) {
      double spent = 0.0, arrived = 0.0;
      for (int t = 0; t < 64; ++t) {
        REQUIRE(traj.spends[i][t] >= 0.0);
        REQUIRE(traj.spends[i][t] <= traj.levels[i][t] + kAdmissibilityTol);
        REQUIRE(traj.levels[i][t] <= cap + kAdmissibilityTol);
        spent += traj.spends[i][t];
        arrived += traj.arrivals[i][t];
        REQUIRE(spent <= arrived + 1e-9);
      }
    }
  }
}

TEST_CASE("levels replay the recursion from an empty battery") {
  const auto model =
      build_iid_product({bernoulli(0.5), bernoulli(0.7, 0.6)}, {1.0, 1.0});
  const std::vector<PolicySpec> policies = {PolicySpec::fixed_fraction(0.5),
                                            PolicySpec::fixed_fraction(0.6)};
  const auto traj = simulate_trajectory(model, policies, 32, 23u);
  for (int i = 0; i < 2; ++i) {
    double prev_level = 0.0, prev_spend = 0.0;
    for (int t = 0; t < 32; ++t) {
      const double expected =
          advance_level(prev_level, prev_spend, traj.arrivals[i][t], 1.0);
      REQUIRE(traj.levels[i][t] == Approx(expected).margin(1e-12));
      prev_level = traj.levels[i][t];
      prev_spend = traj.spends[i][t];
    }
  }
}

TEST_CASE("trajectory CSV layout") {
  const auto model = build_iid_product({{{1.0, 1.0}}}, {1.0});
  const auto traj =
      simulate_trajectory(model, {PolicySpec::greedy()}, 2, 1u);
  std::ostringstream out;
  write_trajectory_csv(out, traj);
  REQUIRE(out.str() ==
          "t,user,arrival,level,spend\n"
          "1,1,1,1,1\n"
          "2,1,1,1,1\n");
}
