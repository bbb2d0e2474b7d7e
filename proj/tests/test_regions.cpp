#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "ehmac/regions.hpp"
#include "ehmac/rng.hpp"
#include "ehmac/throughput.hpp"

using Catch::Approx;
using namespace ehmac;

TEST_CASE("AWGN outer bound values") {
  const auto two = awgn_outer({1.0, 1.0});
  REQUIRE(two.f(1u) == Approx(0.5).margin(1e-12));
  REQUIRE(two.f(2u) == Approx(0.5).margin(1e-12));
  REQUIRE(two.f(3u) == Approx(0.5 * std::log2(3.0)).margin(1e-12));
  REQUIRE(two.well_formed());

  REQUIRE(awgn_outer({1.0}).f(1u) == Approx(0.5).margin(1e-12));
  REQUIRE(awgn_outer({1.0, 1.0, 1.0}).f(7u) == Approx(1.0).margin(1e-12));
  REQUIRE_THROWS_AS(awgn_outer({1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("gamma shift clamps at zero and flags it") {
  const auto base = awgn_outer({7.0, 7.0});
  const auto same = shifted_region(base, 0.0);
  REQUIRE(setfn_distance(same.f, base.f) == 0.0);
  REQUIRE_FALSE(same.clamped);

  const auto one = awgn_outer({1.0});
  const auto clamped = shifted_region(one, 0.72);
  REQUIRE(clamped.f(1u) == 0.0);
  REQUIRE(clamped.clamped);

  const auto shifted = shifted_region(base, 0.72);
  REQUIRE(shifted.f(3u) ==
          Approx(0.5 * std::log2(15.0) - 0.72).margin(1e-12));
}

TEST_CASE("EPI constant stays exact with 1.05 as its decimal") {
  REQUIRE(epi_gap_bits() ==
          Approx(0.5 * std::log2(std::numbers::pi * std::numbers::e / 2.0))
              .margin(1e-15));
  REQUIRE(std::fabs(epi_gap_bits() - 1.05) < 0.003);
  REQUIRE(sum_gap_txrx_bits() == Approx(0.72 + epi_gap_bits()).margin(1e-15));
  REQUIRE(std::fabs(sum_gap_txrx_bits() - 1.77) < 0.003);
  REQUIRE(std::fabs(sum_gap_tx_correlated_bits() - 3.85) < 0.003);
  REQUIRE(std::fabs(region_gap_tx_bits(4) - 6.85) < 0.003);
}

TEST_CASE("receiver-side-information inner bound") {
  const auto zero = inner_txrx(make_set_function(1, {0.0, 0.0}));
  REQUIRE(zero.f(1u) == 0.0);

  const auto small = inner_txrx(make_set_function(1, {0.0, 0.5}));
  REQUIRE(small.f(1u) == 0.0);
  REQUIRE(small.clamped);

  const auto big = inner_txrx(make_set_function(1, {0.0, 3.0}));
  REQUIRE(big.f(1u) == Approx(3.0 - epi_gap_bits()).margin(1e-12));
  REQUIRE(big.f(1u) == Approx(1.9529).margin(1e-4));
}

TEST_CASE("transmitter-only inner bound subtracts the entropy rate") {
  const auto tput = make_set_function(1, {0.0, 3.0});
  REQUIRE(setfn_distance(inner_tx(tput, 0.0).f, inner_txrx(tput).f) == 0.0);
  REQUIRE(inner_tx(tput, 1.0).f(1u) ==
          Approx(2.0 - epi_gap_bits()).margin(1e-12));
  REQUIRE_THROWS_AS(inner_tx(tput, -0.1), std::invalid_argument);
}

TEST_CASE("entropy K plus policy gap reproduces the 2.85+K budget") {
  const int users = 3;
  const auto outer = awgn_outer({20.0, 20.0, 20.0});
  std::vector<double> tput_values = outer.f.values;
  for (std::size_t mask = 1; mask < tput_values.size(); ++mask) {
    tput_values[mask] -= kBoundedEntropyPolicyGapBits;
  }
  const auto inner =
      inner_tx(make_set_function(users, std::move(tput_values)),
               static_cast<double>(users));
  const auto budget = shifted_region(outer, region_gap_tx_bits(users));
  REQUIRE(setfn_distance(inner.f, budget.f) == Approx(0.0).margin(1e-12));
}

TEST_CASE("submodularity oracle") {
  Xoshiro256pp gen(2718);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> means(5);
    for (double& m : means) m = 0.1 + 5.0 * gen.uniform01();
    REQUIRE(is_submodular(awgn_outer(means).f, 1e-9));
  }

  Xoshiro256pp gen8(137);
  std::vector<double> means8(8);
  for (double& m : means8) m = 0.05 + 6.0 * gen8.uniform01();
  const auto eight = awgn_outer(means8);
  REQUIRE(eight.well_formed());

  // |I|^2 is supermodular: fails already at K=2.
  const auto square = make_set_function(2, {0.0, 1.0, 1.0, 4.0});
  REQUIRE_FALSE(is_submodular(square));

  const auto modular = make_set_function(3, {0.0, 0.3, 0.5, 0.8, 0.2, 0.5,
                                             0.7, 1.0});
  REQUIRE(is_submodular(modular, 1e-12));
}

TEST_CASE("monotonicity violations are flagged, not repaired") {
  const auto region = make_region(make_set_function(2, {0.0, 0.5, 0.5, 0.3}));
  REQUIRE_FALSE(region.monotone);
  REQUIRE_FALSE(region.well_formed());
  REQUIRE_THROWS_AS(vertex(region, {0, 1}), RegionError);
  REQUIRE_THROWS_AS(sum_rate(region), RegionError);
}

TEST_CASE("permutation vertices") {
  const auto region = awgn_outer({1.0, 1.0});
  const double joint = 0.5 * std::log2(3.0);
  const auto forward = vertex(region, {0, 1});
  REQUIRE(forward[0] == Approx(0.5).margin(1e-12));
  REQUIRE(forward[1] == Approx(joint - 0.5).margin(1e-12));
  const auto backward = vertex(region, {1, 0});
  REQUIRE(backward[0] == Approx(joint - 0.5).margin(1e-12));
  REQUIRE(backward[1] == Approx(0.5).margin(1e-12));

  const auto single = awgn_outer({2.0});
  REQUIRE(vertex(single, {0})[0] == Approx(0.5 * std::log2(3.0)).margin(1e-12));

  REQUIRE_THROWS_AS(vertex(region, {0, 0}), std::invalid_argument);
}

TEST_CASE("sum rate checks every permutation vertex") {
  REQUIRE(sum_rate(awgn_outer({1.0, 1.0})) ==
          Approx(0.5 * std::log2(3.0)).margin(1e-12));
  REQUIRE(sum_rate(awgn_outer({1.0, 1.0, 1.0, 1.0})) ==
          Approx(0.5 * std::log2(5.0)).margin(1e-12));
  REQUIRE(sum_rate(awgn_outer({0.8})) ==
          Approx(0.5 * std::log2(1.8)).margin(1e-12));
}

TEST_CASE("vertex coordinates of a polymatroid are nonnegative") {
  Xoshiro256pp gen(99);
  std::vector<double> means(4);
  for (double& m : means) m = 0.2 + 3.0 * gen.uniform01();
  const auto region = awgn_outer(means);
  std::vector<int> perm(4);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    for (double coord : vertex(region, perm)) REQUIRE(coord >= -1e-12);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("containment via set-function dominance") {
  const auto region = awgn_outer({1.0, 1.0});
  REQUIRE(region_contains(region, region));
  REQUIRE(region_contains(shifted_region(region, 0.3), region));
  const auto smaller = awgn_outer({0.5, 0.5});
  REQUIRE_FALSE(region_contains(region, smaller));
  REQUIRE(region_contains(smaller, region));
  REQUIRE_THROWS_AS(region_contains(region, awgn_outer({1.0})),
                    std::invalid_argument);
}

TEST_CASE("set-function distance is a metric") {
  const auto f = awgn_outer({1.0, 2.0}).f;
  REQUIRE(setfn_distance(f, f) == 0.0);

  // Unclamped shift by gamma moves every nonempty value by exactly gamma.
  const double gamma = 0.25;
  std::vector<double> shifted = f.values;
  for (std::size_t mask = 1; mask < shifted.size(); ++mask) {
    shifted[mask] -= gamma;
  }
  REQUIRE(setfn_distance(f, make_set_function(2, shifted)) ==
          Approx(gamma).margin(1e-15));

  Xoshiro256pp gen(31337);
  for (int trial = 0; trial < 50; ++trial) {
    auto random_fn = [&]() {
      std::vector<double> values(4, 0.0);
      for (std::size_t mask = 1; mask < 4; ++mask) {
        values[mask] = 2.0 * gen.uniform01();
      }
      return make_set_function(2, values);
    };
    const auto a = random_fn();
    const auto b = random_fn();
    const auto c = random_fn();
    REQUIRE(setfn_distance(a, c) <=
            setfn_distance(a, b) + setfn_distance(b, c) + 1e-12);
  }
}

TEST_CASE("inner, throughput and outer regions nest subset-wise") {
  const std::vector<double> means = {0.4, 0.6};
  const auto model = build_iid_product(
      {{{0.0, 0.6}, {1.0, 0.4}}, {{0.0, 0.4}, {1.0, 0.6}}}, {1.0, 1.0});
  const std::vector<PolicySpec> policies = {PolicySpec::fixed_fraction(0.4),
                                            PolicySpec::fixed_fraction(0.6)};
  const auto tput = throughput_set_function(policies, model, 6);
  const RateRegion tput_region = make_region(tput);
  REQUIRE(tput_region.well_formed());
  const RateRegion outer = awgn_outer(means);
  REQUIRE(region_contains(inner_txrx(tput), tput_region));
  REQUIRE(region_contains(tput_region, outer));
}

TEST_CASE("gap report rows") {
  const auto rows = gap_report(1.77, 1.0, {16, 1024});
  REQUIRE(rows[0].upper == Approx(0.5 * std::log2(17.0)).margin(1e-12));
  REQUIRE(rows[0].lower == Approx(rows[0].upper - 1.77).margin(1e-12));
  REQUIRE(rows[0].lower == Approx(0.2737).margin(1e-4));
  REQUIRE(rows[1].upper == Approx(5.0007).margin(1e-4));
  REQUIRE(rows[1].relative == Approx(0.354).margin(1e-3));

  const auto clamp = gap_report(3.85, 1.0, {1});
  REQUIRE(clamp[0].upper == Approx(0.5).margin(1e-12));
  REQUIRE(clamp[0].lower == 0.0);
}

TEST_CASE("relative gap decreases strictly along a geometric user sweep") {
  std::vector<std::uint64_t> counts;
  for (std::uint64_t k = 1; k <= (1ull << 20); k *= 2) counts.push_back(k);
  for (double gamma : {1.77, 3.85}) {
    const auto rows = gap_report(gamma, 1.0, counts);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      REQUIRE(rows[i].relative < rows[i - 1].relative);
      REQUIRE(rows[i].lower <= rows[i].upper);
      if (rows[i].upper >= gamma) {
        REQUIRE(rows[i].relative >= 0.0);
        REQUIRE(rows[i].relative <= 1.0);
      }
    }
  }
}
