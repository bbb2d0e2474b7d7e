#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "ehmac/gaussmi.hpp"
#include "ehmac/rng.hpp"

using Catch::Approx;
using namespace ehmac;

namespace {

struct GaussianSampler {
  Xoshiro256pp gen;
  bool have_spare = false;
  double spare = 0.0;

  explicit GaussianSampler(std::uint64_t seed) : gen(seed) {}

  double operator()() {
    if (have_spare) {
      have_spare = false;
      return spare;
    }
    double u, v, s;
    do {
      u = 2.0 * gen.uniform01() - 1.0;
      v = 2.0 * gen.uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare = v * factor;
    have_spare = true;
    return u * factor;
  }
};

// Resubstitution estimate of h(Y): sample Y by direct simulation, average
// -log2 f(Y) with the closed-form density. Returns (mean, standard error).
template <class Density, class Draw>
std::pair<double, double> mc_entropy(const Density& density, Draw&& draw,
                                     long samples, std::uint64_t seed) {
  GaussianSampler normal(seed);
  Xoshiro256pp uniform(derive_subseed(seed, 1));
  double sum = 0.0, sum_sq = 0.0;
  for (long s = 0; s < samples; ++s) {
    const double y = draw(uniform, normal);
    const double bits = -std::log2(density(y));
    sum += bits;
    sum_sq += bits * bits;
  }
  const double mean = sum / samples;
  const double var = (sum_sq - samples * mean * mean) / (samples - 1);
  return {mean, std::sqrt(var / samples)};
}

}  // namespace

TEST_CASE("zero input power means zero information") {
  REQUIRE(sum_uniform_awgn_mi({}) == Approx(0.0).margin(1e-6));
  REQUIRE(sum_uniform_awgn_mi({0.0, 0.0}) == Approx(0.0).margin(1e-6));
}

TEST_CASE("single uniform input sits between the EPI floor and the ceiling") {
  for (double p : {0.25, 1.0, 4.0, 16.0, 64.0}) {
    const double mi = sum_uniform_awgn_mi({p});
    REQUIRE(mi >= epi_lower_bound(p) - 1e-4);
    REQUIRE(mi <= half_log2_1p(p) + 1e-4);
    REQUIRE(half_log2_1p(p) - mi <= epi_gap_bits() + 1e-4);
  }
}

TEST_CASE("quadrature matches the Monte Carlo resubstitution oracle") {
  const double p = 1.0;
  const UniformSumDensity density({p});
  const auto [mc_h, se] = mc_entropy(
      density,
      [&](Xoshiro256pp& u, GaussianSampler& n) {
        return (2.0 * u.uniform01() - 1.0) * std::sqrt(p) + n();
      },
      10'000'000, 424242u);
  const double quad_mi = sum_uniform_awgn_mi({p});
  const double mc_mi = mc_h - gaussian_entropy_bits();
  REQUIRE(std::fabs(quad_mi - mc_mi) <= 3.0 * se + 1e-4);
}

TEST_CASE("EPI floor closed form") {
  REQUIRE(epi_lower_bound(0.0) == 0.0);
  REQUIRE(epi_lower_bound(std::numbers::pi * std::numbers::e / 2.0) ==
          Approx(0.5).margin(1e-12));
  for (double p : {0.1, 0.5, 2.0, 10.0, 100.0}) {
    REQUIRE(epi_lower_bound(p) >= epi_lower_bound_loose(p));
  }
  REQUIRE_THROWS_AS(epi_lower_bound(-1.0), std::invalid_argument);
}

TEST_CASE("density and information match frozen nested-quadrature references") {
  // Reference values computed once by direct nested quadrature of
  // integral phi(y - u1 - u2) du1 du2 / (4 a1 a2) over the boxes, with an
  // independent integrator.
  const UniformSumDensity density({1.0, 4.0});
  const struct {
    double y, f;
  } points[] = {
      {0.0, 0.22926667093234038},  {0.7, 0.21482980914298219},
      {1.9, 0.13345584875236086},  {3.3, 0.032887230480600729},
      {-2.2, 0.10798994429135428},
  };
  for (const auto& [y, f] : points) {
    REQUIRE(density(y) == Approx(f).margin(1e-14));
  }
  REQUIRE(sum_uniform_awgn_mi({1.0}) ==
          Approx(0.20733132910468477).margin(1e-6));
  REQUIRE(sum_uniform_awgn_mi({1.0, 4.0}) ==
          Approx(0.7032392414842517).margin(1e-6));
}

TEST_CASE("multi-user sums satisfy floor and ceiling") {
  const std::vector<std::vector<double>> grids = {
      {1.0, 2.0},
      {0.5, 1.0, 2.0},
      {1.0, 1.0, 1.0, 1.0},
      {4.0, 0.25, 2.0, 8.0},
  };
  for (const auto& powers : grids) {
    double total = 0.0;
    for (double p : powers) total += p;
    const double mi = sum_uniform_awgn_mi(powers);
    REQUIRE(mi >= epi_lower_bound(total) - 1e-4);
    REQUIRE(mi <= half_log2_1p(total) + 1e-4);
  }
}

TEST_CASE("mixture information") {
  REQUIRE(mixture_awgn_mi({0.0}, {1.0}) == Approx(0.0).margin(1e-6));

  // Well-separated antipodal points approach one bit.
  REQUIRE(mixture_awgn_mi({-20.0, 20.0}, {0.5, 0.5}) > 0.999);
  REQUIRE(mixture_awgn_mi({-20.0, 20.0}, {0.5, 0.5}) <= 1.0 + 1e-6);

  REQUIRE_THROWS_AS(mixture_awgn_mi({0.0, 1.0}, {0.6, 0.6}),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(mixture_awgn_mi({}, {}), std::invalid_argument);
}

TEST_CASE("antipodal mixture matches the resubstitution oracle") {
  const auto density = [](double y) {
    return 0.5 * (normal_pdf(y - 1.0) + normal_pdf(y + 1.0));
  };
  const auto [mc_h, se] = mc_entropy(
      density,
      [&](Xoshiro256pp& u, GaussianSampler& n) {
        return (u.uniform01() < 0.5 ? -1.0 : 1.0) + n();
      },
      2'000'000, 777u);
  const double quad = mixture_awgn_mi({-1.0, 1.0}, {0.5, 0.5});
  const double mc_mi = mc_h - gaussian_entropy_bits();
  REQUIRE(std::fabs(quad - mc_mi) <= 3.0 * se + 1e-4);
}

TEST_CASE("computed information never exceeds the Gaussian maximum") {
  Xoshiro256pp gen(606);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> powers(1 + gen.next() % 3);
    double total = 0.0;
    for (double& p : powers) {
      p = 0.2 + 8.0 * gen.uniform01();
      total += p;
    }
    REQUIRE(sum_uniform_awgn_mi(powers) <= half_log2_1p(total) + 1e-4);
  }
}
