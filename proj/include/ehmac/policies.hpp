#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

// Online power-control policies: stationary mappings from the current
// battery level to spent energy. All built-in variants clamp their output to
// [0, level], so simulation can never overspend; admissibility of the raw
// rule (before clamping) is what check_admissibility verifies.

namespace ehmac {

struct PolicyError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class PolicyVariant {
  kFixedFraction,           // spend q * level, 0 < q <= 1
  kConstant,                // spend min(c, level)
  kGreedy,                  // spend the whole level
  kQuantizedFixedFraction,  // q * level floored onto an L-point grid
  kTable,                   // explicit spend per quantized level
};

struct PolicySpec {
  PolicyVariant variant = PolicyVariant::kGreedy;
  double fraction = 1.0;            // q for the fixed-fraction variants
  double constant = 0.0;            // c for the constant variant
  int grid_levels = 0;              // L for quantized variants and tables
  std::vector<double> table;        // spend per grid point, size L

  static PolicySpec fixed_fraction(double q) {
    if (!(q > 0.0) || q > 1.0) {
      throw PolicyError("fixed-fraction ratio must be in (0,1]");
    }
    PolicySpec p;
    p.variant = PolicyVariant::kFixedFraction;
    p.fraction = q;
    return p;
  }

  static PolicySpec constant_power(double c) {
    if (c < 0.0) throw PolicyError("constant spend must be >= 0");
    PolicySpec p;
    p.variant = PolicyVariant::kConstant;
    p.constant = c;
    return p;
  }

  static PolicySpec greedy() {
    PolicySpec p;
    p.variant = PolicyVariant::kGreedy;
    return p;
  }

  static PolicySpec quantized_fixed_fraction(double q, int levels) {
    if (!(q > 0.0) || q > 1.0) {
      throw PolicyError("fixed-fraction ratio must be in (0,1]");
    }
    if (levels < 2) throw PolicyError("quantization needs >= 2 grid points");
    PolicySpec p;
    p.variant = PolicyVariant::kQuantizedFixedFraction;
    p.fraction = q;
    p.grid_levels = levels;
    return p;
  }

  // Spend table over an evenly spaced grid of [0, cap]; the level is floored
  // onto the grid before lookup.
  static PolicySpec from_table(std::vector<double> spends) {
    if (spends.size() < 2) throw PolicyError("table needs >= 2 grid points");
    PolicySpec p;
    p.variant = PolicyVariant::kTable;
    p.grid_levels = static_cast<int>(spends.size());
    p.table = std::move(spends);
    return p;
  }
};

// q = E[E] / cap, the fixed-fraction ratio. E[E] <= cap forces q <= 1.
inline double fixed_fraction_rate(double mean_arrival, double cap) {
  if (!(mean_arrival > 0.0)) {
    throw PolicyError("mean arrival must be positive");
  }
  if (mean_arrival > cap) {
    throw PolicyError("mean arrival exceeds battery capacity");
  }
  return mean_arrival / cap;
}

namespace detail {

// Grid index of `level` floored onto an L-point grid of [0, cap].
inline int grid_floor(double level, double cap, int levels) {
  const double step = cap / (levels - 1);
  int idx = static_cast<int>(std::floor(level / step + 1e-12));
  return std::clamp(idx, 0, levels - 1);
}

// Rule value before the admissibility clamp.
inline double raw_spend(const PolicySpec& policy, double level, double cap) {
  switch (policy.variant) {
    case PolicyVariant::kFixedFraction:
      return policy.fraction * level;
    case PolicyVariant::kConstant:
      return std::min(policy.constant, level);
    case PolicyVariant::kGreedy:
      return level;
    case PolicyVariant::kQuantizedFixedFraction: {
      const double step = cap / (policy.grid_levels - 1);
      const double g = policy.fraction * level;
      return std::floor(g / step + 1e-12) * step;
    }
    case PolicyVariant::kTable:
      return policy.table[grid_floor(level, cap, policy.grid_levels)];
  }
  return 0.0;
}

}  // namespace detail

// Spend for the current battery level, clamped to [0, level].
inline double allocate(const PolicySpec& policy, double level, double cap) {
  if (level < 0.0 || level > cap + 1e-12) {
    throw PolicyError("battery level " + std::to_string(level) +
                      " outside [0, cap]");
  }
  const double g = detail::raw_spend(policy, level, cap);
  return std::clamp(g, 0.0, level);
}

}  // namespace ehmac
