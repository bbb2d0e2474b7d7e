#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

// Set functions on subsets of {1..K}, stored per bitmask (bit i-1 = user i).
// These are the bound profiles that induce the polymatroid rate regions.

namespace ehmac {

struct SetFunction {
  int num_users = 0;
  std::vector<double> values;  // size 1 << num_users, values[0] == 0

  double operator()(std::uint32_t mask) const { return values[mask]; }
  std::uint32_t full_mask() const {
    return (num_users == 0) ? 0 : ((1u << num_users) - 1);
  }
  std::size_t subset_count() const { return values.size(); }
};

inline SetFunction make_set_function(int num_users,
                                     std::vector<double> values) {
  if (num_users < 1 || num_users > 16) {
    throw std::invalid_argument("set function supports 1..16 users");
  }
  if (values.size() != (std::size_t{1} << num_users)) {
    throw std::invalid_argument("set function needs one value per subset");
  }
  SetFunction f;
  f.num_users = num_users;
  f.values = std::move(values);
  return f;
}

inline bool is_normalized(const SetFunction& f, double tol = 1e-12) {
  return std::fabs(f.values[0]) <= tol;
}

// f(I) <= f(J) whenever I is a subset of J, via single-element increments.
inline bool is_monotone(const SetFunction& f, double tol = 1e-9) {
  const std::uint32_t full = f.full_mask();
  for (std::uint32_t mask = 0; mask <= full; ++mask) {
    for (int i = 0; i < f.num_users; ++i) {
      const std::uint32_t bit = 1u << i;
      if (mask & bit) continue;
      if (f.values[mask] > f.values[mask | bit] + tol) return false;
    }
  }
  return true;
}

// Exhaustive pairwise test: f(I|s) + f(I|u) >= f(I) + f(I|s|u) for every
// subset I and distinct s,u outside I.
inline bool is_submodular(const SetFunction& f, double tol = 1e-9) {
  const std::uint32_t full = f.full_mask();
  for (std::uint32_t mask = 0; mask <= full; ++mask) {
    for (int s = 0; s < f.num_users; ++s) {
      if (mask & (1u << s)) continue;
      for (int u = s + 1; u < f.num_users; ++u) {
        if (mask & (1u << u)) continue;
        const double lhs =
            f.values[mask | (1u << s)] + f.values[mask | (1u << u)];
        const double rhs =
            f.values[mask] + f.values[mask | (1u << s) | (1u << u)];
        if (lhs + tol < rhs) return false;
      }
    }
  }
  return true;
}

// Sup distance max_I |f(I) - g(I)|: a metric on set functions, used as the
// computable proxy for Hausdorff distance between the induced regions.
inline double setfn_distance(const SetFunction& f, const SetFunction& g) {
  if (f.num_users != g.num_users) {
    throw std::invalid_argument("set function dimension mismatch");
  }
  double dist = 0.0;
  for (std::size_t mask = 0; mask < f.values.size(); ++mask) {
    dist = std::max(dist, std::fabs(f.values[mask] - g.values[mask]));
  }
  return dist;
}

}  // namespace ehmac
