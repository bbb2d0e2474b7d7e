#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "ehmac/constants.hpp"
#include "ehmac/set_function.hpp"

// Rate regions as polymatroids: {R >= 0 : sum_{i in I} R_i <= f(I) for all I}.
// A region is well-formed when its set function is normalized, monotone and
// submodular; violations are flagged, never silently repaired.

namespace ehmac {

struct RegionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RateRegion {
  SetFunction f;
  bool normalized = false;
  bool monotone = false;
  bool submodular = false;
  bool clamped = false;  // some bound was clipped at 0 by a gamma shift

  bool well_formed() const { return normalized && monotone && submodular; }
};

inline RateRegion make_region(SetFunction f, double tol = 1e-9) {
  RateRegion region;
  region.normalized = is_normalized(f, 1e-12);
  region.monotone = is_monotone(f, tol);
  region.submodular = is_submodular(f, tol);
  region.f = std::move(f);
  return region;
}

// AWGN MAC outer bound: f(I) = 0.5 log2(1 + sum_{i in I} E[E_i]).
inline RateRegion awgn_outer(const std::vector<double>& mean_arrivals) {
  const int num_users = static_cast<int>(mean_arrivals.size());
  for (double mean : mean_arrivals) {
    if (!(mean > 0.0)) {
      throw std::invalid_argument("mean arrival rates must be positive");
    }
  }
  std::vector<double> values(std::size_t{1} << num_users, 0.0);
  for (std::uint32_t mask = 1; mask < (1u << num_users); ++mask) {
    double sum = 0.0;
    for (int i = 0; i < num_users; ++i) {
      if (mask & (1u << i)) sum += mean_arrivals[i];
    }
    values[mask] = half_log2_1p(sum);
  }
  return make_region(make_set_function(num_users, std::move(values)));
}

// f'(I) = max(f(I) - gamma, 0). Clamping can break submodularity; the result
// carries fresh validity flags plus a `clamped` marker.
inline RateRegion shifted_region(const RateRegion& base, double gamma) {
  if (gamma < 0.0) throw std::invalid_argument("shift must be >= 0");
  std::vector<double> values = base.f.values;
  bool clamped = false;
  for (std::size_t mask = 1; mask < values.size(); ++mask) {
    const double shifted = values[mask] - gamma;
    if (shifted < 0.0 && values[mask] > 0.0) clamped = true;
    values[mask] = std::max(shifted, 0.0);
  }
  RateRegion region =
      make_region(make_set_function(base.f.num_users, std::move(values)));
  region.clamped = clamped;
  return region;
}

// Inner bound with receiver side information: f(I) = max(T(g_I) - epi, 0)
// where epi = 0.5 log2(pi e / 2), kept exact.
inline RateRegion inner_txrx(const SetFunction& throughput) {
  RateRegion base = make_region(throughput);
  return shifted_region(base, epi_gap_bits());
}

// Inner bound without receiver side information: the entropy rate of the
// policy outputs is subtracted on top of the epi constant.
inline RateRegion inner_tx(const SetFunction& throughput,
                           double entropy_rate) {
  if (entropy_rate < 0.0) {
    throw std::invalid_argument("entropy rate must be >= 0");
  }
  RateRegion base = make_region(throughput);
  return shifted_region(base, entropy_rate + epi_gap_bits());
}

// Incremental-difference vertex for a permutation (0-based user order):
// R_{pi(j)} = f({pi(0..j)}) - f({pi(0..j-1)}).
inline std::vector<double> vertex(const RateRegion& region,
                                  const std::vector<int>& perm) {
  const int num_users = region.f.num_users;
  if (!region.well_formed()) {
    throw RegionError("vertex requires a well-formed polymatroid");
  }
  if (static_cast<int>(perm.size()) != num_users) {
    throw std::invalid_argument("permutation size mismatch");
  }
  std::vector<bool> seen(num_users, false);
  for (int i : perm) {
    if (i < 0 || i >= num_users || seen[i]) {
      throw std::invalid_argument("not a permutation");
    }
    seen[i] = true;
  }
  std::vector<double> point(num_users, 0.0);
  std::uint32_t mask = 0;
  double prev = 0.0;
  for (int i : perm) {
    mask |= (1u << i);
    const double cur = region.f(mask);
    point[i] = cur - prev;
    prev = cur;
  }
  return point;
}

// Sum capacity of the region: f(full set). Every permutation vertex must
// have this coordinate sum; a mismatch means the region is not a polymatroid.
// All K! permutations are checked up to K = 8, a deterministic sample of
// rotations beyond that.
inline double sum_rate(const RateRegion& region, double tol = 1e-9) {
  const int num_users = region.f.num_users;
  if (!region.well_formed()) {
    throw RegionError("sum_rate requires a well-formed polymatroid");
  }
  const double full_value = region.f(region.f.full_mask());
  auto check_perm = [&](const std::vector<int>& perm) {
    const std::vector<double> point = vertex(region, perm);
    const double sum = std::accumulate(point.begin(), point.end(), 0.0);
    if (std::fabs(sum - full_value) > tol) {
      throw RegionError("vertex coordinate sum " + std::to_string(sum) +
                        " differs from f(full) = " +
                        std::to_string(full_value));
    }
  };
  std::vector<int> perm(num_users);
  std::iota(perm.begin(), perm.end(), 0);
  if (num_users <= 8) {
    do {
      check_perm(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    for (int r = 0; r < num_users; ++r) {
      check_perm(perm);
      std::rotate(perm.begin(), perm.begin() + 1, perm.end());
    }
    std::reverse(perm.begin(), perm.end());
    check_perm(perm);
  }
  return full_value;
}

// Containment inner <= outer via set-function dominance. For polymatroids
// this is exact because max of sum_{i in I} R_i over the region equals f(I);
// for a clamped (possibly non-submodular) inner bound it is still sufficient.
inline bool region_contains(const RateRegion& inner, const RateRegion& outer,
                            double tol = 1e-9) {
  if (inner.f.num_users != outer.f.num_users) {
    throw std::invalid_argument("region dimension mismatch");
  }
  if (!inner.normalized || !inner.monotone || !outer.well_formed()) {
    throw RegionError("region_contains requires valid regions");
  }
  for (std::size_t mask = 0; mask < inner.f.values.size(); ++mask) {
    if (inner.f.values[mask] > outer.f.values[mask] + tol) return false;
  }
  return true;
}

// Sum-capacity sandwich versus the AWGN bound for symmetric users.
struct GapReport {
  std::uint64_t num_users = 0;
  double mean_arrival = 0.0;
  double upper = 0.0;     // 0.5 log2(1 + K E[E])
  double lower = 0.0;     // max(upper - gamma, 0)
  double absolute = 0.0;  // upper - lower
  double relative = 0.0;  // gamma / upper
};

inline std::vector<GapReport> gap_report(
    double gamma, double mean_arrival,
    const std::vector<std::uint64_t>& user_counts) {
  if (gamma < 0.0) throw std::invalid_argument("gamma must be >= 0");
  if (!(mean_arrival > 0.0)) {
    throw std::invalid_argument("mean arrival must be positive");
  }
  if (user_counts.empty()) throw std::invalid_argument("empty K list");
  std::vector<GapReport> reports;
  reports.reserve(user_counts.size());
  for (std::uint64_t k : user_counts) {
    GapReport r;
    r.num_users = k;
    r.mean_arrival = mean_arrival;
    r.upper = half_log2_1p(static_cast<double>(k) * mean_arrival);
    r.lower = std::max(r.upper - gamma, 0.0);
    r.absolute = r.upper - r.lower;
    r.relative = gamma / r.upper;
    reports.push_back(r);
  }
  return reports;
}

}  // namespace ehmac
