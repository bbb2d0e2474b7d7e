#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ehmac/arrivals.hpp"
#include "ehmac/policies.hpp"
#include "ehmac/rng.hpp"

// Battery dynamics. The level at slot t already includes the slot-t arrival:
//   level_t = min(level_{t-1} - spend_{t-1} + arrival_t, cap),   level_0 = 0,
// and the slot-t spend must satisfy spend_t <= level_t. Float comparisons
// carry a 1e-12 slack because fixed-fraction recursions accumulate rounding.

namespace ehmac {

inline constexpr double kAdmissibilityTol = 1e-12;

struct AdmissibilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One-slot recursion: residual energy after the previous spend, plus the new
// arrival, clipped at the cap.
inline double advance_level(double prev_level, double prev_spend,
                            double arrival, double cap) {
  return std::min(prev_level - prev_spend + arrival, cap);
}

struct BatteryState {
  std::vector<double> levels;
  std::vector<double> caps;
};

inline BatteryState step(const BatteryState& state,
                         const std::vector<double>& spends,
                         const std::vector<double>& arrivals) {
  const int num_users = static_cast<int>(state.levels.size());
  if (static_cast<int>(spends.size()) != num_users ||
      static_cast<int>(arrivals.size()) != num_users) {
    throw std::invalid_argument("step: dimension mismatch");
  }
  BatteryState next = state;
  for (int i = 0; i < num_users; ++i) {
    if (spends[i] < -kAdmissibilityTol ||
        spends[i] > state.levels[i] + kAdmissibilityTol) {
      throw AdmissibilityError(
          "user " + std::to_string(i + 1) + " overspends: spend " +
          std::to_string(spends[i]) + " exceeds level " +
          std::to_string(state.levels[i]));
    }
    next.levels[i] =
        advance_level(state.levels[i], spends[i], arrivals[i], state.caps[i]);
    if (next.levels[i] < 0.0) next.levels[i] = 0.0;
  }
  return next;
}

// A simulated path. levels[i][t] is the post-arrival, pre-spend battery of
// user i at slot t (0-based internally; slot t+1 in exported CSV).
struct Trajectory {
  std::vector<std::vector<double>> arrivals;
  std::vector<std::vector<double>> levels;
  std::vector<std::vector<double>> spends;

  int num_users() const { return static_cast<int>(arrivals.size()); }
  int horizon() const {
    return arrivals.empty() ? 0 : static_cast<int>(arrivals[0].size());
  }
};

inline Trajectory simulate_trajectory(const ArrivalModel& model,
                                      const std::vector<PolicySpec>& policies,
                                      int n, std::uint64_t seed) {
  if (static_cast<int>(policies.size()) != model.num_users) {
    throw std::invalid_argument("one policy per user required");
  }
  Trajectory traj;
  traj.arrivals = sample_path(model, n, seed);
  traj.levels.assign(model.num_users, std::vector<double>(n, 0.0));
  traj.spends.assign(model.num_users, std::vector<double>(n, 0.0));
  for (int i = 0; i < model.num_users; ++i) {
    double residual = 0.0;  // empty battery before transmission
    for (int t = 0; t < n; ++t) {
      const double level =
          std::min(residual + traj.arrivals[i][t], model.caps[i]);
      const double g = allocate(policies[i], level, model.caps[i]);
      traj.levels[i][t] = level;
      traj.spends[i][t] = g;
      residual = level - g;
    }
  }
  return traj;
}

// CSV columns: t,user,arrival,level,spend with t and user 1-based.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,user,arrival,level,spend\n";
  const int n = traj.horizon();
  for (int t = 0; t < n; ++t) {
    for (int i = 0; i < traj.num_users(); ++i) {
      out << (t + 1) << ',' << (i + 1) << ',' << traj.arrivals[i][t] << ','
          << traj.levels[i][t] << ',' << traj.spends[i][t] << '\n';
    }
  }
}

}  // namespace ehmac
