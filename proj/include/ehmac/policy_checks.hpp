#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "ehmac/enumerate.hpp"

// Admissibility verification and exact output-entropy computation for
// policies. Both enumerate arrival sequences exhaustively; entropy is never
// estimated from samples, so the inner-bound regions built from it are exact
// up to float rounding.

namespace ehmac {

// Spends equal in exact arithmetic can differ in the last mantissa bits after
// a fixed-fraction recursion, so aggregation keys round to 12 decimals.
inline std::int64_t spend_key(double spend) {
  return std::llround(spend * 1e12);
}

// True iff the raw policy rule (before the safety clamp) satisfies the
// battery constraints for every arrival sequence of this user's alphabet.
inline bool check_admissibility(const PolicySpec& policy,
                                const ArrivalModel& model, int user, int n,
                                std::uint64_t budget = 0) {
  if (budget == 0) budget = enumeration_budget_from_env();
  const std::vector<double>& alphabet = model.alphabets[user];
  const double cap = model.caps[user];
  check_enumeration_budget(alphabet.size(), n, budget);
  bool admissible = true;
  auto recurse = [&](auto&& self, int t, double residual) -> void {
    if (!admissible || t == n) return;
    for (double arrival : alphabet) {
      const double level = std::min(residual + arrival, cap);
      const double g = detail::raw_spend(policy, level, cap);
      if (g < -kAdmissibilityTol || g > level + kAdmissibilityTol) {
        admissible = false;
        return;
      }
      self(self, t + 1, level - g);
    }
  };
  recurse(recurse, 0, 0.0);
  return admissible;
}

inline bool check_admissibility(const std::vector<PolicySpec>& policies,
                                const ArrivalModel& model, int n,
                                std::uint64_t budget = 0) {
  for (int i = 0; i < model.num_users; ++i) {
    if (!check_admissibility(policies[i], model, i, n, budget)) return false;
  }
  return true;
}

// Exact Shannon entropy (bits per slot) of the joint tuple of all K spend
// sequences: H(g_1^n(E_1^n), ..., g_K^n(E_K^n)) / n. Enumerates arrival
// sequences, maps each through the policies and aggregates the probability
// of identical spend tuples.
inline double exact_output_entropy(const std::vector<PolicySpec>& policies,
                                   const ArrivalModel& model, int n,
                                   std::uint64_t budget = 0) {
  if (budget == 0) budget = enumeration_budget_from_env();
  check_enumeration_budget(model.support.size(), n, budget);
  const int num_users = model.num_users;
  std::vector<std::int64_t> keys(n * num_users, 0);
  std::map<std::vector<std::int64_t>, double> mass;
  walk_policy_paths(
      model, policies, n,
      [&](int t, const double* spends) {
        for (int i = 0; i < num_users; ++i) {
          keys[t * num_users + i] = spend_key(spends[i]);
        }
      },
      [&](double prob) {
        if (prob > 0.0) mass[keys] += prob;
      });
  double entropy = 0.0;
  for (const auto& [key, p] : mass) {
    if (p > 0.0) entropy -= p * std::log2(p);
  }
  return entropy / n;
}

}  // namespace ehmac
