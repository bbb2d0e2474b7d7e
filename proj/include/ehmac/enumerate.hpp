#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "ehmac/battery.hpp"

// Exhaustive walk over all positive-probability joint arrival sequences of a
// fixed horizon, carrying battery state and per-slot policy spends down the
// tree. Zero-mass branches are never visited, and the leaf count is checked
// against a hard budget before any work starts.

namespace ehmac {

struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultEnumerationBudget = 10'000'000;

// EHMAC_ENUM_BUDGET overrides the default leaf budget.
inline std::uint64_t enumeration_budget_from_env() {
  if (const char* env = std::getenv("EHMAC_ENUM_BUDGET")) {
    const unsigned long long v = std::strtoull(env, nullptr, 10);
    if (v > 0) return static_cast<std::uint64_t>(v);
  }
  return kDefaultEnumerationBudget;
}

inline void check_enumeration_budget(std::size_t branching, int n,
                                     std::uint64_t budget) {
  double leaves = 1.0;
  for (int t = 0; t < n; ++t) {
    leaves *= static_cast<double>(branching);
    if (leaves > static_cast<double>(budget)) {
      throw BudgetError("enumeration budget exceeded: " +
                        std::to_string(branching) + "^" + std::to_string(n) +
                        " sequences > " + std::to_string(budget));
    }
  }
}

// on_slot(t, spends): called on every descent into slot t (0-based) with the
// K per-user spends of that slot; visitors keyed by depth may simply
// overwrite state at depth t. on_leaf(prob): called at depth n with the
// probability of the sequence just walked.
template <class OnSlot, class OnLeaf>
void walk_policy_paths(const ArrivalModel& model,
                       const std::vector<PolicySpec>& policies, int n,
                       OnSlot&& on_slot, OnLeaf&& on_leaf) {
  const int num_users = model.num_users;
  if (static_cast<int>(policies.size()) != num_users) {
    throw std::invalid_argument("one policy per user required");
  }
  std::vector<double> residual((n + 1) * num_users, 0.0);
  std::vector<double> slot_spends(num_users, 0.0);
  auto recurse = [&](auto&& self, int t, double prob) -> void {
    if (t == n) {
      on_leaf(prob);
      return;
    }
    const double* prev = &residual[t * num_users];
    double* next = &residual[(t + 1) * num_users];
    for (const auto& atom : model.support) {
      for (int i = 0; i < num_users; ++i) {
        const double level =
            std::min(prev[i] + atom.values[i], model.caps[i]);
        const double g = allocate(policies[i], level, model.caps[i]);
        slot_spends[i] = g;
        next[i] = level - g;
      }
      on_slot(t, slot_spends.data());
      self(self, t + 1, prob * atom.prob);
    }
  };
  recurse(recurse, 0, 1.0);
}

}  // namespace ehmac
