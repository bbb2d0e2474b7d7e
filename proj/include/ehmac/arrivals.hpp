#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ehmac/rng.hpp"

// Joint energy-arrival processes over finite alphabets, i.i.d. across time
// with arbitrary correlation across users. Models are immutable after
// construction and safe to share between threads; samplers take explicit
// generator state.

namespace ehmac {

inline constexpr double kPmfTol = 1e-12;
inline constexpr double kSupportMergeTol = 1e-12;

// Largest dense joint pmf this library will materialize.
inline constexpr std::size_t kMaxJointPmfSize = std::size_t{1} << 24;

struct ModelError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// One positive-probability point of the joint per-slot distribution.
struct SupportAtom {
  std::vector<double> values;  // energy per user
  double prob = 0.0;
};

struct ArrivalModel {
  int num_users = 0;
  std::vector<std::vector<double>> alphabets;  // per user, sorted ascending
  std::vector<double> joint_pmf;               // flat, user 0 most significant
  std::vector<double> caps;                    // battery capacities
  std::vector<SupportAtom> support;            // nonzero entries, index order

  std::size_t alphabet_size(int user) const { return alphabets[user].size(); }

  std::size_t flat_index(const std::vector<int>& symbols) const {
    std::size_t idx = 0;
    for (int i = 0; i < num_users; ++i) {
      idx = idx * alphabets[i].size() + static_cast<std::size_t>(symbols[i]);
    }
    return idx;
  }
};

using Pmf = std::vector<std::pair<double, double>>;  // (value, probability)

namespace detail {

// Truncates support at `cap`, merges points closer than the tolerance, and
// validates the result as a probability mass function.
inline Pmf clean_marginal(const Pmf& marginal, double cap) {
  if (marginal.empty()) throw ModelError("arrival marginal has empty support");
  if (cap <= 0.0) throw ModelError("battery capacity must be positive");
  Pmf pts;
  pts.reserve(marginal.size());
  double total = 0.0;
  for (const auto& [value, prob] : marginal) {
    if (value < 0.0) {
      throw ModelError("negative arrival value " + std::to_string(value));
    }
    if (prob < 0.0) {
      throw ModelError("negative pmf entry " + std::to_string(prob));
    }
    total += prob;
    pts.emplace_back(std::min(value, cap), prob);
  }
  if (std::fabs(total - 1.0) > kPmfTol) {
    throw ModelError("pmf does not sum to 1 (sum = " + std::to_string(total) +
                     ")");
  }
  std::sort(pts.begin(), pts.end());
  Pmf merged;
  for (const auto& [value, prob] : pts) {
    if (!merged.empty() && value - merged.back().first <= kSupportMergeTol) {
      merged.back().second += prob;
    } else {
      merged.emplace_back(value, prob);
    }
  }
  double mean = 0.0;
  for (const auto& [value, prob] : merged) mean += value * prob;
  if (mean <= 0.0) throw ModelError("arrival marginal has zero mean");
  return merged;
}

inline std::size_t checked_product_size(std::size_t total,
                                        std::size_t factor) {
  if (factor == 0 || total > kMaxJointPmfSize / factor) {
    throw ModelError("product alphabet too large to materialize");
  }
  return total * factor;
}

inline void build_support(ArrivalModel& model) {
  model.support.clear();
  const std::size_t total = model.joint_pmf.size();
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (model.joint_pmf[idx] > 0.0) {
      SupportAtom atom;
      atom.values.resize(model.num_users);
      std::size_t rem = idx;
      for (int i = model.num_users - 1; i >= 0; --i) {
        const std::size_t m = model.alphabets[i].size();
        atom.values[i] = model.alphabets[i][rem % m];
        rem /= m;
      }
      atom.prob = model.joint_pmf[idx];
      model.support.push_back(std::move(atom));
    }
  }
  double total_mass = 0.0;
  for (const auto& atom : model.support) total_mass += atom.prob;
  if (std::fabs(total_mass - 1.0) > kPmfTol) {
    throw ModelError("joint pmf does not sum to 1");
  }
}

}  // namespace detail

// Independent users: the joint pmf is the product of per-user marginals.
// Support values above the corresponding cap are truncated with their mass
// merged into the cap point.
inline ArrivalModel build_iid_product(const std::vector<Pmf>& marginals,
                                      const std::vector<double>& caps) {
  if (marginals.empty()) throw ModelError("no users");
  if (marginals.size() != caps.size()) {
    throw ModelError("marginal/cap count mismatch");
  }
  ArrivalModel model;
  model.num_users = static_cast<int>(marginals.size());
  model.caps = caps;
  std::vector<Pmf> clean;
  clean.reserve(marginals.size());
  std::size_t total = 1;
  for (std::size_t i = 0; i < marginals.size(); ++i) {
    clean.push_back(detail::clean_marginal(marginals[i], caps[i]));
    model.alphabets.emplace_back();
    for (const auto& [value, prob] : clean.back()) {
      model.alphabets.back().push_back(value);
    }
    total = detail::checked_product_size(total, clean.back().size());
  }
  model.joint_pmf.assign(total, 0.0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    double p = 1.0;
    std::size_t rem = idx;
    for (int i = model.num_users - 1; i >= 0; --i) {
      const std::size_t m = clean[i].size();
      p *= clean[i][rem % m].second;
      rem /= m;
    }
    model.joint_pmf[idx] = p;
  }
  detail::build_support(model);
  return model;
}

// Fully correlated arrivals: E_1 = ... = E_K = E, all batteries of size
// `cap`. The joint pmf sits on diagonal tuples only.
inline ArrivalModel build_fully_correlated(const Pmf& marginal, int num_users,
                                           double cap) {
  if (num_users < 1) throw ModelError("user count must be >= 1");
  ArrivalModel model;
  model.num_users = num_users;
  model.caps.assign(num_users, cap);
  const Pmf clean = detail::clean_marginal(marginal, cap);
  const std::size_t m = clean.size();
  for (int i = 0; i < num_users; ++i) {
    model.alphabets.emplace_back();
    for (const auto& [value, prob] : clean) {
      model.alphabets.back().push_back(value);
    }
  }
  std::size_t total = 1;
  for (int i = 0; i < num_users; ++i) {
    total = detail::checked_product_size(total, m);
  }
  model.joint_pmf.assign(total, 0.0);
  for (std::size_t s = 0; s < m; ++s) {
    std::size_t idx = 0;
    for (int i = 0; i < num_users; ++i) idx = idx * m + s;
    model.joint_pmf[idx] = clean[s].second;
  }
  detail::build_support(model);
  return model;
}

// Explicit joint distribution over the product of per-user alphabets,
// flattened with user 0 most significant. Values are truncated at caps and
// duplicate tuples merged.
inline ArrivalModel build_joint(
    const std::vector<std::vector<double>>& alphabets,
    const std::vector<double>& joint_pmf, const std::vector<double>& caps) {
  if (alphabets.empty()) throw ModelError("no users");
  if (alphabets.size() != caps.size()) {
    throw ModelError("alphabet/cap count mismatch");
  }
  const int num_users = static_cast<int>(alphabets.size());
  // Per-user truncation and merge; old symbol -> new symbol index.
  std::vector<std::vector<double>> new_alphabets(num_users);
  std::vector<std::vector<std::size_t>> remap(num_users);
  std::size_t old_total = 1;
  std::size_t new_total = 1;
  for (int i = 0; i < num_users; ++i) {
    if (alphabets[i].empty()) throw ModelError("empty alphabet");
    std::vector<double> truncated;
    for (double value : alphabets[i]) {
      if (value < 0.0) throw ModelError("negative arrival value");
      truncated.push_back(std::min(value, caps[i]));
    }
    std::vector<double> sorted = truncated;
    std::sort(sorted.begin(), sorted.end());
    for (double value : sorted) {
      if (new_alphabets[i].empty() ||
          value - new_alphabets[i].back() > kSupportMergeTol) {
        new_alphabets[i].push_back(value);
      }
    }
    remap[i].resize(truncated.size());
    for (std::size_t s = 0; s < truncated.size(); ++s) {
      const auto& na = new_alphabets[i];
      std::size_t best = 0;
      for (std::size_t t = 0; t < na.size(); ++t) {
        if (std::fabs(na[t] - truncated[s]) <=
            std::fabs(na[best] - truncated[s])) {
          best = t;
        }
      }
      remap[i][s] = best;
    }
    old_total = detail::checked_product_size(old_total, alphabets[i].size());
    new_total = detail::checked_product_size(new_total, new_alphabets[i].size());
  }
  if (joint_pmf.size() != old_total) {
    throw ModelError("joint pmf size does not match the product alphabet");
  }
  ArrivalModel model;
  model.num_users = num_users;
  model.caps = caps;
  model.alphabets = std::move(new_alphabets);
  model.joint_pmf.assign(new_total, 0.0);
  for (std::size_t idx = 0; idx < old_total; ++idx) {
    const double p = joint_pmf[idx];
    if (p < 0.0) throw ModelError("negative pmf entry");
    if (p == 0.0) continue;
    std::size_t rem = idx;
    std::vector<int> symbols(num_users);
    for (int i = num_users - 1; i >= 0; --i) {
      const std::size_t m = alphabets[i].size();
      symbols[i] = static_cast<int>(remap[i][rem % m]);
      rem /= m;
    }
    model.joint_pmf[model.flat_index(symbols)] += p;
  }
  detail::build_support(model);
  for (int i = 0; i < num_users; ++i) {
    double mean = 0.0;
    for (const auto& atom : model.support) mean += atom.values[i] * atom.prob;
    if (mean <= 0.0) throw ModelError("arrival marginal has zero mean");
  }
  return model;
}

// Exact marginal expectation E[E_i].
inline double mean_arrival(const ArrivalModel& model, int user) {
  if (user < 0 || user >= model.num_users) {
    throw std::out_of_range("user index out of range");
  }
  double mean = 0.0;
  for (const auto& atom : model.support) {
    mean += atom.values[user] * atom.prob;
  }
  return mean;
}

// Marginal arrival process of a single user as a K=1 model.
inline ArrivalModel marginal_model(const ArrivalModel& model, int user) {
  if (user < 0 || user >= model.num_users) {
    throw std::out_of_range("user index out of range");
  }
  Pmf marginal;
  for (std::size_t s = 0; s < model.alphabets[user].size(); ++s) {
    double p = 0.0;
    for (const auto& atom : model.support) {
      if (std::fabs(atom.values[user] - model.alphabets[user][s]) <=
          kSupportMergeTol) {
        p += atom.prob;
      }
    }
    marginal.emplace_back(model.alphabets[user][s], p);
  }
  return build_iid_product({marginal}, {model.caps[user]});
}

// Draws n i.i.d. columns from the joint pmf. Row i is user i.
inline std::vector<std::vector<double>> sample_path(const ArrivalModel& model,
                                                    int n, Xoshiro256pp& gen) {
  if (n < 1) throw ModelError("horizon must be >= 1");
  std::vector<double> cdf(model.support.size());
  double acc = 0.0;
  for (std::size_t s = 0; s < model.support.size(); ++s) {
    acc += model.support[s].prob;
    cdf[s] = acc;
  }
  std::vector<std::vector<double>> path(model.num_users,
                                        std::vector<double>(n, 0.0));
  for (int t = 0; t < n; ++t) {
    const double u = gen.uniform01();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const std::size_t s =
        std::min(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
    for (int i = 0; i < model.num_users; ++i) {
      path[i][t] = model.support[s].values[i];
    }
  }
  return path;
}

inline std::vector<std::vector<double>> sample_path(const ArrivalModel& model,
                                                    int n,
                                                    std::uint64_t seed) {
  Xoshiro256pp gen(seed);
  return sample_path(model, n, gen);
}

}  // namespace ehmac
