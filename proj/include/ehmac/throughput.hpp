#pragma once

#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ehmac/constants.hpp"
#include "ehmac/enumerate.hpp"
#include "ehmac/set_function.hpp"

// n-horizon expected throughput (1/n) E[ sum_t 0.5 log2(1 + sum_{i in I} g_it) ],
// exactly by sequence enumeration and approximately by Monte Carlo. Horizons
// always start from empty batteries. Both estimators accumulate in a fixed
// partition order, so results are bit-reproducible for a given seed and do
// not depend on the worker count.

namespace ehmac {

enum class EstimationMethod { kExact, kMonteCarlo };

inline const char* to_string(EstimationMethod m) {
  return m == EstimationMethod::kExact ? "exact" : "mc";
}

struct ThroughputEstimate {
  double value = 0.0;       // bits/channel use
  double half_width = 0.0;  // 95% confidence half-width, 0 for exact
  int n = 0;
  std::uint64_t samples = 1;
  EstimationMethod method = EstimationMethod::kExact;
};

namespace detail {

// Per-slot rates for every tracked mask: rates[j] = 0.5*log2(1 + scale * sum_I g).
// A dense mask list reuses a subset-sum sweep; a sparse one iterates bits.
inline void mask_rates(const double* spends, int num_users,
                       const std::vector<std::uint32_t>& masks, double scale,
                       std::vector<double>& subset_sums,
                       std::vector<double>& rates) {
  const std::uint32_t full = (1u << num_users) - 1;
  if (masks.size() * static_cast<std::size_t>(num_users) >= full) {
    subset_sums[0] = 0.0;
    for (std::uint32_t m = 1; m <= full; ++m) {
      const int low = std::countr_zero(m);
      subset_sums[m] = subset_sums[m & (m - 1)] + spends[low];
    }
    for (std::size_t j = 0; j < masks.size(); ++j) {
      rates[j] = half_log2_1p(scale * subset_sums[masks[j]]);
    }
    return;
  }
  for (std::size_t j = 0; j < masks.size(); ++j) {
    double sum = 0.0;
    for (std::uint32_t m = masks[j]; m != 0; m &= (m - 1)) {
      sum += spends[std::countr_zero(m)];
    }
    rates[j] = half_log2_1p(scale * sum);
  }
}

// Exact expectation of the per-mask horizon averages, one pass for all masks.
inline std::vector<double> exact_mask_values(
    const std::vector<PolicySpec>& policies, const ArrivalModel& model,
    const std::vector<std::uint32_t>& masks, int n, std::uint64_t budget,
    double scale) {
  if (budget == 0) budget = enumeration_budget_from_env();
  check_enumeration_budget(model.support.size(), n, budget);
  const std::size_t num_masks = masks.size();
  std::vector<double> subset_sums(std::size_t{1} << model.num_users, 0.0);
  std::vector<double> rates(num_masks, 0.0);
  std::vector<double> partial((n + 1) * num_masks, 0.0);
  std::vector<long double> totals(num_masks, 0.0L);
  walk_policy_paths(
      model, policies, n,
      [&](int t, const double* spends) {
        mask_rates(spends, model.num_users, masks, scale, subset_sums, rates);
        const double* prev = &partial[t * num_masks];
        double* next = &partial[(t + 1) * num_masks];
        for (std::size_t j = 0; j < num_masks; ++j) {
          next[j] = prev[j] + rates[j];
        }
      },
      [&](double prob) {
        const double* leaf = &partial[n * num_masks];
        for (std::size_t j = 0; j < num_masks; ++j) {
          totals[j] += static_cast<long double>(prob) * leaf[j];
        }
      });
  std::vector<double> out(num_masks, 0.0);
  for (std::size_t j = 0; j < num_masks; ++j) {
    out[j] = static_cast<double>(totals[j] / n);
  }
  return out;
}

inline constexpr int kMcBlockSize = 1024;

// Monte Carlo over independently seeded paths, partitioned into fixed-size
// blocks. Per-path sub-seeds depend only on (seed, path index); block
// partials are merged in index order.
inline std::vector<ThroughputEstimate> mc_mask_values(
    const std::vector<PolicySpec>& policies, const ArrivalModel& model,
    const std::vector<std::uint32_t>& masks, int n, int paths,
    std::uint64_t seed, int workers) {
  if (paths < 2) throw std::invalid_argument("Monte Carlo needs >= 2 paths");
  if (static_cast<int>(policies.size()) != model.num_users) {
    throw std::invalid_argument("one policy per user required");
  }
  const std::size_t num_masks = masks.size();
  const int num_blocks = (paths + kMcBlockSize - 1) / kMcBlockSize;
  struct Block {
    std::vector<long double> sum, sum_sq;
  };
  std::vector<Block> blocks(num_blocks);

  std::vector<double> cdf(model.support.size());
  double acc = 0.0;
  for (std::size_t s = 0; s < model.support.size(); ++s) {
    acc += model.support[s].prob;
    cdf[s] = acc;
  }

  auto run_block = [&](int b) {
    Block& block = blocks[b];
    block.sum.assign(num_masks, 0.0L);
    block.sum_sq.assign(num_masks, 0.0L);
    std::vector<double> subset_sums(std::size_t{1} << model.num_users, 0.0);
    std::vector<double> rates(num_masks, 0.0);
    std::vector<double> path_sum(num_masks, 0.0);
    std::vector<double> residual(model.num_users, 0.0);
    std::vector<double> spends(model.num_users, 0.0);
    const int begin = b * kMcBlockSize;
    const int end = std::min(paths, begin + kMcBlockSize);
    for (int p = begin; p < end; ++p) {
      Xoshiro256pp gen(derive_subseed(seed, static_cast<std::uint64_t>(p)));
      std::fill(residual.begin(), residual.end(), 0.0);
      std::fill(path_sum.begin(), path_sum.end(), 0.0);
      for (int t = 0; t < n; ++t) {
        const double u = gen.uniform01();
        std::size_t s = 0;
        while (s + 1 < cdf.size() && cdf[s] <= u) ++s;
        const auto& atom = model.support[s];
        for (int i = 0; i < model.num_users; ++i) {
          const double level =
              std::min(residual[i] + atom.values[i], model.caps[i]);
          spends[i] = allocate(policies[i], level, model.caps[i]);
          residual[i] = level - spends[i];
        }
        mask_rates(spends.data(), model.num_users, masks, 1.0, subset_sums,
                   rates);
        for (std::size_t j = 0; j < num_masks; ++j) path_sum[j] += rates[j];
      }
      for (std::size_t j = 0; j < num_masks; ++j) {
        const double v = path_sum[j] / n;
        block.sum[j] += v;
        block.sum_sq[j] += static_cast<long double>(v) * v;
      }
    }
  };

  if (workers <= 1 || num_blocks == 1) {
    for (int b = 0; b < num_blocks; ++b) run_block(b);
  } else {
    std::atomic<int> next_block{0};
    std::vector<std::thread> pool;
    const int thread_count = std::min(workers, num_blocks);
    pool.reserve(thread_count);
    for (int w = 0; w < thread_count; ++w) {
      pool.emplace_back([&]() {
        for (int b = next_block.fetch_add(1); b < num_blocks;
             b = next_block.fetch_add(1)) {
          run_block(b);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  std::vector<ThroughputEstimate> out(num_masks);
  for (std::size_t j = 0; j < num_masks; ++j) {
    long double sum = 0.0L, sum_sq = 0.0L;
    for (const Block& block : blocks) {
      sum += block.sum[j];
      sum_sq += block.sum_sq[j];
    }
    const double mean = static_cast<double>(sum / paths);
    const double var = std::max(
        0.0, static_cast<double>((sum_sq - sum * sum / paths) / (paths - 1)));
    out[j].value = mean;
    out[j].half_width = 1.96 * std::sqrt(var / paths);
    out[j].n = n;
    out[j].samples = static_cast<std::uint64_t>(paths);
    out[j].method = EstimationMethod::kMonteCarlo;
  }
  return out;
}

inline std::vector<std::uint32_t> nonempty_masks(int num_users) {
  std::vector<std::uint32_t> masks;
  masks.reserve((std::size_t{1} << num_users) - 1);
  for (std::uint32_t m = 1; m < (1u << num_users); ++m) masks.push_back(m);
  return masks;
}

}  // namespace detail

// Exact n-horizon throughput of subset `mask`, by exhaustive enumeration.
inline ThroughputEstimate exact_throughput(
    const std::vector<PolicySpec>& policies, const ArrivalModel& model,
    std::uint32_t mask, int n, std::uint64_t budget = 0) {
  ThroughputEstimate est;
  est.n = n;
  est.method = EstimationMethod::kExact;
  if (mask == 0) return est;
  if (mask >= (1u << model.num_users)) {
    throw std::invalid_argument("subset mask out of range");
  }
  est.value =
      detail::exact_mask_values(policies, model, {mask}, n, budget, 1.0)[0];
  return est;
}

// Exact value of (1/n) E[ sum_t 0.5 log2(1 + scale * sum_I g_it) ]. Used by
// the concavity-splitting check with scale = 1/lambda_i.
inline double exact_throughput_scaled(const std::vector<PolicySpec>& policies,
                                      const ArrivalModel& model,
                                      std::uint32_t mask, int n, double scale,
                                      std::uint64_t budget = 0) {
  if (mask == 0) return 0.0;
  return detail::exact_mask_values(policies, model, {mask}, n, budget,
                                   scale)[0];
}

// Monte Carlo estimate over `paths` independently seeded trajectories.
inline ThroughputEstimate mc_throughput(const std::vector<PolicySpec>& policies,
                                        const ArrivalModel& model,
                                        std::uint32_t mask, int n, int paths,
                                        std::uint64_t seed, int workers = 1) {
  if (mask == 0) {
    ThroughputEstimate est;
    est.n = n;
    est.samples = static_cast<std::uint64_t>(paths);
    est.method = EstimationMethod::kMonteCarlo;
    return est;
  }
  if (mask >= (1u << model.num_users)) {
    throw std::invalid_argument("subset mask out of range");
  }
  return detail::mc_mask_values(policies, model, {mask}, n, paths, seed,
                                workers)[0];
}

struct EstimatorOptions {
  EstimationMethod method = EstimationMethod::kExact;
  std::uint64_t budget = 0;  // exact: leaf budget (0 = env/default)
  int paths = 10000;         // monte carlo
  std::uint64_t seed = 0;
  int workers = 1;
};

// Throughput value for every subset of users; f(empty) = 0. Monte Carlo uses
// a single set of trajectories for all subsets, so the sweep is consistent
// path by path.
inline SetFunction throughput_set_function(
    const std::vector<PolicySpec>& policies, const ArrivalModel& model, int n,
    const EstimatorOptions& options = {}) {
  const int num_users = model.num_users;
  if (num_users > 16) {
    throw std::invalid_argument("subset sweep limited to 16 users");
  }
  const auto masks = detail::nonempty_masks(num_users);
  std::vector<double> values(std::size_t{1} << num_users, 0.0);
  if (options.method == EstimationMethod::kExact) {
    const auto exact = detail::exact_mask_values(policies, model, masks, n,
                                                 options.budget, 1.0);
    for (std::size_t j = 0; j < masks.size(); ++j) values[masks[j]] = exact[j];
  } else {
    const auto mc =
        detail::mc_mask_values(policies, model, masks, n, options.paths,
                               options.seed, options.workers);
    for (std::size_t j = 0; j < masks.size(); ++j) {
      values[masks[j]] = mc[j].value;
    }
  }
  return make_set_function(num_users, std::move(values));
}

// Concavity splitting: with lambda_i = E[E_i] / sum_{j in I} E[E_j],
//   T_n(g_I) >= sum_{i in I} lambda_i * (1/n) E[ sum_t 0.5 log2(1 + g_it/lambda_i) ].
inline bool concavity_split_check(const std::vector<PolicySpec>& policies,
                                  const ArrivalModel& model,
                                  std::uint32_t mask, int n,
                                  std::uint64_t budget = 0,
                                  double tol = 1e-9) {
  if (mask == 0) return true;
  const double lhs = exact_throughput(policies, model, mask, n, budget).value;
  double total_mean = 0.0;
  for (int i = 0; i < model.num_users; ++i) {
    if (mask & (1u << i)) total_mean += mean_arrival(model, i);
  }
  double rhs = 0.0;
  for (int i = 0; i < model.num_users; ++i) {
    if (!(mask & (1u << i))) continue;
    const double lambda = mean_arrival(model, i) / total_mean;
    const ArrivalModel single = marginal_model(model, i);
    rhs += lambda * exact_throughput_scaled({policies[i]}, single, 1u, n,
                                            1.0 / lambda, budget);
  }
  return lhs + tol >= rhs;
}

// Sup-additivity of the weighted horizon throughput at a fixed policy set:
// (n+m) T_{n+m}(g_I) >= n T_n(g_I) + m T_m(g_I) for every subset I, each
// horizon starting from empty batteries.
inline bool supadditivity_check(const std::vector<PolicySpec>& policies,
                                const ArrivalModel& model, int n, int m,
                                std::uint64_t budget = 0, double tol = 1e-9) {
  const auto masks = detail::nonempty_masks(model.num_users);
  const auto t_n =
      detail::exact_mask_values(policies, model, masks, n, budget, 1.0);
  const auto t_m =
      detail::exact_mask_values(policies, model, masks, m, budget, 1.0);
  const auto t_nm =
      detail::exact_mask_values(policies, model, masks, n + m, budget, 1.0);
  for (std::size_t j = 0; j < masks.size(); ++j) {
    if ((n + m) * t_nm[j] + tol < n * t_n[j] + m * t_m[j]) return false;
  }
  return true;
}

}  // namespace ehmac
