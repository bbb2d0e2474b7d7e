#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ehmac/battery.hpp"
#include "ehmac/gaussmi.hpp"
#include "ehmac/policy_checks.hpp"
#include "ehmac/regions.hpp"
#include "ehmac/scenario.hpp"
#include "ehmac/throughput.hpp"

// Scenario-driven batch front end shared by the CLI binary and the tests.
// Every subcommand writes a CSV artifact plus a JSON metadata sidecar and
// returns a process exit code: 0 success, 1 usage/config error, 2 invariant
// failure. CSV payloads are byte-identical for identical
// (scenario, seed, worker-count) inputs; only the sidecar carries timings.

namespace ehmac {

inline constexpr const char* kToolVersion = "0.1.0";

inline constexpr const char* kDefaultScenario = R"json({
  "users": 2,
  "caps": [1.0, 1.0],
  "arrivals": {
    "type": "product",
    "pmf": [
      {"support": [0.0, 1.0], "probs": [0.5, 0.5]},
      {"support": [0.0, 1.0], "probs": [0.3, 0.7]}
    ]
  },
  "policies": [{"variant": "fixed_fraction"}, {"variant": "fixed_fraction"}],
  "horizons": [6],
  "estimator": {"method": "exact", "paths": 4000, "seed": 7},
  "gap": {"gamma": 1.77, "meanE": 1.0, "K": "1:1048576:geometric"}
})json";

struct RunConfig {
  std::string scenario_path;  // empty = bundled default scenario
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;  // overrides the scenario seed
  int workers = 1;
};

namespace detail {

inline Scenario load(const RunConfig& cfg) {
  Scenario scenario = cfg.scenario_path.empty()
                          ? parse_scenario_text(kDefaultScenario)
                          : load_scenario(cfg.scenario_path);
  if (cfg.seed) scenario.estimator.seed = *cfg.seed;
  scenario.estimator.workers = cfg.workers;
  return scenario;
}

inline std::ofstream open_artifact(const RunConfig& cfg,
                                   const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  const auto path = std::filesystem::path(cfg.out_dir) / name;
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write artifact: " + path.string());
  out << std::setprecision(17);
  return out;
}

inline void write_sidecar(const RunConfig& cfg, const std::string& artifact,
                          const std::string& command, std::uint64_t seed,
                          double elapsed_ms) {
  std::ofstream out(std::filesystem::path(cfg.out_dir) /
                    (artifact + ".meta.json"));
  out << "{\n"
      << "  \"tool\": \"ehmac\",\n"
      << "  \"version\": \"" << kToolVersion << "\",\n"
      << "  \"command\": \"" << command << "\",\n"
      << "  \"seed\": " << seed << ",\n"
      << "  \"workers\": " << cfg.workers << ",\n"
      << "  \"elapsed_ms\": " << elapsed_ms << "\n"
      << "}\n";
}

class Stopwatch {
 public:
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

inline std::string subset_label(std::uint32_t mask) {
  std::string label;
  for (int i = 0; i < 32; ++i) {
    if (mask & (1u << i)) {
      if (!label.empty()) label += '+';
      label += std::to_string(i + 1);
    }
  }
  return label.empty() ? "0" : label;
}

}  // namespace detail

inline int run_simulate(const RunConfig& cfg, int n) {
  detail::Stopwatch watch;
  const Scenario scenario = detail::load(cfg);
  const Trajectory traj = simulate_trajectory(
      scenario.model, scenario.policies, n, scenario.estimator.seed);
  auto out = detail::open_artifact(cfg, "trajectory.csv");
  write_trajectory_csv(out, traj);
  detail::write_sidecar(cfg, "trajectory.csv", "simulate",
                        scenario.estimator.seed, watch.elapsed_ms());
  return 0;
}

inline int run_throughput(const RunConfig& cfg, const std::string& subset,
                          int n, const std::string& method, int paths) {
  detail::Stopwatch watch;
  Scenario scenario = detail::load(cfg);
  if (!method.empty()) {
    if (method == "exact") {
      scenario.estimator.method = EstimationMethod::kExact;
    } else if (method == "mc") {
      scenario.estimator.method = EstimationMethod::kMonteCarlo;
    } else {
      throw ConfigError("--method must be exact or mc");
    }
  }
  if (paths > 0) scenario.estimator.paths = paths;
  const std::uint32_t mask = parse_subset(subset, scenario.model.num_users);
  ThroughputEstimate est;
  if (scenario.estimator.method == EstimationMethod::kExact) {
    est = exact_throughput(scenario.policies, scenario.model, mask, n,
                           scenario.estimator.budget);
  } else {
    est = mc_throughput(scenario.policies, scenario.model, mask, n,
                        scenario.estimator.paths, scenario.estimator.seed,
                        cfg.workers);
  }
  auto out = detail::open_artifact(cfg, "throughput.csv");
  out << "subset,n,method,value,half_width\n";
  out << detail::subset_label(mask) << ',' << n << ',' << to_string(est.method)
      << ',' << est.value << ',' << est.half_width << '\n';
  detail::write_sidecar(cfg, "throughput.csv", "throughput",
                        scenario.estimator.seed, watch.elapsed_ms());
  return 0;
}

inline int run_region(const RunConfig& cfg, const std::string& bound, int n) {
  detail::Stopwatch watch;
  const Scenario scenario = detail::load(cfg);
  std::vector<double> means;
  for (int i = 0; i < scenario.model.num_users; ++i) {
    means.push_back(mean_arrival(scenario.model, i));
  }
  SetFunction f;
  if (bound == "outer") {
    f = awgn_outer(means).f;
  } else if (bound == "shifted") {
    f = shifted_region(awgn_outer(means), kFixedFractionGapBits).f;
  } else if (bound == "tput" || bound == "inner-txrx" || bound == "inner-tx") {
    const SetFunction tput = throughput_set_function(
        scenario.policies, scenario.model, n, scenario.estimator);
    if (bound == "tput") {
      f = tput;
    } else if (bound == "inner-txrx") {
      f = inner_txrx(tput).f;
    } else {
      const double entropy = exact_output_entropy(
          scenario.policies, scenario.model, n, scenario.estimator.budget);
      f = inner_tx(tput, entropy).f;
    }
  } else {
    throw ConfigError(
        "--bound must be outer|shifted|tput|inner-txrx|inner-tx");
  }
  auto out = detail::open_artifact(cfg, "region.csv");
  out << "subset_mask,bound_bits\n";
  for (std::size_t mask = 0; mask < f.values.size(); ++mask) {
    out << mask << ',' << f.values[mask] << '\n';
  }
  detail::write_sidecar(cfg, "region.csv", "region", scenario.estimator.seed,
                        watch.elapsed_ms());
  return 0;
}

inline int run_gap_sweep(const RunConfig& cfg, double gamma, double mean,
                         const std::string& sweep) {
  detail::Stopwatch watch;
  GapOptions options;
  if (gamma > 0.0) {
    options.gamma = gamma;
    options.mean_arrival = mean;
    options.user_counts = parse_user_sweep(sweep);
  } else {
    const Scenario scenario = detail::load(cfg);
    if (!scenario.gap) throw ConfigError("no gap options in scenario");
    options = *scenario.gap;
  }
  const auto reports =
      gap_report(options.gamma, options.mean_arrival, options.user_counts);
  auto out = detail::open_artifact(cfg, "gap_sweep.csv");
  out << "K,upper,lower,relative\n";
  for (const auto& r : reports) {
    out << r.num_users << ',' << r.upper << ',' << r.lower << ','
        << r.relative << '\n';
  }
  detail::write_sidecar(cfg, "gap_sweep.csv", "gap-sweep", 0,
                        watch.elapsed_ms());
  return 0;
}

inline int run_mi_check(const RunConfig& cfg, const std::string& powers_text) {
  detail::Stopwatch watch;
  std::vector<double> powers;
  std::stringstream ss(powers_text);
  std::string item;
  while (std::getline(ss, item, ',')) powers.push_back(std::stod(item));
  if (powers.empty()) throw ConfigError("--powers: empty list");
  auto out = detail::open_artifact(cfg, "mi_check.csv");
  out << "P,mi,epi_floor,gauss_ceiling\n";
  for (double p : powers) {
    const double mi = sum_uniform_awgn_mi({p});
    out << p << ',' << mi << ',' << epi_lower_bound(p) << ','
        << half_log2_1p(p) << '\n';
  }
  detail::write_sidecar(cfg, "mi_check.csv", "mi-check", 0,
                        watch.elapsed_ms());
  return 0;
}

inline int run_entropy(const RunConfig& cfg, int n_max) {
  detail::Stopwatch watch;
  const Scenario scenario = detail::load(cfg);
  auto out = detail::open_artifact(cfg, "entropy.csv");
  out << "n,entropy_rate_bits\n";
  for (int n = 1; n <= n_max; ++n) {
    out << n << ','
        << exact_output_entropy(scenario.policies, scenario.model, n,
                                scenario.estimator.budget)
        << '\n';
  }
  detail::write_sidecar(cfg, "entropy.csv", "entropy",
                        scenario.estimator.seed, watch.elapsed_ms());
  return 0;
}

// Runs the full invariant suite against the scenario and prints one
// pass/fail line per check.
inline int run_verify(const RunConfig& cfg, std::ostream& log = std::cout) {
  detail::Stopwatch watch;
  const Scenario scenario = detail::load(cfg);
  const ArrivalModel& model = scenario.model;
  const std::vector<PolicySpec>& policies = scenario.policies;
  const int n = scenario.horizons.front();
  const std::uint64_t seed = scenario.estimator.seed;
  const std::uint64_t budget = scenario.estimator.budget;
  int failures = 0;
  std::vector<std::pair<std::string, bool>> rows;
  auto report = [&](const std::string& name, bool ok) {
    log << (ok ? "[PASS] " : "[FAIL] ") << name << '\n';
    rows.emplace_back(name, ok);
    if (!ok) ++failures;
  };

  {
    double total = 0.0;
    for (double p : model.joint_pmf) total += p;
    report("joint pmf normalized", std::fabs(total - 1.0) <= kPmfTol);
  }
  {
    bool ok = true;
    const int slots = 100000;
    const auto path = sample_path(model, slots, seed);
    for (int i = 0; i < model.num_users; ++i) {
      double sum = 0.0, var = 0.0;
      const double mean = mean_arrival(model, i);
      for (double e : path[i]) sum += e;
      for (const auto& atom : model.support) {
        var += atom.prob * (atom.values[i] - mean) * (atom.values[i] - mean);
      }
      const double sigma = std::sqrt(var / slots);
      if (std::fabs(sum / slots - mean) > 3.0 * sigma + 1e-12) ok = false;
    }
    report("sampled marginal means within 3 sigma", ok);
  }
  {
    bool ok = true;
    const Trajectory traj = simulate_trajectory(model, policies, 2000, seed);
    for (int i = 0; i < traj.num_users(); ++i) {
      double spent = 0.0, arrived = 0.0;
      for (int t = 0; t < traj.horizon(); ++t) {
        const double level = traj.levels[i][t];
        const double spend = traj.spends[i][t];
        if (spend < -kAdmissibilityTol ||
            spend > level + kAdmissibilityTol ||
            level > model.caps[i] + kAdmissibilityTol) {
          ok = false;
        }
        spent += spend;
        arrived += traj.arrivals[i][t];
        if (spent > arrived + 1e-9) ok = false;
      }
    }
    report("trajectory admissibility and energy conservation", ok);
  }
  {
    bool ok = true;
    for (int i = 0; i < model.num_users; ++i) {
      const double cap = model.caps[i];
      for (int s = 0; s <= 200; ++s) {
        const double level = cap * s / 200.0;
        const double g = allocate(policies[i], level, cap);
        if (g < 0.0 || g > level + kAdmissibilityTol) ok = false;
      }
    }
    report("policy spends within battery level", ok);
  }
  SetFunction tput;
  {
    bool ok = true;
    try {
      tput = throughput_set_function(policies, model, n,
                                     {EstimationMethod::kExact, budget});
      ok = is_normalized(tput) && is_monotone(tput) && is_submodular(tput);
    } catch (const BudgetError&) {
      ok = false;
    }
    report("exact throughput set function is a polymatroid bound", ok);
  }
  {
    const std::uint32_t full = tput.full_mask();
    const auto mc = mc_throughput(policies, model, full, n,
                                  scenario.estimator.paths, seed,
                                  cfg.workers);
    const double exact = tput(full);
    const double three_se = 3.0 * mc.half_width / 1.96 + 1e-9;
    report("Monte Carlo matches exact throughput within 3 sigma",
           std::fabs(mc.value - exact) <= three_se);
  }
  std::vector<double> means;
  for (int i = 0; i < model.num_users; ++i) {
    means.push_back(mean_arrival(model, i));
  }
  const RateRegion outer = awgn_outer(means);
  {
    bool ok = true;
    for (std::size_t mask = 1; mask < tput.values.size(); ++mask) {
      if (tput.values[mask] > outer.f.values[mask] + 1e-9) ok = false;
    }
    report("throughput dominated by the AWGN outer bound", ok);
  }
  {
    const RateRegion inner = inner_txrx(tput);
    bool ok = true;
    for (std::size_t mask = 0; mask < tput.values.size(); ++mask) {
      if (inner.f.values[mask] > tput.values[mask] + 1e-9) ok = false;
    }
    report("inner region nested inside the throughput region", ok);
  }
  {
    bool ok = true;
    try {
      const double full_rate = sum_rate(outer);
      std::vector<int> perm(model.num_users);
      std::iota(perm.begin(), perm.end(), 0);
      do {
        for (double coord : vertex(outer, perm)) {
          if (coord < -1e-9) ok = false;
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
      ok = ok && full_rate > 0.0;
    } catch (const RegionError&) {
      ok = false;
    }
    report("permutation vertices consistent and nonnegative", ok);
  }
  {
    bool ok = true;
    const double joint = exact_output_entropy(policies, model, 4, budget);
    double marginal_sum = 0.0;
    for (int i = 0; i < model.num_users; ++i) {
      marginal_sum += exact_output_entropy({policies[i]},
                                           marginal_model(model, i), 4,
                                           budget);
    }
    if (joint > marginal_sum + 1e-9) ok = false;
    report("output entropy subadditive across users", ok);
  }
  {
    report("concavity split lower bound",
           concavity_split_check(policies, model, tput.full_mask(), n,
                                 budget));
  }
  {
    report("horizon throughput sup-additive",
           supadditivity_check(policies, model, 3, 3, budget));
  }
  if (scenario.gap) {
    const auto reports = gap_report(scenario.gap->gamma,
                                    scenario.gap->mean_arrival,
                                    scenario.gap->user_counts);
    bool ok = true;
    for (std::size_t i = 1; i < reports.size(); ++i) {
      if (reports[i].relative >= reports[i - 1].relative) ok = false;
    }
    report("relative sum-capacity gap strictly decreasing in K", ok);
  }

  auto out = detail::open_artifact(cfg, "verify.csv");
  out << "check,status\n";
  for (const auto& [name, ok] : rows) {
    out << name << ',' << (ok ? "pass" : "fail") << '\n';
  }
  detail::write_sidecar(cfg, "verify.csv", "verify", seed,
                        watch.elapsed_ms());
  log << (failures == 0 ? "verify: all checks passed\n"
                        : "verify: " + std::to_string(failures) +
                              " check(s) failed\n");
  return failures == 0 ? 0 : 2;
}

}  // namespace ehmac
