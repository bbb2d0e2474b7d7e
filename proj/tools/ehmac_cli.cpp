// Batch front end for the energy-harvesting MAC toolkit. Subcommands parse a
// JSON scenario, dispatch into the library and write CSV artifacts with JSON
// metadata sidecars. Exit codes: 0 success, 1 usage/config error, 2 invariant
// suite failure.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ehmac/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Energy-harvesting Gaussian MAC simulation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  ehmac::RunConfig cfg;
  std::uint64_t seed_flag = 0;
  app.add_option("--scenario", cfg.scenario_path, "Scenario JSON file");
  app.add_option("--out", cfg.out_dir, "Output directory");
  auto* seed_opt =
      app.add_option("--seed", seed_flag, "Master seed (overrides the scenario)");
  app.add_option("--workers", cfg.workers, "Worker threads")
      ->check(CLI::PositiveNumber);

  auto* simulate = app.add_subcommand("simulate", "Simulate one trajectory");
  int sim_n = 100;
  simulate->add_option("--n", sim_n, "Horizon")->check(CLI::PositiveNumber);

  auto* throughput =
      app.add_subcommand("throughput", "Expected throughput of a user subset");
  std::string subset = "all";
  std::string method;
  int tp_n = 8;
  int paths = 0;
  throughput->add_option("--subset", subset, "Users, e.g. 1,3 (default all)");
  throughput->add_option("--n", tp_n, "Horizon")->check(CLI::PositiveNumber);
  throughput->add_option("--method", method, "exact or mc");
  throughput->add_option("--paths", paths, "Monte Carlo path count");

  auto* region = app.add_subcommand("region", "Bound profile over all subsets");
  std::string bound = "outer";
  int region_n = 6;
  region->add_option("--bound", bound,
                     "outer|shifted|tput|inner-txrx|inner-tx");
  region->add_option("--n", region_n, "Horizon for throughput-based bounds");

  auto* gap = app.add_subcommand("gap-sweep", "Sum-capacity gap versus K");
  double gamma = 0.0;
  double mean = 1.0;
  std::string sweep = "1:1048576:geometric";
  gap->add_option("--gamma", gamma, "Gap constant in bits");
  gap->add_option("--meanE", mean, "Mean arrival rate");
  gap->add_option("--K", sweep, "K sweep: a:b:geometric or a:b:step");

  auto* mi = app.add_subcommand("mi-check", "Uniform-input AWGN MI table");
  std::string powers = "0.25,1,4,16";
  mi->add_option("--powers", powers, "Comma-separated input powers");

  auto* entropy =
      app.add_subcommand("entropy", "Exact policy output entropy rate");
  int ent_n = 6;
  entropy->add_option("--n", ent_n, "Maximum horizon")
      ->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "Run the invariant suite");

  CLI11_PARSE(app, argc, argv);
  if (seed_opt->count() > 0) cfg.seed = seed_flag;

  try {
    if (simulate->parsed()) return ehmac::run_simulate(cfg, sim_n);
    if (throughput->parsed()) {
      return ehmac::run_throughput(cfg, subset, tp_n, method, paths);
    }
    if (region->parsed()) return ehmac::run_region(cfg, bound, region_n);
    if (gap->parsed()) return ehmac::run_gap_sweep(cfg, gamma, mean, sweep);
    if (mi->parsed()) return ehmac::run_mi_check(cfg, powers);
    if (entropy->parsed()) return ehmac::run_entropy(cfg, ent_n);
    if (verify->parsed()) return ehmac::run_verify(cfg);
  } catch (const ehmac::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const ehmac::BudgetError& e) {
    std::cerr << "budget error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
