#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ehmac/arrivals.hpp"
#include "ehmac/policies.hpp"
#include "ehmac/throughput.hpp"

// JSON scenario files: arrival model, per-user policies, horizons, estimator
// settings and gap-sweep options. Parse errors report the JSON path of the
// offending field.

namespace ehmac {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GapOptions {
  double gamma = 0.0;
  double mean_arrival = 1.0;
  std::vector<std::uint64_t> user_counts;
};

struct Scenario {
  ArrivalModel model;
  std::vector<PolicySpec> policies;
  std::vector<int> horizons;
  EstimatorOptions estimator;
  std::optional<GapOptions> gap;
};

namespace detail {

inline const nlohmann::json& require_field(const nlohmann::json& obj,
                                           const std::string& path,
                                           const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ConfigError(path + ": missing field '" + key + "'");
  }
  return obj.at(key);
}

inline double as_number(const nlohmann::json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path + ": expected a number");
  return j.get<double>();
}

inline int as_int(const nlohmann::json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path + ": expected an integer");
  return j.get<int>();
}

inline Pmf parse_pmf(const nlohmann::json& j, const std::string& path) {
  const auto& support = require_field(j, path, "support");
  const auto& probs = require_field(j, path, "probs");
  if (!support.is_array() || !probs.is_array() ||
      support.size() != probs.size() || support.empty()) {
    throw ConfigError(path + ": support/probs must be equal-length arrays");
  }
  Pmf pmf;
  for (std::size_t s = 0; s < support.size(); ++s) {
    pmf.emplace_back(as_number(support[s], path + ".support"),
                     as_number(probs[s], path + ".probs"));
  }
  return pmf;
}

}  // namespace detail

// "1,3" -> bitmask over 1-based user indices.
inline std::uint32_t parse_subset(const std::string& text, int num_users) {
  if (text.empty() || text == "all") return (1u << num_users) - 1;
  std::uint32_t mask = 0;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const int user = std::stoi(item);
    if (user < 1 || user > num_users) {
      throw ConfigError("subset: user " + item + " out of range 1.." +
                        std::to_string(num_users));
    }
    mask |= (1u << (user - 1));
  }
  return mask;
}

// "a:b:geometric" doubles from a to b; "a:b:s" steps linearly by s; a single
// integer is a one-element sweep.
inline std::vector<std::uint64_t> parse_user_sweep(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  std::vector<std::uint64_t> counts;
  if (parts.size() == 1) {
    counts.push_back(std::stoull(parts[0]));
    return counts;
  }
  if (parts.size() < 2 || parts.size() > 3) {
    throw ConfigError("user sweep must be K, a:b or a:b:step|geometric");
  }
  const std::uint64_t lo = std::stoull(parts[0]);
  const std::uint64_t hi = std::stoull(parts[1]);
  if (lo == 0 || hi < lo) throw ConfigError("invalid user sweep bounds");
  if (parts.size() == 3 && parts[2] == "geometric") {
    for (std::uint64_t k = lo; k <= hi; k *= 2) counts.push_back(k);
  } else {
    const std::uint64_t step =
        parts.size() == 3 ? std::stoull(parts[2]) : std::uint64_t{1};
    if (step == 0) throw ConfigError("zero sweep step");
    for (std::uint64_t k = lo; k <= hi; k += step) counts.push_back(k);
  }
  return counts;
}

inline ArrivalModel parse_arrivals(const nlohmann::json& root) {
  const int users = detail::as_int(
      detail::require_field(root, "scenario", "users"), "scenario.users");
  if (users < 1) throw ConfigError("scenario.users: must be >= 1");
  const auto& caps_json =
      detail::require_field(root, "scenario", "caps");
  if (!caps_json.is_array() || static_cast<int>(caps_json.size()) != users) {
    throw ConfigError("scenario.caps: need one capacity per user");
  }
  std::vector<double> caps;
  for (std::size_t i = 0; i < caps_json.size(); ++i) {
    caps.push_back(detail::as_number(caps_json[i], "scenario.caps"));
  }

  const auto& arrivals =
      detail::require_field(root, "scenario", "arrivals");
  const std::string type =
      detail::require_field(arrivals, "scenario.arrivals", "type")
          .get<std::string>();
  try {
    if (type == "product") {
      const auto& pmf =
          detail::require_field(arrivals, "scenario.arrivals", "pmf");
      if (!pmf.is_array() || static_cast<int>(pmf.size()) != users) {
        throw ConfigError("scenario.arrivals.pmf: need one pmf per user");
      }
      std::vector<Pmf> marginals;
      for (std::size_t i = 0; i < pmf.size(); ++i) {
        marginals.push_back(detail::parse_pmf(
            pmf[i], "scenario.arrivals.pmf[" + std::to_string(i) + "]"));
      }
      return build_iid_product(marginals, caps);
    }
    if (type == "correlated") {
      for (double c : caps) {
        if (c != caps[0]) {
          throw ConfigError(
              "scenario.caps: correlated arrivals need equal capacities");
        }
      }
      const Pmf marginal = detail::parse_pmf(
          detail::require_field(arrivals, "scenario.arrivals", "pmf"),
          "scenario.arrivals.pmf");
      return build_fully_correlated(marginal, users, caps[0]);
    }
    if (type == "joint") {
      const auto& pmf =
          detail::require_field(arrivals, "scenario.arrivals", "pmf");
      const auto& alpha =
          detail::require_field(pmf, "scenario.arrivals.pmf", "alphabets");
      const auto& probs =
          detail::require_field(pmf, "scenario.arrivals.pmf", "probs");
      if (!alpha.is_array() || static_cast<int>(alpha.size()) != users) {
        throw ConfigError(
            "scenario.arrivals.pmf.alphabets: need one alphabet per user");
      }
      std::vector<std::vector<double>> alphabets;
      for (const auto& a : alpha) {
        alphabets.push_back(a.get<std::vector<double>>());
      }
      return build_joint(alphabets, probs.get<std::vector<double>>(), caps);
    }
  } catch (const ModelError& e) {
    throw ConfigError(std::string("scenario.arrivals: ") + e.what());
  }
  throw ConfigError("scenario.arrivals.type: unknown type '" + type + "'");
}

inline PolicySpec parse_policy(const nlohmann::json& j,
                               const std::string& path,
                               const ArrivalModel& model, int user) {
  const std::string variant =
      detail::require_field(j, path, "variant").get<std::string>();
  try {
    if (variant == "fixed_fraction") {
      const double q =
          j.contains("q")
              ? detail::as_number(j.at("q"), path + ".q")
              : fixed_fraction_rate(mean_arrival(model, user),
                                    model.caps[user]);
      return PolicySpec::fixed_fraction(q);
    }
    if (variant == "constant") {
      return PolicySpec::constant_power(
          detail::as_number(detail::require_field(j, path, "c"), path + ".c"));
    }
    if (variant == "greedy") return PolicySpec::greedy();
    if (variant == "quantized_fixed_fraction") {
      const double q =
          j.contains("q")
              ? detail::as_number(j.at("q"), path + ".q")
              : fixed_fraction_rate(mean_arrival(model, user),
                                    model.caps[user]);
      return PolicySpec::quantized_fixed_fraction(
          q, detail::as_int(detail::require_field(j, path, "levels"),
                            path + ".levels"));
    }
    if (variant == "table") {
      return PolicySpec::from_table(
          detail::require_field(j, path, "spends").get<std::vector<double>>());
    }
  } catch (const PolicyError& e) {
    throw ConfigError(path + ": " + e.what());
  }
  throw ConfigError(path + ".variant: unknown variant '" + variant + "'");
}

inline Scenario parse_scenario(const nlohmann::json& root) {
  Scenario scenario;
  scenario.model = parse_arrivals(root);
  const int users = scenario.model.num_users;

  const auto& policies = detail::require_field(root, "scenario", "policies");
  if (!policies.is_array() || static_cast<int>(policies.size()) != users) {
    throw ConfigError("scenario.policies: need one policy per user");
  }
  for (int i = 0; i < users; ++i) {
    scenario.policies.push_back(
        parse_policy(policies[i], "scenario.policies[" + std::to_string(i) + "]",
                     scenario.model, i));
  }

  if (root.contains("horizons")) {
    for (const auto& h : root.at("horizons")) {
      const int n = detail::as_int(h, "scenario.horizons");
      if (n < 1) throw ConfigError("scenario.horizons: must be >= 1");
      scenario.horizons.push_back(n);
    }
  }
  if (scenario.horizons.empty()) scenario.horizons.push_back(6);

  if (root.contains("estimator")) {
    const auto& est = root.at("estimator");
    if (est.contains("method")) {
      const std::string method = est.at("method").get<std::string>();
      if (method == "exact") {
        scenario.estimator.method = EstimationMethod::kExact;
      } else if (method == "mc") {
        scenario.estimator.method = EstimationMethod::kMonteCarlo;
      } else {
        throw ConfigError("scenario.estimator.method: 'exact' or 'mc'");
      }
    }
    if (est.contains("paths")) {
      scenario.estimator.paths =
          detail::as_int(est.at("paths"), "scenario.estimator.paths");
    }
    if (est.contains("budget")) {
      if (!est.at("budget").is_number_unsigned()) {
        throw ConfigError("scenario.estimator.budget: expected a count");
      }
      scenario.estimator.budget = est.at("budget").get<std::uint64_t>();
    }
    if (est.contains("seed")) {
      if (!est.at("seed").is_number_unsigned()) {
        throw ConfigError("scenario.estimator.seed: expected a u64");
      }
      scenario.estimator.seed = est.at("seed").get<std::uint64_t>();
    } else if (scenario.estimator.method == EstimationMethod::kMonteCarlo) {
      throw ConfigError(
          "scenario.estimator.seed: mandatory for Monte Carlo runs");
    }
  }

  if (root.contains("gap")) {
    const auto& gap = root.at("gap");
    GapOptions options;
    options.gamma = detail::as_number(
        detail::require_field(gap, "scenario.gap", "gamma"),
        "scenario.gap.gamma");
    if (gap.contains("meanE")) {
      options.mean_arrival =
          detail::as_number(gap.at("meanE"), "scenario.gap.meanE");
    }
    if (gap.contains("K")) {
      options.user_counts =
          parse_user_sweep(gap.at("K").get<std::string>());
    } else {
      options.user_counts = parse_user_sweep("1:1048576:geometric");
    }
    scenario.gap = options;
  }
  return scenario;
}

inline Scenario load_scenario(const std::string& file_path) {
  std::ifstream in(file_path);
  if (!in) throw ConfigError("cannot open scenario file: " + file_path);
  nlohmann::json root;
  try {
    in >> root;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("scenario JSON parse error: " + std::string(e.what()));
  }
  return parse_scenario(root);
}

inline Scenario parse_scenario_text(const std::string& text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("scenario JSON parse error: " + std::string(e.what()));
  }
  return parse_scenario(root);
}

}  // namespace ehmac
