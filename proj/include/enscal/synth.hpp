#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "enscal/core_data.hpp"

namespace enscal {

enum class Scenario {
  bma_normal,
  bma_gamma,
  bma_truncnormal,
  emos_normal,
  emos_truncnormal,
  underdispersive_raw,
};

Scenario parse_scenario(std::string_view text);
std::string to_string(Scenario scenario);
VariableKind scenario_kind(Scenario scenario);

struct SynthSpec {
  Scenario scenario = Scenario::emos_normal;
  std::uint64_t seed = 1;
  int n_dates = 60;
  int n_stations = 5;
  int n_members = 11;
  Date start = Date::from_ymd(2012, 4, 1);
  std::vector<Date> missing;               // dates omitted from the calendar
  std::map<std::string, double> params;    // overrides scenario defaults
};

struct SynthResult {
  Dataset data;
  // True generator parameters by name, deterministic order.
  std::vector<std::pair<std::string, double>> truth;
  // CRPS of the true per-case predictive law at each emitted observation,
  // parallel to data.cases.
  std::vector<double> true_crps;
  double exact_mean_crps = 0.0;
};

// Default parameters for a scenario (what cmd_synth prints when not
// overridden). Unknown override keys are a config error.
std::map<std::string, double> scenario_defaults(Scenario scenario);

SynthResult generate_synth(const SynthSpec& spec);

}  // namespace enscal
