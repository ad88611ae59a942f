#pragma once

// Scenario configuration: a single JSON document with schema_version 1.
// Parsing is fail-closed: unknown fields are rejected.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ifl/analysis.hpp"
#include "ifl/environment.hpp"
#include "ifl/learner.hpp"

namespace ifl {

struct ScenarioConfig {
  int64_t horizon = 1;
  int64_t report_every = 1;
  std::vector<uint64_t> seeds;
  nlohmann::json environment;   // one of: explicit, packing, fast_slow, hetero
  nlohmann::json policy_class;  // enumerate params; packing classes are implied
  LearnerParams learner;
};

ScenarioConfig parse_scenario_config(const nlohmann::json& doc);

// Fully constructed, immutable inputs shared by every run of a scenario.
struct Scenario {
  ScenarioConfig config;
  EnvironmentSpec env;
  PolicyClass policies;
  int comparator_index = 0;
  double comparator_loss = 0.0;
};

Scenario materialize_scenario(const ScenarioConfig& config);

// Explicit-environment (de)serialization; field names are the scenario
// schema's.
EnvironmentSpec environment_from_json(const nlohmann::json& doc);
nlohmann::json environment_to_json(const EnvironmentSpec& env);

nlohmann::json load_json_file(const std::string& path);

// Declared-parameter floor inputs for a scenario (delta_bar = 0; the
// realized decline rate is reported separately so it can be fed back in).
FloorParams declared_floor_params(const Scenario& scenario);

}  // namespace ifl
