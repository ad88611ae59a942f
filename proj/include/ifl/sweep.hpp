#pragma once

// Deterministic parameter sweeps: a grid of JSON-path overrides applied to
// a base scenario, crossed with the scenario's seed list. Rows come back
// sorted lexicographically in (grid point, seed) regardless of how many
// worker threads executed the runs (IFL_THREADS caps parallelism).

#include <string>
#include <vector>

#include <json.hpp>

#include "ifl/simulate.hpp"

namespace ifl {

// One grid axis; multiple paths advance together (zipped), so e.g. eps10
// and eps01 can move as one "eps-sum" axis.
struct GridAxis {
  std::vector<std::string> paths;
  std::vector<std::vector<nlohmann::json>> values;  // values[step][path]
};

struct SweepSpec {
  std::vector<GridAxis> axes;
  // Cap on grid-points x seeds; exceeding it is a configuration error
  // raised before any run starts.
  size_t max_runs = 100000;
};

SweepSpec parse_grid(const nlohmann::json& doc);

struct SweepRow {
  std::vector<nlohmann::json> params;  // aligned with SweepTable::param_columns
  uint64_t seed = 0;
  RealizedRates rates{};
  double final_regret = 0.0;
  double floor_value = 0.0;
};

struct SweepTable {
  std::vector<std::string> param_columns;  // grid paths, alphabetical
  std::vector<SweepRow> rows;
};

SweepTable run_sweep(const nlohmann::json& base_config, const SweepSpec& grid);

// Applies one override; the full path must already resolve in the document.
void apply_override(nlohmann::json& doc, const std::string& path,
                    const nlohmann::json& value);

}  // namespace ifl
