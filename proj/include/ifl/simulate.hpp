#pragma once

// The round loop: delayed-observation event queue, regret accounting
// against the analytic best-in-class comparator, realized impairment rates.

#include <cstdint>
#include <vector>

#include "ifl/config.hpp"

namespace ifl {

struct RealizedRates {
  double gamma_hat;  // censored / T
  double delta_hat;  // suppressed / T
  double m_hat;      // matured / (matured + expired); NaN when undefined
  double d_hat;      // cumulative finite delay of matured labels
  double q_hat;      // matured / T
};

struct RunResult {
  uint64_t seed = 0;
  int64_t horizon = 0;
  std::vector<int64_t> checkpoint_rounds;
  std::vector<double> regret_trajectory;  // cumulative, expected-loss form
  std::vector<double> final_weights;
  int64_t matured = 0;
  int64_t suppressed = 0;
  int64_t censored = 0;
  int64_t expired = 0;
  double delivered_delay_sum = 0.0;

  double final_regret() const {
    return regret_trajectory.empty() ? 0.0 : regret_trajectory.back();
  }
};

RunResult run_simulation(const Scenario& scenario, uint64_t seed);

// Convenience overload matching the scenario-config surface.
RunResult run_simulation(const ScenarioConfig& config, uint64_t seed);

RealizedRates measure_realized_rates(const RunResult& result);

}  // namespace ifl
