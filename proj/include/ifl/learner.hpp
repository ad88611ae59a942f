#pragma once

// Online learners over a finite policy class, fed only by impaired
// observations. The main learner is exponential weights with
// corruption-debiased, inverse-observation-propensity loss estimates and
// delayed updates; greedy / uniform-random / static-oracle form the
// baseline ladder.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ifl/environment.hpp"
#include "ifl/policy.hpp"

namespace ifl {

enum class LearnerKind : uint8_t {
  kExpWeights,
  kGreedy,
  kUniformRandom,
  kStaticOracle,
};

const char* to_string(LearnerKind k);
LearnerKind learner_kind_from_string(const std::string& s);

struct PendingObservation {
  ObservationEvent event;
  // P(realized action is observable) at the issuing round, i.e. one minus
  // the realized probability of declining; the inverse weight that keeps
  // the per-policy loss estimates unbiased.
  double observe_propensity;
};

struct LearnerParams {
  LearnerKind kind = LearnerKind::kExpWeights;
  double exploration_rate = 0.0;  // decline -> approve override probability
  std::optional<double> learning_rate;
  std::vector<double> initial_log_weights;  // empty = uniform
};

struct LearnerState {
  LearnerKind kind = LearnerKind::kExpWeights;
  std::vector<double> log_weights;
  double learning_rate = 0.0;
  double exploration_rate = 0.0;
  std::map<int64_t, std::vector<PendingObservation>> pending;
  int64_t rounds_seen = 0;
  int oracle_index = -1;  // static-oracle only

  // Per-(cell, action) 0/1 masks over policies, for propensity sums.
  std::vector<std::vector<double>> action_masks;
  std::vector<double> probs;  // scratch: normalized policy distribution
};

struct ActionChoice {
  ActionKind action;
  double propensity;          // exact marginal prob of the realized action
  double observe_propensity;  // 1 - P(realized decline)
};

// Per-round RNG handle: purposes draw from independent counter-based
// streams keyed by (seed, round, purpose).
struct RoundRng {
  uint64_t seed;
  uint64_t round;
  RngStream stream(Draw purpose) const { return RngStream(seed, round, purpose); }
};

// Builds a learner over the class. `planned_horizon` feeds the default
// learning rate sqrt(ln N / (K * T)); static-oracle requires the true
// environment. Unknown configurations throw ConfigError.
LearnerState make_baseline(const LearnerParams& params, const PolicyClass& cls,
                           int64_t planned_horizon,
                           const EnvironmentSpec* env_for_oracle = nullptr);

// Draws a policy from the learner's mixture, applies the decline -> approve
// exploration override, and reports the exact marginal propensities.
ActionChoice select_action(LearnerState& state, const PolicyClass& cls,
                           int cell, const RoundRng& rng);

// Mixture probability of each action at the cell (after the override).
std::array<double, 3> action_propensities(LearnerState& state,
                                          const PolicyClass& cls, int cell);

void enqueue_observation(LearnerState& state, const ObservationEvent& event,
                         double observe_propensity);

// Removes and returns everything matured by `round` (maturity <= round),
// ascending by maturity then issue order.
std::vector<PendingObservation> take_matured(LearnerState& state,
                                             int64_t round);

// Debiases the corrupted label, converts it into one loss estimate per
// policy at the event's cell, importance-weights by the inverse observation
// propensity, and applies the multiplicative-weights update (exponent
// clipped to [-10, 10]). Uniform-random and static-oracle ignore updates.
void ingest_observation(LearnerState& state, const ObservationEvent& event,
                        double observe_propensity,
                        const CorruptionChannel& channel,
                        const PolicyClass& cls, const LossSpec& losses);

// The raw per-policy loss estimate vector an ingest would apply (before the
// learning-rate scaling); exposed for estimator diagnostics and tests.
std::vector<double> loss_estimates(const ObservationEvent& event,
                                   double observe_propensity,
                                   const CorruptionChannel& channel,
                                   const PolicyClass& cls,
                                   const LossSpec& losses);

}  // namespace ifl
