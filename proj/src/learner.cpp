#include "ifl/learner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ifl/errors.hpp"
#include "ifl/kernels.hpp"

namespace ifl {

namespace {

constexpr double kClipExponent = 10.0;

void refresh_probs(LearnerState& state) {
  const size_t n = state.log_weights.size();
  state.probs.resize(n);
  switch (state.kind) {
    case LearnerKind::kExpWeights:
      kernels::active().exp_normalize(state.log_weights, state.probs);
      return;
    case LearnerKind::kGreedy: {
      size_t best = 0;
      for (size_t i = 1; i < n; ++i)
        if (state.log_weights[i] > state.log_weights[best]) best = i;
      std::fill(state.probs.begin(), state.probs.end(), 0.0);
      state.probs[best] = 1.0;
      return;
    }
    case LearnerKind::kUniformRandom:
      std::fill(state.probs.begin(), state.probs.end(), 1.0 / double(n));
      return;
    case LearnerKind::kStaticOracle:
      std::fill(state.probs.begin(), state.probs.end(), 0.0);
      state.probs[size_t(state.oracle_index)] = 1.0;
      return;
  }
  throw ConfigError("unknown learner kind");
}

}  // namespace

const char* to_string(LearnerKind k) {
  switch (k) {
    case LearnerKind::kExpWeights:
      return "exp-weights";
    case LearnerKind::kGreedy:
      return "greedy";
    case LearnerKind::kUniformRandom:
      return "uniform-random";
    case LearnerKind::kStaticOracle:
      return "static-oracle";
  }
  return "?";
}

LearnerKind learner_kind_from_string(const std::string& s) {
  if (s == "exp-weights") return LearnerKind::kExpWeights;
  if (s == "greedy") return LearnerKind::kGreedy;
  if (s == "uniform-random") return LearnerKind::kUniformRandom;
  if (s == "static-oracle") return LearnerKind::kStaticOracle;
  throw ConfigError("unknown learner kind: " + s);
}

LearnerState make_baseline(const LearnerParams& params, const PolicyClass& cls,
                           int64_t planned_horizon,
                           const EnvironmentSpec* env_for_oracle) {
  if (cls.size() < 1) throw ConfigError("learner: empty policy class");
  if (params.exploration_rate < 0.0 || params.exploration_rate > 1.0)
    throw ConfigError("learner: exploration rate outside [0,1]");
  if (planned_horizon < 1) throw ConfigError("learner: horizon < 1");

  LearnerState state;
  state.kind = params.kind;
  state.exploration_rate = params.exploration_rate;
  const size_t n = size_t(cls.size());
  if (params.initial_log_weights.empty()) {
    state.log_weights.assign(n, 0.0);
  } else {
    if (params.initial_log_weights.size() != n)
      throw ConfigError("learner: initial_log_weights length != class size");
    state.log_weights = params.initial_log_weights;
  }
  if (params.learning_rate) {
    if (*params.learning_rate <= 0.0)
      throw ConfigError("learner: learning rate must be positive");
    state.learning_rate = *params.learning_rate;
  } else {
    state.learning_rate = std::sqrt(
        std::log(double(cls.size())) / (kNumActions * double(planned_horizon)));
  }
  if (params.kind == LearnerKind::kStaticOracle) {
    if (env_for_oracle == nullptr)
      throw ConfigError("static-oracle learner needs the true environment");
    state.oracle_index = oracle_best_policy(*env_for_oracle, cls).first;
  }

  const int cells = cls.policies[0].num_cells();
  state.action_masks.assign(size_t(cells) * kNumActions,
                            std::vector<double>(n, 0.0));
  for (int c = 0; c < cells; ++c)
    for (size_t i = 0; i < n; ++i) {
      const auto a = size_t(cls.policies[i].at(c));
      state.action_masks[size_t(c) * kNumActions + a][i] = 1.0;
    }
  return state;
}

std::array<double, 3> action_propensities(LearnerState& state,
                                          const PolicyClass& cls, int cell) {
  refresh_probs(state);
  const auto& k = kernels::active();
  std::array<double, 3> w{};
  for (int a = 0; a < kNumActions; ++a)
    w[size_t(a)] =
        k.dot(state.probs, state.action_masks[size_t(cell) * kNumActions + size_t(a)]);
  const double xi = state.exploration_rate;
  const double declined = w[size_t(ActionKind::kDecline)];
  w[size_t(ActionKind::kApprove)] += xi * declined;
  w[size_t(ActionKind::kDecline)] = (1.0 - xi) * declined;
  (void)cls;
  return w;
}

ActionChoice select_action(LearnerState& state, const PolicyClass& cls,
                           int cell, const RoundRng& rng) {
  refresh_probs(state);
  auto policy_rng = rng.stream(Draw::kPolicySample);
  const double u = policy_rng.uniform01();
  size_t idx = state.probs.size() - 1;
  double acc = 0.0;
  for (size_t i = 0; i < state.probs.size(); ++i) {
    acc += state.probs[i];
    if (u < acc) {
      idx = i;
      break;
    }
  }
  ActionKind action = cls.policies[idx].at(cell);
  if (action == ActionKind::kDecline && state.exploration_rate > 0.0) {
    auto override_rng = rng.stream(Draw::kExploreOverride);
    if (override_rng.bernoulli(state.exploration_rate))
      action = ActionKind::kApprove;
  }
  const auto props = action_propensities(state, cls, cell);
  state.rounds_seen += 1;
  return ActionChoice{action, props[size_t(action)],
                      1.0 - props[size_t(ActionKind::kDecline)]};
}

void enqueue_observation(LearnerState& state, const ObservationEvent& event,
                         double observe_propensity) {
  if (event.maturity_round < event.issued_round)
    throw std::domain_error("observation: maturity before issue");
  state.pending[event.maturity_round].push_back(
      PendingObservation{event, observe_propensity});
}

std::vector<PendingObservation> take_matured(LearnerState& state,
                                             int64_t round) {
  std::vector<PendingObservation> out;
  auto it = state.pending.begin();
  while (it != state.pending.end() && it->first <= round) {
    out.insert(out.end(), it->second.begin(), it->second.end());
    it = state.pending.erase(it);
  }
  // Delivery order within a round's batch is ascending issue order.
  std::sort(out.begin(), out.end(),
            [](const PendingObservation& a, const PendingObservation& b) {
              return a.event.issued_round < b.event.issued_round;
            });
  return out;
}

std::vector<double> loss_estimates(const ObservationEvent& event,
                                   double observe_propensity,
                                   const CorruptionChannel& channel,
                                   const PolicyClass& cls,
                                   const LossSpec& losses) {
  if (!(observe_propensity > 0.0) || !(event.propensity > 0.0))
    throw std::domain_error("loss_estimates: zero propensity");
  const double y_hat = debias_label(channel, event.corrupted_label);
  const int cell = event.context_cell;
  const double iw = 1.0 / observe_propensity;
  const std::array<double, 3> by_action{
      iw * y_hat * losses.fn_loss[size_t(cell)],
      iw * losses.ch_loss[size_t(cell)],
      iw * (1.0 - y_hat) * losses.fp_loss[size_t(cell)]};
  std::vector<double> est(size_t(cls.size()));
  for (size_t i = 0; i < est.size(); ++i)
    est[i] = by_action[size_t(cls.policies[i].at(cell))];
  return est;
}

void ingest_observation(LearnerState& state, const ObservationEvent& event,
                        double observe_propensity,
                        const CorruptionChannel& channel,
                        const PolicyClass& cls, const LossSpec& losses) {
  if (state.kind == LearnerKind::kUniformRandom ||
      state.kind == LearnerKind::kStaticOracle)
    return;
  const auto est =
      loss_estimates(event, observe_propensity, channel, cls, losses);
  const auto& k = kernels::active();
  k.scaled_sub(state.log_weights, state.learning_rate, est, -kClipExponent,
               kClipExponent);
  const double m = k.max(state.log_weights);
  for (double& w : state.log_weights) w -= m;
}

}  // namespace ifl
