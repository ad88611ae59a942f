#include "ifl/simulate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ifl/kernels.hpp"

namespace ifl {

RunResult run_simulation(const Scenario& scenario, uint64_t seed) {
  const EnvironmentSpec& env = scenario.env;
  const PolicyClass& cls = scenario.policies;
  const int64_t horizon = scenario.config.horizon;
  const int64_t report_every = scenario.config.report_every;

  // Comparator validity is re-verified at run start.
  const auto [best_index, best_loss] = oracle_best_policy(env, cls);
  if (best_index != scenario.comparator_index)
    throw std::logic_error("run_simulation: stale comparator index");
  const PolicyTable& comparator = cls.policies[size_t(best_index)];

  LearnerState learner =
      make_baseline(scenario.config.learner, cls, horizon, &env);

  RunResult result;
  result.seed = seed;
  result.horizon = horizon;

  double cum_regret = 0.0;
  for (int64_t t = 1; t <= horizon; ++t) {
    // Everything matured by now reaches the learner before it acts.
    for (const PendingObservation& pending : take_matured(learner, t)) {
      if (pending.event.maturity_round > t)
        throw std::logic_error("event delivered before maturity");
      const auto& issuer = env.issuer_for_cell(pending.event.context_cell);
      ingest_observation(learner, pending.event, pending.observe_propensity,
                         issuer.channel, cls, env.losses);
    }

    auto tx_rng = RngStream(seed, uint64_t(t), Draw::kTransaction);
    const Transaction tx = draw_transaction(env, tx_rng);
    const ActionChoice choice =
        select_action(learner, cls, tx.cell, RoundRng{seed, uint64_t(t)});

    const double fraud_prob = env.fraud_prob[size_t(tx.cell)];
    cum_regret +=
        expected_loss(tx.cell, choice.action, fraud_prob, env.losses) -
        expected_loss(tx.cell, comparator.at(tx.cell), fraud_prob, env.losses);

    if (choice.action == ActionKind::kDecline) {
      result.suppressed += 1;
    } else {
      const IssuerProfile& issuer = env.issuer_for_cell(tx.cell);
      auto censor_rng = RngStream(seed, uint64_t(t), Draw::kCensor);
      if (censor(issuer.gamma, censor_rng)) {
        result.censored += 1;
      } else {
        auto delay_rng = RngStream(seed, uint64_t(t), Draw::kDelay);
        const int64_t lag = sample_delay(issuer.delay, delay_rng);
        if (t + lag > horizon) {
          result.expired += 1;
        } else {
          result.matured += 1;
          result.delivered_delay_sum += double(lag);
          auto corruption_rng = RngStream(seed, uint64_t(t), Draw::kCorruption);
          const int corrupted =
              corrupt_label(issuer.channel, tx.latent, corruption_rng);
          enqueue_observation(
              learner,
              ObservationEvent{t, t + lag, tx.cell, choice.action, corrupted,
                               choice.propensity},
              choice.observe_propensity);
        }
      }
    }

    if (t % report_every == 0 || t == horizon) {
      result.checkpoint_rounds.push_back(t);
      result.regret_trajectory.push_back(cum_regret);
    }
  }

  if (result.matured + result.suppressed + result.censored + result.expired !=
      horizon)
    throw std::logic_error("run_simulation: round accounting does not conserve");

  result.final_weights.resize(learner.log_weights.size());
  kernels::active().exp_normalize(learner.log_weights, result.final_weights);
  return result;
}

RunResult run_simulation(const ScenarioConfig& config, uint64_t seed) {
  return run_simulation(materialize_scenario(config), seed);
}

RealizedRates measure_realized_rates(const RunResult& result) {
  const double t = double(result.horizon);
  const int64_t resolved = result.matured + result.expired;
  return RealizedRates{
      double(result.censored) / t, double(result.suppressed) / t,
      resolved > 0 ? double(result.matured) / double(resolved)
                   : std::numeric_limits<double>::quiet_NaN(),
      result.delivered_delay_sum, double(result.matured) / t};
}

}  // namespace ifl
