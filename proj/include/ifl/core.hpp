#pragma once

// Domain types of the card-authorization world and the four impairment
// channels (delay, issuer censorship, label corruption, counterfactual
// suppression) as pure operations.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ifl/rng.hpp"

namespace ifl {

enum class ActionKind : uint8_t { kApprove = 0, kChallenge = 1, kDecline = 2 };
inline constexpr int kNumActions = 3;

const char* to_string(ActionKind a);
ActionKind action_from_string(const std::string& s);

// Per-cell loss components, each in [0, 1]: approve-on-fraud, challenge
// friction, false decline.
struct LossSpec {
  std::vector<double> fn_loss;
  std::vector<double> ch_loss;
  std::vector<double> fp_loss;

  int num_cells() const { return int(fn_loss.size()); }
  void validate() const;

  // Flat defaults keep the ordering FN > FP > CH.
  static LossSpec uniform(int cells, double fn = 1.0, double ch = 0.2,
                          double fp = 0.4);
};

// Class-conditional binary label noise: fraud reported clean with rate
// eps10, clean reported fraud with rate eps01. Non-degenerate when
// eps10 + eps01 < 1.
struct CorruptionChannel {
  double eps10 = 0.0;
  double eps01 = 0.0;
  void validate() const;
};

// Finite label delays only; permanent non-arrival is owned by the
// censorship gate, never by the delay model.
struct DelayModel {
  enum class Kind : uint8_t { kConstant, kGeometric, kTable };

  Kind kind = Kind::kConstant;
  int64_t constant_lag = 0;
  double geometric_rate = 1.0;  // success prob per step; support {0,1,2,...}
  std::vector<std::pair<int64_t, double>> table;  // (lag, prob), probs sum to 1

  void validate() const;
  double mean_delay() const;

  static DelayModel constant(int64_t lag);
  static DelayModel geometric(double rate);
  static DelayModel from_table(std::vector<std::pair<int64_t, double>> entries);
};

struct IssuerProfile {
  int issuer_id = 0;
  double gamma = 0.0;  // permanent censorship probability
  CorruptionChannel channel;
  DelayModel delay;
  double volume_share = 1.0;
  void validate() const;
};

// A feedback item in flight between authorization and label arrival.
// Exists only for transactions that were not declined and not censored.
struct ObservationEvent {
  int64_t issued_round = 0;
  int64_t maturity_round = 0;  // issued_round + sampled finite delay
  int context_cell = 0;
  ActionKind action_taken = ActionKind::kApprove;
  int corrupted_label = 0;
  double propensity = 1.0;  // marginal prob with which the action was chosen
};

// Expected per-round loss of taking `action` at a cell whose latent fraud
// probability is `fraud_prob`: p*FN for approve, CH for challenge,
// (1-p)*FP for decline. Throws std::domain_error on a bad cell index.
double expected_loss(int cell, ActionKind action, double fraud_prob,
                     const LossSpec& losses);

// Passes the latent label through the noise channel.
int corrupt_label(const CorruptionChannel& channel, int latent, RngStream& rng);

// s = 1 - eps10 - eps01.
double signal_strength(const CorruptionChannel& channel);

// Unbiased inverse of the channel: (observed - eps01) / s. Throws
// std::domain_error when the channel is degenerate (s <= 0).
double debias_label(const CorruptionChannel& channel, int observed);

int64_t sample_delay(const DelayModel& model, RngStream& rng);

// P(delay <= window), closed form per model kind; nondecreasing in window.
double maturity_prob(const DelayModel& model, int64_t window);

// True (censored) with probability gamma, independent of the label.
bool censor(double gamma, RngStream& rng);

// The observation indicator: not declined, not censored, and maturing
// within the remaining horizon.
bool observation_gate(ActionKind action, bool censored, int64_t delay,
                      int64_t rounds_remaining);

}  // namespace ifl
