#include "ifl/core.hpp"

#include <cmath>
#include <stdexcept>

namespace ifl {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

bool unit_interval(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

const char* to_string(ActionKind a) {
  switch (a) {
    case ActionKind::kApprove:
      return "approve";
    case ActionKind::kChallenge:
      return "challenge";
    case ActionKind::kDecline:
      return "decline";
  }
  return "?";
}

ActionKind action_from_string(const std::string& s) {
  if (s == "approve") return ActionKind::kApprove;
  if (s == "challenge") return ActionKind::kChallenge;
  if (s == "decline") return ActionKind::kDecline;
  throw std::invalid_argument("unknown action: " + s);
}

void LossSpec::validate() const {
  require(!fn_loss.empty(), "LossSpec: no cells");
  require(ch_loss.size() == fn_loss.size() && fp_loss.size() == fn_loss.size(),
          "LossSpec: component lengths differ");
  for (size_t i = 0; i < fn_loss.size(); ++i) {
    require(unit_interval(fn_loss[i]) && unit_interval(ch_loss[i]) &&
                unit_interval(fp_loss[i]),
            "LossSpec: component outside [0,1]");
  }
}

LossSpec LossSpec::uniform(int cells, double fn, double ch, double fp) {
  LossSpec spec;
  spec.fn_loss.assign(size_t(cells), fn);
  spec.ch_loss.assign(size_t(cells), ch);
  spec.fp_loss.assign(size_t(cells), fp);
  spec.validate();
  return spec;
}

void CorruptionChannel::validate() const {
  require(eps10 >= 0.0 && eps01 >= 0.0, "CorruptionChannel: negative rate");
  require(eps10 + eps01 < 1.0, "CorruptionChannel: eps10 + eps01 must be < 1");
}

void DelayModel::validate() const {
  switch (kind) {
    case Kind::kConstant:
      require(constant_lag >= 0, "DelayModel: negative constant lag");
      return;
    case Kind::kGeometric:
      require(geometric_rate > 0.0 && geometric_rate <= 1.0,
              "DelayModel: geometric rate outside (0,1]");
      return;
    case Kind::kTable: {
      require(!table.empty(), "DelayModel: empty table");
      double mass = 0.0;
      for (const auto& [lag, prob] : table) {
        require(lag >= 0, "DelayModel: negative lag in table");
        require(unit_interval(prob), "DelayModel: table prob outside [0,1]");
        mass += prob;
      }
      require(std::abs(mass - 1.0) <= 1e-9, "DelayModel: table mass != 1");
      return;
    }
  }
  throw std::invalid_argument("DelayModel: unknown kind");
}

double DelayModel::mean_delay() const {
  switch (kind) {
    case Kind::kConstant:
      return double(constant_lag);
    case Kind::kGeometric:
      return (1.0 - geometric_rate) / geometric_rate;
    case Kind::kTable: {
      double m = 0.0;
      for (const auto& [lag, prob] : table) m += double(lag) * prob;
      return m;
    }
  }
  return 0.0;
}

DelayModel DelayModel::constant(int64_t lag) {
  DelayModel m;
  m.kind = Kind::kConstant;
  m.constant_lag = lag;
  m.validate();
  return m;
}

DelayModel DelayModel::geometric(double rate) {
  DelayModel m;
  m.kind = Kind::kGeometric;
  m.geometric_rate = rate;
  m.validate();
  return m;
}

DelayModel DelayModel::from_table(
    std::vector<std::pair<int64_t, double>> entries) {
  DelayModel m;
  m.kind = Kind::kTable;
  m.table = std::move(entries);
  m.validate();
  return m;
}

void IssuerProfile::validate() const {
  require(unit_interval(gamma), "IssuerProfile: gamma outside [0,1]");
  require(unit_interval(volume_share),
          "IssuerProfile: volume share outside [0,1]");
  channel.validate();
  delay.validate();
}

double expected_loss(int cell, ActionKind action, double fraud_prob,
                     const LossSpec& losses) {
  if (cell < 0 || cell >= losses.num_cells())
    throw std::domain_error("expected_loss: cell index out of range");
  const auto c = size_t(cell);
  switch (action) {
    case ActionKind::kApprove:
      return fraud_prob * losses.fn_loss[c];
    case ActionKind::kChallenge:
      return losses.ch_loss[c];
    case ActionKind::kDecline:
      return (1.0 - fraud_prob) * losses.fp_loss[c];
  }
  throw std::domain_error("expected_loss: unknown action");
}

int corrupt_label(const CorruptionChannel& channel, int latent,
                  RngStream& rng) {
  const double flip = latent == 1 ? channel.eps10 : channel.eps01;
  const int other = latent == 1 ? 0 : 1;
  return rng.bernoulli(flip) ? other : latent;
}

double signal_strength(const CorruptionChannel& channel) {
  return 1.0 - channel.eps10 - channel.eps01;
}

double debias_label(const CorruptionChannel& channel, int observed) {
  const double s = signal_strength(channel);
  if (s <= 0.0) throw std::domain_error("debias_label: degenerate channel");
  return (double(observed) - channel.eps01) / s;
}

int64_t sample_delay(const DelayModel& model, RngStream& rng) {
  switch (model.kind) {
    case DelayModel::Kind::kConstant:
      return model.constant_lag;
    case DelayModel::Kind::kGeometric: {
      if (model.geometric_rate >= 1.0) return 0;
      // Failures before the first success, by inversion.
      const double u = rng.uniform01();
      return int64_t(std::log1p(-u) / std::log1p(-model.geometric_rate));
    }
    case DelayModel::Kind::kTable: {
      const double u = rng.uniform01();
      double acc = 0.0;
      for (const auto& [lag, prob] : model.table) {
        acc += prob;
        if (u < acc) return lag;
      }
      return model.table.back().first;
    }
  }
  throw std::domain_error("sample_delay: unknown kind");
}

double maturity_prob(const DelayModel& model, int64_t window) {
  if (window < 0) throw std::domain_error("maturity_prob: negative window");
  switch (model.kind) {
    case DelayModel::Kind::kConstant:
      return model.constant_lag <= window ? 1.0 : 0.0;
    case DelayModel::Kind::kGeometric: {
      if (model.geometric_rate >= 1.0) return 1.0;
      return 1.0 - std::pow(1.0 - model.geometric_rate, double(window + 1));
    }
    case DelayModel::Kind::kTable: {
      double mass = 0.0;
      for (const auto& [lag, prob] : model.table)
        if (lag <= window) mass += prob;
      return std::min(mass, 1.0);
    }
  }
  throw std::domain_error("maturity_prob: unknown kind");
}

bool censor(double gamma, RngStream& rng) {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw std::domain_error("censor: gamma outside [0,1]");
  return rng.bernoulli(gamma);
}

bool observation_gate(ActionKind action, bool censored, int64_t delay,
                      int64_t rounds_remaining) {
  if (delay < 0 || rounds_remaining < 0)
    throw std::domain_error("observation_gate: negative argument");
  return action != ActionKind::kDecline && !censored &&
         delay <= rounds_remaining;
}

}  // namespace ifl
