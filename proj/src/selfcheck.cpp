#include "ifl/selfcheck.hpp"

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "ifl/analysis.hpp"
#include "ifl/environment.hpp"
#include "ifl/kernels.hpp"
#include "ifl/rng.hpp"

namespace ifl {

namespace {

constexpr uint64_t kSeed = 0x5e1fc4ecull;
constexpr uint32_t kTag = uint32_t(Draw::kTestBase) + 1;

bool check_kernel_equivalence(std::string& detail) {
  const auto variants = kernels::available();
  const auto& ref = kernels::scalar();

  std::vector<uint64_t> ref_words(2048);
  ref.philox_bulk(7, 11, 13, 17, (uint64_t(1) << 32) - 100, ref_words);

  std::vector<double> logw(257);
  RngStream rng(kSeed, 0, kTag);
  for (double& w : logw) w = -40.0 * rng.uniform01();

  for (const auto* variant : variants) {
    std::vector<uint64_t> words(ref_words.size());
    variant->philox_bulk(7, 11, 13, 17, (uint64_t(1) << 32) - 100, words);
    if (words != ref_words) {
      detail = std::string("philox mismatch in ") + variant->name;
      return false;
    }
    std::vector<double> probs_ref(logw.size()), probs(logw.size());
    ref.exp_normalize(logw, probs_ref);
    variant->exp_normalize(logw, probs);
    for (size_t i = 0; i < logw.size(); ++i)
      if (std::abs(probs[i] - probs_ref[i]) > 1e-13) {
        detail = std::string("exp_normalize mismatch in ") + variant->name;
        return false;
      }
  }
  detail = "active=" + std::string(kernels::active().name);
  return true;
}

bool check_channel_fidelity(std::string& detail) {
  const int n = 20000;
  const double tol = 4.0 / std::sqrt(double(n));
  int check = 0;
  for (const auto& [e10, e01] : {std::pair{0.2, 0.1}, {0.05, 0.4}, {0.0, 0.0}}) {
    const CorruptionChannel channel{e10, e01};
    for (int latent : {0, 1}) {
      int flips = 0;
      for (int i = 0; i < n; ++i) {
        RngStream rng(kSeed, uint64_t(i), kTag + 1 + uint32_t(check));
        flips += corrupt_label(channel, latent, rng) != latent ? 1 : 0;
      }
      const double expect = latent == 1 ? e10 : e01;
      if (std::abs(double(flips) / n - expect) > tol) {
        detail = "flip frequency off at latent=" + std::to_string(latent);
        return false;
      }
      ++check;
    }
  }
  return true;
}

bool check_debias_unbiased(std::string& detail) {
  const int n = 20000;
  for (const auto& [e10, e01] : {std::pair{0.2, 0.1}, {0.35, 0.3}}) {
    const CorruptionChannel channel{e10, e01};
    for (int latent : {0, 1}) {
      double sum = 0.0;
      for (int i = 0; i < n; ++i) {
        RngStream rng(kSeed, uint64_t(i), kTag + 10 + uint32_t(latent));
        sum += debias_label(channel, corrupt_label(channel, latent, rng));
      }
      const double mu = latent == 1 ? 1.0 - e10 : e01;
      const double sd = std::sqrt(mu * (1.0 - mu)) / signal_strength(channel);
      if (std::abs(sum / n - latent) > 4.0 * sd / std::sqrt(double(n))) {
        detail = "debias mean off at latent=" + std::to_string(latent);
        return false;
      }
    }
  }
  return true;
}

bool check_maturity_monotone(std::string& detail) {
  RngStream rng(kSeed, 1, kTag + 20);
  for (int model_i = 0; model_i < 10; ++model_i) {
    DelayModel model;
    switch (model_i % 3) {
      case 0:
        model = DelayModel::constant(int64_t(rng.below(40)));
        break;
      case 1:
        model = DelayModel::geometric(0.02 + 0.9 * rng.uniform01());
        break;
      default: {
        const double a = rng.uniform01(), b = rng.uniform01();
        const double total = a + b + 0.1;
        model = DelayModel::from_table({{int64_t(rng.below(10)), a / total},
                                        {int64_t(10 + rng.below(30)), b / total},
                                        {int64_t(50), 0.1 / total}});
        break;
      }
    }
    double prev = -1.0;
    for (int64_t window = 0; window < 50; ++window) {
      const double m = maturity_prob(model, window);
      if (m + 1e-12 < prev) {
        detail = "maturity decreased at window " + std::to_string(window);
        return false;
      }
      prev = m;
    }
  }
  return true;
}

bool check_packing_soundness(std::string& detail) {
  EnvironmentSpec base;
  base.fraud_prob = {0.3, 0.3, 0.3, 0.3};
  base.cell_weights = {0.25, 0.25, 0.25, 0.25};
  base.issuer_of_cell = {0, 0, 0, 0};
  base.losses = LossSpec::uniform(4);
  base.network = {IssuerProfile{}};
  const PackingFamily family = build_packing_family(8, 0.05, base);
  for (size_t j = 0; j < family.environments.size(); ++j) {
    const auto& env = family.environments[j];
    const double own = analytic_policy_loss(env, family.policies.policies[j]);
    for (size_t k = 0; k < family.policies.policies.size(); ++k) {
      if (k == j) continue;
      const double other =
          analytic_policy_loss(env, family.policies.policies[k]);
      if (other < own + family.gap - 1e-12) {
        detail = "margin violated at (env " + std::to_string(j) + ", policy " +
                 std::to_string(k) + ")";
        return false;
      }
    }
  }
  return true;
}

bool check_floor_identities(std::string& detail) {
  FloorParams p;
  p.T = 10000;
  p.log_N = std::log(16.0);
  const double base = regret_floor(p);
  FloorParams imp = p;
  imp.gamma_bar = 0.75;
  if (std::abs(regret_floor(imp) / base - 2.0) > 1e-12) {
    detail = "censorship multiplicativity violated";
    return false;
  }
  imp = p;
  imp.m_bar = 0.25;
  if (std::abs(regret_floor_with_maturity(imp) / base - 2.0) > 1e-12) {
    detail = "maturity variant scaling violated";
    return false;
  }
  double prev = 0.0;
  for (double g : {0.0, 0.2, 0.4, 0.6, 0.8}) {
    FloorParams q = p;
    q.gamma_bar = g;
    const double v = regret_floor(q);
    if (v < prev) {
      detail = "floor not monotone in gamma";
      return false;
    }
    prev = v;
  }
  return true;
}

bool check_convexity(std::string& detail) {
  RngStream rng(kSeed, 2, kTag + 30);
  for (int rep = 0; rep < 200; ++rep) {
    const size_t n = 2 + rng.below(5);
    std::vector<double> q(n), w(n);
    double wsum = 0.0;
    for (size_t i = 0; i < n; ++i) {
      q[i] = 0.05 + 0.95 * rng.uniform01();
      w[i] = 0.05 + rng.uniform01();
      wsum += w[i];
    }
    for (double& x : w) x /= wsum;
    if (jensen_gap(q, w).gap < -1e-12) {
      detail = "negative Jensen gap";
      return false;
    }
    std::vector<IssuerSummary> issuers(n);
    for (size_t i = 0; i < n; ++i)
      issuers[i] = IssuerSummary{w[i], 0.9 * rng.uniform01(),
                                 0.9 * rng.uniform01(), 0.9 * rng.uniform01()};
    if (variance_penalty(issuers) < -1e-12) {
      detail = "negative variance penalty";
      return false;
    }
  }
  return true;
}

bool check_gate_decomposition(std::string& detail) {
  for (int a = 0; a < kNumActions; ++a)
    for (int censored = 0; censored < 2; ++censored)
      for (int64_t delay : {0, 1, 5, 11})
        for (int64_t remaining : {0, 1, 10}) {
          const bool open = observation_gate(ActionKind(a), censored != 0,
                                             delay, remaining);
          const bool expect = ActionKind(a) != ActionKind::kDecline &&
                              censored == 0 && delay <= remaining;
          if (open != expect) {
            detail = "gate conjunction mismatch";
            return false;
          }
        }
  return true;
}

}  // namespace

int run_selfcheck(std::ostream& out) {
  struct Check {
    const char* name;
    bool (*fn)(std::string&);
  };
  const Check checks[] = {
      {"kernel-equivalence", check_kernel_equivalence},
      {"channel-fidelity", check_channel_fidelity},
      {"debias-unbiased", check_debias_unbiased},
      {"maturity-monotone", check_maturity_monotone},
      {"packing-soundness", check_packing_soundness},
      {"floor-identities", check_floor_identities},
      {"convexity", check_convexity},
      {"gate-decomposition", check_gate_decomposition},
  };
  int failures = 0;
  for (const auto& check : checks) {
    std::string detail;
    bool ok = false;
    try {
      ok = check.fn(detail);
    } catch (const std::exception& e) {
      detail = e.what();
    }
    out << "selfcheck " << check.name << ": " << (ok ? "ok" : "FAIL");
    if (!detail.empty()) out << " (" << detail << ")";
    out << '\n';
    failures += ok ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace ifl
