#include "ifl/analysis.hpp"

#include <cmath>
#include <stdexcept>

#include "ifl/errors.hpp"

namespace ifl {

namespace {

void domain_check(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}

double floor_at(int K, int64_t T, double D, double log_N, double gamma_bar,
                double delta_bar, double eps_sum, double c) {
  const double s = 1.0 - eps_sum;
  const double denom = (1.0 - gamma_bar) * (1.0 - delta_bar) * s * s;
  domain_check(denom > 0.0, "regret_floor: degenerate denominator");
  return c * std::sqrt((double(K) * double(T) + D) * log_N / denom);
}

}  // namespace

void FloorParams::validate() const {
  domain_check(K >= 1 && T >= 1, "FloorParams: K and T must be >= 1");
  domain_check(D >= 0.0, "FloorParams: negative D");
  domain_check(log_N > 0.0, "FloorParams: log_N must be positive");
  domain_check(gamma_bar >= 0.0 && gamma_bar < 1.0,
               "FloorParams: gamma_bar outside [0,1)");
  domain_check(delta_bar >= 0.0 && delta_bar < 1.0,
               "FloorParams: delta_bar outside [0,1)");
  domain_check(eps10 >= 0.0 && eps01 >= 0.0 && eps_sum() < 1.0,
               "FloorParams: corruption rates degenerate");
  domain_check(c > 0.0, "FloorParams: c must be positive");
  if (m_bar) domain_check(*m_bar > 0.0 && *m_bar <= 1.0,
                          "FloorParams: m_bar outside (0,1]");
}

double regret_floor(const FloorParams& p) {
  p.validate();
  return floor_at(p.K, p.T, p.D, p.log_N, p.gamma_bar, p.delta_bar,
                  p.eps_sum(), p.c);
}

double regret_floor_with_maturity(const FloorParams& p) {
  p.validate();
  if (!p.m_bar)
    throw ConfigError("regret_floor_with_maturity: m_bar not provided");
  const double s = 1.0 - p.eps_sum();
  const double denom =
      (1.0 - p.gamma_bar) * (1.0 - p.delta_bar) * *p.m_bar * s * s;
  domain_check(denom > 0.0, "regret_floor_with_maturity: degenerate");
  return p.c * std::sqrt((double(p.K) * double(p.T) + p.D) * p.log_N / denom);
}

double average_q(double gamma_bar, double delta_bar, double m_bar,
                 double eps10, double eps01) {
  return (1.0 - gamma_bar) * (1.0 - delta_bar) * m_bar *
         (1.0 - eps10 - eps01);
}

double conditional_q(double m, double gamma, double delta, double eps_sum) {
  domain_check(eps_sum < 1.0, "conditional_q: eps_sum >= 1");
  const double s = 1.0 - eps_sum;
  return m * (1.0 - gamma) * (1.0 - delta) * s * s;
}

JensenGap jensen_gap(const std::vector<double>& q_values,
                     const std::vector<double>& weights) {
  domain_check(!q_values.empty() && q_values.size() == weights.size(),
               "jensen_gap: size mismatch");
  double wsum = 0.0;
  for (double w : weights) wsum += w;
  domain_check(std::abs(wsum - 1.0) <= 1e-9, "jensen_gap: weights must sum to 1");
  double mean_inv = 0.0, mean = 0.0;
  for (size_t i = 0; i < q_values.size(); ++i) {
    domain_check(q_values[i] > 0.0 && q_values[i] <= 1.0,
                 "jensen_gap: q outside (0,1]");
    mean_inv += weights[i] / q_values[i];
    mean += weights[i] * q_values[i];
  }
  const double inv_mean = 1.0 / mean;
  return JensenGap{mean_inv, inv_mean, mean_inv - inv_mean};
}

void IssuerSummary::validate() const {
  domain_check(alpha >= 0.0 && alpha <= 1.0, "IssuerSummary: alpha outside [0,1]");
  domain_check(gamma >= 0.0 && gamma < 1.0, "IssuerSummary: gamma outside [0,1)");
  domain_check(delta >= 0.0 && delta < 1.0, "IssuerSummary: delta outside [0,1)");
  domain_check(eps_sum >= 0.0 && eps_sum < 1.0,
               "IssuerSummary: eps_sum outside [0,1)");
}

double impairment_index(double gamma, double delta, double eps_sum) {
  const double s = 1.0 - eps_sum;
  const double denom = (1.0 - gamma) * (1.0 - delta) * s * s;
  domain_check(denom > 0.0, "impairment_index: degenerate parameters");
  return 1.0 / denom;
}

namespace {

double share_sum_checked(const std::vector<IssuerSummary>& issuers) {
  if (issuers.empty()) throw ConfigError("issuer list is empty");
  double sum = 0.0;
  for (const auto& issuer : issuers) {
    issuer.validate();
    sum += issuer.alpha;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw ConfigError("issuer volume shares must sum to 1");
  return sum;
}

}  // namespace

double hetero_floor(const std::vector<IssuerSummary>& issuers, int K, int64_t T,
                    double D, double log_N, double c_prime) {
  share_sum_checked(issuers);
  double weighted_index = 0.0;
  for (const auto& issuer : issuers)
    weighted_index +=
        issuer.alpha * impairment_index(issuer.gamma, issuer.delta,
                                        issuer.eps_sum);
  return c_prime *
         std::sqrt((double(K) * double(T) + D) * log_N * weighted_index);
}

double variance_penalty(const std::vector<IssuerSummary>& issuers) {
  share_sum_checked(issuers);
  double weighted_index = 0.0, mean_gamma = 0.0, mean_delta = 0.0,
         mean_eps = 0.0;
  for (const auto& issuer : issuers) {
    weighted_index +=
        issuer.alpha * impairment_index(issuer.gamma, issuer.delta,
                                        issuer.eps_sum);
    mean_gamma += issuer.alpha * issuer.gamma;
    mean_delta += issuer.alpha * issuer.delta;
    mean_eps += issuer.alpha * issuer.eps_sum;
  }
  return weighted_index - impairment_index(mean_gamma, mean_delta, mean_eps);
}

std::vector<Sensitivity> marginal_sensitivities(const FloorParams& p) {
  const double L = regret_floor(p);
  const double step = 1e-6;
  domain_check(p.log_N > step && p.gamma_bar + step < 1.0 &&
                   p.delta_bar + step < 1.0 && p.eps_sum() + step < 1.0 &&
                   p.gamma_bar - step >= 0.0 && p.delta_bar - step >= 0.0 &&
                   p.eps10 - step >= 0.0,
               "marginal_sensitivities: parameters too close to the boundary");

  auto central = [&](auto&& bump) {
    FloorParams hi = p, lo = p;
    bump(hi, +step);
    bump(lo, -step);
    return (regret_floor(hi) - regret_floor(lo)) / (2.0 * step);
  };

  std::vector<Sensitivity> out;
  out.push_back({"log_N", L / (2.0 * p.log_N),
                 central([](FloorParams& q, double h) { q.log_N += h; })});
  out.push_back({"gamma_bar", L / (2.0 * (1.0 - p.gamma_bar)),
                 central([](FloorParams& q, double h) { q.gamma_bar += h; })});
  out.push_back({"delta_bar", L / (2.0 * (1.0 - p.delta_bar)),
                 central([](FloorParams& q, double h) { q.delta_bar += h; })});
  out.push_back({"eps_sum", L / (1.0 - p.eps_sum()),
                 central([](FloorParams& q, double h) { q.eps10 += h; })});

  for (const auto& s : out) {
    const double denom = std::max(std::abs(s.partial), 1e-300);
    if (std::abs(s.partial - s.finite_difference) / denom > 1e-4)
      throw std::logic_error(
          "marginal_sensitivities: closed form and finite difference differ");
  }
  return out;
}

double slow_region_floor(const SlowRegionSummary& slow, double log_N,
                         double c) {
  domain_check(slow.cells >= 1 && slow.K >= 1 && slow.T_slow >= 1 &&
                   slow.D_slow >= 0.0 && log_N > 0.0 && c > 0.0,
               "slow_region_floor: invalid region summary");
  domain_check(slow.m_slow > 0.0 && slow.m_slow <= 1.0,
               "slow_region_floor: m_slow outside (0,1]");
  const double s = 1.0 - slow.eps_sum;
  const double denom =
      slow.m_slow * (1.0 - slow.gamma) * (1.0 - slow.delta) * s * s;
  domain_check(denom > 0.0, "slow_region_floor: degenerate denominator");
  return c * std::sqrt(double(slow.cells) *
                       (double(slow.K) * double(slow.T_slow) + slow.D_slow) *
                       log_N / denom);
}

TvAttenuation tv_attenuation(double p, double q,
                             const CorruptionChannel& channel) {
  domain_check(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0,
               "tv_attenuation: probabilities outside [0,1]");
  channel.validate();
  // Post-channel Bernoulli mean is eps01 + s*p, so the two corrupted laws
  // differ in total variation by exactly s|p - q|.
  const double s = signal_strength(channel);
  const double mean_p = channel.eps01 + s * p;
  const double mean_q = channel.eps01 + s * q;
  return TvAttenuation{std::abs(p - q), std::abs(mean_p - mean_q)};
}

}  // namespace ifl
