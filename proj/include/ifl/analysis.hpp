#pragma once

// Exact evaluators for the closed-form quantities: regret floors, effective
// observation fractions, impairment indices, Jensen gaps, heterogeneity
// penalties, marginal sensitivities, and corruption attenuation. All pure.

#include <optional>
#include <string>
#include <vector>

#include "ifl/core.hpp"

namespace ifl {

struct FloorParams {
  int K = 3;
  int64_t T = 1;
  double D = 0.0;  // cumulative finite delay
  double log_N = 1.0;
  double gamma_bar = 0.0;
  double delta_bar = 0.0;
  double eps10 = 0.0;
  double eps01 = 0.0;
  std::optional<double> m_bar;  // average maturity, for the explicit variant
  double c = 1.0;               // universal-constant stand-in

  double eps_sum() const { return eps10 + eps01; }
  void validate() const;
};

struct IssuerSummary {
  double alpha = 1.0;  // volume share
  double gamma = 0.0;
  double delta = 0.0;
  double eps_sum = 0.0;
  void validate() const;
};

// c * sqrt((K*T + D) * log_N / ((1-g)(1-d)(1-e)^2)).
double regret_floor(const FloorParams& p);

// Variant with the average maturity m_bar inserted multiplicatively in the
// denominator; equals regret_floor when m_bar = 1.
double regret_floor_with_maturity(const FloorParams& p);

// Average effective observable fraction (1-g)(1-d) * m * (1-e); note the
// first power of the corruption term.
double average_q(double gamma_bar, double delta_bar, double m_bar,
                 double eps10, double eps01);

// Conditional effective observation probability m(1-g)(1-d)(1-e)^2; note
// the squared corruption term. The exponent mismatch with average_q is in
// the source material and is preserved, not reconciled.
double conditional_q(double m, double gamma, double delta, double eps_sum);

struct JensenGap {
  double mean_inverse;  // E[1/q]
  double inverse_mean;  // 1/E[q]
  double gap;           // >= 0, zero iff q constant
};

JensenGap jensen_gap(const std::vector<double>& q_values,
                     const std::vector<double>& weights);

// eta = 1/((1-g)(1-d)(1-e)^2).
double impairment_index(double gamma, double delta, double eps_sum);

// c' * sqrt((K*T + D) * log_N * sum_i alpha_i * eta_i).
double hetero_floor(const std::vector<IssuerSummary>& issuers, int K, int64_t T,
                    double D, double log_N, double c_prime);

// sum_i alpha_i*eta(params_i) - eta(share-weighted mean params); >= 0 by
// convexity of eta.
double variance_penalty(const std::vector<IssuerSummary>& issuers);

struct Sensitivity {
  std::string parameter;
  double partial;          // closed form
  double finite_difference;  // internal cross-check value
};

// Closed-form partials of regret_floor w.r.t. log_N, gamma_bar, delta_bar
// and eps_sum, each cross-checked against a central finite difference
// (step 1e-6, relative agreement 1e-4). Throws std::domain_error at
// parameter-domain boundaries.
std::vector<Sensitivity> marginal_sensitivities(const FloorParams& p);

struct SlowRegionSummary {
  int cells = 1;
  int K = 3;
  int64_t T_slow = 1;
  double D_slow = 0.0;
  double m_slow = 1.0;
  double gamma = 0.0;
  double delta = 0.0;
  double eps_sum = 0.0;
};

// c * sqrt(cells * (K*T_slow + D_slow) * log_N /
//          (m_slow (1-g)(1-d)(1-e)^2)).
double slow_region_floor(const SlowRegionSummary& slow, double log_N, double c);

struct TvAttenuation {
  double clean_tv;      // |p - q|
  double corrupted_tv;  // total variation after the channel = s|p - q|
};

TvAttenuation tv_attenuation(double p, double q,
                             const CorruptionChannel& channel);

}  // namespace ifl
