#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "ifl/analysis.hpp"
#include "ifl/errors.hpp"
#include "ifl/rng.hpp"

using namespace ifl;

// Local arithmetic oracles, composed differently from the implementation
// (long double, numerator and denominator assembled separately).
namespace oracle {

long double floor_value(const FloorParams& p) {
  const long double numerator =
      (long double)(p.K) * (long double)(p.T) + (long double)p.D;
  const long double s = 1.0L - (long double)p.eps10 - (long double)p.eps01;
  long double denom = (1.0L - (long double)p.gamma_bar);
  denom *= (1.0L - (long double)p.delta_bar);
  denom *= s * s;
  return (long double)p.c * sqrtl(numerator * (long double)p.log_N / denom);
}

long double floor_with_maturity(const FloorParams& p) {
  return floor_value(p) / sqrtl((long double)*p.m_bar);
}

long double eta(long double g, long double d, long double e) {
  return 1.0L / ((1.0L - g) * (1.0L - d) * (1.0L - e) * (1.0L - e));
}

}  // namespace oracle

namespace {

FloorParams random_params(RngStream& rng, bool with_m = false) {
  FloorParams p;
  p.K = 2 + int(rng.below(4));
  p.T = 100 + int64_t(rng.below(100000));
  p.D = double(rng.below(1000000));
  p.log_N = 0.5 + 6.0 * rng.uniform01();
  p.gamma_bar = 0.95 * rng.uniform01();
  p.delta_bar = 0.95 * rng.uniform01();
  p.eps10 = 0.5 * rng.uniform01();
  p.eps01 = (0.99 - p.eps10) * rng.uniform01() * 0.9;
  if (with_m) p.m_bar = 0.05 + 0.95 * rng.uniform01();
  p.c = 0.25 + 2.0 * rng.uniform01();
  return p;
}

constexpr uint32_t kTag = uint32_t(Draw::kTestBase) + 400;

}  // namespace

TEST_CASE("regret_floor reproduces the worked values") {
  FloorParams p;
  p.K = 3;
  p.T = 10000;
  p.D = 0.0;
  p.log_N = std::log(16.0);
  // sqrt(30000 * ln 16), frozen from the independent oracle.
  CHECK(regret_floor(p) ==
        doctest::Approx(288.40537732017657).epsilon(1e-12));

  FloorParams censored = p;
  censored.gamma_bar = 0.75;
  CHECK(censored.gamma_bar == 0.75);
  CHECK(regret_floor(censored) / regret_floor(p) ==
        doctest::Approx(2.0).epsilon(1e-12));

  FloorParams delayed = p;
  delayed.D = 30000.0;
  CHECK(regret_floor(delayed) / regret_floor(p) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("regret_floor matches the oracle on random parameters") {
  RngStream rng(1, 0, kTag);
  for (int rep = 0; rep < 100; ++rep) {
    const FloorParams p = random_params(rng);
    const double expect = double(oracle::floor_value(p));
    CHECK(regret_floor(p) == doctest::Approx(expect).epsilon(1e-9));
  }
  FloorParams degenerate;
  degenerate.gamma_bar = 0.5;
  degenerate.eps10 = 0.6;
  degenerate.eps01 = 0.5;
  CHECK_THROWS_AS(regret_floor(degenerate), std::domain_error);
}

TEST_CASE("maturity-explicit floor variant") {
  FloorParams p;
  p.T = 10000;
  p.log_N = std::log(16.0);
  p.m_bar = 1.0;
  CHECK(regret_floor_with_maturity(p) == regret_floor(p));  // bit-for-bit

  p.m_bar = 0.25;
  CHECK(regret_floor_with_maturity(p) / regret_floor(p) ==
        doctest::Approx(2.0).epsilon(1e-12));

  FloorParams worked;
  worked.K = 3;
  worked.T = 10000;
  worked.D = 1000.0;
  worked.log_N = std::log(8.0);
  worked.gamma_bar = 0.2;
  worked.delta_bar = 0.1;
  worked.eps10 = 0.2;
  worked.eps01 = 0.1;
  worked.m_bar = 0.8;
  CHECK(regret_floor_with_maturity(worked) ==
        doctest::Approx(double(oracle::floor_with_maturity(worked)))
            .epsilon(1e-9));

  FloorParams missing;
  missing.T = 100;
  CHECK_THROWS_AS(regret_floor_with_maturity(missing), ConfigError);

  RngStream rng(2, 0, kTag + 1);
  for (int rep = 0; rep < 100; ++rep) {
    const FloorParams q = random_params(rng, true);
    CHECK(regret_floor_with_maturity(q) ==
          doctest::Approx(double(oracle::floor_with_maturity(q))).epsilon(1e-9));
  }
}

TEST_CASE("observable fractions: first power vs squared corruption term") {
  CHECK(average_q(0, 0, 1, 0, 0) == 1.0);
  CHECK(average_q(0.2, 0.1, 0.8, 0.2, 0.1) ==
        doctest::Approx(0.4032).epsilon(1e-12));
  CHECK(average_q(1.0, 0.3, 0.9, 0.2, 0.1) == 0.0);

  CHECK(conditional_q(1, 0, 0, 0) == 1.0);
  CHECK(conditional_q(0.8, 0.2, 0.1, 0.3) ==
        doctest::Approx(0.28224).epsilon(1e-12));
  CHECK(conditional_q(0.0, 0.5, 0.5, 0.5) == 0.0);

  // The two forms deliberately differ in the corruption exponent.
  const double s = 1.0 - 0.2 - 0.1;
  CHECK(conditional_q(0.8, 0.2, 0.1, 0.3) / average_q(0.2, 0.1, 0.8, 0.2, 0.1) ==
        doctest::Approx(s).epsilon(1e-12));
}

TEST_CASE("jensen_gap values and nonnegativity") {
  {
    const auto jg = jensen_gap({0.5, 0.5}, {0.5, 0.5});
    CHECK(jg.mean_inverse == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(jg.inverse_mean == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(std::abs(jg.gap) <= 1e-12);
  }
  {
    const auto jg = jensen_gap({0.1, 0.9}, {0.5, 0.5});
    CHECK(jg.mean_inverse == doctest::Approx((10.0 + 1.0 / 0.9) / 2).epsilon(1e-12));
    CHECK(jg.inverse_mean == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(jg.gap == doctest::Approx(3.5555555555555554).epsilon(1e-9));
  }
  CHECK(std::abs(jensen_gap({0.3}, {1.0}).gap) <= 1e-12);
  CHECK_THROWS_AS(jensen_gap({0.0, 0.5}, {0.5, 0.5}), std::domain_error);

  RngStream rng(3, 0, kTag + 2);
  for (int rep = 0; rep < 1000; ++rep) {
    const size_t n = 1 + rng.below(6);
    std::vector<double> q(n), w(n);
    double wsum = 0.0;
    for (size_t i = 0; i < n; ++i) {
      q[i] = 0.01 + 0.99 * rng.uniform01();
      w[i] = 0.01 + rng.uniform01();
      wsum += w[i];
    }
    for (double& x : w) x /= wsum;
    CHECK(jensen_gap(q, w).gap >= -1e-12);
  }
}

TEST_CASE("impairment_index worked values") {
  CHECK(impairment_index(0, 0, 0) == 1.0);
  CHECK(impairment_index(0.5, 0.5, 0.5) ==
        doctest::Approx(16.0).epsilon(1e-12));
  CHECK(impairment_index(0.9, 0, 0) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK_THROWS_AS(impairment_index(1.0, 0, 0), std::domain_error);
}

TEST_CASE("hetero_floor composition") {
  FloorParams base;
  base.K = 3;
  base.T = 10000;
  base.log_N = std::log(16.0);
  const double unimpaired = regret_floor(base);

  {
    const std::vector<IssuerSummary> one = {IssuerSummary{1.0, 0, 0, 0}};
    CHECK(hetero_floor(one, 3, 10000, 0.0, std::log(16.0), 1.0) ==
          doctest::Approx(unimpaired).epsilon(1e-12));
  }
  {
    const std::vector<IssuerSummary> two = {IssuerSummary{0.5, 0, 0, 0},
                                            IssuerSummary{0.5, 0.5, 0.5, 0.5}};
    CHECK(hetero_floor(two, 3, 10000, 0.0, std::log(16.0), 1.0) ==
          doctest::Approx(std::sqrt(8.5) * unimpaired).epsilon(1e-12));
  }
  {
    RngStream rng(4, 0, kTag + 3);
    std::vector<IssuerSummary> many(10);
    double rest = 1.0;
    for (size_t i = 0; i < many.size(); ++i) {
      const double share = i + 1 == many.size() ? rest : rest * 0.3;
      rest -= i + 1 == many.size() ? 0.0 : share;
      many[i] = IssuerSummary{share, 0.9 * rng.uniform01(),
                              0.9 * rng.uniform01(), 0.9 * rng.uniform01()};
    }
    long double weighted = 0.0L;
    for (const auto& issuer : many)
      weighted += (long double)issuer.alpha *
                  oracle::eta(issuer.gamma, issuer.delta, issuer.eps_sum);
    const long double expect =
        sqrtl((3.0L * 10000.0L + 0.0L) * (long double)std::log(16.0) * weighted);
    CHECK(hetero_floor(many, 3, 10000, 0.0, std::log(16.0), 1.0) ==
          doctest::Approx(double(expect)).epsilon(1e-12));
  }
  const std::vector<IssuerSummary> bad = {IssuerSummary{0.6, 0, 0, 0},
                                          IssuerSummary{0.5, 0, 0, 0}};
  CHECK_THROWS_AS(hetero_floor(bad, 3, 100, 0.0, 1.0, 1.0), ConfigError);
}

TEST_CASE("variance_penalty convexity") {
  {
    const std::vector<IssuerSummary> same = {IssuerSummary{0.4, 0.3, 0.2, 0.1},
                                             IssuerSummary{0.6, 0.3, 0.2, 0.1}};
    CHECK(std::abs(variance_penalty(same)) <= 1e-12);
  }
  {
    const std::vector<IssuerSummary> pair = {IssuerSummary{0.5, 0, 0, 0},
                                             IssuerSummary{0.5, 0.5, 0.5, 0.5}};
    // 8.5 - eta(0.25, 0.25, 0.25), frozen from the oracle.
    CHECK(variance_penalty(pair) ==
          doctest::Approx(5.339506172839506).epsilon(1e-12));
  }
  RngStream rng(5, 0, kTag + 4);
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<IssuerSummary> pair(2);
    const double split = rng.uniform01();
    pair[0] = IssuerSummary{split, 0.9 * rng.uniform01(),
                            0.9 * rng.uniform01(), 0.9 * rng.uniform01()};
    pair[1] = IssuerSummary{1.0 - split, 0.9 * rng.uniform01(),
                            0.9 * rng.uniform01(), 0.9 * rng.uniform01()};
    CHECK(variance_penalty(pair) >= -1e-12);
  }
}

TEST_CASE("marginal sensitivities: closed forms, dominance, boundaries") {
  FloorParams p;
  p.K = 3;
  p.T = 10000;
  p.log_N = 4.0;
  p.gamma_bar = 0.5;
  p.delta_bar = 0.1;
  p.eps10 = 0.05;
  p.eps01 = 0.05;
  const double L = regret_floor(p);
  const auto sens = marginal_sensitivities(p);
  REQUIRE(sens.size() == 4);

  for (const auto& s : sens) {
    CHECK(std::abs(s.partial - s.finite_difference) <=
          1e-4 * std::abs(s.partial));
    if (s.parameter == "log_N")
      CHECK(s.partial == doctest::Approx(L / 8.0).epsilon(1e-12));
    if (s.parameter == "gamma_bar")
      CHECK(s.partial == doctest::Approx(L).epsilon(1e-12));
  }

  // Information-quality dominance at the unimpaired point with log_N = 4:
  // d/d gamma = L/2 exceeds d/d log_N = L/8.
  FloorParams unimpaired;
  unimpaired.K = 3;
  unimpaired.T = 10000;
  unimpaired.log_N = 4.0;
  unimpaired.gamma_bar = 1e-3;
  unimpaired.delta_bar = 1e-3;
  unimpaired.eps10 = 1e-3;
  unimpaired.eps01 = 1e-3;
  double d_gamma = 0.0, d_logn = 0.0;
  for (const auto& s : marginal_sensitivities(unimpaired)) {
    if (s.parameter == "gamma_bar") d_gamma = s.partial;
    if (s.parameter == "log_N") d_logn = s.partial;
  }
  CHECK(d_gamma > d_logn);

  FloorParams boundary = p;
  boundary.gamma_bar = 0.0;
  CHECK_THROWS_AS(marginal_sensitivities(boundary), std::domain_error);

  RngStream rng(6, 0, kTag + 5);
  for (int rep = 0; rep < 100; ++rep) {
    FloorParams q = random_params(rng);
    q.gamma_bar = std::max(q.gamma_bar, 1e-3);
    q.delta_bar = std::max(q.delta_bar, 1e-3);
    q.eps10 = std::max(q.eps10, 1e-3);
    for (const auto& s : marginal_sensitivities(q))
      CHECK(std::abs(s.partial - s.finite_difference) <=
            1e-4 * std::max(std::abs(s.partial), 1e-12));
  }
}

TEST_CASE("slow_region_floor reductions and scaling") {
  SlowRegionSummary whole;
  whole.cells = 1;
  whole.T_slow = 10000;
  whole.m_slow = 1.0;
  FloorParams p;
  p.T = 10000;
  p.log_N = std::log(16.0);
  p.m_bar = 1.0;
  CHECK(slow_region_floor(whole, std::log(16.0), 1.0) ==
        doctest::Approx(regret_floor_with_maturity(p)).epsilon(1e-12));

  SlowRegionSummary slow = whole;
  slow.m_slow = 0.01;
  CHECK(slow_region_floor(slow, std::log(16.0), 1.0) /
            slow_region_floor(whole, std::log(16.0), 1.0) ==
        doctest::Approx(10.0).epsilon(1e-12));

  SlowRegionSummary worked;
  worked.cells = 5;
  worked.T_slow = 4000;
  worked.D_slow = 1200.0;
  worked.m_slow = 0.2;
  worked.gamma = 0.3;
  worked.delta = 0.25;
  worked.eps_sum = 0.4;
  const long double numerator =
      5.0L * (3.0L * 4000.0L + 1200.0L) * (long double)std::log(32.0);
  const long double denominator = 0.2L * 0.7L * 0.75L * 0.6L * 0.6L;
  CHECK(slow_region_floor(worked, std::log(32.0), 1.0) ==
        doctest::Approx(double(sqrtl(numerator / denominator))).epsilon(1e-9));

  SlowRegionSummary zero = whole;
  zero.m_slow = 0.0;
  CHECK_THROWS_AS(slow_region_floor(zero, 1.0, 1.0), std::domain_error);
}

TEST_CASE("tv_attenuation identity") {
  {
    const auto tv = tv_attenuation(0.9, 0.1, CorruptionChannel{});
    CHECK(tv.clean_tv == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(tv.corrupted_tv == doctest::Approx(0.8).epsilon(1e-15));
  }
  {
    const auto tv = tv_attenuation(0.9, 0.1, CorruptionChannel{0.2, 0.1});
    CHECK(tv.clean_tv == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(tv.corrupted_tv == doctest::Approx(0.56).epsilon(1e-12));
    // Exhaustive two-outcome enumeration of the post-channel laws.
    const double law_p = 0.9 * 0.8 + 0.1 * 0.1;
    const double law_q = 0.1 * 0.8 + 0.9 * 0.1;
    const double enumerated =
        0.5 * (std::abs(law_p - law_q) +
               std::abs((1.0 - law_p) - (1.0 - law_q)));
    CHECK(tv.corrupted_tv == doctest::Approx(enumerated).epsilon(1e-12));
  }
  const auto same = tv_attenuation(0.42, 0.42, CorruptionChannel{0.3, 0.2});
  CHECK(same.clean_tv == 0.0);
  CHECK(same.corrupted_tv == 0.0);

  RngStream rng(7, 0, kTag + 6);
  for (int rep = 0; rep < 1000; ++rep) {
    const double p = rng.uniform01(), q = rng.uniform01();
    const double e10 = 0.5 * rng.uniform01();
    const double e01 = (0.99 - e10) * rng.uniform01();
    const CorruptionChannel channel{e10, e01};
    const auto tv = tv_attenuation(p, q, channel);
    CHECK(std::abs(tv.corrupted_tv - signal_strength(channel) * tv.clean_tv) <=
          1e-15);
  }
}

TEST_CASE("floor monotonicity and multiplicativity") {
  FloorParams base;
  base.K = 3;
  base.T = 10000;
  base.D = 500.0;
  base.log_N = 2.0;
  base.gamma_bar = 0.1;
  base.delta_bar = 0.1;
  base.eps10 = 0.05;
  base.eps01 = 0.05;

  auto check_axis = [&](auto&& set_axis, std::vector<double> values) {
    double prev = 0.0;
    for (double v : values) {
      FloorParams p = base;
      set_axis(p, v);
      const double floor = regret_floor(p);
      CHECK(floor >= prev - 1e-12);
      prev = floor;
    }
  };
  check_axis([](FloorParams& p, double v) { p.T = int64_t(v); },
             {1000, 5000, 10000, 50000, 100000});
  check_axis([](FloorParams& p, double v) { p.D = v; },
             {0, 1000, 10000, 100000, 1000000});
  check_axis([](FloorParams& p, double v) { p.log_N = v; },
             {0.5, 1, 2, 4, 8});
  check_axis([](FloorParams& p, double v) { p.gamma_bar = v; },
             {0, 0.2, 0.4, 0.6, 0.8});
  check_axis([](FloorParams& p, double v) { p.delta_bar = v; },
             {0, 0.2, 0.4, 0.6, 0.8});
  check_axis([](FloorParams& p, double v) { p.eps10 = v / 2; p.eps01 = v / 2; },
             {0, 0.2, 0.4, 0.6, 0.8});

  // The censorship and suppression factors enter multiplicatively.
  RngStream rng(8, 0, kTag + 7);
  for (int rep = 0; rep < 200; ++rep) {
    const double a = 0.95 * rng.uniform01();
    const double b = 0.95 * rng.uniform01();
    FloorParams clean;
    clean.T = 10000;
    clean.log_N = 3.0;
    FloorParams dirty = clean;
    dirty.gamma_bar = a;
    dirty.delta_bar = b;
    const double ratio = regret_floor(dirty) / regret_floor(clean);
    CHECK(ratio == doctest::Approx(1.0 / std::sqrt((1 - a) * (1 - b)))
                       .epsilon(1e-12));
  }
}

TEST_CASE("floor monotonicity holds on all pairwise axis combinations") {
  FloorParams base;
  base.K = 3;
  base.T = 10000;
  base.D = 500.0;
  base.log_N = 2.0;
  base.gamma_bar = 0.1;
  base.delta_bar = 0.1;
  base.eps10 = 0.05;
  base.eps01 = 0.05;

  using Setter = std::function<void(FloorParams&, double)>;
  const std::vector<std::pair<Setter, std::vector<double>>> axes = {
      {[](FloorParams& p, double v) { p.T = int64_t(v); },
       {1000, 5000, 20000, 50000, 100000}},
      {[](FloorParams& p, double v) { p.D = v; }, {0, 1e3, 1e4, 1e5, 1e6}},
      {[](FloorParams& p, double v) { p.log_N = v; }, {0.5, 1, 2, 4, 8}},
      {[](FloorParams& p, double v) { p.gamma_bar = v; },
       {0, 0.2, 0.4, 0.6, 0.8}},
      {[](FloorParams& p, double v) { p.delta_bar = v; },
       {0, 0.2, 0.4, 0.6, 0.8}},
      {[](FloorParams& p, double v) {
         p.eps10 = v / 2;
         p.eps01 = v / 2;
       },
       {0, 0.2, 0.4, 0.6, 0.8}},
  };

  for (size_t a = 0; a < axes.size(); ++a)
    for (size_t b = 0; b < axes.size(); ++b) {
      if (a == b) continue;
      for (double fixed : axes[b].second) {
        double prev = -1.0;
        for (double v : axes[a].second) {
          FloorParams p = base;
          axes[b].first(p, fixed);
          axes[a].first(p, v);
          const double floor = regret_floor(p);
          CHECK(floor >= prev - 1e-12);
          prev = floor;
        }
      }
    }
}

TEST_CASE("hetero_floor with one impaired issuer collapses to regret_floor") {
  RngStream rng(12, 0, kTag + 8);
  for (int rep = 0; rep < 20; ++rep) {
    const double gamma = 0.9 * rng.uniform01();
    const double delta = 0.9 * rng.uniform01();
    const double eps = 0.9 * rng.uniform01();
    FloorParams p;
    p.K = 3;
    p.T = 5000 + int64_t(rng.below(50000));
    p.D = double(rng.below(10000));
    p.log_N = 1.0 + 3.0 * rng.uniform01();
    p.gamma_bar = gamma;
    p.delta_bar = delta;
    p.eps10 = eps;
    p.eps01 = 0.0;
    const std::vector<IssuerSummary> one = {IssuerSummary{1.0, gamma, delta, eps}};
    const double collapsed = hetero_floor(one, p.K, p.T, p.D, p.log_N, p.c);
    const double direct = regret_floor(p);
    CHECK(std::abs(collapsed - direct) <= 1e-12 * direct);
  }
}
