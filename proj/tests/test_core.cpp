#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ifl/core.hpp"
#include "ifl/kernels.hpp"

using namespace ifl;

namespace {

constexpr uint32_t kTag = uint32_t(Draw::kTestBase) + 200;

// Monte Carlo flip frequency of the channel, independent of corrupt_label's
// internals: thresholded bulk uniforms.
double flip_frequency(const CorruptionChannel& channel, int latent, size_t n,
                      uint64_t seed) {
  std::vector<double> u(n);
  bulk_uniform01(seed, kTag + uint32_t(latent), 0, u);
  const double rate = latent == 1 ? channel.eps10 : channel.eps01;
  return double(kernels::active().count_below(u, rate)) / double(n);
}

}  // namespace

TEST_CASE("expected_loss matches the piecewise table in expectation") {
  const LossSpec losses = LossSpec::uniform(1);
  CHECK(expected_loss(0, ActionKind::kApprove, 1.0, losses) == 1.0);
  CHECK(expected_loss(0, ActionKind::kChallenge, 0.37, losses) == 0.2);
  // Frozen by a 1e6-draw Bernoulli average of the piecewise realized loss
  // (decline costs FP only when the transaction was clean): 0.300028 for
  // one sampler; the analytic value is (1-0.25)*0.4.
  CHECK(expected_loss(0, ActionKind::kDecline, 0.25, losses) ==
        doctest::Approx(0.3).epsilon(1e-12));
  CHECK_THROWS_AS(expected_loss(3, ActionKind::kApprove, 0.5, losses),
                  std::domain_error);
}

TEST_CASE("expected_loss stays in [0,1] for valid specs") {
  RngStream rng(99, 0, kTag + 10);
  for (int rep = 0; rep < 500; ++rep) {
    LossSpec losses;
    losses.fn_loss = {rng.uniform01()};
    losses.ch_loss = {rng.uniform01()};
    losses.fp_loss = {rng.uniform01()};
    const double p = rng.uniform01();
    for (int a = 0; a < kNumActions; ++a) {
      const double loss = expected_loss(0, ActionKind(a), p, losses);
      CHECK(loss >= 0.0);
      CHECK(loss <= 1.0);
    }
  }
}

TEST_CASE("corrupt_label realizes the class-conditional flip rates") {
  const CorruptionChannel identity{0.0, 0.0};
  for (int i = 0; i < 100; ++i) {
    RngStream rng(5, uint64_t(i), kTag + 20);
    CHECK(corrupt_label(identity, 1, rng) == 1);
  }

  const CorruptionChannel channel{0.2, 0.1};
  const size_t n = 100000;
  const double tol = 0.01;
  size_t flips1 = 0, flips0 = 0;
  for (size_t i = 0; i < n; ++i) {
    RngStream r1(17, i, kTag + 21);
    RngStream r0(17, i, kTag + 22);
    flips1 += corrupt_label(channel, 1, r1) == 0 ? 1 : 0;
    flips0 += corrupt_label(channel, 0, r0) == 1 ? 1 : 0;
  }
  CHECK(std::abs(double(flips1) / n - 0.2) < tol);
  CHECK(std::abs(double(flips0) / n - 0.1) < tol);
}

TEST_CASE("channel transition frequencies track (eps10, eps01) to 4/sqrt(N)") {
  const size_t n = 100000;
  const double tol = 4.0 / std::sqrt(double(n));
  RngStream pick(31, 0, kTag + 30);
  for (int rep = 0; rep < 5; ++rep) {
    const double e10 = 0.45 * pick.uniform01();
    const double e01 = 0.45 * pick.uniform01();
    const CorruptionChannel channel{e10, e01};
    CHECK(std::abs(flip_frequency(channel, 1, n, 900 + rep) - e10) < tol);
    CHECK(std::abs(flip_frequency(channel, 0, n, 950 + rep) - e01) < tol);
  }
}

TEST_CASE("signal_strength arithmetic") {
  CHECK(signal_strength({0.0, 0.0}) == 1.0);
  CHECK(signal_strength({0.2, 0.1}) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(signal_strength({0.49, 0.49}) ==
        doctest::Approx(0.02).epsilon(1e-12));
}

TEST_CASE("debias_label inverts the channel exactly in expectation") {
  CHECK(debias_label({0.0, 0.0}, 1) == 1.0);
  const CorruptionChannel channel{0.2, 0.1};
  CHECK(debias_label(channel, 1) ==
        doctest::Approx(0.9 / 0.7).epsilon(1e-15));
  CHECK(debias_label(channel, 0) ==
        doctest::Approx(-0.1 / 0.7).epsilon(1e-15));

  // E[debias(corrupt(y))] = y analytically for both labels.
  for (int y : {0, 1}) {
    const double mu = y == 1 ? 1.0 - channel.eps10 : channel.eps01;
    const double analytic =
        mu * debias_label(channel, 1) + (1.0 - mu) * debias_label(channel, 0);
    CHECK(analytic == doctest::Approx(double(y)).epsilon(1e-12));
  }

  // Monte Carlo means converge within 3 standard errors.
  const size_t n = 100000;
  for (int y : {0, 1}) {
    double sum = 0.0;
    for (size_t i = 0; i < n; ++i) {
      RngStream rng(71, i, kTag + 40 + uint32_t(y));
      sum += debias_label(channel, corrupt_label(channel, y, rng));
    }
    const double mu = y == 1 ? 1.0 - channel.eps10 : channel.eps01;
    const double sd = std::sqrt(mu * (1.0 - mu)) / signal_strength(channel);
    CHECK(std::abs(sum / double(n) - y) < 3.0 * sd / std::sqrt(double(n)));
  }

  CHECK_THROWS_AS(debias_label({0.5, 0.5}, 1), std::domain_error);
}

TEST_CASE("sample_delay per model kind") {
  {
    RngStream rng(3, 0, kTag + 50);
    CHECK(sample_delay(DelayModel::constant(0), rng) == 0);
  }
  {
    const auto table = DelayModel::from_table({{3, 1.0}});
    for (int i = 0; i < 20; ++i) {
      RngStream rng(3, uint64_t(i), kTag + 51);
      CHECK(sample_delay(table, rng) == 3);
    }
  }
  {
    // Geometric on {0,1,2,...} with rate 0.5 has mean 1.
    const auto geo = DelayModel::geometric(0.5);
    const size_t n = 100000;
    double sum = 0.0;
    for (size_t i = 0; i < n; ++i) {
      RngStream rng(3, i, kTag + 52);
      sum += double(sample_delay(geo, rng));
    }
    CHECK(std::abs(sum / double(n) - 1.0) < 0.05);
  }
}

TEST_CASE("maturity_prob closed forms") {
  CHECK(maturity_prob(DelayModel::constant(5), 4) == 0.0);
  CHECK(maturity_prob(DelayModel::constant(5), 5) == 1.0);
  CHECK(maturity_prob(DelayModel::geometric(0.5), 1) ==
        doctest::Approx(0.75).epsilon(1e-15));
  CHECK(maturity_prob(DelayModel::from_table({{0, 0.3}, {10, 0.7}}), 3) ==
        doctest::Approx(0.3).epsilon(1e-15));

  // Monte Carlo cross-check of the geometric closed form.
  const auto geo = DelayModel::geometric(0.5);
  const size_t n = 1000000;
  size_t within = 0;
  for (size_t i = 0; i < n; ++i) {
    RngStream rng(13, i, kTag + 60);
    within += sample_delay(geo, rng) <= 1 ? 1 : 0;
  }
  CHECK(std::abs(double(within) / double(n) - 0.75) < 4.0 / std::sqrt(double(n)));
}

TEST_CASE("maturity_prob is nondecreasing in the window") {
  RngStream pick(37, 0, kTag + 70);
  for (int rep = 0; rep < 50; ++rep) {
    DelayModel model;
    switch (rep % 3) {
      case 0:
        model = DelayModel::constant(int64_t(pick.below(60)));
        break;
      case 1:
        model = DelayModel::geometric(0.01 + 0.98 * pick.uniform01());
        break;
      default: {
        const double a = pick.uniform01(), b = pick.uniform01(),
                     c = pick.uniform01();
        const double total = a + b + c;
        model = DelayModel::from_table({{int64_t(pick.below(20)), a / total},
                                        {int64_t(pick.below(60)), b / total},
                                        {int64_t(60 + pick.below(60)), c / total}});
        break;
      }
    }
    double prev = -1.0;
    for (int64_t window = 0; window < 100; ++window) {
      const double m = maturity_prob(model, window);
      CHECK(m >= prev - 1e-15);
      prev = m;
    }
    CHECK(maturity_prob(model, 1 << 20) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("censor frequency") {
  for (int i = 0; i < 50; ++i) {
    RngStream rng0(7, uint64_t(i), kTag + 80);
    RngStream rng1(7, uint64_t(i), kTag + 81);
    CHECK(censor(0.0, rng0) == false);
    CHECK(censor(1.0, rng1) == true);
  }
  const size_t n = 100000;
  size_t hits = 0;
  for (size_t i = 0; i < n; ++i) {
    RngStream rng(7, i, kTag + 82);
    hits += censor(0.35, rng) ? 1 : 0;
  }
  CHECK(std::abs(double(hits) / double(n) - 0.35) < 0.01);
}

TEST_CASE("observation_gate is the conjunction of its three factors") {
  CHECK(observation_gate(ActionKind::kApprove, false, 0, 10));
  CHECK_FALSE(observation_gate(ActionKind::kDecline, false, 0, 10));
  CHECK_FALSE(observation_gate(ActionKind::kApprove, false, 11, 10));

  for (int a = 0; a < kNumActions; ++a)
    for (bool censored : {false, true})
      for (int64_t delay : {0, 1, 7, 10, 11})
        for (int64_t remaining : {0, 1, 10}) {
          const bool open =
              observation_gate(ActionKind(a), censored, delay, remaining);
          CHECK(open == (ActionKind(a) != ActionKind::kDecline && !censored &&
                         delay <= remaining));
        }
}

TEST_CASE("type invariants are enforced") {
  const CorruptionChannel degenerate{0.5, 0.5};
  const CorruptionChannel negative{-0.1, 0.0};
  CHECK_THROWS_AS(degenerate.validate(), std::invalid_argument);
  CHECK_THROWS_AS(negative.validate(), std::invalid_argument);
  CHECK_THROWS_AS(DelayModel::constant(-1), std::invalid_argument);
  CHECK_THROWS_AS(DelayModel::geometric(0.0), std::invalid_argument);
  CHECK_THROWS_AS(DelayModel::from_table({{0, 0.4}, {2, 0.4}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(LossSpec::uniform(2, 1.5), std::invalid_argument);
}
