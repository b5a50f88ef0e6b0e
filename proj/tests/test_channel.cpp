#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "latnc/channel.hpp"

using namespace latnc;

TEST_CASE("transmit_broadcast determinism and gains") {
  BroadcastChannel chan;
  chan.beta_a = 2.0;
  chan.beta_b = 0.5;
  chan.noise_var = 1e-20;
  Vector x(4);
  x << 1.0, -1.0, 0.5, 0.0;
  const auto [ya, yb] = transmit_broadcast(chan, x, 3);
  CHECK((ya - 2.0 * x).norm() < 1e-8);
  CHECK((yb - 0.5 * x).norm() < 1e-8);

  chan.noise_var = 1.0;
  const auto p1 = transmit_broadcast(chan, x, 7);
  const auto p2 = transmit_broadcast(chan, x, 7);
  CHECK((p1.first - p2.first).norm() == 0.0);
  CHECK((p1.second - p2.second).norm() == 0.0);

  Vector bad(1);
  bad[0] = std::nan("");
  CHECK_THROWS_AS(transmit_broadcast(chan, bad, 1), NonFinite);
}

TEST_CASE("noise statistics: variance and per-user independence") {
  BroadcastChannel chan;
  chan.noise_var = 2.25;
  const int n = 1000000;
  const Vector x = Vector::Zero(n);
  const auto [na, nb] = transmit_broadcast(chan, x, 99);
  const double va = na.squaredNorm() / n;
  const double vb = nb.squaredNorm() / n;
  CHECK(va == doctest::Approx(2.25).epsilon(0.01));
  CHECK(vb == doctest::Approx(2.25).epsilon(0.01));
  const double corr = na.dot(nb) / n / 2.25;
  CHECK(std::abs(corr) < 0.01);
}

TEST_CASE("complex noise variance convention") {
  BroadcastChannel chan;
  chan.noise_var = 0.8;
  chan.signal_kind = SignalKind::Complex;
  const ComplexVector x = ComplexVector::Zero(500000);
  const auto [na, nb] = transmit_broadcast(chan, x, 5);
  double total = 0.0, re = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    total += std::norm(na[i]);
    re += na[i].real() * na[i].real();
  }
  CHECK(total / x.size() == doctest::Approx(0.8).epsilon(0.01));
  CHECK(re / x.size() == doctest::Approx(0.4).epsilon(0.01));
}

TEST_CASE("snr_accounting") {
  const auto f = snr_accounting(1.0, 1.0, 1.0);
  CHECK(f.snr_linear == doctest::Approx(1.0));
  CHECK(f.snr_db == doctest::Approx(0.0));
  CHECK(f.capacity == doctest::Approx(0.5));
  const auto g = snr_accounting(1.0, 2.0, 1.0);
  CHECK(g.snr_linear == doctest::Approx(4.0));
  CHECK(g.snr_db == doctest::Approx(6.0206).epsilon(1e-4));
  // larger gain => larger capacity
  CHECK(snr_accounting(1.0, 1.5, 1.0).capacity >
        snr_accounting(1.0, 1.0, 1.0).capacity);
  CHECK_THROWS_AS(snr_accounting(0.0, 1.0, 1.0), NonPositiveInput);
  CHECK_THROWS_AS(snr_accounting(1.0, -1.0, 1.0), NonPositiveInput);
}

TEST_CASE("wilson_interval") {
  const auto [lo, hi] = wilson_interval(0, 100);
  CHECK(lo == 0.0);
  CHECK(hi > 0.0);
  const auto [l2, h2] = wilson_interval(50, 100);
  CHECK(l2 < 0.5);
  CHECK(h2 > 0.5);
  CHECK(l2 > 0.39);
  CHECK(h2 < 0.61);
}

TEST_CASE("run_monte_carlo basics") {
  auto zero = [](std::uint64_t) { return TrialOutcome{0, 10}; };
  const auto s0 = run_monte_carlo(zero, 50, 0, 1);
  CHECK(s0.rate_estimate == 0.0);
  CHECK(s0.ci95_low == 0.0);
  CHECK(s0.trials == 50);
  CHECK(s0.denominator == 500);

  auto half = [](std::uint64_t) { return TrialOutcome{1, 2}; };
  CHECK(run_monte_carlo(half, 40, 0, 1).rate_estimate == doctest::Approx(0.5));

  // determinism and thread-count independence, including the stop rule
  auto seeded = [](std::uint64_t seed) {
    return TrialOutcome{static_cast<std::int64_t>(seed % 3 == 0 ? 1 : 0), 4};
  };
  const auto a = run_monte_carlo(seeded, 500, 37, 10, 1);
  const auto b = run_monte_carlo(seeded, 500, 37, 10, 1);
  const auto c = run_monte_carlo(seeded, 500, 37, 10, 4);
  CHECK(a.errors == b.errors);
  CHECK(a.trials == b.trials);
  CHECK(a.errors == c.errors);
  CHECK(a.trials == c.trials);
  CHECK(a.denominator == c.denominator);
  CHECK(a.errors >= 37);
  CHECK(a.trials < 500);  // stop rule engaged

  CHECK(a.ci95_low <= a.rate_estimate);
  CHECK(a.rate_estimate <= a.ci95_high);
}

TEST_CASE("run_monte_carlo propagates failures with trial index") {
  auto boom = [](std::uint64_t seed) -> TrialOutcome {
    if (seed == 107) throw std::runtime_error("synthetic failure");
    return TrialOutcome{0, 1};
  };
  try {
    run_monte_carlo(boom, 100, 0, 100, 1);
    FAIL("expected an exception");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("trial 7") != std::string::npos);
    CHECK(msg.find("synthetic failure") != std::string::npos);
  }
  CHECK_THROWS_AS(run_monte_carlo([](std::uint64_t) { return TrialOutcome{}; },
                                  0, 0, 1),
                  NonPositiveInput);
}
