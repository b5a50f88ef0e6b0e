#include "latnc/channel.hpp"

#include <cmath>
#include <future>
#include <thread>
#include <vector>

namespace latnc {

Vector NoiseSource::gaussian(int n, double stddev) {
  Vector out(n);
  for (int i = 0; i < n; ++i) out[i] = stddev * normal_(rng_);
  return out;
}

ComplexVector NoiseSource::complex_gaussian(int n, double total_var) {
  const double s = std::sqrt(total_var / 2.0);
  ComplexVector out(n);
  for (int i = 0; i < n; ++i) {
    const double re = s * normal_(rng_);
    const double im = s * normal_(rng_);
    out[i] = {re, im};
  }
  return out;
}

std::pair<Vector, Vector> transmit_broadcast(const BroadcastChannel& channel,
                                             const Vector& x, std::uint64_t seed) {
  if (!x.allFinite()) throw NonFinite("transmit_broadcast: signal has NaN/Inf");
  const double sd = std::sqrt(channel.noise_var);
  NoiseSource na(seed * 2 + 1);
  NoiseSource nb(seed * 2 + 2);
  Vector ya = channel.beta_a * x + na.gaussian(static_cast<int>(x.size()), sd);
  Vector yb = channel.beta_b * x + nb.gaussian(static_cast<int>(x.size()), sd);
  return {std::move(ya), std::move(yb)};
}

std::pair<ComplexVector, ComplexVector> transmit_broadcast(
    const BroadcastChannel& channel, const ComplexVector& x, std::uint64_t seed) {
  if (!x.allFinite()) throw NonFinite("transmit_broadcast: signal has NaN/Inf");
  NoiseSource na(seed * 2 + 1);
  NoiseSource nb(seed * 2 + 2);
  const int n = static_cast<int>(x.size());
  ComplexVector ya = channel.beta_a * x + na.complex_gaussian(n, channel.noise_var);
  ComplexVector yb = channel.beta_b * x + nb.complex_gaussian(n, channel.noise_var);
  return {std::move(ya), std::move(yb)};
}

SnrFigures snr_accounting(double power, double beta, double noise_var) {
  if (power <= 0.0 || beta <= 0.0 || noise_var <= 0.0) {
    throw NonPositiveInput("snr_accounting: inputs must be positive");
  }
  SnrFigures f;
  f.snr_linear = power * beta * beta / noise_var;
  f.snr_db = 10.0 * std::log10(f.snr_linear);
  f.capacity = 0.5 * std::log2(1.0 + f.snr_linear);
  return f;
}

std::pair<double, double> wilson_interval(std::int64_t errors,
                                          std::int64_t denominator) {
  if (denominator <= 0) return {0.0, 1.0};
  const double z = 1.959963984540054;
  const double n = static_cast<double>(denominator);
  const double p = static_cast<double>(errors) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  double lo = std::max(0.0, center - half);
  double hi = std::min(1.0, center + half);
  if (errors == 0) lo = 0.0;
  if (errors == denominator) hi = 1.0;
  return {lo, hi};
}

ErrorStats run_monte_carlo(const TrialFn& trial_fn, std::int64_t max_trials,
                           std::int64_t min_errors, std::uint64_t base_seed,
                           int threads) {
  if (max_trials < 1) throw NonPositiveInput("run_monte_carlo: max_trials < 1");
  if (threads < 1) threads = 1;

  ErrorStats stats;
  stats.seed = base_seed;

  // Fixed chunk size: the min_errors stop rule is evaluated at chunk
  // boundaries, so the executed trial set does not depend on thread count.
  const std::int64_t chunk = 16;
  std::int64_t next = 0;
  while (next < max_trials &&
         (min_errors <= 0 || stats.errors < min_errors)) {
    const std::int64_t count = std::min<std::int64_t>(chunk, max_trials - next);
    std::vector<TrialOutcome> outcomes(count);
    if (threads > 1) {
      std::vector<std::future<TrialOutcome>> futs;
      futs.reserve(count);
      for (std::int64_t i = 0; i < count; ++i) {
        futs.push_back(std::async(std::launch::async, trial_fn,
                                  base_seed + static_cast<std::uint64_t>(next + i)));
      }
      for (std::int64_t i = 0; i < count; ++i) {
        try {
          outcomes[i] = futs[i].get();
        } catch (const std::exception& e) {
          throw Error("trial " + std::to_string(next + i) + ": " + e.what());
        }
      }
    } else {
      for (std::int64_t i = 0; i < count; ++i) {
        try {
          outcomes[i] = trial_fn(base_seed + static_cast<std::uint64_t>(next + i));
        } catch (const std::exception& e) {
          throw Error("trial " + std::to_string(next + i) + ": " + e.what());
        }
      }
    }
    for (const auto& o : outcomes) {
      stats.errors += o.errors;
      stats.denominator += o.denominator;
    }
    next += count;
    stats.trials = next;
  }

  stats.rate_estimate = stats.denominator > 0
                            ? static_cast<double>(stats.errors) / stats.denominator
                            : 0.0;
  std::tie(stats.ci95_low, stats.ci95_high) =
      wilson_interval(stats.errors, stats.denominator);
  return stats;
}

}  // namespace latnc
