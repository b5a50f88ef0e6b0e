#ifndef LATNC_CHANNEL_HPP
#define LATNC_CHANNEL_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <utility>

#include "latnc/lattice.hpp"

namespace latnc {

using ComplexVector = Eigen::VectorXcd;

enum class SignalKind { Real, Complex };

/// Two-user AWGN broadcast channel. noise_var is per real dimension for
/// real signals and the total per complex symbol for complex signals.
struct BroadcastChannel {
  double beta_a = 1.0;
  double beta_b = 1.0;
  double noise_var = 1.0;
  SignalKind signal_kind = SignalKind::Real;
};

/// Standard-normal stream with counter-based seeding so that parallel and
/// serial trial execution agree bit-exactly.
class NoiseSource {
 public:
  explicit NoiseSource(std::uint64_t seed) : rng_(seed) {}
  Vector gaussian(int n, double stddev);
  ComplexVector complex_gaussian(int n, double total_var);

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::pair<Vector, Vector> transmit_broadcast(const BroadcastChannel& channel,
                                             const Vector& x, std::uint64_t seed);
std::pair<ComplexVector, ComplexVector> transmit_broadcast(
    const BroadcastChannel& channel, const ComplexVector& x, std::uint64_t seed);

struct SnrFigures {
  double snr_linear = 0.0;
  double snr_db = 0.0;
  double capacity = 0.0;
};

SnrFigures snr_accounting(double power, double beta, double noise_var);

struct ErrorStats {
  std::int64_t trials = 0;
  std::int64_t errors = 0;
  std::int64_t denominator = 0;
  double rate_estimate = 0.0;
  double ci95_low = 0.0;
  double ci95_high = 0.0;
  std::uint64_t seed = 0;
};

/// Wilson 95% interval for errors/denominator.
std::pair<double, double> wilson_interval(std::int64_t errors,
                                          std::int64_t denominator);

struct TrialOutcome {
  std::int64_t errors = 0;
  std::int64_t denominator = 0;
};

using TrialFn = std::function<TrialOutcome(std::uint64_t seed)>;

/// Runs trials with seeds base_seed + i until min_errors errors accumulate
/// or max_trials trials complete. Trials may execute on several threads;
/// seeding is per-trial, so the aggregate is order-free.
ErrorStats run_monte_carlo(const TrialFn& trial_fn, std::int64_t max_trials,
                           std::int64_t min_errors, std::uint64_t base_seed,
                           int threads = 1);

}  // namespace latnc

#endif
