#ifndef LATNC_BICM_HPP
#define LATNC_BICM_HPP

#include <complex>
#include <cstdint>
#include <vector>

#include "latnc/channel.hpp"

namespace latnc {

using Bits = std::vector<std::uint8_t>;

std::vector<int> make_interleaver(int length, std::uint64_t seed);
std::vector<int> invert_permutation(const std::vector<int>& perm);

/// Non-systematic regular repeat-accumulate code of rate 1/q:
/// repeat each info bit q times, permute, accumulate (running XOR).
struct RaCode {
  int repetition = 2;
  int info_length = 0;
  std::uint64_t interleaver_seed = 0;
  std::vector<int> perm;      // length q*K
  std::vector<int> inv_perm;

  int coded_length() const { return repetition * info_length; }
};

RaCode make_ra_code(int repetition, int info_length, std::uint64_t seed);

Bits ra_encode(const RaCode& code, const Bits& info_bits);

/// Per-bit demodulator output: Eq-style detection metrics for c = 0 and
/// c = 1 plus their (clamped) log-ratio, which the decoder consumes.
struct BitMetricPair {
  double metric0 = 0.0;
  double metric1 = 0.0;
  double llr = 0.0;  // ln(metric0 / metric1)
};

/// Sum-product decoding over the accumulator chain plus repetition nodes.
/// Zero-LLR ties decide bit 0.
Bits ra_decode(const RaCode& code, const std::vector<BitMetricPair>& metrics,
               int iterations);

/// Gray-labeled unit-energy constellation; label bits split evenly between
/// the I and Q axes, first bits on I.
struct Constellation {
  int bits_per_symbol = 0;
  std::vector<std::complex<double>> points;      // indexed by label value
  std::vector<std::vector<int>> subset0;         // X_j^(0) as label lists
  std::vector<std::vector<int>> subset1;
};

Constellation make_qpsk();
Constellation make_16qam();

std::vector<std::complex<double>> gray_modulate(const Constellation& constellation,
                                                const Bits& bits);

/// Detection metrics lambda(y, c_j = b) = (1/2^{m-1}) sum_{x in X_j^(b)} p(y|x)
/// with complex Gaussian p of total variance noise_var around beta*x.
std::vector<BitMetricPair> demod_bit_metrics(const Constellation& constellation,
                                             std::complex<double> y, double beta,
                                             double noise_var);

/// Side-information remap: swap the metric pair wherever the known other-user
/// coded bit is 1, so the XORed stream decodes as the wanted stream.
std::vector<BitMetricPair> apply_side_info(const std::vector<BitMetricPair>& metrics,
                                           const Bits& side_coded_bits);

/// Full transmitter (encode both users, XOR, interleave, modulate) and both
/// side-information receivers. Deterministic given the seeds.
std::pair<Bits, Bits> bicm_nc_trial(const RaCode& code_a, const RaCode& code_b,
                                    const Constellation& constellation,
                                    std::uint64_t interleaver_seed,
                                    const Bits& bits_a, const Bits& bits_b,
                                    const BroadcastChannel& channel,
                                    std::uint64_t noise_seed,
                                    int decode_iterations = 20);

}  // namespace latnc

#endif
