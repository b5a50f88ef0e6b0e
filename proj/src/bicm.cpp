#include "latnc/bicm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace latnc {

std::vector<int> make_interleaver(int length, std::uint64_t seed) {
  if (length < 1) throw NonPositiveInput("make_interleaver: length < 1");
  std::vector<int> perm(length);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

std::vector<int> invert_permutation(const std::vector<int>& perm) {
  std::vector<int> inv(perm.size());
  for (int i = 0; i < static_cast<int>(perm.size()); ++i) inv[perm[i]] = i;
  return inv;
}

RaCode make_ra_code(int repetition, int info_length, std::uint64_t seed) {
  if (repetition < 2) throw NonPositiveInput("make_ra_code: repetition < 2");
  if (info_length < 1) throw NonPositiveInput("make_ra_code: info_length < 1");
  RaCode code;
  code.repetition = repetition;
  code.info_length = info_length;
  code.interleaver_seed = seed;
  code.perm = make_interleaver(repetition * info_length, seed);
  code.inv_perm = invert_permutation(code.perm);
  return code;
}

Bits ra_encode(const RaCode& code, const Bits& info_bits) {
  if (static_cast<int>(info_bits.size()) != code.info_length) {
    throw LengthMismatch("ra_encode: wrong info length");
  }
  const int n = code.coded_length();
  Bits repeated(n);
  for (int i = 0; i < n; ++i) repeated[i] = info_bits[i / code.repetition] & 1;
  Bits out(n);
  std::uint8_t acc = 0;
  for (int i = 0; i < n; ++i) {
    acc ^= repeated[code.perm[i]];
    out[i] = acc;
  }
  return out;
}

namespace {

constexpr double kLlrClamp = 40.0;

inline double clamp_llr(double v) {
  return std::max(-kLlrClamp, std::min(kLlrClamp, v));
}

// boxplus(a, b) = 2 atanh(tanh(a/2) tanh(b/2)), max-star form.
inline double boxplus(double a, double b) {
  const double s = std::copysign(1.0, a) * std::copysign(1.0, b);
  const double mag = std::min(std::abs(a), std::abs(b));
  const double corr = std::log1p(std::exp(-std::abs(a + b))) -
                      std::log1p(std::exp(-std::abs(a - b)));
  return s * mag + corr;
}

}  // namespace

Bits ra_decode(const RaCode& code, const std::vector<BitMetricPair>& metrics,
               int iterations) {
  const int n = code.coded_length();
  if (static_cast<int>(metrics.size()) != n) {
    throw LengthMismatch("ra_decode: wrong metric count");
  }
  if (iterations < 1) throw NonPositiveInput("ra_decode: iterations < 1");

  std::vector<double> lch(n);
  for (int i = 0; i < n; ++i) lch[i] = clamp_llr(metrics[i].llr);

  // ld[i]: prior on the permuted repeated bit d_i = repeated[perm[i]]
  // entering accumulator check i. le[i]: extrinsic from that check.
  std::vector<double> ld(n, 0.0), le(n, 0.0);
  std::vector<double> fwd(n), bwd(n);

  for (int iter = 0; iter < iterations; ++iter) {
    // fwd[i]: message c_i -> check i+1 (channel + past), c_0 known zero.
    fwd[0] = lch[0] + boxplus(kLlrClamp, ld[0]);
    for (int i = 1; i < n; ++i) {
      fwd[i] = lch[i] + boxplus(fwd[i - 1], ld[i]);
    }
    // bwd[i]: message from check i+1 back to c_i.
    bwd[n - 1] = 0.0;
    for (int i = n - 2; i >= 0; --i) {
      bwd[i] = boxplus(lch[i + 1] + bwd[i + 1], ld[i + 1]);
    }
    // Extrinsic to d_i from check i: combine past-of-c_{i-1} and the
    // channel-plus-future view of c_i.
    for (int i = 0; i < n; ++i) {
      const double past = i == 0 ? kLlrClamp : fwd[i - 1];
      le[i] = boxplus(past, lch[i] + bwd[i]);
    }
    // Repetition nodes: each info bit sums its copies' extrinsics.
    for (int k = 0; k < code.info_length; ++k) {
      double total = 0.0;
      for (int r = 0; r < code.repetition; ++r) {
        total += le[code.inv_perm[k * code.repetition + r]];
      }
      for (int r = 0; r < code.repetition; ++r) {
        const int pos = code.inv_perm[k * code.repetition + r];
        ld[pos] = clamp_llr(total - le[pos]);
      }
    }
  }

  Bits out(code.info_length);
  for (int k = 0; k < code.info_length; ++k) {
    double total = 0.0;
    for (int r = 0; r < code.repetition; ++r) {
      total += le[code.inv_perm[k * code.repetition + r]];
    }
    out[k] = total < 0.0 ? 1 : 0;
  }
  return out;
}

namespace {

Constellation from_axis(const std::vector<double>& axis, int bits_per_axis) {
  Constellation c;
  c.bits_per_symbol = 2 * bits_per_axis;
  const int size = 1 << c.bits_per_symbol;
  const int half = 1 << bits_per_axis;
  c.points.resize(size);
  for (int label = 0; label < size; ++label) {
    const int i_bits = label >> bits_per_axis;
    const int q_bits = label & (half - 1);
    c.points[label] = {axis[i_bits], axis[q_bits]};
  }
  c.subset0.assign(c.bits_per_symbol, {});
  c.subset1.assign(c.bits_per_symbol, {});
  for (int label = 0; label < size; ++label) {
    for (int j = 0; j < c.bits_per_symbol; ++j) {
      const int bit = (label >> (c.bits_per_symbol - 1 - j)) & 1;
      (bit ? c.subset1 : c.subset0)[j].push_back(label);
    }
  }
  return c;
}

}  // namespace

Constellation make_qpsk() {
  const double s = 1.0 / std::sqrt(2.0);
  return from_axis({s, -s}, 1);  // axis bit 0 -> +1/sqrt(2)
}

Constellation make_16qam() {
  const double s = 1.0 / std::sqrt(10.0);
  // per-axis Gray pairs 00, 01, 11, 10 -> -3, -1, +1, +3
  return from_axis({-3.0 * s, -1.0 * s, 3.0 * s, 1.0 * s}, 2);
}

std::vector<std::complex<double>> gray_modulate(const Constellation& constellation,
                                                const Bits& bits) {
  const int m = constellation.bits_per_symbol;
  if (bits.size() % m != 0) {
    throw LengthNotMultiple("gray_modulate: bit count not a multiple of m");
  }
  std::vector<std::complex<double>> out(bits.size() / m);
  for (std::size_t s = 0; s < out.size(); ++s) {
    int label = 0;
    for (int j = 0; j < m; ++j) label = (label << 1) | (bits[s * m + j] & 1);
    out[s] = constellation.points[label];
  }
  return out;
}

std::vector<BitMetricPair> demod_bit_metrics(const Constellation& constellation,
                                             std::complex<double> y, double beta,
                                             double noise_var) {
  if (noise_var <= 0.0) throw NonPositiveInput("demod_bit_metrics: noise_var <= 0");
  const int m = constellation.bits_per_symbol;
  const int size = static_cast<int>(constellation.points.size());
  const double log_const =
      -std::log(M_PI * noise_var) - (m - 1) * std::log(2.0);

  std::vector<double> logp(size);
  for (int label = 0; label < size; ++label) {
    const std::complex<double> diff = y - beta * constellation.points[label];
    logp[label] = log_const - std::norm(diff) / noise_var;
  }

  auto log_sum = [&](const std::vector<int>& subset) {
    double mx = logp[subset[0]];
    for (int label : subset) mx = std::max(mx, logp[label]);
    double acc = 0.0;
    for (int label : subset) acc += std::exp(logp[label] - mx);
    return mx + std::log(acc);
  };

  std::vector<BitMetricPair> out(m);
  for (int j = 0; j < m; ++j) {
    const double l0 = log_sum(constellation.subset0[j]);
    const double l1 = log_sum(constellation.subset1[j]);
    out[j].llr = l0 - l1;
    double shift = 0.0;
    const double top = std::max(l0, l1);
    if (top < -700.0) shift = -top;  // keep the pair representable
    out[j].metric0 = std::exp(l0 + shift);
    out[j].metric1 = std::exp(l1 + shift);
  }
  return out;
}

std::vector<BitMetricPair> apply_side_info(const std::vector<BitMetricPair>& metrics,
                                           const Bits& side_coded_bits) {
  if (metrics.size() != side_coded_bits.size()) {
    throw LengthMismatch("apply_side_info: length mismatch");
  }
  std::vector<BitMetricPair> out(metrics);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (side_coded_bits[i] & 1) {
      std::swap(out[i].metric0, out[i].metric1);
      out[i].llr = -out[i].llr;
    }
  }
  return out;
}

std::pair<Bits, Bits> bicm_nc_trial(const RaCode& code_a, const RaCode& code_b,
                                    const Constellation& constellation,
                                    std::uint64_t interleaver_seed,
                                    const Bits& bits_a, const Bits& bits_b,
                                    const BroadcastChannel& channel,
                                    std::uint64_t noise_seed,
                                    int decode_iterations) {
  if (code_a.coded_length() != code_b.coded_length()) {
    throw CodedLengthMismatch("bicm_nc_trial: coded lengths differ");
  }
  const int n = code_a.coded_length();
  const int m = constellation.bits_per_symbol;
  if (n % m != 0) throw LengthNotMultiple("bicm_nc_trial: coded length vs m");

  const Bits c_a = ra_encode(code_a, bits_a);
  const Bits c_b = ra_encode(code_b, bits_b);
  Bits c_nc(n);
  for (int i = 0; i < n; ++i) c_nc[i] = c_a[i] ^ c_b[i];

  const std::vector<int> pi = make_interleaver(n, interleaver_seed);
  Bits interleaved(n);
  for (int i = 0; i < n; ++i) interleaved[i] = c_nc[pi[i]];

  const std::vector<std::complex<double>> sym = gray_modulate(constellation, interleaved);
  ComplexVector x(sym.size());
  for (std::size_t i = 0; i < sym.size(); ++i) x[i] = sym[i];

  auto [y_a, y_b] = transmit_broadcast(channel, x, noise_seed);

  auto receive = [&](const ComplexVector& y, double beta, const RaCode& code,
                     const Bits& side_coded) {
    std::vector<BitMetricPair> metrics(n);
    for (int s = 0; s < static_cast<int>(y.size()); ++s) {
      auto pairs = demod_bit_metrics(constellation, y[s], beta, channel.noise_var);
      for (int j = 0; j < m; ++j) metrics[pi[s * m + j]] = pairs[j];
    }
    const auto remapped = apply_side_info(metrics, side_coded);
    return ra_decode(code, remapped, decode_iterations);
  };

  Bits decoded_a = receive(y_a, channel.beta_a, code_a, c_b);
  Bits decoded_b = receive(y_b, channel.beta_b, code_b, c_a);
  return {std::move(decoded_a), std::move(decoded_b)};
}

}  // namespace latnc
