#ifndef LATNC_HARNESS_HPP
#define LATNC_HARNESS_HPP

#include <string>
#include <vector>

#include "latnc/bicm.hpp"
#include "latnc/ldlc.hpp"

namespace latnc {

/// Declarative experiment description; unknown fields are rejected so typos
/// surface instead of silently running defaults.
struct ExperimentConfig {
  std::string scheme;  // ldlc-p2p | ldlc-rdwnc | bicm-p2p | bicm-rdwnc |
                       // lattice-identity | shaping-gain-1d
  // lattice codes
  std::vector<double> sequence;  // LDLC generating sequence
  int n = 100;
  int l_a = 4;
  int l_b = 2;
  int epsilon = 2;
  int m_width = 64;
  int bp_iterations = 100;
  double step = 1.0 / 128.0;
  double span = 8.0;
  int l = 4;  // shaping-gain-1d constellation half-size
  // BICM
  int q_a = 2;
  int q_b = 4;
  std::string constellation = "qpsk";
  int info_bits_a = 1000;
  std::uint64_t interleaver_seed = 1;
  int ra_iterations = 20;
  // common
  std::vector<double> snr_sweep_db = {0.0};
  std::int64_t trials = 100;
  std::int64_t min_errors = 0;
  std::uint64_t seed = 1;
  bool baseline = false;
  double beta_a = 1.0;
  double beta_b = 1.0;
};

ExperimentConfig parse_config(const std::string& text);
std::string serialize_config(const ExperimentConfig& config);

struct ResultRow {
  std::string scheme;
  std::string user;  // "A" or "B"
  double snr_db = 0.0;
  double rate_bits_per_use = 0.0;
  double error_rate = 0.0;
  double ci95_low = 0.0;
  double ci95_high = 0.0;
  std::int64_t trials = 0;
  std::int64_t errors = 0;
  double wall_seconds = 0.0;

  bool operator==(const ResultRow&) const = default;
};

std::vector<ResultRow> run_experiment(const ExperimentConfig& config,
                                      int threads = 1);

void write_results(const std::vector<ResultRow>& rows, const std::string& path,
                   const std::string& format);
std::string results_to_csv(const std::vector<ResultRow>& rows);
std::string results_to_json(const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results_csv(const std::string& text);

/// 10 log10(2^2 / d2^2) with d2 = 1.85, the square-16QAM over rotated-QPSK
/// minimum-distance advantage at equal spectral efficiency.
double modulation_gain_db();

}  // namespace latnc

#endif
