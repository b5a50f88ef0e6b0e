#include "latnc/harness.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace latnc {

namespace {

const std::vector<std::string> kSchemes = {
    "ldlc-p2p",  "ldlc-rdwnc",       "bicm-p2p",
    "bicm-rdwnc", "lattice-identity", "shaping-gain-1d"};

const std::vector<std::string> kKnownKeys = {
    "scheme",       "sequence",     "n",          "l_a",
    "l_b",          "epsilon",      "m_width",    "bp_iterations",
    "step",         "span",         "L",          "q_a",
    "q_b",          "constellation", "info_bits_a", "interleaver_seed",
    "ra_iterations", "snr_sweep_db", "trials",     "min_errors",
    "seed",         "baseline",     "beta_a",     "beta_b"};

std::vector<double> default_sequence(int n) {
  if (n >= 7) {
    std::vector<double> seq(7, 1.0 / std::sqrt(7.0));
    seq[0] = 1.0;
    return seq;
  }
  return {1.0, 0.8, 0.5};
}

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end()) {
      throw ValidationError("unknown field '" + key + "'");
    }
  }
  if (!j.contains("scheme")) throw ValidationError("scheme");

  ExperimentConfig c;
  try {
    c.scheme = j.at("scheme").get<std::string>();
    if (j.contains("sequence")) c.sequence = j["sequence"].get<std::vector<double>>();
    if (j.contains("n")) c.n = j["n"].get<int>();
    if (j.contains("l_a")) c.l_a = j["l_a"].get<int>();
    if (j.contains("l_b")) c.l_b = j["l_b"].get<int>();
    if (j.contains("epsilon")) c.epsilon = j["epsilon"].get<int>();
    if (j.contains("m_width")) c.m_width = j["m_width"].get<int>();
    if (j.contains("bp_iterations")) c.bp_iterations = j["bp_iterations"].get<int>();
    if (j.contains("step")) c.step = j["step"].get<double>();
    if (j.contains("span")) c.span = j["span"].get<double>();
    if (j.contains("L")) c.l = j["L"].get<int>();
    if (j.contains("q_a")) c.q_a = j["q_a"].get<int>();
    if (j.contains("q_b")) c.q_b = j["q_b"].get<int>();
    if (j.contains("constellation"))
      c.constellation = j["constellation"].get<std::string>();
    if (j.contains("info_bits_a")) c.info_bits_a = j["info_bits_a"].get<int>();
    if (j.contains("interleaver_seed"))
      c.interleaver_seed = j["interleaver_seed"].get<std::uint64_t>();
    if (j.contains("ra_iterations")) c.ra_iterations = j["ra_iterations"].get<int>();
    if (j.contains("snr_sweep_db"))
      c.snr_sweep_db = j["snr_sweep_db"].get<std::vector<double>>();
    if (j.contains("trials")) c.trials = j["trials"].get<std::int64_t>();
    if (j.contains("min_errors")) c.min_errors = j["min_errors"].get<std::int64_t>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("baseline")) c.baseline = j["baseline"].get<bool>();
    if (j.contains("beta_a")) c.beta_a = j["beta_a"].get<double>();
    if (j.contains("beta_b")) c.beta_b = j["beta_b"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad field type: ") + e.what());
  }

  if (std::find(kSchemes.begin(), kSchemes.end(), c.scheme) == kSchemes.end()) {
    throw ValidationError("scheme");
  }
  if (c.snr_sweep_db.empty()) throw ValidationError("snr_sweep_db");
  for (std::size_t i = 1; i < c.snr_sweep_db.size(); ++i) {
    if (c.snr_sweep_db[i] <= c.snr_sweep_db[i - 1]) {
      throw ValidationError("snr_sweep_db");
    }
  }
  if (c.trials < 1) throw ValidationError("trials");
  if (c.constellation != "qpsk" && c.constellation != "16qam") {
    throw ValidationError("constellation");
  }
  if (c.beta_a <= 0.0 || c.beta_b <= 0.0) throw ValidationError("beta");
  if (c.sequence.empty()) c.sequence = default_sequence(c.n);
  return c;
}

std::string serialize_config(const ExperimentConfig& c) {
  nlohmann::json j;
  j["scheme"] = c.scheme;
  j["sequence"] = c.sequence;
  j["n"] = c.n;
  j["l_a"] = c.l_a;
  j["l_b"] = c.l_b;
  j["epsilon"] = c.epsilon;
  j["m_width"] = c.m_width;
  j["bp_iterations"] = c.bp_iterations;
  j["step"] = c.step;
  j["span"] = c.span;
  j["L"] = c.l;
  j["q_a"] = c.q_a;
  j["q_b"] = c.q_b;
  j["constellation"] = c.constellation;
  j["info_bits_a"] = c.info_bits_a;
  j["interleaver_seed"] = c.interleaver_seed;
  j["ra_iterations"] = c.ra_iterations;
  j["snr_sweep_db"] = c.snr_sweep_db;
  j["trials"] = c.trials;
  j["min_errors"] = c.min_errors;
  j["seed"] = c.seed;
  j["baseline"] = c.baseline;
  j["beta_a"] = c.beta_a;
  j["beta_b"] = c.beta_b;
  return j.dump(2);
}

namespace {

std::uint64_t row_base_seed(std::uint64_t config_seed, int user_idx, int snr_idx) {
  // Disjoint across rows but shared between a scheme and its paired baseline,
  // so equivalence comparisons see identical messages and noise draws.
  return config_seed + 0x9E3779B97F4A7C15ULL *
                           (static_cast<std::uint64_t>(user_idx) * 4096 + snr_idx + 1);
}

ResultRow finish_row(std::string scheme, std::string user, double snr_db,
                     double rate, const ErrorStats& stats, double t0) {
  ResultRow row;
  row.scheme = std::move(scheme);
  row.user = std::move(user);
  row.snr_db = snr_db;
  row.rate_bits_per_use = rate;
  row.error_rate = stats.rate_estimate;
  row.ci95_low = stats.ci95_low;
  row.ci95_high = stats.ci95_high;
  row.trials = stats.trials;
  row.errors = stats.errors;
  row.wall_seconds = now_seconds() - t0;
  std::cerr << row.scheme << " user " << row.user << " snr " << row.snr_db
            << " dB: " << row.errors << "/" << row.trials << " trials, rate "
            << row.error_rate << "\n";
  return row;
}

std::vector<ResultRow> run_shaping_gain(const ExperimentConfig& c) {
  const double t0 = now_seconds();
  const ShapingGain1d g = shaping_gain_1d(c.l);
  ResultRow row;
  row.scheme = c.scheme;
  row.user = "B";  // the lower-rate user receives the gain
  row.snr_db = g.gain_db;
  row.rate_bits_per_use = std::log2(2.0 * c.l);
  row.trials = 1;
  row.wall_seconds = now_seconds() - t0;
  return {row};
}

std::vector<ResultRow> run_lattice_identity(const ExperimentConfig& c, int threads) {
  // 1-D nested pair: coding lattices Z and 2Z inside shaping lattice 8Z.
  Matrix g1(1, 1), g2(1, 1), g8(1, 1);
  g1 << 1.0;
  g2 << 2.0;
  g8 << 8.0;
  NestedCodePair pair(Lattice(g8), Lattice(g1), Lattice(g2), 3);

  std::vector<ResultRow> rows;
  for (int ui = 0; ui < 2; ++ui) {
    const User u = ui == 0 ? User::A : User::B;
    const double beta = ui == 0 ? c.beta_a : c.beta_b;
    for (int si = 0; si < static_cast<int>(c.snr_sweep_db.size()); ++si) {
      const double t0 = now_seconds();
      const double snr_lin = std::pow(10.0, c.snr_sweep_db[si] / 10.0);
      const double noise_var = beta * beta / snr_lin;
      auto trial = [&, u, beta, noise_var](std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<int> pick_a(
            0, static_cast<int>(pair.codebook(User::A).size()) - 1);
        std::uniform_int_distribution<int> pick_b(
            0, static_cast<int>(pair.codebook(User::B).size()) - 1);
        const LatticePoint c_a = map_message(pair, User::A, pick_a(rng));
        const LatticePoint c_b = map_message(pair, User::B, pick_b(rng));
        const DitherVector d = draw_dither(pair, rng());
        const LatticePoint& c_u = u == User::A ? c_a : c_b;
        const LatticePoint& c_o = u == User::A ? c_b : c_a;

        const Vector x_nc = encode_network(pair, c_a, c_b, d);
        const Vector x_su = encode_single(pair, u, c_u, d);
        NoiseSource ns(seed);
        const Vector z = ns.gaussian(1, std::sqrt(noise_var));
        const Vector y_nc = beta * x_nc + z;
        const Vector y_su = beta * x_su + z;
        const LatticePoint d_nc =
            decode_with_side_info(pair, u, y_nc, beta, 1.0, d, c_o);
        const LatticePoint d_su = decode_single(pair, u, y_su, beta, 1.0, d);
        TrialOutcome out;
        out.denominator = 1;
        out.errors = d_nc.coefficients == d_su.coefficients ? 0 : 1;
        return out;
      };
      const ErrorStats stats =
          run_monte_carlo(trial, c.trials, c.min_errors,
                          row_base_seed(c.seed, ui, si), threads);
      rows.push_back(finish_row(c.scheme, ui == 0 ? "A" : "B", c.snr_sweep_db[si],
                                pair.rate(u), stats, t0));
    }
  }
  return rows;
}

struct LdlcContext {
  LdlcCode code;
  RateDiverseMapping mapping;
  double power_nc = 0.0;
  double power_p2p_a = 0.0;
  double power_p2p_b = 0.0;
};

IntVector draw_symbols(std::mt19937_64& rng, const IntVector& l) {
  IntVector b(l.size());
  for (int i = 0; i < l.size(); ++i) {
    std::uniform_int_distribution<int> dist(-l[i], l[i] - 1);
    b[i] = dist(rng);
  }
  return b;
}

LdlcContext build_ldlc_context(const ExperimentConfig& c) {
  LdlcContext ctx{build_parity(c.sequence, c.n, c.seed),
                  build_mapping_uniform(c.n, c.l_a, c.l_b, c.epsilon)};
  const int pilots = 32;
  double nc = 0.0, pa = 0.0, pb = 0.0;
  for (int p = 0; p < pilots; ++p) {
    std::mt19937_64 rng(c.seed * 977 + p);
    const IntVector b_a = draw_symbols(rng, ctx.mapping.l_a);
    const IntVector b_b = draw_symbols(rng, ctx.mapping.l_b);
    nc += network_encode_shape(ctx.code, ctx.mapping, b_a, b_b, c.m_width).power;
    pa += single_encode_shape(ctx.code, ctx.mapping, User::A, b_a, c.m_width).power;
    pb += single_encode_shape(ctx.code, ctx.mapping, User::B, b_b, c.m_width).power;
  }
  ctx.power_nc = nc / pilots;
  ctx.power_p2p_a = pa / pilots;
  ctx.power_p2p_b = pb / pilots;
  return ctx;
}

std::vector<ResultRow> run_ldlc(const ExperimentConfig& c, int threads) {
  const LdlcContext ctx = build_ldlc_context(c);
  BpOptions opts;
  opts.iterations = c.bp_iterations;
  opts.step = c.step;
  opts.span = c.span;

  const bool want_rdwnc = c.scheme == "ldlc-rdwnc";
  const bool want_p2p = c.scheme == "ldlc-p2p" || (want_rdwnc && c.baseline);

  std::vector<ResultRow> rows;
  for (int ui = 0; ui < 2; ++ui) {
    const User u = ui == 0 ? User::A : User::B;
    const double beta = ui == 0 ? c.beta_a : c.beta_b;
    const int l_u = ui == 0 ? c.l_a : c.l_b;
    const double rate = std::log2(2.0 * l_u);
    const auto sets = expanded_integer_sets(ctx.mapping, u);
    const double p2p_power = ui == 0 ? ctx.power_p2p_a : ctx.power_p2p_b;

    for (int si = 0; si < static_cast<int>(c.snr_sweep_db.size()); ++si) {
      const double snr_lin = std::pow(10.0, c.snr_sweep_db[si] / 10.0);
      const std::uint64_t base = row_base_seed(c.seed, ui, si);

      auto make_trial = [&](bool rdwnc, double power) {
        const double noise_var = power * beta * beta / snr_lin;
        return [&, rdwnc, noise_var, beta, u](std::uint64_t seed) {
          std::mt19937_64 rng(seed);
          const IntVector b_a = draw_symbols(rng, ctx.mapping.l_a);
          const IntVector b_b = draw_symbols(rng, ctx.mapping.l_b);
          const IntVector& b_u = u == User::A ? b_a : b_b;
          const IntVector& b_o = u == User::A ? b_b : b_a;

          NoiseSource ns(seed);
          const Vector z = ns.gaussian(ctx.code.size(), std::sqrt(noise_var));
          Vector y_prime;
          if (rdwnc) {
            const ShapingResult res =
                network_encode_shape(ctx.code, ctx.mapping, b_a, b_b, c.m_width);
            y_prime = cancel_side_info(beta * res.x + z, beta, ctx.code,
                                       ctx.mapping, u, b_o);
          } else {
            const ShapingResult res =
                single_encode_shape(ctx.code, ctx.mapping, u, b_u, c.m_width);
            y_prime = (beta * res.x + z) / beta;
          }
          const IntVector b_hat = bp_decode(ctx.code, sets, y_prime,
                                            noise_var / (beta * beta), opts);
          const RecoveredMessage rec = recover_message(b_hat, ctx.mapping, u);
          TrialOutcome out;
          out.denominator = ctx.code.size();
          for (int i = 0; i < ctx.code.size(); ++i) {
            if (!rec.divisible[i] || rec.b[i] != b_u[i]) ++out.errors;
          }
          return out;
        };
      };

      if (want_rdwnc) {
        const double t0 = now_seconds();
        const ErrorStats stats = run_monte_carlo(
            make_trial(true, ctx.power_nc), c.trials, c.min_errors, base, threads);
        rows.push_back(finish_row("ldlc-rdwnc", ui == 0 ? "A" : "B",
                                  c.snr_sweep_db[si], rate, stats, t0));
      }
      if (want_p2p) {
        const double t0 = now_seconds();
        const ErrorStats stats = run_monte_carlo(
            make_trial(false, p2p_power), c.trials, c.min_errors, base, threads);
        rows.push_back(finish_row("ldlc-p2p", ui == 0 ? "A" : "B",
                                  c.snr_sweep_db[si], rate, stats, t0));
      }
    }
  }
  return rows;
}

std::vector<ResultRow> run_bicm(const ExperimentConfig& c, int threads) {
  const Constellation cons =
      c.constellation == "qpsk" ? make_qpsk() : make_16qam();
  const int m = cons.bits_per_symbol;
  const int coded = c.q_a * c.info_bits_a;
  if (coded % c.q_b != 0) throw ValidationError("info_bits_a");
  const int k_b = coded / c.q_b;
  if (coded % m != 0) throw ValidationError("info_bits_a");
  const RaCode code_a = make_ra_code(c.q_a, c.info_bits_a, c.interleaver_seed + 1);
  const RaCode code_b = make_ra_code(c.q_b, k_b, c.interleaver_seed + 2);

  std::cerr << "modulation gain constant: " << modulation_gain_db() << " dB\n";

  const bool want_rdwnc = c.scheme == "bicm-rdwnc";
  const bool want_p2p = c.scheme == "bicm-p2p" || (want_rdwnc && c.baseline);

  std::vector<ResultRow> rows;
  for (int ui = 0; ui < 2; ++ui) {
    const User u = ui == 0 ? User::A : User::B;
    const int q_u = ui == 0 ? c.q_a : c.q_b;
    const int k_u = ui == 0 ? c.info_bits_a : k_b;
    const double rate = static_cast<double>(m) / q_u;

    for (int si = 0; si < static_cast<int>(c.snr_sweep_db.size()); ++si) {
      const double snr_lin = std::pow(10.0, c.snr_sweep_db[si] / 10.0);
      BroadcastChannel chan;
      chan.beta_a = c.beta_a;
      chan.beta_b = c.beta_b;
      chan.noise_var = 1.0 / snr_lin;  // unit-energy symbols: Es/N0 sweep
      chan.signal_kind = SignalKind::Complex;
      const std::uint64_t base = row_base_seed(c.seed, ui, si);

      auto make_trial = [&, u, k_u](bool rdwnc) {
        return [&, u, k_u, rdwnc, chan](std::uint64_t seed) {
          std::mt19937_64 rng(seed);
          std::uniform_int_distribution<int> coin(0, 1);
          Bits bits_a(code_a.info_length), bits_b(code_b.info_length);
          for (auto& b : bits_a) b = static_cast<std::uint8_t>(coin(rng));
          for (auto& b : bits_b) b = static_cast<std::uint8_t>(coin(rng));
          if (!rdwnc) {
            // single-user baseline: the other stream is all-zero, so the
            // XOR and metric remap are identities and the noise is shared
            auto& other = u == User::A ? bits_b : bits_a;
            std::fill(other.begin(), other.end(), 0);
          }
          const auto [dec_a, dec_b] = bicm_nc_trial(
              code_a, code_b, cons, c.interleaver_seed, bits_a, bits_b, chan,
              seed, c.ra_iterations);
          const Bits& truth = u == User::A ? bits_a : bits_b;
          const Bits& dec = u == User::A ? dec_a : dec_b;
          TrialOutcome out;
          out.denominator = k_u;
          for (int i = 0; i < k_u; ++i) {
            if (dec[i] != truth[i]) ++out.errors;
          }
          return out;
        };
      };

      if (want_rdwnc) {
        const double t0 = now_seconds();
        const ErrorStats stats = run_monte_carlo(make_trial(true), c.trials,
                                                 c.min_errors, base, threads);
        rows.push_back(finish_row("bicm-rdwnc", ui == 0 ? "A" : "B",
                                  c.snr_sweep_db[si], rate, stats, t0));
      }
      if (want_p2p) {
        const double t0 = now_seconds();
        const ErrorStats stats = run_monte_carlo(make_trial(false), c.trials,
                                                 c.min_errors, base, threads);
        rows.push_back(finish_row("bicm-p2p", ui == 0 ? "A" : "B",
                                  c.snr_sweep_db[si], rate, stats, t0));
      }
    }
  }
  return rows;
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& config, int threads) {
  if (config.scheme == "shaping-gain-1d") return run_shaping_gain(config);
  if (config.scheme == "lattice-identity")
    return run_lattice_identity(config, threads);
  if (config.scheme == "ldlc-p2p" || config.scheme == "ldlc-rdwnc")
    return run_ldlc(config, threads);
  if (config.scheme == "bicm-p2p" || config.scheme == "bicm-rdwnc")
    return run_bicm(config, threads);
  throw ValidationError("scheme");
}

namespace {

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += "\"\"";
    out += ch;
  }
  out += "\"";
  return out;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

const char* kHeader =
    "scheme,user,snr_db,rate_bits_per_use,error_rate,ci95_low,ci95_high,"
    "trials,errors,wall_seconds";

}  // namespace

std::string results_to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  os << kHeader << "\n";
  for (const ResultRow& r : rows) {
    os << csv_quote(r.scheme) << ',' << csv_quote(r.user) << ','
       << format_double(r.snr_db) << ',' << format_double(r.rate_bits_per_use)
       << ',' << format_double(r.error_rate) << ',' << format_double(r.ci95_low)
       << ',' << format_double(r.ci95_high) << ',' << r.trials << ',' << r.errors
       << ',' << format_double(r.wall_seconds) << "\n";
  }
  return os.str();
}

std::string results_to_json(const std::vector<ResultRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const ResultRow& r : rows) {
    nlohmann::json j;
    j["scheme"] = r.scheme;
    j["user"] = r.user;
    j["snr_db"] = r.snr_db;
    j["rate_bits_per_use"] = r.rate_bits_per_use;
    j["error_rate"] = r.error_rate;
    j["ci95_low"] = r.ci95_low;
    j["ci95_high"] = r.ci95_high;
    j["trials"] = r.trials;
    j["errors"] = r.errors;
    j["wall_seconds"] = r.wall_seconds;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::vector<ResultRow> read_results_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) throw ParseError("unexpected CSV header");

  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char ch = line[i];
      if (quoted) {
        if (ch == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            cur += '"';
            ++i;
          } else {
            quoted = false;
          }
        } else {
          cur += ch;
        }
      } else if (ch == '"') {
        quoted = true;
      } else if (ch == ',') {
        fields.push_back(std::move(cur));
        cur.clear();
      } else {
        cur += ch;
      }
    }
    fields.push_back(std::move(cur));
    if (fields.size() != 10) throw ParseError("wrong CSV field count");
    ResultRow r;
    r.scheme = fields[0];
    r.user = fields[1];
    r.snr_db = std::stod(fields[2]);
    r.rate_bits_per_use = std::stod(fields[3]);
    r.error_rate = std::stod(fields[4]);
    r.ci95_low = std::stod(fields[5]);
    r.ci95_high = std::stod(fields[6]);
    r.trials = std::stoll(fields[7]);
    r.errors = std::stoll(fields[8]);
    r.wall_seconds = std::stod(fields[9]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_results(const std::vector<ResultRow>& rows, const std::string& path,
                   const std::string& format) {
  std::string body;
  if (format == "csv") {
    body = results_to_csv(rows);
  } else if (format == "json") {
    body = results_to_json(rows);
  } else {
    throw ValidationError("format must be csv or json");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << body;
  if (!out) throw IoError("write to '" + path + "' failed");
}

double modulation_gain_db() { return 10.0 * std::log10(4.0 / (1.85 * 1.85)); }

}  // namespace latnc
