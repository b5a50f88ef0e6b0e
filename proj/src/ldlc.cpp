#include "latnc/ldlc.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <nlohmann/json.hpp>
#include <numeric>
#include <unsupported/Eigen/FFT>

namespace latnc {

namespace {

bool lex_less_vec(const std::vector<int>& a, const std::vector<int>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

}  // namespace

bool latin_square_valid(const Eigen::SparseMatrix<double>& parity,
                        const std::vector<double>& sequence, double tol) {
  const int n = static_cast<int>(parity.rows());
  if (parity.cols() != n) return false;
  const int d = static_cast<int>(sequence.size());
  std::vector<double> want(sequence);
  std::sort(want.begin(), want.end());

  std::vector<std::vector<double>> row_mags(n), col_mags(n);
  for (int outer = 0; outer < parity.outerSize(); ++outer) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(parity, outer); it; ++it) {
      if (it.value() == 0.0) continue;
      row_mags[it.row()].push_back(std::abs(it.value()));
      col_mags[it.col()].push_back(std::abs(it.value()));
    }
  }
  auto matches = [&](std::vector<double>& mags) {
    if (static_cast<int>(mags.size()) != d) return false;
    std::sort(mags.begin(), mags.end());
    for (int i = 0; i < d; ++i) {
      if (std::abs(mags[i] - want[i]) > tol) return false;
    }
    return true;
  };
  for (int i = 0; i < n; ++i) {
    if (!matches(row_mags[i]) || !matches(col_mags[i])) return false;
  }
  return true;
}

LdlcCode::LdlcCode(Eigen::SparseMatrix<double> parity,
                   std::vector<double> sequence, std::uint64_t seed)
    : parity_(std::move(parity)), sequence_(std::move(sequence)), seed_(seed) {
  if (!latin_square_valid(parity_, sequence_)) {
    throw ConstructionFailed("parity matrix violates the Latin-square property");
  }
  const Matrix dense = Matrix(parity_);
  generator_ = dense.inverse();
  const Matrix check = dense * generator_;
  const int n = size();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double want = i == j ? 1.0 : 0.0;
      if (std::abs(check(i, j) - want) > 1e-9) {
        throw ConstructionFailed("H * G deviates from identity");
      }
    }
  }
}

LdlcCode build_parity(const std::vector<double>& generating_sequence, int n,
                      std::uint64_t seed) {
  const int d = static_cast<int>(generating_sequence.size());
  if (d > n) throw ConstructionFailed("degree exceeds dimension");
  for (double h : generating_sequence) {
    if (h <= 0.0) throw ConstructionFailed("sequence values must be positive");
  }
  for (int i = 0; i + 1 < d; ++i) {
    if (generating_sequence[i] < generating_sequence[i + 1]) {
      throw ConstructionFailed("sequence must be sorted descending");
    }
  }

  std::mt19937_64 rng(seed);
  const int max_attempts = 2000;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    // One random permutation per sequence value. A fresh shuffle collides
    // with already-placed entries a handful of times at large n, so repair
    // by random pair swaps until the permutation avoids every used cell.
    std::vector<std::vector<int>> perms(d, std::vector<int>(n));
    std::vector<std::vector<bool>> used(n, std::vector<bool>(n, false));
    bool failed = false;
    for (int t = 0; t < d && !failed; ++t) {
      std::vector<int>& p = perms[t];
      std::iota(p.begin(), p.end(), 0);
      std::shuffle(p.begin(), p.end(), rng);
      std::uniform_int_distribution<int> pick(0, n - 1);
      int repairs = 0;
      const int repair_budget = 200 * n;
      for (int i = 0; i < n;) {
        if (!used[i][p[i]]) {
          ++i;
          continue;
        }
        if (++repairs > repair_budget) {
          failed = true;
          break;
        }
        const int j = pick(rng);
        if (j != i && !used[i][p[j]] && !used[j][p[i]]) {
          std::swap(p[i], p[j]);
          i = std::min(i, j);
        }
      }
      if (failed) break;
      for (int i = 0; i < n; ++i) used[i][p[i]] = true;
    }
    if (failed) continue;

    std::uniform_int_distribution<int> coin(0, 1);
    Matrix dense = Matrix::Zero(n, n);
    for (int t = 0; t < d; ++t) {
      for (int i = 0; i < n; ++i) {
        const double sign = coin(rng) ? 1.0 : -1.0;
        dense(i, perms[t][i]) = sign * generating_sequence[t];
      }
    }
    // |det| under/overflows a double already at moderate n, so normalize
    // through the log-determinant of the LU factors instead.
    const Eigen::PartialPivLU<Matrix> lu(dense);
    double log_det = 0.0;
    bool singular = false;
    for (int i = 0; i < n; ++i) {
      const double u = std::abs(lu.matrixLU()(i, i));
      if (u < 1e-12) {
        singular = true;
        break;
      }
      log_det += std::log(u);
    }
    if (singular) continue;

    const double scale = std::exp(-log_det / n);
    dense *= scale;
    std::vector<double> scaled(generating_sequence);
    for (double& h : scaled) h *= scale;

    Eigen::SparseMatrix<double> sparse = dense.sparseView();
    sparse.makeCompressed();
    return LdlcCode(std::move(sparse), std::move(scaled), seed);
  }
  throw ConstructionFailed("no collision-free Latin-square assignment found");
}

std::string LdlcCode::to_json() const {
  nlohmann::json j;
  // The construction is deterministic given (sequence, n, seed), and the
  // |det| = 1 normalization depends only on the sequence ratios, so storing
  // the scaled sequence rebuilds the identical matrix.
  j["sequence"] = sequence_;
  j["n"] = size();
  j["seed"] = seed_;
  return j.dump();
}

LdlcCode ldlc_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  std::vector<double> seq = j.at("sequence").get<std::vector<double>>();
  return build_parity(seq, j.at("n").get<int>(), j.at("seed").get<std::uint64_t>());
}

Vector ldlc_encode(const LdlcCode& code, const IntVector& b) {
  if (b.size() != code.size()) throw DimensionMismatch("ldlc_encode: wrong length");
  return code.generator() * b.cast<double>();
}

RateDiverseMapping build_mapping(const IntVector& l_a, const IntVector& l_b,
                                 int epsilon) {
  if (l_a.size() != l_b.size()) throw DimensionMismatch("build_mapping: length mismatch");
  const int n = static_cast<int>(l_a.size());
  RateDiverseMapping map;
  map.l_a = l_a;
  map.l_b = l_b;
  map.epsilon = epsilon;
  map.m.resize(n);
  map.m_a.resize(n);
  map.m_b.resize(n);
  for (int i = 0; i < n; ++i) {
    if (l_a[i] < 1 || l_b[i] < 1) throw NonPositiveInput("L values must be >= 1");
    map.m[i] = std::lcm(2 * l_a[i], 2 * l_b[i]);
    map.m_a[i] = map.m[i] / (2 * l_a[i]);
    map.m_b[i] = map.m[i] / (2 * l_b[i]);
  }
  return map;
}

RateDiverseMapping build_mapping_uniform(int n, int l_a, int l_b, int epsilon) {
  return build_mapping(IntVector::Constant(n, l_a), IntVector::Constant(n, l_b),
                       epsilon);
}

namespace {

void check_constellation(const IntVector& b, const IntVector& l) {
  for (int i = 0; i < b.size(); ++i) {
    if (b[i] < -l[i] || b[i] > l[i] - 1) {
      throw ConstellationViolation("message symbol outside constellation");
    }
  }
}

ShapingResult finish_shaping(const LdlcCode& code, const RateDiverseMapping& mapping,
                             const IntVector& b_nc, IntVector k) {
  ShapingResult out;
  out.k = std::move(k);
  out.b_prime = b_nc - mapping.m.cwiseProduct(out.k);
  out.x = code.generator() * out.b_prime.cast<double>();
  out.power = out.x.squaredNorm() / code.size();
  return out;
}

}  // namespace

ShapingResult m_algorithm(const LdlcCode& code, const RateDiverseMapping& mapping,
                          const IntVector& b_nc, int m_width) {
  const int n = code.size();
  if (b_nc.size() != n || mapping.m.size() != n) {
    throw DimensionMismatch("m_algorithm: wrong length");
  }

  // H^T = Q^T R, so H = T Q with T = R^T lower triangular and
  // T (Q x) = b' for any codeword x = G b'.
  const Matrix ht = Matrix(code.parity()).transpose();
  Eigen::HouseholderQR<Matrix> qr(ht);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  const Matrix t = r.transpose();
  for (int i = 0; i < n; ++i) {
    if (std::abs(t(i, i)) < 1e-12) throw SingularTriangle("T has a zero pivot");
  }

  struct Path {
    double metric = 0.0;
    std::vector<double> xtilde;
    std::vector<int> k;
  };
  std::vector<Path> paths(1);
  paths[0].xtilde.reserve(n);
  paths[0].k.reserve(n);

  for (int i = 0; i < n; ++i) {
    const int m_i = mapping.m[i];
    const int k_lo = -static_cast<int>((m_i + 1) / 2);     // -ceil(M/2)
    const int k_hi = m_i / 2 - 1;                          // floor(M/2) - 1
    std::vector<Path> next;
    next.reserve(paths.size() * static_cast<std::size_t>(k_hi - k_lo + 1));
    for (const Path& p : paths) {
      double partial = 0.0;
      for (int j = 0; j < i; ++j) partial += t(i, j) * p.xtilde[j];
      for (int kc = k_lo; kc <= k_hi; ++kc) {
        const double xt = (b_nc[i] - partial - static_cast<double>(m_i) * kc) / t(i, i);
        Path q = p;
        q.metric += xt * xt;
        q.xtilde.push_back(xt);
        q.k.push_back(kc);
        next.push_back(std::move(q));
      }
    }
    auto better = [](const Path& a, const Path& b) {
      if (a.metric != b.metric) return a.metric < b.metric;
      return lex_less_vec(a.k, b.k);
    };
    if (m_width > 0 && static_cast<int>(next.size()) > m_width) {
      std::partial_sort(next.begin(), next.begin() + m_width, next.end(), better);
      next.resize(m_width);
    }
    paths = std::move(next);
  }

  const Path* best = &paths[0];
  for (const Path& p : paths) {
    if (p.metric < best->metric ||
        (p.metric == best->metric && lex_less_vec(p.k, best->k))) {
      best = &p;
    }
  }
  IntVector k(n);
  for (int i = 0; i < n; ++i) k[i] = best->k[i];
  return finish_shaping(code, mapping, b_nc, std::move(k));
}

ShapingResult network_encode_shape(const LdlcCode& code,
                                   const RateDiverseMapping& mapping,
                                   const IntVector& b_a, const IntVector& b_b,
                                   int m_width) {
  check_constellation(b_a, mapping.l_a);
  check_constellation(b_b, mapping.l_b);
  const IntVector b_nc =
      mapping.m_a.cwiseProduct(b_a) + mapping.m_b.cwiseProduct(b_b);
  return m_algorithm(code, mapping, b_nc, m_width);
}

ShapingResult single_encode_shape(const LdlcCode& code,
                                  const RateDiverseMapping& mapping, User user,
                                  const IntVector& b_u, int m_width) {
  check_constellation(b_u, mapping.l_user(user));
  const IntVector b_nc = mapping.m_user(user).cwiseProduct(b_u);
  return m_algorithm(code, mapping, b_nc, m_width);
}

void DiscretizedDensity::normalize() {
  const double total = weights.sum() * step;
  if (total > 0.0) weights /= total;
}

std::vector<std::vector<int>> expanded_integer_sets(
    const RateDiverseMapping& mapping, User user) {
  const int n = static_cast<int>(mapping.m.size());
  const IntVector& mu = mapping.m_user(user);
  const IntVector& lu = mapping.l_user(user);
  std::vector<std::vector<int>> sets(n);
  for (int i = 0; i < n; ++i) {
    std::vector<int> vals;
    for (int k = -mapping.epsilon; k <= mapping.epsilon; ++k) {
      for (int l = -lu[i]; l <= lu[i] - 1; ++l) {
        vals.push_back(mu[i] * l - mapping.m[i] * k);
      }
    }
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    sets[i] = std::move(vals);
  }
  return sets;
}

std::vector<std::vector<int>> plain_integer_sets(int n, int l) {
  std::vector<int> vals;
  for (int v = -l; v <= l; ++v) vals.push_back(v);
  return std::vector<std::vector<int>>(n, vals);
}

namespace {

struct CheckEdge {
  int var = 0;
  double coeff = 0.0;
};

inline double interp(const Vector& arr, double idx) {
  if (idx <= 0.0 || idx >= arr.size() - 1.0) {
    // exact endpoints included, everything outside is zero mass
    if (idx == 0.0) return arr[0];
    if (idx == arr.size() - 1.0) return arr[arr.size() - 1];
    return 0.0;
  }
  const int lo = static_cast<int>(idx);
  const double frac = idx - lo;
  return arr[lo] * (1.0 - frac) + arr[lo + 1] * frac;
}

}  // namespace

IntVector bp_decode(const LdlcCode& code,
                    const std::vector<std::vector<int>>& integer_sets,
                    const Vector& y, double noise_var, const BpOptions& options) {
  const int n = code.size();
  if (y.size() != n || static_cast<int>(integer_sets.size()) != n) {
    throw DimensionMismatch("bp_decode: wrong length");
  }
  if (noise_var <= 0.0) throw NonPositiveInput("bp_decode: noise_var <= 0");
  if (options.iterations < 1) throw NonPositiveInput("bp_decode: iterations < 1");

  const double step = options.step;
  const double span = options.span;
  const int bins = static_cast<int>(std::lround(span / step));

  // Sparse structure: per-check edge lists and per-variable edge lists.
  std::vector<std::vector<CheckEdge>> checks(n);
  for (int outer = 0; outer < code.parity().outerSize(); ++outer) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(code.parity(), outer); it;
         ++it) {
      if (it.value() != 0.0) {
        checks[it.row()].push_back({static_cast<int>(it.col()), it.value()});
      }
    }
  }
  std::vector<std::vector<std::pair<int, int>>> var_edges(n);  // (check, slot)
  for (int c = 0; c < n; ++c) {
    for (int s = 0; s < static_cast<int>(checks[c].size()); ++s) {
      var_edges[checks[c][s].var].push_back({c, s});
    }
  }

  // Grids centered on the received samples.
  Vector grid_left(n);
  for (int j = 0; j < n; ++j) grid_left[j] = y[j] - span / 2.0;

  // Channel priors.
  std::vector<Vector> prior(n, Vector(bins));
  for (int j = 0; j < n; ++j) {
    for (int m = 0; m < bins; ++m) {
      const double x = grid_left[j] + m * step;
      const double dev = x - y[j];
      prior[j][m] = std::exp(-dev * dev / (2.0 * noise_var));
    }
    const double total = prior[j].sum() * step;
    prior[j] /= total;
  }

  // Messages indexed by (check, slot).
  std::vector<std::vector<Vector>> var_to_check(n), check_to_var(n);
  for (int c = 0; c < n; ++c) {
    var_to_check[c].resize(checks[c].size());
    check_to_var[c].resize(checks[c].size());
    for (int s = 0; s < static_cast<int>(checks[c].size()); ++s) {
      var_to_check[c][s] = prior[checks[c][s].var];
      check_to_var[c][s] = Vector::Ones(bins) / span;
    }
  }

  Eigen::FFT<double> fft;
  using Cplx = std::complex<double>;

  IntVector decision = IntVector::Zero(n);
  IntVector prev_decision = IntVector::Zero(n);
  int stable = 0;

  auto decide = [&](IntVector& out) {
    Vector xhat(n);
    for (int j = 0; j < n; ++j) {
      Vector belief = prior[j];
      for (auto [c, s] : var_edges[j]) {
        belief = belief.cwiseProduct(check_to_var[c][s]);
        const double mx = belief.maxCoeff();
        if (mx > 0.0) belief /= mx;
      }
      int arg = 0;
      belief.maxCoeff(&arg);
      xhat[j] = grid_left[j] + arg * step;
    }
    const Vector syndrome = code.parity() * xhat;
    for (int c = 0; c < n; ++c) {
      const auto& set = integer_sets[c];
      int best = set[0];
      double best_dist = std::abs(syndrome[c] - set[0]);
      for (int v : set) {
        const double dist = std::abs(syndrome[c] - v);
        if (dist < best_dist) {
          best_dist = dist;
          best = v;
        }
      }
      out[c] = best;
    }
  };

  for (int iter = 0; iter < options.iterations; ++iter) {
    // Check-node update: convolution of stretched incoming densities via
    // prefix/suffix spectra, then periodic extension over the integer set.
    for (int c = 0; c < n; ++c) {
      const int deg = static_cast<int>(checks[c].size());
      std::vector<double> left(deg);
      std::vector<int> len(deg);
      int total_len = 0;
      for (int s = 0; s < deg; ++s) {
        const double h = checks[c][s].coeff;
        const int j = checks[c][s].var;
        const double a = h * grid_left[j];
        const double b = h * (grid_left[j] + (bins - 1) * step);
        left[s] = std::min(a, b);
        len[s] = static_cast<int>(std::ceil(std::abs(b - a) / step)) + 1;
        total_len += len[s];
      }
      int lfft = 1;
      while (lfft < total_len) lfft <<= 1;

      std::vector<std::vector<Cplx>> spectra(deg);
      for (int s = 0; s < deg; ++s) {
        const double h = checks[c][s].coeff;
        const int j = checks[c][s].var;
        const Vector& msg = var_to_check[c][s];
        std::vector<double> stretched(lfft, 0.0);
        for (int m = 0; m < len[s]; ++m) {
          const double w = left[s] + m * step;
          const double x = w / h;
          stretched[m] = interp(msg, (x - grid_left[j]) / step) / std::abs(h);
        }
        fft.fwd(spectra[s], stretched);
      }

      std::vector<std::vector<Cplx>> prefix(deg + 1), suffix(deg + 1);
      prefix[0].assign(lfft, Cplx(1.0, 0.0));
      suffix[deg].assign(lfft, Cplx(1.0, 0.0));
      for (int s = 0; s < deg; ++s) {
        prefix[s + 1].resize(lfft);
        for (int m = 0; m < lfft; ++m) prefix[s + 1][m] = prefix[s][m] * spectra[s][m];
      }
      for (int s = deg - 1; s >= 0; --s) {
        suffix[s].resize(lfft);
        for (int m = 0; m < lfft; ++m) suffix[s][m] = suffix[s + 1][m] * spectra[s][m];
      }

      for (int s = 0; s < deg; ++s) {
        std::vector<Cplx> spec(lfft);
        for (int m = 0; m < lfft; ++m) spec[m] = prefix[s][m] * suffix[s + 1][m];
        std::vector<Cplx> conv_c;
        fft.inv(conv_c, spec);
        Vector conv(lfft);
        for (int m = 0; m < lfft; ++m) conv[m] = std::max(0.0, conv_c[m].real());

        double offset = 0.0;
        for (int s2 = 0; s2 < deg; ++s2) {
          if (s2 != s) offset += left[s2];
        }
        const double h = checks[c][s].coeff;
        const int j = checks[c][s].var;
        Vector& out = check_to_var[c][s];
        out.resize(bins);
        for (int m = 0; m < bins; ++m) {
          const double x = grid_left[j] + m * step;
          double acc = 0.0;
          for (int v : integer_sets[c]) {
            acc += interp(conv, (v - h * x - offset) / step);
          }
          out[m] = acc;
        }
        const double total = out.sum() * step;
        if (total > 0.0) {
          out /= total;
        } else {
          out.setConstant(1.0 / span);
        }
      }
    }

    // Variable-node update: product of prior and other incoming messages.
    for (int j = 0; j < n; ++j) {
      const int deg = static_cast<int>(var_edges[j].size());
      std::vector<Vector> pre(deg + 1), suf(deg + 1);
      pre[0] = Vector::Ones(bins);
      suf[deg] = Vector::Ones(bins);
      for (int s = 0; s < deg; ++s) {
        auto [c, slot] = var_edges[j][s];
        pre[s + 1] = pre[s].cwiseProduct(check_to_var[c][slot]);
        const double mx = pre[s + 1].maxCoeff();
        if (mx > 0.0) pre[s + 1] /= mx;
      }
      for (int s = deg - 1; s >= 0; --s) {
        auto [c, slot] = var_edges[j][s];
        suf[s] = suf[s + 1].cwiseProduct(check_to_var[c][slot]);
        const double mx = suf[s].maxCoeff();
        if (mx > 0.0) suf[s] /= mx;
      }
      for (int s = 0; s < deg; ++s) {
        auto [c, slot] = var_edges[j][s];
        Vector msg = prior[j].cwiseProduct(pre[s]).cwiseProduct(suf[s + 1]);
        const double total = msg.sum() * step;
        if (total > 0.0) {
          msg /= total;
        } else {
          msg = prior[j];
        }
        var_to_check[c][slot] = std::move(msg);
      }
    }

    decide(decision);
    if (iter > 0 && decision == prev_decision) {
      if (++stable >= options.stable_rounds) break;
    } else {
      stable = 0;
    }
    prev_decision = decision;
  }

  return decision;
}

Vector cancel_side_info(const Vector& y, double beta, const LdlcCode& code,
                        const RateDiverseMapping& mapping, User user,
                        const IntVector& b_other) {
  if (y.size() != code.size() || b_other.size() != code.size()) {
    throw DimensionMismatch("cancel_side_info: wrong length");
  }
  check_constellation(b_other, mapping.l_user(other_user(user)));
  const IntVector scaled = mapping.m_user(other_user(user)).cwiseProduct(b_other);
  return y / beta - code.generator() * scaled.cast<double>();
}

RecoveredMessage recover_message(const IntVector& b_prime,
                                 const RateDiverseMapping& mapping, User user) {
  const int n = static_cast<int>(b_prime.size());
  if (mapping.m.size() != n) throw DimensionMismatch("recover_message: wrong length");
  const IntVector& mu = mapping.m_user(user);

  RecoveredMessage out;
  out.b = IntVector::Zero(n);
  out.divisible.assign(n, true);
  for (int i = 0; i < n; ++i) {
    const int m = mapping.m[i];
    // centered residue in [-M/2, M/2)
    const int r = b_prime[i] -
                  m * static_cast<int>(std::floor((b_prime[i] + m / 2.0) / m));
    if (r % mu[i] != 0) {
      out.divisible[i] = false;
      ++out.non_divisible_count;
      continue;
    }
    out.b[i] = r / mu[i];
  }
  return out;
}

}  // namespace latnc
