#include "latnc/nested.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

namespace latnc {

namespace {

bool lex_less(const IntVector& a, const IntVector& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

std::vector<int> to_std(const IntVector& v) {
  return std::vector<int>(v.data(), v.data() + v.size());
}

// Canonical integer representative of the coset b + W Z^K.
IntVector coset_key(const IntVector& b, const Matrix& w_inv, const Matrix& w) {
  const Vector t = w_inv * b.cast<double>();
  Vector f(t.size());
  for (int i = 0; i < t.size(); ++i) f[i] = std::floor(t[i] + 1e-9);
  const Vector r = b.cast<double>() - w * f;
  IntVector key(r.size());
  for (int i = 0; i < r.size(); ++i) key[i] = static_cast<int>(std::llround(r[i]));
  return key;
}

struct CodebookBuild {
  std::vector<LatticePoint> points;
  std::map<std::vector<int>, int> index_by_key;
};

// Enumerate fine ∩ V_s: one minimum-norm representative per coset of the
// coarse lattice in the fine lattice.
CodebookBuild enumerate_codebook(const Lattice& coarse, const Lattice& fine) {
  if (coarse.rank() != coarse.dimension() || fine.rank() != fine.dimension()) {
    throw DimensionMismatch("codebook enumeration needs full-rank square lattices");
  }
  const int k = fine.rank();
  Matrix w_real = fine.pseudo_inverse() * coarse.generator();
  Matrix w(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      w(i, j) = std::round(w_real(i, j));
      if (std::abs(w(i, j) - w_real(i, j)) > 1e-9) {
        throw CodewordNotInCodebook("lattices are not nested");
      }
    }
  }
  const Matrix w_inv = w.inverse();
  const auto expected = static_cast<std::int64_t>(std::llround(std::abs(w.determinant())));

  // Any point of closed V_s lies within the covering-radius bound.
  double rho = 0.0;
  for (int j = 0; j < k; ++j) rho += 0.5 * coarse.generator().col(j).norm();
  IntVector bound(k);
  for (int i = 0; i < k; ++i) {
    bound[i] = static_cast<int>(std::ceil(fine.pseudo_inverse().row(i).norm() * rho)) + 1;
  }

  struct Cand {
    IntVector b;
    Vector pt;
    double norm2;
  };
  std::map<std::vector<int>, Cand> best;

  IntVector b(k);
  std::int64_t total = 1;
  for (int i = 0; i < k; ++i) total *= 2 * bound[i] + 1;
  for (std::int64_t it = 0; it < total; ++it) {
    std::int64_t rem = it;
    for (int i = 0; i < k; ++i) {
      const int width = 2 * bound[i] + 1;
      b[i] = -bound[i] + static_cast<int>(rem % width);
      rem /= width;
    }
    Vector pt = fine.generator() * b.cast<double>();
    const double n2 = pt.squaredNorm();
    auto key = to_std(coset_key(b, w_inv, w));
    auto it2 = best.find(key);
    if (it2 == best.end()) {
      best.emplace(std::move(key), Cand{b, std::move(pt), n2});
    } else {
      Cand& cur = it2->second;
      const double tol = 1e-9 * (1.0 + cur.norm2);
      if (n2 < cur.norm2 - tol ||
          (n2 < cur.norm2 + tol && lex_less(b, cur.b))) {
        cur = Cand{b, std::move(pt), n2};
      }
    }
  }
  if (static_cast<std::int64_t>(best.size()) != expected) {
    throw ConstructionFailed("codebook enumeration missed cosets");
  }

  std::vector<Cand> cands;
  cands.reserve(best.size());
  for (auto& [key, cand] : best) cands.push_back(std::move(cand));
  std::sort(cands.begin(), cands.end(),
            [](const Cand& x, const Cand& y) { return lex_less(x.b, y.b); });

  CodebookBuild out;
  for (int i = 0; i < static_cast<int>(cands.size()); ++i) {
    out.index_by_key[to_std(coset_key(cands[i].b, w_inv, w))] = i;
    out.points.push_back(LatticePoint{cands[i].b, cands[i].pt});
  }
  return out;
}

}  // namespace

NestedCodePair::NestedCodePair(Lattice coarse, Lattice fine_a, Lattice fine_b,
                               int search_radius)
    : coarse_(std::move(coarse)),
      fine_a_(std::move(fine_a)),
      fine_b_(std::move(fine_b)),
      radius_(search_radius) {
  if (!check_nested(coarse_, fine_a_) || !check_nested(coarse_, fine_b_)) {
    throw CodewordNotInCodebook("coarse lattice not nested in both fine lattices");
  }
  auto make_index = [this](const Lattice& fine, CosetIndex& ci,
                           std::vector<LatticePoint>& book) {
    auto build = enumerate_codebook(coarse_, fine);
    book = std::move(build.points);
    const int k = fine.rank();
    const Matrix w_real = fine.pseudo_inverse() * coarse_.generator();
    ci.w = Matrix(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) ci.w(i, j) = std::round(w_real(i, j));
    ci.w_inv = ci.w.inverse();
    ci.index = std::move(build.index_by_key);
  };
  make_index(fine_a_, cosets_a_, codebook_a_);
  make_index(fine_b_, cosets_b_, codebook_b_);
}

double NestedCodePair::rate(User u) const {
  return std::log2(static_cast<double>(codebook(u).size())) / coarse_.dimension();
}

std::pair<int, LatticePoint> NestedCodePair::canonicalize(
    User u, const Vector& fine_point) const {
  const Lattice& f = fine(u);
  const Vector coeff = f.pseudo_inverse() * fine_point;
  IntVector b(coeff.size());
  for (int i = 0; i < coeff.size(); ++i) b[i] = static_cast<int>(std::llround(coeff[i]));
  const CosetIndex& ci = cosets(u);
  auto key = to_std(coset_key(b, ci.w_inv, ci.w));
  auto it = ci.index.find(key);
  if (it == ci.index.end()) {
    throw CodewordNotInCodebook("point is not in the fine lattice coset table");
  }
  return {it->second, codebook(u)[it->second]};
}

DitherVector draw_dither(const NestedCodePair& pair, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-0.5, 0.5);
  Vector u(pair.coarse().dimension());
  for (int i = 0; i < u.size(); ++i) u[i] = uni(rng);
  Vector v = pair.coarse().generator() * u;
  return DitherVector{lattice_mod(pair.coarse(), v, pair.search_radius()), seed};
}

DitherVector zero_dither(const NestedCodePair& pair) {
  return DitherVector{Vector::Zero(pair.coarse().dimension()), 0};
}

LatticePoint map_message(const NestedCodePair& pair, User user, int message_index) {
  const auto& book = pair.codebook(user);
  if (message_index < 0 || message_index >= static_cast<int>(book.size())) {
    throw IndexOutOfRange("message index outside codebook");
  }
  return book[message_index];
}

namespace {
void require_codeword(const NestedCodePair& pair, User user, const LatticePoint& c) {
  auto [idx, rep] = pair.canonicalize(user, c.coordinates);
  if ((rep.coordinates - c.coordinates).norm() > 1e-9) {
    throw CodewordNotInCodebook("codeword is not a codebook representative");
  }
}
}  // namespace

Vector encode_single(const NestedCodePair& pair, User user, const LatticePoint& c,
                     const DitherVector& d) {
  require_codeword(pair, user, c);
  return lattice_mod(pair.coarse(), c.coordinates - d.values, pair.search_radius());
}

LatticePoint decode_single(const NestedCodePair& pair, User user, const Vector& y,
                           double beta, double alpha, const DitherVector& d) {
  if (beta <= 0.0 || alpha <= 0.0 || alpha > 1.0) {
    throw NonPositiveInput("decode_single: bad beta/alpha");
  }
  const Vector arg = lattice_mod(pair.coarse(), alpha * (y / beta) + d.values,
                                 pair.search_radius());
  const LatticePoint q = quantize_nearest(pair.fine(user), arg, pair.search_radius());
  return pair.canonicalize(user, q.coordinates).second;
}

Vector encode_network(const NestedCodePair& pair, const LatticePoint& c_a,
                      const LatticePoint& c_b, const DitherVector& d) {
  require_codeword(pair, User::A, c_a);
  require_codeword(pair, User::B, c_b);
  return lattice_mod(pair.coarse(), c_a.coordinates + c_b.coordinates - d.values,
                     pair.search_radius());
}

LatticePoint decode_with_side_info(const NestedCodePair& pair, User user,
                                   const Vector& y, double beta, double alpha,
                                   const DitherVector& d,
                                   const LatticePoint& side_codeword) {
  if (beta <= 0.0) throw NonPositiveInput("decode_with_side_info: bad beta");
  require_codeword(pair, other_user(user), side_codeword);
  const Vector arg = lattice_mod(
      pair.coarse(),
      alpha * (y / beta - side_codeword.coordinates) + d.values,
      pair.search_radius());
  const LatticePoint q = quantize_nearest(pair.fine(user), arg, pair.search_radius());
  return pair.canonicalize(user, q.coordinates).second;
}

ShapingGain1d shaping_gain_1d(int L) {
  if (L < 2 || L % 2 != 0) throw OddL("L must be a positive even integer");
  ShapingGain1d out;
  out.power_a = L * (L + 1) / 3.0;
  out.power_b = L * (L + 2) / 3.0;
  out.power_nc = out.power_a;
  out.gain_db = 10.0 * std::log10((L + 2.0) / (L + 1.0));

  // Cross-check: fold [c_A + c_B] mod 2L into [-L, L) over all codeword
  // pairs and verify the folded sums cover every residue, i.e. x_NC lives on
  // the same constellation {-L, ..., L} as c_A (with -L and L congruent).
  // The constellation power, averaged over the symmetric listing with both
  // endpoint representatives, must then reproduce the closed form.
  std::vector<char> hit(2 * L, 0);
  for (int ca = -L; ca <= L; ++ca) {
    for (int cb = -L; cb <= L; cb += 2) {
      const int v = ca + cb;
      const int r = v - 2 * L * static_cast<int>(std::floor((v + L) / (2.0 * L)));
      hit[r + L] = 1;
    }
  }
  double acc = 0.0;
  std::int64_t count = 0;
  for (int r = -L; r <= L; ++r) {
    const int residue = r == L ? -L : r;
    if (!hit[residue + L]) {
      throw ConstructionFailed("folded network-coded sums do not cover the constellation");
    }
    acc += static_cast<double>(r) * r;
    ++count;
  }
  const double enumerated = acc / count;
  if (std::abs(enumerated - out.power_nc) > 1e-9) {
    throw ConstructionFailed("enumerated P_NC disagrees with closed form");
  }
  return out;
}

}  // namespace latnc
