#include "latnc/lattice.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <nlohmann/json.hpp>

namespace latnc {

namespace {

bool lex_less(const IntVector& a, const IntVector& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

}  // namespace

Lattice::Lattice(Matrix generator) {
  if (generator.size() == 0) throw RankDeficient("empty generator matrix");
  if (!generator.allFinite()) throw NonFinite("generator has NaN/Inf entry");
  const int n = static_cast<int>(generator.rows());
  const int k = static_cast<int>(generator.cols());
  if (k > n) throw RankDeficient("more columns than rows");

  Eigen::JacobiSVD<Matrix> svd(generator,
                               Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(k - 1) <= 1e-10 * sv(0)) {
    throw RankDeficient("generator columns are linearly dependent");
  }

  gen_.entries = std::move(generator);
  gen_.dimension = n;
  gen_.rank = k;
  pinv_ = (gen_.entries.transpose() * gen_.entries)
              .ldlt()
              .solve(gen_.entries.transpose());
  volume_ = std::sqrt(
      (gen_.entries.transpose() * gen_.entries).determinant());
}

Lattice build_lattice(const Matrix& generator) { return Lattice(generator); }

LatticePoint quantize_nearest(const Lattice& lattice, const Vector& x,
                              int search_radius) {
  if (x.size() != lattice.dimension()) {
    throw DimensionMismatch("quantize_nearest: wrong input length");
  }
  const int k = lattice.rank();
  const Vector coeffs = lattice.pseudo_inverse() * x;
  IntVector center(k);
  for (int i = 0; i < k; ++i) center[i] = static_cast<int>(std::llround(coeffs[i]));

  const int width = 2 * search_radius + 1;
  IntVector best_b;
  Vector best_pt;
  double best_dist = 0.0, best_norm = 0.0;
  bool have = false;

  IntVector offset = IntVector::Constant(k, -search_radius);
  IntVector b(k);
  std::int64_t total = 1;
  for (int i = 0; i < k; ++i) total *= width;
  for (std::int64_t it = 0; it < total; ++it) {
    std::int64_t rem = it;
    for (int i = 0; i < k; ++i) {
      b[i] = center[i] - search_radius + static_cast<int>(rem % width);
      rem /= width;
    }
    Vector pt = lattice.generator() * b.cast<double>();
    const double dist = (x - pt).squaredNorm();
    const double norm = pt.squaredNorm();
    if (!have) {
      have = true;
    } else {
      const double tol = 1e-9 * (1.0 + best_dist);
      if (dist > best_dist + tol) continue;
      if (dist > best_dist - tol) {
        // tie on distance: prefer the smaller point norm, then lex order
        const double ntol = 1e-9 * (1.0 + best_norm);
        if (norm > best_norm + ntol) continue;
        if (norm > best_norm - ntol && !lex_less(b, best_b)) continue;
      }
    }
    best_b = b;
    best_pt = std::move(pt);
    best_dist = dist;
    best_norm = norm;
  }
  return LatticePoint{best_b, best_pt};
}

Vector lattice_mod(const Lattice& lattice, const Vector& x, int search_radius) {
  return x - quantize_nearest(lattice, x, search_radius).coordinates;
}

bool check_nested(const Lattice& coarse, const Lattice& fine) {
  if (coarse.dimension() != fine.dimension()) {
    throw DimensionMismatch("check_nested: dimension mismatch");
  }
  const Matrix coords = fine.pseudo_inverse() * coarse.generator();
  for (int j = 0; j < coords.cols(); ++j) {
    for (int i = 0; i < coords.rows(); ++i) {
      if (std::abs(coords(i, j) - std::round(coords(i, j))) > 1e-9) {
        return false;
      }
    }
  }
  return true;
}

RegionStats shaping_stats(const RegionSampler& sampler, std::int64_t samples,
                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double acc = 0.0;
  for (std::int64_t i = 0; i < samples; ++i) {
    acc += sampler.draw(rng).squaredNorm();
  }
  RegionStats stats;
  stats.sample_count = samples;
  stats.second_moment = acc / (static_cast<double>(samples) * sampler.dimension);
  stats.normalized_second_moment =
      stats.second_moment /
      std::pow(sampler.volume, 2.0 / sampler.dimension);
  return stats;
}

std::pair<double, double> awgn_figures(double snr_linear) {
  if (snr_linear < 0.0) throw NegativeSnr("snr must be >= 0");
  const double capacity = 0.5 * std::log2(1.0 + snr_linear);
  const double alpha = snr_linear / (1.0 + snr_linear);
  return {capacity, alpha};
}

std::string Lattice::to_json() const {
  nlohmann::json j;
  j["dimension"] = dimension();
  auto rows = nlohmann::json::array();
  for (int i = 0; i < gen_.entries.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (int k = 0; k < gen_.entries.cols(); ++k) row.push_back(gen_.entries(i, k));
    rows.push_back(row);
  }
  j["generator"] = rows;
  return j.dump();
}

Lattice Lattice::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  const auto& rows = j.at("generator");
  const int n = static_cast<int>(rows.size());
  const int k = n > 0 ? static_cast<int>(rows[0].size()) : 0;
  Matrix g(n, k);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < k; ++c) g(i, c) = rows[i][c].get<double>();
  }
  return Lattice(g);
}

}  // namespace latnc
