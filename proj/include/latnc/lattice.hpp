#ifndef LATNC_LATTICE_HPP
#define LATNC_LATTICE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>

#include "latnc/errors.hpp"

namespace latnc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntVector = Eigen::VectorXi;

/// N x K basis matrix with independent columns.
struct GeneratorMatrix {
  Matrix entries;
  int dimension = 0;  // N
  int rank = 0;       // K
};

struct LatticePoint {
  IntVector coefficients;  // length K
  Vector coordinates;      // generator * coefficients, length N
};

/// A real lattice given by its generator, with nearest-point quantization
/// and modulo reduction services. Quantization enumerates integer
/// coefficient candidates around round(G+ x), so it is intended for small K.
class Lattice {
 public:
  explicit Lattice(Matrix generator);

  const Matrix& generator() const { return gen_.entries; }
  int dimension() const { return gen_.dimension; }
  int rank() const { return gen_.rank; }
  /// Volume of the fundamental Voronoi region, sqrt(det(G^T G)).
  double volume() const { return volume_; }
  const Matrix& pseudo_inverse() const { return pinv_; }

  std::string to_json() const;
  static Lattice from_json(const std::string& text);

 private:
  GeneratorMatrix gen_;
  Matrix pinv_;
  double volume_ = 0.0;
};

Lattice build_lattice(const Matrix& generator);

/// Nearest lattice point by exhaustive search over coefficients within
/// +-search_radius of round(G+ x). Ties break toward the smaller point
/// norm, then the lexicographically smaller coefficient vector.
LatticePoint quantize_nearest(const Lattice& lattice, const Vector& x,
                              int search_radius = 2);

/// x - quantize_nearest(x); lies in the fundamental Voronoi region.
Vector lattice_mod(const Lattice& lattice, const Vector& x,
                   int search_radius = 2);

/// True iff every coarse generator column has integer coordinates in the
/// fine basis (within 1e-9).
bool check_nested(const Lattice& coarse, const Lattice& fine);

/// Uniform sampler over some region of R^N together with the region volume.
struct RegionSampler {
  std::function<Vector(std::mt19937_64&)> draw;
  double volume = 0.0;
  int dimension = 0;
};

struct RegionStats {
  double second_moment = 0.0;
  double normalized_second_moment = 0.0;
  std::int64_t sample_count = 0;
};

RegionStats shaping_stats(const RegionSampler& sampler, std::int64_t samples,
                          std::uint64_t seed);

/// (capacity bits/use, MMSE coefficient) for a scalar AWGN channel.
std::pair<double, double> awgn_figures(double snr_linear);

}  // namespace latnc

#endif
