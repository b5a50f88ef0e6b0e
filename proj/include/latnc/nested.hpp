#ifndef LATNC_NESTED_HPP
#define LATNC_NESTED_HPP

#include <map>
#include <vector>

#include "latnc/lattice.hpp"

namespace latnc {

enum class User { A, B };

inline User other_user(User u) { return u == User::A ? User::B : User::A; }

/// Coarse shaping lattice plus two fine coding lattices, with the finite
/// codebooks fine ∩ V_s enumerated explicitly. Intended for small
/// dimensions where exact enumeration is practical.
class NestedCodePair {
 public:
  NestedCodePair(Lattice coarse, Lattice fine_a, Lattice fine_b,
                 int search_radius = 3);

  const Lattice& coarse() const { return coarse_; }
  const Lattice& fine(User u) const { return u == User::A ? fine_a_ : fine_b_; }
  const std::vector<LatticePoint>& codebook(User u) const {
    return u == User::A ? codebook_a_ : codebook_b_;
  }
  double rate(User u) const;
  int search_radius() const { return radius_; }

  /// Canonical codebook representative of the coset of a fine-lattice point,
  /// with its codebook index.
  std::pair<int, LatticePoint> canonicalize(User u, const Vector& fine_point) const;

 private:
  struct CosetIndex {
    Matrix w;      // coarse basis in fine coordinates (integer entries)
    Matrix w_inv;
    std::map<std::vector<int>, int> index;  // coset key -> codebook index
  };

  const CosetIndex& cosets(User u) const {
    return u == User::A ? cosets_a_ : cosets_b_;
  }

  Lattice coarse_;
  Lattice fine_a_;
  Lattice fine_b_;
  std::vector<LatticePoint> codebook_a_;
  std::vector<LatticePoint> codebook_b_;
  CosetIndex cosets_a_;
  CosetIndex cosets_b_;
  int radius_;
};

struct DitherVector {
  Vector values;       // lies in V_s
  std::uint64_t seed = 0;
};

/// Uniform dither over the fundamental Voronoi region of the coarse lattice.
DitherVector draw_dither(const NestedCodePair& pair, std::uint64_t seed);
DitherVector zero_dither(const NestedCodePair& pair);

LatticePoint map_message(const NestedCodePair& pair, User user, int message_index);

Vector encode_single(const NestedCodePair& pair, User user, const LatticePoint& c,
                     const DitherVector& d);

LatticePoint decode_single(const NestedCodePair& pair, User user, const Vector& y,
                           double beta, double alpha, const DitherVector& d);

Vector encode_network(const NestedCodePair& pair, const LatticePoint& c_a,
                      const LatticePoint& c_b, const DitherVector& d);

LatticePoint decode_with_side_info(const NestedCodePair& pair, User user,
                                   const Vector& y, double beta, double alpha,
                                   const DitherVector& d,
                                   const LatticePoint& side_codeword);

struct ShapingGain1d {
  double power_a = 0.0;
  double power_b = 0.0;
  double power_nc = 0.0;
  double gain_db = 0.0;
};

/// Closed-form powers for the one-dimensional Z / 2Z pair shaped by [-L, L],
/// cross-checked by exhaustive enumeration of [c_A + c_B] mod 2L.
ShapingGain1d shaping_gain_1d(int L);

}  // namespace latnc

#endif
