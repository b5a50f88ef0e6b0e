#ifndef LATNC_LDLC_HPP
#define LATNC_LDLC_HPP

#include <Eigen/Sparse>
#include <string>
#include <vector>

#include "latnc/nested.hpp"

namespace latnc {

/// Latin-square low-density lattice code: sparse parity matrix H whose rows
/// and columns each carry the generating-sequence magnitudes, with the dense
/// generator G = H^{-1}.
class LdlcCode {
 public:
  LdlcCode(Eigen::SparseMatrix<double> parity, std::vector<double> sequence,
           std::uint64_t seed);

  int size() const { return static_cast<int>(parity_.rows()); }
  int degree() const { return static_cast<int>(sequence_.size()); }
  const Eigen::SparseMatrix<double>& parity() const { return parity_; }
  const Matrix& generator() const { return generator_; }
  const std::vector<double>& generating_sequence() const { return sequence_; }
  std::uint64_t seed() const { return seed_; }

  std::string to_json() const;

 private:
  Eigen::SparseMatrix<double> parity_;
  Matrix generator_;
  std::vector<double> sequence_;
  std::uint64_t seed_ = 0;
};

/// Checks the Latin-square property: every row and column of H has exactly
/// d non-zeros whose magnitudes are a permutation of the sequence.
bool latin_square_valid(const Eigen::SparseMatrix<double>& parity,
                        const std::vector<double>& sequence, double tol = 1e-9);

/// Seeded random Latin-square construction; H scaled so |det H| = 1.
LdlcCode build_parity(const std::vector<double>& generating_sequence, int n,
                      std::uint64_t seed);

LdlcCode ldlc_from_json(const std::string& text);

Vector ldlc_encode(const LdlcCode& code, const IntVector& b);

/// LCM-based rate-diverse nesting: M_i = LCM(2 L_A_i, 2 L_B_i),
/// M_u_i = M_i / (2 L_u_i). epsilon bounds |k_i| for the decoder's
/// expanded constellation.
struct RateDiverseMapping {
  IntVector m;        // diagonal of M
  IntVector m_a;      // diagonal of M_A
  IntVector m_b;      // diagonal of M_B
  IntVector l_a;      // constellation half-sizes L_A_i
  IntVector l_b;
  int epsilon = 2;

  const IntVector& m_user(User u) const { return u == User::A ? m_a : m_b; }
  const IntVector& l_user(User u) const { return u == User::A ? l_a : l_b; }
};

RateDiverseMapping build_mapping(const IntVector& l_a, const IntVector& l_b,
                                 int epsilon = 2);
RateDiverseMapping build_mapping_uniform(int n, int l_a, int l_b, int epsilon = 2);

struct ShapingResult {
  IntVector k;
  IntVector b_prime;   // b_NC - M k
  Vector x;            // G b_prime
  double power = 0.0;  // ||x||^2 / N
};

/// Breadth-limited tree search for the shaping offset k; m_width < 0 keeps
/// every path (exhaustive over the per-level candidate ranges).
ShapingResult m_algorithm(const LdlcCode& code, const RateDiverseMapping& mapping,
                          const IntVector& b_nc, int m_width);

ShapingResult network_encode_shape(const LdlcCode& code,
                                   const RateDiverseMapping& mapping,
                                   const IntVector& b_a, const IntVector& b_b,
                                   int m_width);

/// Shaping of a single user's message M_u b_u (the point-to-point baseline).
ShapingResult single_encode_shape(const LdlcCode& code,
                                  const RateDiverseMapping& mapping, User user,
                                  const IntVector& b_u, int m_width);

/// Quantized probability function over a real interval; the BP message.
struct DiscretizedDensity {
  double center = 0.0;
  double step = 1.0 / 128.0;
  Vector weights;  // length span/step; sum * step == 1 after normalization

  double left() const { return center - 0.5 * step * weights.size(); }
  void normalize();
};

struct BpOptions {
  int iterations = 100;
  double step = 1.0 / 128.0;
  double span = 8.0;
  // Stop once the integer decisions are unchanged this many iterations.
  int stable_rounds = 3;
};

/// Belief-propagation decoding on the factor graph of H with discretized
/// messages. integer_sets[i] lists the admissible values of b'_i at check i.
/// Returns the current best estimate; never fails on non-convergence.
IntVector bp_decode(const LdlcCode& code,
                    const std::vector<std::vector<int>>& integer_sets,
                    const Vector& y, double noise_var, const BpOptions& options);

/// Admissible values of b'_u_i = M_u_i l - M_i k for l in L_u_i, |k| <= epsilon.
std::vector<std::vector<int>> expanded_integer_sets(
    const RateDiverseMapping& mapping, User user);

/// The same constellation {-L..L-1} at every index, unexpanded.
std::vector<std::vector<int>> plain_integer_sets(int n, int l);

/// y' = (y - beta G M_other b_other) / beta: the channel-gain-normalized
/// virtual single-user signal after side-information cancellation.
Vector cancel_side_info(const Vector& y, double beta, const LdlcCode& code,
                        const RateDiverseMapping& mapping, User user,
                        const IntVector& b_other);

/// Element-wise inverse of the shaping offset: b_u_i = (b'_i mod M_i) / M_u_i
/// with the centered residue in [-M_i/2, M_i/2). Residues not divisible by
/// M_u_i signal an upstream decoding error and are reported per element.
struct RecoveredMessage {
  IntVector b;                       // valid where divisible[i]
  std::vector<bool> divisible;
  int non_divisible_count = 0;
};

RecoveredMessage recover_message(const IntVector& b_prime,
                                 const RateDiverseMapping& mapping, User user);

}  // namespace latnc

#endif
