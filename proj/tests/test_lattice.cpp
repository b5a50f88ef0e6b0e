#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "latnc/lattice.hpp"

using namespace latnc;

namespace {

Matrix mat1(double v) {
  Matrix m(1, 1);
  m << v;
  return m;
}

Matrix hexagonal() {
  Matrix g(2, 2);
  g << 1.0, -0.5, 0.0, std::sqrt(3.0) / 2.0;
  return g;
}

Vector vec(std::initializer_list<double> vals) {
  Vector v(static_cast<int>(vals.size()));
  int i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

// Independent nearest-point oracle: enumerate all |b_i| <= bound.
LatticePoint brute_force_nearest(const Lattice& lat, const Vector& x, int bound) {
  const int k = lat.rank();
  IntVector b = IntVector::Constant(k, -bound);
  LatticePoint best;
  double best_dist = 0.0;
  bool have = false;
  while (true) {
    Vector pt = lat.generator() * b.cast<double>();
    const double dist = (x - pt).squaredNorm();
    if (!have || dist < best_dist - 1e-12) {
      best = LatticePoint{b, pt};
      best_dist = dist;
      have = true;
    }
    int i = 0;
    while (i < k && b[i] == bound) b[i++] = -bound;
    if (i == k) break;
    ++b[i];
  }
  return best;
}

}  // namespace

TEST_CASE("lattice construction and volume") {
  CHECK(Lattice(Matrix::Identity(2, 2)).volume() == doctest::Approx(1.0));
  CHECK(Lattice(hexagonal()).volume() ==
        doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-12));
  Matrix dep(2, 2);
  dep << 1, 2, 2, 4;
  CHECK_THROWS_AS(build_lattice(dep), RankDeficient);
  Matrix bad(1, 1);
  bad << std::nan("");
  CHECK_THROWS_AS(build_lattice(bad), NonFinite);
  Matrix rect(3, 2);
  rect << 1, 0, 0, 1, 0, 0;
  CHECK(Lattice(rect).rank() == 2);
  CHECK(Lattice(rect).volume() == doctest::Approx(1.0));
}

TEST_CASE("lattice JSON round trip") {
  const Lattice lat(hexagonal());
  const Lattice back = Lattice::from_json(lat.to_json());
  CHECK((back.generator() - lat.generator()).norm() < 1e-15);
}

TEST_CASE("quantize_nearest known points") {
  const Lattice z2(Matrix::Identity(2, 2));
  const auto r = quantize_nearest(z2, vec({0.4, -1.6}));
  CHECK(r.coefficients[0] == 0);
  CHECK(r.coefficients[1] == -2);
  // tie at 2.5: both 2 and 3 are at distance 0.5; smaller norm wins
  CHECK(quantize_nearest(z2, vec({2.5, 0.0})).coefficients[0] == 2);
  const Lattice hex(hexagonal());
  const auto q = quantize_nearest(hex, vec({0.9, 0.1}), 3);
  CHECK(q.coefficients[0] == 1);
  CHECK(q.coefficients[1] == 0);
  CHECK_THROWS_AS(quantize_nearest(z2, vec({1.0}), 2), DimensionMismatch);
}

TEST_CASE("lattice_mod on 8Z") {
  const Lattice z8(mat1(8.0));
  CHECK(lattice_mod(z8, vec({9.0}))[0] == doctest::Approx(1.0));
  CHECK(lattice_mod(z8, vec({-5.0}))[0] == doctest::Approx(3.0));
  CHECK(lattice_mod(z8, vec({4.0}))[0] == doctest::Approx(4.0));
}

TEST_CASE("check_nested") {
  const Lattice z8(mat1(8.0)), z2(mat1(2.0)), z3(mat1(3.0)), z1(mat1(1.0));
  CHECK(check_nested(z8, z1));
  CHECK(check_nested(z8, z2));
  CHECK_FALSE(check_nested(z3, z2));
}

TEST_CASE("shaping_stats closed forms") {
  RegionSampler unit;
  unit.dimension = 1;
  unit.volume = 1.0;
  unit.draw = [](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    Vector v(1);
    v[0] = u(rng);
    return v;
  };
  const auto s = shaping_stats(unit, 200000, 1);
  // variance of U(-1/2,1/2) is 1/12 with SE ~ sqrt(1/180)/sqrt(n)
  CHECK(s.normalized_second_moment ==
        doctest::Approx(1.0 / 12.0).epsilon(0.01));
  // hypercube shaping loss vs the sphere bound 1/(2*pi*e)
  const double loss = s.normalized_second_moment * 2.0 * M_PI * M_E;
  CHECK(loss == doctest::Approx(M_PI * M_E / 6.0).epsilon(0.01));
  CHECK(s.normalized_second_moment >
        1.0 / (2.0 * M_PI * M_E) - 3.0 * 0.01);

  RegionSampler wide;
  wide.dimension = 1;
  wide.volume = 8.0;
  wide.draw = [](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    Vector v(1);
    v[0] = u(rng);
    return v;
  };
  const auto w = shaping_stats(wide, 200000, 2);
  CHECK(w.second_moment == doctest::Approx(16.0 / 3.0).epsilon(0.02));
  CHECK(w.sample_count == 200000);
}

TEST_CASE("awgn_figures") {
  CHECK(awgn_figures(3.0).first == doctest::Approx(1.0));
  CHECK(awgn_figures(3.0).second == doctest::Approx(0.75));
  CHECK(awgn_figures(1.0).first == doctest::Approx(0.5));
  CHECK(awgn_figures(1.0).second == doctest::Approx(0.5));
  CHECK(awgn_figures(0.0).first == 0.0);
  CHECK(awgn_figures(0.0).second == 0.0);
  CHECK_THROWS_AS(awgn_figures(-0.1), NegativeSnr);
  // monotone and round-trip through capacity
  double prev = -1.0;
  for (double snr = 0.0; snr < 50.0; snr += 0.7) {
    const double c = awgn_figures(snr).first;
    CHECK(c > prev);
    prev = c;
    CHECK(awgn_figures(std::pow(2.0, 2.0 * c) - 1.0).first ==
          doctest::Approx(c).epsilon(1e-12));
  }
}

TEST_CASE("quantizer properties: idempotence, shift invariance, oracle") {
  const Lattice z8(mat1(8.0));
  const Lattice hex(hexagonal());
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> span(-12.0, 12.0);
  std::uniform_int_distribution<int> shift(-3, 3);

  for (int t = 0; t < 1200; ++t) {
    // 1-D idempotence and shift invariance
    Vector x1 = vec({span(rng)});
    const Vector m1 = lattice_mod(z8, x1);
    CHECK((lattice_mod(z8, m1) - m1).norm() < 1e-12);
    Vector shifted = x1;
    shifted[0] += 8.0 * shift(rng);
    CHECK((lattice_mod(z8, shifted, 3) - lattice_mod(z8, x1, 3)).norm() < 1e-9);

    // 2-D idempotence plus brute-force oracle agreement
    Vector x2 = vec({span(rng) / 4.0, span(rng) / 4.0});
    const Vector m2 = lattice_mod(hex, x2, 3);
    CHECK((lattice_mod(hex, m2, 3) - m2).norm() < 1e-12);
    const auto fast = quantize_nearest(hex, x2, 3);
    const auto slow = brute_force_nearest(hex, x2, 10);
    const double df = (x2 - fast.coordinates).squaredNorm();
    const double ds = (x2 - slow.coordinates).squaredNorm();
    CHECK(df == doctest::Approx(ds).epsilon(1e-9));
  }
}

TEST_CASE("VNR diagnostic on Z^N") {
  const Lattice z1(mat1(1.0));
  const double sigma2 = 0.37;
  CHECK(std::pow(z1.volume(), 2.0) / sigma2 ==
        doctest::Approx(1.0 / sigma2));
}
