#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <torlevy/measure.hpp>
#include <torlevy/quadrature.hpp>

using namespace torlevy;

TEST_CASE("spherical measure validation") {
  CHECK_THROWS_AS(SphericalMeasure(2, {{vec2(0.5, 0.5), 1.0}}), ConfigError);
  CHECK_THROWS_AS(SphericalMeasure(1, {{vec1(1.0), -2.0}}), ConfigError);
  auto s = SphericalMeasure::uniform_2d(16);
  CHECK(s.total_weight() == doctest::Approx(1.0));
  CHECK(s.has_symmetric_pairs());
  CHECK(SphericalMeasure::single_1d(1.0).has_symmetric_pairs() == false);
}

TEST_CASE("nondegeneracy: uniform 16 atoms are elliptic") {
  auto s = SphericalMeasure::uniform_2d(16);
  auto res = check_nondegenerate(s, 1.5, 256);
  CHECK(res.nondegenerate);
  CHECK(res.min_value > 0.1);
}

TEST_CASE("nondegeneracy: +-e1 alone is degenerate in d=2") {
  SphericalMeasure s(2, {{vec2(1, 0), 1.0}, {vec2(-1, 0), 1.0}});
  auto res = check_nondegenerate(s, 1.2, 256);
  CHECK_FALSE(res.nondegenerate);
  CHECK(res.min_value < 1e-10);
}

TEST_CASE("nondegeneracy: axes atoms at alpha = 1 give minimum exactly 2") {
  // brute force over 4096 angles: min over phi of 2(|cos phi| + |sin phi|) = 2
  auto s = SphericalMeasure::axes_2d(1.0);
  auto res = check_nondegenerate(s, 1.0, 4096);
  CHECK(res.nondegenerate);
  CHECK(res.min_value == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("nondegeneracy is invariant under simultaneous rotation (d=2)") {
  auto s = SphericalMeasure::uniform_2d(16);
  // rotate all atoms by 90 degrees; the offset-uniform family maps to itself
  std::vector<SphericalMeasure::Atom> rotated;
  for (const auto& a : s.atoms()) rotated.push_back({vec2(-a.direction[1], a.direction[0]), a.weight});
  SphericalMeasure s2(2, rotated);
  auto r1 = check_nondegenerate(s, 1.5, 512);
  auto r2 = check_nondegenerate(s2, 1.5, 512);
  CHECK(r1.min_value == doctest::Approx(r2.min_value).epsilon(1e-10));
}

TEST_CASE("empty atom list is rejected") {
  SphericalMeasure s(1, {});
  CHECK_THROWS_AS(check_nondegenerate(s, 1.0), ConfigError);
}

TEST_CASE("alpha=1 cancellation: symmetric pairs cancel") {
  StableLevyMeasure ref(1.0, SphericalMeasure::symmetric_pair_1d());
  auto nu = BoundedLevyMeasure::radial_power(ref, 0.7, 0.5);
  Vec v = check_alpha1_cancellation(nu, 0.3, 5.0);
  CHECK(std::abs(v[0]) < 1e-10);
}

TEST_CASE("alpha=1 cancellation: unpaired atom integrates to ln 4") {
  StableLevyMeasure ref(1.0, SphericalMeasure::single_1d(1.0));
  auto nu = BoundedLevyMeasure::constant(ref, 1.0);
  Vec v = check_alpha1_cancellation(nu, 0.5, 2.0);
  CHECK(v[0] == doctest::Approx(std::log(4.0)).epsilon(1e-10));
}

TEST_CASE("alpha != 1 makes the cancellation check vacuous") {
  StableLevyMeasure ref(1.5, SphericalMeasure::single_1d(1.0));
  auto nu = BoundedLevyMeasure::constant(ref, 1.0);
  Vec v = check_alpha1_cancellation(nu, 0.5, 2.0);
  CHECK(v[0] == 0.0);
  CHECK_THROWS_AS(check_alpha1_cancellation(nu, 2.0, 0.5), ArgumentError);
}

TEST_CASE("tail mass: closed form 1/(alpha eps^alpha)") {
  StableLevyMeasure ref(0.5, SphericalMeasure::single_1d(1.0));
  auto nu = BoundedLevyMeasure::constant(ref, 1.0);
  TailMass tm = tail_mass(nu, 1.0);
  // m == m_hi == 1, so quadrature + remainder reproduces the exact tail
  CHECK(tm.total() == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(tm.quadrature > 1.5);
  CHECK(tm.remainder_bound > 0.0);
}

TEST_CASE("tail mass beyond the truncation radius is remainder-only") {
  StableLevyMeasure ref(0.5, SphericalMeasure::single_1d(1.0));
  auto nu = BoundedLevyMeasure::constant(ref, 1.0);
  TailMass tm = tail_mass(nu, 100.0, 16.0 * kPi);
  CHECK(tm.quadrature == 0.0);
  CHECK(tm.remainder_bound == doctest::Approx(2.0 / std::sqrt(100.0)).epsilon(1e-12));
}

TEST_CASE("tail mass is linear in the spherical mass and decreasing in eps") {
  StableLevyMeasure one(0.8, SphericalMeasure::single_1d(1.0));
  StableLevyMeasure two(0.8, SphericalMeasure::symmetric_pair_1d(1.0, 1.0));
  auto nu1 = BoundedLevyMeasure::constant(one, 1.0);
  auto nu2 = BoundedLevyMeasure::constant(two, 1.0);
  CHECK(tail_mass(nu2, 0.7).total() == doctest::Approx(2.0 * tail_mass(nu1, 0.7).total()).epsilon(1e-10));
  double prev = tail_mass(nu1, 0.1).total();
  for (double eps : {0.2, 0.5, 1.0, 3.0}) {
    double cur = tail_mass(nu1, eps).total();
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("constant density scales stable-measure integrals") {
  StableLevyMeasure ref(1.2, SphericalMeasure::symmetric_pair_1d());
  auto nu1 = BoundedLevyMeasure::constant(ref, 1.0);
  auto nu3 = BoundedLevyMeasure::constant(ref, 3.0);
  CHECK(tail_mass(nu3, 0.4).total() == doctest::Approx(3.0 * tail_mass(nu1, 0.4).total()).epsilon(1e-10));
  auto c1 = small_jump_covariance(nu1, 0.25);
  auto c3 = small_jump_covariance(nu3, 0.25);
  CHECK(c3[0] == doctest::Approx(3.0 * c1[0]).epsilon(1e-10));
}

TEST_CASE("density bound violations are rejected") {
  StableLevyMeasure ref(1.0, SphericalMeasure::symmetric_pair_1d());
  CHECK_THROWS_AS(BoundedLevyMeasure(ref, [](double r, const Vec&) { return 2.0 + r; }, 1.0, 2.0),
                  ConfigError);
}

TEST_CASE("first moment of the truncated measure vanishes beyond the support") {
  StableLevyMeasure ref(1.5, SphericalMeasure::single_1d(1.0));
  auto nu = BoundedLevyMeasure::truncated(ref, 0.5, 1.0);
  Vec m = first_moment(nu, 1.0, std::numeric_limits<double>::infinity());
  CHECK(std::abs(m[0]) < 1e-12);
  // and matches the analytic integral below the support radius
  Vec m2 = first_moment(nu, 0.1, 0.5);
  CHECK(m2[0] == doctest::Approx(power_first(0.1, 0.5, 1.5)).epsilon(1e-8));
}
