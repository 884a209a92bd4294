#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <torlevy/quadrature.hpp>

using namespace torlevy;

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  // x^7 over [0, 2] with a 4-point rule (degree 7 exactness)
  double got = integrate_gauss([](double x) { return x * x * x * x * x * x * x; }, 0.0, 2.0, 4);
  CHECK(got == doctest::Approx(256.0 / 8.0).epsilon(1e-13));
}

TEST_CASE("power-law cell moments are exact") {
  double alpha = 1.3;
  double m = power_mass(0.5, 2.0, alpha);
  double ref = integrate_gauss([&](double r) { return std::pow(r, -1.0 - alpha); }, 0.5, 2.0, 24);
  CHECK(m == doctest::Approx(ref).epsilon(1e-12));
  double p1 = power_first(0.5, 2.0, alpha);
  double ref1 = integrate_gauss([&](double r) { return std::pow(r, -alpha); }, 0.5, 2.0, 24);
  CHECK(p1 == doctest::Approx(ref1).epsilon(1e-12));
  // alpha = 1 logarithmic branch of the first moment
  CHECK(power_first(0.5, 2.0, 1.0) == doctest::Approx(std::log(4.0)).epsilon(1e-13));
}

TEST_CASE("oscillatory cell integral matches brute-force quadrature") {
  // moderate kappa: compare against a very fine Gauss composite
  for (double kappa : {0.7, 4.0, 23.0}) {
    for (double alpha : {0.5, 1.0, 1.5}) {
      double a = 0.8, b = 1.9;
      Complex got = oscillatory_cell_integral(a, b, kappa, alpha);
      Complex ref(0.0);
      int pieces = 400;
      for (int i = 0; i < pieces; ++i) {
        double lo = a + (b - a) * i / pieces, hi = a + (b - a) * (i + 1) / pieces;
        ref += integrate_gauss_c(
            [&](double r) {
              return Complex(std::cos(kappa * r), std::sin(kappa * r)) * std::pow(r, -1.0 - alpha);
            },
            lo, hi, 8);
      }
      CHECK(std::abs(got - ref) < 1e-11 * (1.0 + std::abs(ref)));
    }
  }
}

TEST_CASE("oscillatory integral with infinite upper limit matches half-period summation") {
  double alpha = 0.6, kappa = 3.0, a = 2.0;
  Complex got = oscillatory_cell_integral(a, std::numeric_limits<double>::infinity(), kappa, alpha);
  // brute force: sum half-periods far enough that the tail is negligible
  Complex ref(0.0);
  double lo = a;
  for (int j = 0; j < 40000; ++j) {
    double hi = lo + kPi / kappa;
    ref += integrate_gauss_c(
        [&](double r) {
          return Complex(std::cos(kappa * r), std::sin(kappa * r)) * std::pow(r, -1.0 - alpha);
        },
        lo, hi, 8);
    lo = hi;
  }
  CHECK(std::abs(got - ref) < 1e-7);
}

TEST_CASE("cancellation-free special functions") {
  CHECK(sin_minus_x(1e-5) == doctest::Approx(-1e-15 / 6.0).epsilon(1e-9));
  CHECK(cos_minus_one(1e-6) == doctest::Approx(-5e-13).epsilon(1e-9));
  CHECK(sin_minus_x(2.0) == doctest::Approx(std::sin(2.0) - 2.0).epsilon(1e-14));
}
