#include "torlevy/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace torlevy {

const GaussRule& gauss_legendre(int order) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;

  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const int m = (order + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Newton on P_order with the usual cosine initial guess
    double x = std::cos(kPi * (i + 0.75) / (order + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < order; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = order * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.weights[order - 1 - i] = rule.weights[i];
  }
  return cache.emplace(order, std::move(rule)).first->second;
}

double integrate_gauss(const std::function<double(double)>& f, double a, double b, int order) {
  const GaussRule& r = gauss_legendre(order);
  const double c = 0.5 * (a + b), hh = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < order; ++i) s += r.weights[i] * f(c + hh * r.nodes[i]);
  return s * hh;
}

Complex integrate_gauss_c(const std::function<Complex(double)>& f, double a, double b, int order) {
  const GaussRule& r = gauss_legendre(order);
  const double c = 0.5 * (a + b), hh = 0.5 * (b - a);
  Complex s(0.0);
  for (int i = 0; i < order; ++i) s += r.weights[i] * f(c + hh * r.nodes[i]);
  return s * hh;
}

double power_mass(double a, double b, double alpha) {
  return (std::pow(a, -alpha) - std::pow(b, -alpha)) / alpha;
}

double power_first(double a, double b, double alpha) {
  if (std::abs(alpha - 1.0) < 1e-12) return std::log(b / a);
  return (std::pow(b, 1.0 - alpha) - std::pow(a, 1.0 - alpha)) / (1.0 - alpha);
}

namespace {

// raw Gauss on a short sub-interval (at most ~2.5 radians of oscillation)
Complex osc_gauss(double a, double b, double kappa, double alpha) {
  return integrate_gauss_c(
      [&](double r) {
        return Complex(std::cos(kappa * r), std::sin(kappa * r)) * std::pow(r, -1.0 - alpha);
      },
      a, b, 16);
}

// Integration-by-parts series for int_a^b e^{i kappa r} r^{-1-alpha} dr,
// valid for kappa*a >> 1:
//   e^{i kappa r} sum_m phi^{(m)}(r) (-1)^m / (i kappa)^{m+1} |_a^b
// with phi = r^{-1-alpha}.
Complex osc_byparts(double a, double b, double kappa, double alpha) {
  auto boundary = [&](double r) {
    Complex s(0.0);
    Complex inv_ik = 1.0 / Complex(0.0, kappa);
    Complex fac = inv_ik;
    double deriv = std::pow(r, -1.0 - alpha);  // phi^{(m)}(r) * (-1)^m
    for (int m = 0; m < 8; ++m) {
      s += fac * deriv;
      deriv *= (1.0 + alpha + m) / r;  // (-1)^m phi^(m), sign absorbed
      fac *= inv_ik;
    }
    return Complex(std::cos(kappa * r), std::sin(kappa * r)) * s;
  };
  if (std::isinf(b)) return -boundary(a);
  return boundary(b) - boundary(a);
}

}  // namespace

Complex oscillatory_cell_integral(double a, double b, double kappa, double alpha) {
  if (kappa == 0.0) return Complex(power_mass(a, b, alpha), 0.0);
  if (kappa < 0.0) return std::conj(oscillatory_cell_integral(a, b, -kappa, alpha));
  if (kappa * a >= 60.0) return osc_byparts(a, b, kappa, alpha);
  // split at the by-parts threshold if the cell straddles it
  const double split = 60.0 / kappa;
  if (b > split) return oscillatory_cell_integral(a, split, kappa, alpha) + osc_byparts(split, b, kappa, alpha);
  const double span = kappa * (b - a);
  int pieces = std::max(1, static_cast<int>(std::ceil(span / 2.5)));
  // also keep the power-law factor well resolved on wide low-frequency cells
  if (b / a > 1.6) pieces = std::max(pieces, static_cast<int>(std::ceil(std::log(b / a) / 0.4)));
  Complex s(0.0);
  double lo = a;
  for (int p = 0; p < pieces; ++p) {
    double hi = (p == pieces - 1) ? b : a + (b - a) * (p + 1) / pieces;
    s += osc_gauss(lo, hi, kappa, alpha);
    lo = hi;
  }
  return s;
}

double sin_minus_x(double x) {
  if (std::abs(x) >= 0.1) return std::sin(x) - x;
  const double x2 = x * x;
  // -x^3/6 (1 - x^2/20 (1 - x^2/42 (1 - x^2/72)))
  return -x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)));
}

double cos_minus_one(double x) {
  double s = std::sin(0.5 * x);
  return -2.0 * s * s;
}

}  // namespace torlevy
