#include "torlevy/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "torlevy/quadrature.hpp"

namespace torlevy {

namespace {

// e^{i kappa r} - 1 - i kappa r [if compensated], cancellation-free
Complex levy_integrand_factor(double kappa, double r, bool compensated) {
  double x = kappa * r;
  double re = cos_minus_one(x);
  double im = compensated ? sin_minus_x(x) : std::sin(x);
  return Complex(re, im);
}

}  // namespace

Complex char_exponent_ray(const BoundedLevyMeasure& nu, std::size_t atom, double kappa) {
  if (kappa == 0.0) return Complex(0.0);
  const double alpha = nu.alpha();
  const Vec& theta = nu.sigma().atoms()[atom].direction;
  const double akap = std::abs(kappa);
  const bool is_one = std::abs(alpha - 1.0) <= 1e-12;

  auto integrand = [&](double r) {
    return levy_integrand_factor(kappa, r, compensated_at(alpha, r)) * nu.density(r, theta) *
           std::pow(r, -1.0 - alpha);
  };

  const double r_lo = 1e-12;
  const double m0 = nu.density_at_zero(theta);

  // analytic correction below r_lo from the leading Taylor terms
  Complex total(0.0);
  {
    double quad_term = -0.5 * kappa * kappa * m0 * std::pow(r_lo, 2.0 - alpha) / (2.0 - alpha);
    total += Complex(quad_term, 0.0);
    if (alpha < 1.0 - 1e-12)
      total += Complex(0.0, kappa * m0 * std::pow(r_lo, 1.0 - alpha) / (1.0 - alpha));
  }

  // quadrature breaks: compensator switch at 1 (alpha = 1) and the density
  // saturation radius
  const double t_mid = std::min(0.5, 0.5 / std::max(akap, 1.0));
  const double t_end = std::max({nu.saturation_radius(), 1.0, 70.0 / akap});

  // small radii: geometric panels with ratio 2
  {
    double hi = t_mid;
    while (hi > r_lo) {
      double lo = std::max(r_lo, hi / 2.0);
      total += integrate_gauss_c(integrand, lo, hi, 10);
      hi = lo;
    }
  }

  // mid range: oscillation-capped panels with breaks at 1 and r_sat
  {
    std::vector<double> breaks;
    if (is_one && 1.0 > t_mid && 1.0 < t_end) breaks.push_back(1.0);
    double rs = nu.saturation_radius();
    if (rs > t_mid && rs < t_end) breaks.push_back(rs);
    std::sort(breaks.begin(), breaks.end());
    breaks.push_back(t_end);
    double r = t_mid;
    for (double brk : breaks) {
      while (r < brk - 1e-15) {
        double next = std::min({brk, r * 1.4, r + 2.0 / akap});
        total += integrate_gauss_c(integrand, r, next, 12);
        r = next;
      }
      r = brk;
    }
  }

  // tail beyond t_end: density saturated, smooth parts analytic, the
  // oscillatory part by the integration-by-parts series
  {
    const double m_sat = nu.density(t_end * 1.0001, theta);
    double re_tail = -m_sat * std::pow(t_end, -alpha) / alpha;
    double im_tail = 0.0;
    if (alpha > 1.0 + 1e-12)
      im_tail = -kappa * m_sat * std::pow(t_end, 1.0 - alpha) / (alpha - 1.0);
    total += Complex(re_tail, im_tail);
    total += m_sat * oscillatory_cell_integral(t_end, std::numeric_limits<double>::infinity(),
                                               kappa, alpha);
  }

  return total;
}

Complex char_exponent(const BoundedLevyMeasure& nu, const Vec& k) {
  const auto& atoms = nu.sigma().atoms();
  Complex psi(0.0);
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    double kappa = dot(k, atoms[j].direction, nu.dim());
    psi += atoms[j].weight * char_exponent_ray(nu, j, kappa);
  }
  if (psi.real() > 1e-9 * (1.0 + std::abs(psi)))
    throw NumericError("char_exponent: positive real part (quadrature failure)");
  return psi;
}

SymbolTable::SymbolTable(const TorusGrid& grid, const BoundedLevyMeasure& nu) : grid_(grid) {
  if (grid.dim() != nu.dim()) throw ArgumentError("SymbolTable: dimension mismatch");
  psi_.assign(grid.size(), Complex(0.0));
  const int n = grid.n();
  std::vector<char> done(grid.size(), 0);
  auto flat = [&](int m0, int m1) {
    return grid.dim() == 1 ? static_cast<std::size_t>(m0)
                           : static_cast<std::size_t>(m0) * n + m1;
  };
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (done[idx]) continue;
    Vec k = grid.wavevec(idx);
    Complex psi = char_exponent(nu, k);
    psi_[idx] = psi;
    done[idx] = 1;
    // conjugate mode -k
    int m0 = grid.dim() == 1 ? static_cast<int>(idx) : static_cast<int>(idx) / n;
    int m1 = grid.dim() == 1 ? 0 : static_cast<int>(idx) % n;
    int c0 = (n - m0) % n, c1 = (n - m1) % n;
    std::size_t cidx = flat(c0, c1);
    if (!done[cidx]) {
      psi_[cidx] = std::conj(psi);
      done[cidx] = 1;
    }
  }
}

double SymbolTable::max_real_magnitude() const {
  double m = 0.0;
  for (const auto& p : psi_) m = std::max(m, std::abs(p.real()));
  return m;
}

}  // namespace torlevy
