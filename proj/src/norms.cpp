#include "torlevy/norms.hpp"

#include <algorithm>
#include <cmath>

namespace torlevy {

double lp_norm(const GridFunction& f, double p) {
  if (!(p >= 1.0)) throw ArgumentError("lp_norm: p must be >= 1");
  const TorusGrid& g = f.grid();
  const double cell = std::pow(g.spacing(), g.dim());
  double s = 0.0;
  for (const auto& v : f.nodal()) s += std::pow(std::abs(v), p);
  return std::pow(cell * s, 1.0 / p);
}

GridFunction riesz_multiplier(const GridFunction& f, double exponent) {
  std::vector<Complex> spec = f.spectral();
  const TorusGrid& g = f.grid();
  for (std::size_t i = 0; i < spec.size(); ++i) {
    Vec k = g.wavevec(i);
    double kk = norm2(k, g.dim());
    spec[i] *= (kk == 0.0) ? 0.0 : std::pow(kk, exponent);
  }
  return GridFunction::from_spectral(g, std::move(spec));
}

GridFunction fractional_laplacian(const GridFunction& f, double beta) {
  if (beta < 0.0) throw ArgumentError("fractional_laplacian: beta must be >= 0");
  return riesz_multiplier(f, beta);
}

double bessel_norm(const GridFunction& f, const NormOrder& order) {
  double base = lp_norm(f, order.p);
  if (order.beta == 0.0) return base;
  return base + lp_norm(fractional_laplacian(f, order.beta), order.p);
}

double slobodeckij_seminorm(const GridFunction& f, double beta, double p) {
  const TorusGrid& g = f.grid();
  if (g.dim() != 1)
    throw ConfigError("slobodeckij_seminorm: double-sum form is restricted to d = 1");
  if (!(beta > 0.0 && beta < 1.0)) throw ArgumentError("slobodeckij_seminorm: beta must be in (0,1)");
  if (!(p >= 1.0)) throw ArgumentError("slobodeckij_seminorm: p must be >= 1");
  const int n = g.n();
  const double h = g.spacing();
  const auto& v = f.nodal();
  double total = 0.0;
  // group pairs by offset; distance depends only on the offset
  for (int m = 1; m < n; ++m) {
    double dist = std::min(m * h, kTwoPi - m * h);
    double w = std::pow(dist, -1.0 - beta * p);
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      int j = i + m < n ? i + m : i + m - n;
      s += std::pow(std::abs(v[j] - v[i]), p);
    }
    total += w * s;
  }
  return std::pow(h * h * total, 1.0 / p);
}

double sobolev_w_norm(const GridFunction& f, double s, double p) {
  if (!(s > 0.0 && s <= 2.0)) throw ArgumentError("sobolev_w_norm: order must be in (0, 2]");
  if (f.grid().dim() == 2) return bessel_norm(f, NormOrder(s, p));
  const double frac = s - std::floor(s);
  const int whole = static_cast<int>(std::floor(s));
  double total = lp_norm(f, p);
  if (frac == 0.0) {
    GridFunction d = f;
    for (int k = 0; k < whole; ++k) {
      d = derivative(d, 0);
      total += lp_norm(d, p);
    }
    return total;
  }
  GridFunction d = f;
  for (int k = 0; k <= whole; ++k) {
    total += slobodeckij_seminorm(d, frac, p);
    if (k < whole) d = derivative(d, 0);
  }
  return total;
}

InterpolationCheck check_interpolation(const GridFunction& f, double beta, double gamma,
                                       double p) {
  if (!(beta > 0.0 && beta < gamma)) throw ArgumentError("check_interpolation: need 0 < beta < gamma");
  double lhs = lp_norm(fractional_laplacian(f, beta), p);
  double base = lp_norm(f, p);
  double high = lp_norm(fractional_laplacian(f, gamma), p);
  if (base < 1e-300 || high < 1e-300) return {lhs, 0.0};
  double rhs = std::pow(base, 1.0 - beta / gamma) * std::pow(high, beta / gamma);
  return {lhs, lhs / rhs};
}

double check_translation_bound(const GridFunction& f, const Vec& y, double beta, double p) {
  if (!(beta > 0.0 && beta < 1.0))
    throw ArgumentError("check_translation_bound: beta must be in (0,1)");
  double ynorm = norm2(y, f.grid().dim());
  if (!(ynorm > 0.0 && ynorm <= kPi))
    throw ArgumentError("check_translation_bound: need 0 < |y| <= pi");
  double denom = std::pow(ynorm, beta) * lp_norm(fractional_laplacian(f, beta), p);
  if (denom < 1e-14)
    throw ArgumentError("check_translation_bound: degenerate input (zero fractional norm)");
  double num = lp_norm(translate(f, y) - f, p);
  return num / denom;
}

SpaceTimeNorms spacetime_norms(const SpaceTimeField& u, double alpha, double p,
                               bool literal_lower) {
  if (u.times.size() < 2) throw ArgumentError("spacetime_norms: need at least 2 time nodes");
  if (u.states.size() != u.times.size() || u.dstates.size() != u.times.size())
    throw ArgumentError("spacetime_norms: field arrays must match the time grid");
  const double lower_exp = literal_lower ? alpha - 1.0 : 0.0;

  auto lower_norm = [&](const GridFunction& f) {
    double base = lp_norm(f, p);
    if (lower_exp == 0.0) return base;
    return base + lp_norm(riesz_multiplier(f, lower_exp), p);
  };

  auto trapezoid_lp = [&](const std::vector<double>& values_p) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < u.times.size(); ++i)
      s += 0.5 * (values_p[i] + values_p[i + 1]) * (u.times[i + 1] - u.times[i]);
    return std::pow(s, 1.0 / p);
  };

  SpaceTimeNorms out{0.0, 0.0, 0.0, 0.0};
  std::vector<double> y_vals(u.times.size()), dt_vals(u.times.size());
  NormOrder full(alpha, p);
  for (std::size_t i = 0; i < u.times.size(); ++i) {
    out.sup_lower = std::max(out.sup_lower, lower_norm(u.states[i]));
    y_vals[i] = std::pow(bessel_norm(u.states[i], full), p);
    dt_vals[i] = std::pow(lower_norm(u.dstates[i]), p);
  }
  out.y_norm = trapezoid_lp(y_vals);
  out.dt_norm = trapezoid_lp(dt_vals);
  out.x_norm = out.sup_lower + out.y_norm + out.dt_norm;
  return out;
}

}  // namespace torlevy
