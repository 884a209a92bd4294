#pragma once

#include <functional>
#include <vector>

#include "torlevy/common.hpp"

namespace torlevy {

// Gauss-Legendre nodes/weights on [-1, 1], computed once per order by
// Newton iteration and cached.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int order);

double integrate_gauss(const std::function<double(double)>& f, double a, double b, int order = 12);
Complex integrate_gauss_c(const std::function<Complex(double)>& f, double a, double b, int order = 12);

// Exact moments of the radial power-law weight r^{-1-alpha}:
//   power_mass  = int_a^b r^{-1-alpha} dr
//   power_first = int_a^b r^{-alpha}   dr
double power_mass(double a, double b, double alpha);
double power_first(double a, double b, double alpha);

// int_a^b e^{i kappa r} r^{-1-alpha} dr, accurate to ~1e-10 relative for
// 0 < a < b, any kappa (oscillation handled by panel subdivision for
// moderate kappa*r and by an integration-by-parts tail series for large
// kappa*a).
Complex oscillatory_cell_integral(double a, double b, double kappa, double alpha);

// sin(x) - x evaluated without cancellation for small |x|
double sin_minus_x(double x);
// cos(x) - 1 evaluated without cancellation
double cos_minus_one(double x);

}  // namespace torlevy
