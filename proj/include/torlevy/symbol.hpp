#pragma once

#include <memory>
#include <vector>

#include "torlevy/grid.hpp"
#include "torlevy/measure.hpp"

namespace torlevy {

// True when the compensator -i kappa r is active at radius r:
// full compensation for alpha in (1,2), |y| <= 1 only for alpha = 1,
// none for alpha < 1.
inline bool compensated_at(double alpha, double r) {
  if (alpha > 1.0 + 1e-12) return true;
  if (std::abs(alpha - 1.0) <= 1e-12) return r <= 1.0;
  return false;
}

// Levy symbol psi(k) = sum_j w_j int_0^inf (e^{i k.theta_j r} - 1
//   - i k.theta_j r^{(alpha)}) m(r, theta_j) r^{-1-alpha} dr
// by adaptive panel quadrature (independent of the operator module's cell
// scheme).  Throws NumericError if Re psi > 0 beyond roundoff.
Complex char_exponent(const BoundedLevyMeasure& nu, const Vec& k);

// single-ray integral for atom j at frequency kappa = k . theta_j
Complex char_exponent_ray(const BoundedLevyMeasure& nu, std::size_t atom, double kappa);

// psi(k) tabulated over every Fourier mode of a grid (conjugate symmetry
// exploited); shared by the spectral propagators and solvers.
class SymbolTable {
 public:
  SymbolTable(const TorusGrid& grid, const BoundedLevyMeasure& nu);

  const TorusGrid& grid() const { return grid_; }
  Complex at(std::size_t mode_idx) const { return psi_[mode_idx]; }
  const std::vector<Complex>& values() const { return psi_; }
  // largest |Re psi| over the table (explicit-step stability estimates)
  double max_real_magnitude() const;

 private:
  TorusGrid grid_;
  std::vector<Complex> psi_;
};

}  // namespace torlevy
