#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "torlevy/grid.hpp"
#include "torlevy/measure.hpp"
#include "torlevy/symbol.hpp"

namespace torlevy {

// Kernel coefficient a(t, x, y) with declared bounds a0 <= a(t,x,0) <= a1.
// x_independent marks kernels a(t, y) for which the operator collapses to a
// Fourier multiplier; such kernels must be constant in |y| beyond the
// saturation radius (validated by sampling), which makes the tail of the
// multiplier quadrature analytic.
class KernelCoefficient {
 public:
  using Fn = std::function<double(double t, const Vec& x, const Vec& y)>;
  // d/dx_axis a(t, x, y), needed only for the differentiated a priori system
  using GradFn = std::function<double(double t, const Vec& x, const Vec& y, int axis)>;

  KernelCoefficient(Fn a, double a0, double a1, bool x_independent = false,
                    double y_saturation = 1.0, GradFn grad_x = nullptr,
                    std::vector<double> derivative_bounds = {}, std::string name = "custom");

  static KernelCoefficient one();
  static KernelCoefficient constant(double c);
  // a(y) = 1 + amp * min(|y|^gamma, 1), x-independent
  static KernelCoefficient radial_bump(double amp, double gamma);
  // a(x, y) = (1 + ax sin(x_0)) (1 + ay min(|y|^gamma, 1)), with analytic
  // x-gradient (the variable-coefficient test kernel family)
  static KernelCoefficient separable_sin_power(double ax, double ay, double gamma);
  // a(x) = 1 + ax sin(x_0), y-independent
  static KernelCoefficient one_plus_sin(double ax);

  double operator()(double t, const Vec& x, const Vec& y) const { return a_(t, x, y); }
  double at_zero(double t, const Vec& x) const { return a_(t, x, Vec{0.0, 0.0}); }
  double grad_x(double t, const Vec& x, const Vec& y, int axis) const;
  bool has_grad() const { return static_cast<bool>(grad_); }
  bool x_independent() const { return x_independent_; }
  double a0() const { return a0_; }
  double a1() const { return a1_; }
  double y_saturation() const { return y_sat_; }
  const std::string& name() const { return name_; }
  const std::vector<double>& derivative_bounds() const { return deriv_bounds_; }

  // sampled validation of 0 <= a, a0 <= a(t,x,0) <= a1 over grid points
  void validate_bounds(const TorusGrid& grid, const std::vector<double>& times) const;

 private:
  Fn a_;
  GradFn grad_;
  double a0_, a1_;
  bool x_independent_;
  double y_sat_;
  std::vector<double> deriv_bounds_;
  std::string name_;
};

// Radial-angular quadrature controls.  ratio is the geometric node growth
// factor (equivalently ~ log(10)/log(ratio) nodes per decade); cells are
// additionally capped so that kappa_max * dr <= osc_cap in the nodal path.
struct QuadratureScheme {
  double r_min = 0.0;  // 0 -> h/4 at evaluation time
  double r_max = 16.0 * kPi;
  double ratio = 1.05;
  double osc_cap = 0.5;
  bool taylor_inner = true;
  // multiplier path: close the |y| > r_max tail analytically (saturated
  // kernels) instead of truncating
  bool extend_tail = true;

  void validate() const;
  double nodes_per_decade() const { return std::log(10.0) / std::log(ratio); }
};

struct DiniReport {
  std::vector<double> radii;
  std::vector<double> omega0;
  std::vector<double> omega1;
  double dini_integral0 = 0.0;
  double dini_integral1 = 0.0;
  // log-trapezoid integral of omega0(r)/r over sampled radii <= eps
  double integral0_upto(double eps) const;
};

struct OperatorResult {
  GridFunction field;
  double tail_f_bound = 0.0;     // 2 ||f||_inf nu(B_{r_max}^c) bound (truncated path)
  double tail_grad_bound = 0.0;  // compensator tail bound, alpha in (1, 2)
};

struct SplitResult {
  GridFunction i1, i2, i3;
  double eps_used;
};

// compensator y^{(alpha)}
Vec compensator(const Vec& y, double alpha);

// J_f(x, y) = f(x+y) - f(x) - y^{(alpha)} . grad f(x), evaluated spectrally
// at one grid point (off-grid shift through the spectral interpolant)
double difference_j(const GridFunction& f, std::size_t point_idx, const Vec& y, double alpha);

// Evaluator bound to (measure, scheme, grid); caches radial cell tables and
// multiplier symbols.  All evaluation methods are const and thread-safe.
class NonlocalOperator {
 public:
  NonlocalOperator(BoundedLevyMeasure nu, QuadratureScheme scheme, TorusGrid grid);

  const BoundedLevyMeasure& measure() const { return nu_; }
  const QuadratureScheme& scheme() const { return scheme_; }
  const TorusGrid& grid() const { return grid_; }
  double alpha() const { return nu_.alpha(); }
  double r_min() const { return r_min_; }

  // L^{a nu} f with hypothesis checks per the operator contract
  OperatorResult apply(const GridFunction& f, const KernelCoefficient& coeff, double t) const;

  // I1 = a(t,x,0) L^nu f, I2/I3 = far/near corrections with a - a(t,x,0);
  // eps snapped to a radial cell edge
  SplitResult apply_split(const GridFunction& f, const KernelCoefficient& coeff, double t,
                          double eps) const;

  // Signed evaluation without positivity validation (solver internals);
  // kernel may be any bounded function.
  GridFunction evaluate_nodal(const GridFunction& f, const KernelCoefficient::Fn& kernel,
                              double t, double kernel_at_zero_hint = -1.0) const;

  // multiplier-path symbol of an x-independent kernel at wave vector k
  Complex multiplier_symbol(const Vec& k, const KernelCoefficient& coeff, double t) const;

  // cached cell-quadrature symbol of the unit kernel at a grid mode; the
  // same quadrature flavor as multiplier_symbol, so differences of the two
  // cancel exactly for constant kernels
  Complex unit_symbol(std::size_t mode_idx) const;

 private:
  struct CellTable {
    std::vector<double> lo, hi, mass, centroid, comp_moment;
  };
  const CellTable& cells_for(double kappa_max) const;
  CellTable build_cells(double kappa_max) const;
  Complex multiplier_symbol_parts(const Vec& k, const KernelCoefficient& coeff, double t,
                                  double r_lo, double r_hi, bool include_inner, bool include_tail,
                                  bool subtract_a0) const;
  GridFunction nodal_pass(const GridFunction& f, const KernelCoefficient::Fn& kernel, double t,
                          bool x_independent, double a_at_zero_for_inner, double r_lo,
                          double r_hi, bool inner_correction) const;

  BoundedLevyMeasure nu_;
  QuadratureScheme scheme_;
  TorusGrid grid_;
  double r_min_;
  mutable std::mutex cache_mu_;
  mutable std::map<int, CellTable> cell_cache_;  // keyed by kappa_max bucket
  mutable std::vector<Complex> unit_symbol_cache_;
  mutable std::vector<char> unit_symbol_done_;
};

// Convenience wrappers matching the operation-level interface.
OperatorResult apply_operator(const GridFunction& f, const BoundedLevyMeasure& nu,
                              const KernelCoefficient& coeff, double t,
                              const QuadratureScheme& scheme);
SplitResult apply_split(const GridFunction& f, const BoundedLevyMeasure& nu,
                        const KernelCoefficient& coeff, double t, double eps,
                        const QuadratureScheme& scheme);

// Dini moduli (3)-(4) estimated by sampling: suprema over grid x-samples and
// 64-point |y| <= r ball samples per radius; integrals by log-trapezoid.
DiniReport estimate_dini(const KernelCoefficient& coeff, const TorusGrid& grid,
                         const std::vector<double>& radii,
                         const std::vector<double>& times = {0.0});

struct RemainderCheck {
  double lhs;
  double bound_ratio;
};
RemainderCheck near_field_remainder_check(const GridFunction& f, const BoundedLevyMeasure& nu,
                           const KernelCoefficient& coeff, double t, double eps, double p,
                           const QuadratureScheme& scheme);

}  // namespace torlevy
