#pragma once

#include <cstdint>
#include <vector>

#include "torlevy/common.hpp"

namespace torlevy {

// Uniform periodic grid on the torus [0, 2pi)^d, d in {1, 2}, n a power of
// two per axis.
class TorusGrid {
 public:
  TorusGrid(int dim, int n);

  int dim() const { return dim_; }
  int n() const { return n_; }
  std::size_t size() const { return size_; }
  double spacing() const { return kTwoPi / n_; }

  // nodal point of a flat index (row-major for d=2)
  Vec point(std::size_t idx) const;
  // integer wavenumber of a 1-d mode index in [0, n)
  int wavenumber(int mode_idx) const { return mode_idx <= n_ / 2 - 1 ? mode_idx : mode_idx - n_; }
  // wave vector of a flat spectral index
  Vec wavevec(std::size_t idx) const;

  bool operator==(const TorusGrid& o) const { return dim_ == o.dim_ && n_ == o.n_; }

 private:
  int dim_;
  int n_;
  std::size_t size_;
};

// Periodic field with both nodal samples and Fourier coefficients kept in
// sync eagerly, so values are immutable and safe to share after
// construction.  Convention: f(x) = sum_k c_k e^{i k.x}.
class GridFunction {
 public:
  static GridFunction from_nodal(const TorusGrid& g, std::vector<Complex> nodal);
  static GridFunction from_spectral(const TorusGrid& g, std::vector<Complex> spectral);
  static GridFunction zero(const TorusGrid& g);
  static GridFunction constant(const TorusGrid& g, Complex c);

  const TorusGrid& grid() const { return grid_; }
  const std::vector<Complex>& nodal() const { return nodal_; }
  const std::vector<Complex>& spectral() const { return spectral_; }

  Complex mean() const { return spectral_[0]; }
  double max_abs() const;
  double max_abs_imag() const;
  // largest |k|_inf carrying relative spectral weight above tol
  int active_band(double tol = 1e-11) const;

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(double c);

 private:
  GridFunction(TorusGrid g) : grid_(g) {}
  TorusGrid grid_;
  std::vector<Complex> nodal_;
  std::vector<Complex> spectral_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double c, GridFunction a);

// Explicit nodal -> spectral resync (the representations are already kept
// in sync; this re-runs the transform and is the hook for the Parseval
// checks).
GridFunction transform(const GridFunction& f);

// g(x) = f(x + y) for arbitrary real y via spectral phase multiplication.
GridFunction translate(const GridFunction& f, const Vec& y);

// spectral partial derivative along axis (multiplier i k_axis, Nyquist
// mode zeroed)
GridFunction derivative(const GridFunction& f, int axis);
std::vector<GridFunction> gradient(const GridFunction& f);

// second derivative field d^2 f / dx_a dx_b
GridFunction second_derivative(const GridFunction& f, int a, int b);

// multiply spectral coefficients by mult(k); mult(0) applies to the mean
GridFunction spectral_multiply(const GridFunction& f, const std::function<Complex(const Vec&)>& mult);

// Band-limited random real trigonometric polynomial with an exact
// closed-form evaluator (used as the translation oracle in tests).
struct TrigPolynomial {
  struct Mode {
    Vec k;
    Complex coeff;  // coefficient of e^{i k.x}; conjugate mode implied
  };
  int dim = 1;
  std::vector<Mode> modes;

  double eval(const Vec& x) const;
  GridFunction to_grid(const TorusGrid& g) const;
};

// mean-zero, modes 1 <= |k|_inf <= kmax, coefficients ~ N(0,1)/|k|
TrigPolynomial random_trig_polynomial(int dim, int kmax, std::uint64_t seed);

// same with coefficient decay |k|^{-decay}; decay = alpha + 1/2 makes the
// translation bound ||f(.+y) - f||_p ~ |y|^alpha sharp down to scale 1/kmax
TrigPolynomial random_trig_polynomial_decay(int dim, int kmax, double decay, std::uint64_t seed);

}  // namespace torlevy
