#pragma once

#include <functional>
#include <string>
#include <vector>

#include "torlevy/common.hpp"

namespace torlevy {

// Finite atomic measure on the unit sphere.  The atoms double as the
// angular quadrature nodes of every radial-angular integral.
class SphericalMeasure {
 public:
  struct Atom {
    Vec direction;
    double weight;
  };

  SphericalMeasure(int dim, std::vector<Atom> atoms);

  // d=1 pair {+1, -1} with the given weights
  static SphericalMeasure symmetric_pair_1d(double w_plus = 0.5, double w_minus = 0.5);
  static SphericalMeasure single_1d(double weight, int sign = +1);
  // count equispaced directions in d=2 at angles 2*pi*(j+1/2)/count
  static SphericalMeasure uniform_2d(int count, double total_weight = 1.0);
  // atoms at +-e1, +-e2 with the given weight each
  static SphericalMeasure axes_2d(double weight_each = 1.0);

  int dim() const { return dim_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  double total_weight() const;
  // true if atoms come in +-theta pairs with equal weights
  bool has_symmetric_pairs(double tol = 1e-12) const;

 private:
  int dim_;
  std::vector<Atom> atoms_;
};

// alpha-stable reference measure: spherical part Sigma times r^{-1-alpha} dr.
struct StableLevyMeasure {
  double alpha;
  SphericalMeasure sigma;

  StableLevyMeasure(double alpha_, SphericalMeasure sigma_);
};

// Density-modulated stable-type measure nu(dy) = m(r, theta) r^{-1-alpha} dr Sigma(dtheta).
// The declared bounds give the sandwiching measures m_lo * nu_* <= nu <= m_hi * nu_*.
// m must be constant in r beyond saturation_radius (validated by sampling);
// every built-in density has this form.  m_lo = 0 is representable (e.g. a
// radially truncated measure for sampler tests) but fails the hypothesis
// validation, which requires a strictly positive lower bound.
class BoundedLevyMeasure {
 public:
  using Density = std::function<double(double r, const Vec& theta)>;

  BoundedLevyMeasure(StableLevyMeasure reference, Density m, double m_lo, double m_hi,
                     double saturation_radius = 1.0, std::string density_name = "custom");

  static BoundedLevyMeasure constant(StableLevyMeasure reference, double c = 1.0);
  // m = 1 + amp * min(r^gamma, 1)
  static BoundedLevyMeasure radial_power(StableLevyMeasure reference, double gamma, double amp);
  // even angular modulation: d=2 -> 1 + delta cos(2 phi); d=1 -> 1 + delta * theta
  // (the d=1 form is odd and violates the alpha=1 cancellation on purpose)
  static BoundedLevyMeasure angular_wobble(StableLevyMeasure reference, double delta);
  // m = c on r < radius, 0 beyond (no hypothesis validity; sampler smoke tests)
  static BoundedLevyMeasure truncated(StableLevyMeasure reference, double radius, double c = 1.0);

  const StableLevyMeasure& reference() const { return reference_; }
  double alpha() const { return reference_.alpha; }
  int dim() const { return reference_.sigma.dim(); }
  const SphericalMeasure& sigma() const { return reference_.sigma; }
  double density(double r, const Vec& theta) const { return m_(r, theta); }
  double density_at_zero(const Vec& theta) const;
  double m_lo() const { return m_lo_; }
  double m_hi() const { return m_hi_; }
  double saturation_radius() const { return r_sat_; }
  const std::string& density_name() const { return name_; }

  // int_a^b r^power m(r, theta_j) r^{-1-alpha} dr for atom j; b may be inf
  // when the integrand decays (power < alpha), using the saturated density
  // analytically beyond the saturation radius.
  double radial_integral(std::size_t atom, double a, double b, double power) const;

 private:
  StableLevyMeasure reference_;
  Density m_;
  double m_lo_, m_hi_;
  double r_sat_;
  std::string name_;
};

struct NondegeneracyResult {
  bool nondegenerate;
  double min_value;
};

// min over sampled theta_0 of int |theta_0 . theta|^alpha Sigma(dtheta),
// the ellipticity probe of the spherical measure.  resolution = theta_0 samples
// in d=2 (>= 64); d=1 probes both signs.
NondegeneracyResult check_nondegenerate(const SphericalMeasure& sigma, double alpha,
                                        int resolution = 256);

// int_{r<|y|<R} y nu(dy); zero vector unless alpha == 1 (the hypothesis is
// vacuous otherwise).  Callers treat |result| > 1e-8 as a violation.
Vec check_alpha1_cancellation(const BoundedLevyMeasure& nu, double r, double R);

struct TailMass {
  double quadrature;        // int over eps <= r <= r_max by quadrature
  double remainder_bound;   // m_hi-based analytic bound beyond r_max
  double total() const { return quadrature + remainder_bound; }
};

// nu({|y| > eps}) split into the quadrature part up to r_max and the
// analytic upper-bound remainder.
TailMass tail_mass(const BoundedLevyMeasure& nu, double eps, double r_max = 16.0 * kPi);

// Moment integrals used by the sampler / compensators.
// sum_j w_j theta_j int_a^b r m r^{-1-alpha} dr (b may be inf if alpha > 1)
Vec first_moment(const BoundedLevyMeasure& nu, double a, double b);
// sum_j w_j theta_j theta_j^T int_0^eps r^2 m r^{-1-alpha} dr, packed as
// {xx, xy, yy} (yy unused for d=1)
std::array<double, 3> small_jump_covariance(const BoundedLevyMeasure& nu, double eps);

}  // namespace torlevy
