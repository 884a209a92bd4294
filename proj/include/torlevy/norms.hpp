#pragma once

#include <vector>

#include "torlevy/grid.hpp"

namespace torlevy {

// (beta, p) of a Bessel-potential norm; beta capped at 4 so the multiplier
// stays grid-resolvable.
struct NormOrder {
  double beta;
  double p;
  NormOrder(double beta_, double p_) : beta(beta_), p(p_) {
    if (!(p > 1.0)) throw ArgumentError("NormOrder: p must be > 1");
    if (beta < 0.0 || beta > 4.0) throw ArgumentError("NormOrder: beta must lie in [0, 4]");
  }
};

// grid quadrature of the torus L^p norm, (h^d sum |f|^p)^{1/p}
double lp_norm(const GridFunction& f, double p);

// spectral multiplier |k|^beta with the k = 0 coefficient set to zero
GridFunction fractional_laplacian(const GridFunction& f, double beta);

// same multiplier for any real exponent (negative orders damp); internal
// hook for the literal beta-1 space-time norm variant
GridFunction riesz_multiplier(const GridFunction& f, double exponent);

// ||f||_p + ||(-Delta)^{beta/2} f||_p  (equivalent sum form; beta = 0 is
// plain L^p)
double bessel_norm(const GridFunction& f, const NormOrder& order);

// double-sum quadrature of the Gagliardo seminorm with periodic distance,
// d = 1 only, beta in (0, 1)
double slobodeckij_seminorm(const GridFunction& f, double beta, double p);

// W^{s,p} norm: d = 1 uses the double-integral form (||f||_p plus the
// order-{s} seminorms of f, ..., grad^[s] f); d = 2 falls back to the
// spectral Bessel proxy, flagged in reports.  s in (0, 2].
double sobolev_w_norm(const GridFunction& f, double s, double p);

struct InterpolationCheck {
  double lhs;        // ||(-Delta)^{beta/2} f||_p
  double rhs_ratio;  // lhs / (||f||_p^{1-beta/gamma} ||(-Delta)^{gamma/2} f||_p^{beta/gamma})
};
InterpolationCheck check_interpolation(const GridFunction& f, double beta, double gamma, double p);

// empirical constant ||f(.+y) - f||_p / (|y|^beta ||(-Delta)^{beta/2} f||_p)
double check_translation_bound(const GridFunction& f, const Vec& y, double beta, double p);

// space-time trajectory: states u(t_i) plus the solver-stored d/dt field
// (never a finite difference of the states)
struct SpaceTimeField {
  std::vector<double> times;
  std::vector<GridFunction> states;
  std::vector<GridFunction> dstates;
};

struct SpaceTimeNorms {
  double sup_lower;
  double y_norm;
  double dt_norm;
  double x_norm;
};

// X-norm components with beta = alpha: sup_s ||u(s)||_{H^{beta-alpha}} +
// ||u||_{Y^{alpha}} + ||du||_{Y^{beta-alpha}}.  The lower-order slots use
// exponent beta - alpha = 0; literal_lower switches them to the
// beta - 1 variant for comparison.
SpaceTimeNorms spacetime_norms(const SpaceTimeField& u, double alpha, double p,
                               bool literal_lower = false);

}  // namespace torlevy
