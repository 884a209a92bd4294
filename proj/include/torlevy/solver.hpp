#pragma once

#include <memory>
#include <string>

#include "torlevy/norms.hpp"
#include "torlevy/operator.hpp"
#include "torlevy/semigroup.hpp"

namespace torlevy {

// Drift b(t, x) with its declared regularity data.  An empty b means zero
// drift.  grad(t, x, axis) = d b / d x_axis, needed only for the
// differentiated a priori system (k = 1).
struct DriftField {
  std::function<Vec(double, const Vec&)> b;
  double bound = 0.0;                         // C_b
  std::function<double(double)> modulus;      // omega_b, used when alpha = 1
  std::function<Vec(double, const Vec&, int)> grad;

  bool is_zero() const { return !static_cast<bool>(b); }
  Vec at(double t, const Vec& x) const { return b ? b(t, x) : Vec{0.0, 0.0}; }
};

struct HypothesisCheck {
  std::string name;
  bool passed;
  double margin;  // signed distance to the failure boundary (positive = ok)
};

// All standing-hypothesis checks for the Cauchy problem, reported with
// numeric margins; Problem construction requires every one to pass.
std::vector<HypothesisCheck> hypothesis_report(const TorusGrid& grid, const BoundedLevyMeasure& nu,
                                               const KernelCoefficient& coeff,
                                               const DriftField& drift, double p, double horizon);

// The linear Cauchy problem du = L^{a nu} u + b . grad u + f, u(0) = phi.
struct Problem {
  TorusGrid grid;
  BoundedLevyMeasure nu;
  KernelCoefficient coeff;
  DriftField drift;
  std::function<GridFunction(double)> forcing;  // null = zero forcing
  GridFunction initial;
  double horizon;
  double p;
  QuadratureScheme scheme;

  Problem(TorusGrid grid_, BoundedLevyMeasure nu_, KernelCoefficient coeff_, DriftField drift_,
          std::function<GridFunction(double)> forcing_, GridFunction initial_, double horizon_,
          double p_, QuadratureScheme scheme_ = QuadratureScheme{});

  double alpha() const { return nu.alpha(); }
};

enum class SolveRoute { duhamel, imex, continuity, nonlinear };

struct Solution {
  std::vector<double> times;
  std::vector<GridFunction> states;
  std::vector<GridFunction> rhs_history;  // solver-evaluated right-hand side per node
  SolveRoute route = SolveRoute::imex;
  double residual = 0.0;           // midpoint-differencing defect against rhs_history
  double expected_residual = 0.0;  // crude dt * ||rhs|| scale for sanity gates
  std::vector<double> energy;      // nonlinear route only

  SpaceTimeField as_field() const { return {times, states, rhs_history}; }
};

struct ContinuityResult {
  Solution solution;
  int iterations = 0;  // total Picard solves across the lambda march
  std::vector<double> contraction_estimates;
  std::vector<double> lambda_schedule;
};

struct AprioriReport {
  double x_norm;
  double phi_norm;
  double f_norm;
  double ratio;
};

class CauchySolver {
 public:
  explicit CauchySolver(Problem prob);
  CauchySolver(Problem prob, std::shared_ptr<const SymbolTable> shared_psi);

  const Problem& problem() const { return prob_; }
  const SymbolTable& symbol() const { return *psi_; }
  std::shared_ptr<const SymbolTable> shared_symbol() const { return psi_; }

  // exact spectral Duhamel march; requires a constant kernel and
  // x-independent drift
  Solution solve_duhamel(int n_steps) const;

  // first-order IMEX Euler with the frozen median coefficient implicit
  Solution solve_imex(int n_steps) const;

  // continuity-method march in lambda with Picard fixed points
  ContinuityResult solve_continuity(int base_steps, double tol,
                                    double initial_lambda_step = 0.5) const;

  AprioriReport apriori_report(const Solution& sol, int k) const;

  // right-hand side L^{a nu} u + b . grad u + f evaluated at (t, u)
  GridFunction rhs(const GridFunction& u, double t) const;

 private:
  GridFunction apply_kernel_shifted(const GridFunction& u, double t, double shift) const;
  GridFunction drift_term(const GridFunction& u, double t) const;
  GridFunction forcing_at(double t) const;
  double median_a0(double t) const;

  Problem prob_;
  std::shared_ptr<const SymbolTable> psi_;
  NonlocalOperator op_;
};

// x-mollification of the coefficient and drift against a C^inf bump of
// radius eps supported on grid offsets; preserves the declared bounds and
// satisfies |a_eps - a| <= omega_a^(1)(eps) (spot-checked).
std::pair<KernelCoefficient, DriftField> mollify_coefficients(const KernelCoefficient& coeff,
                                                              const DriftField& drift, double eps,
                                                              const TorusGrid& grid);

// Nonlinear gradient-flow right-hand side data: phi' odd with phi'(0) = 0,
// phi'' in [1/Lambda, Lambda], kappa even in [1/Lambda, Lambda].
struct NonlinearFlux {
  std::function<double(double)> phi_prime;
  std::function<double(double)> phi_value;  // for the energy monitor
  double phi2_at_zero = 1.0;
  double Lambda = 1.0;
};

Solution solve_nonlinear(const GridFunction& theta0, const std::function<double(double)>& kappa,
                         const NonlinearFlux& flux, double alpha, int n_steps, double horizon,
                         const QuadratureScheme& scheme = QuadratureScheme{});

// energy V(theta) of the nonlinear flow (d = 1 double-sum quadrature)
double nonlinear_energy(const GridFunction& theta, const std::function<double(double)>& kappa,
                        const NonlinearFlux& flux, double alpha);

double solution_residual(const Solution& sol, double p);

}  // namespace torlevy
