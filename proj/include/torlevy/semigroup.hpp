#pragma once

#include <cstdint>
#include <utility>

#include "torlevy/grid.hpp"
#include "torlevy/measure.hpp"
#include "torlevy/symbol.hpp"

namespace torlevy {

// Monte Carlo sampler controls for the process X_t driven by
// N(dt, dx) with intensity lambda(t) dt nu(dx) plus the deterministic
// drift integral of vartheta.
struct SamplerConfig {
  double r_cut = 0.05;             // small-jump cutoff, must be in (0, 1]
  bool gaussian_correction = true; // replace |y| <= r_cut jumps by a matched Gaussian
  int n_paths = 10000;
  std::uint64_t seed = 1;
  std::function<double(double)> lambda = [](double) { return 1.0; };
  double lambda_floor = 1.0;  // declared lambda_0 with lambda(t) >= lambda_0 > 0
  std::function<Vec(double)> vartheta = [](double) { return Vec{0.0, 0.0}; };

  void validate() const;
};

struct LevyPathSample {
  std::vector<double> time_nodes;
  std::vector<Vec> positions;  // X at each node
  std::vector<std::pair<double, Vec>> jump_ledger;  // jumps above r_cut
  Vec drift_total{0.0, 0.0};
  Vec compensator_total{0.0, 0.0};   // subtracted compensator over the window
  Vec small_jump_mean{0.0, 0.0};     // added for alpha < 1 with correction on
  Vec gaussian_increment{0.0, 0.0};  // added at the final node when enabled
  double dropped_small_jump_variance = 0.0;  // reported when correction is off
  std::uint64_t seed_used = 0;

  Vec final_position() const { return positions.back(); }
};

// One trajectory on [0, t_end]; the (seed, path_index) pair fixes the
// stream, so repeated calls are bit-identical.
LevyPathSample sample_path(const BoundedLevyMeasure& nu, const SamplerConfig& cfg, double t_end,
                           std::uint64_t path_index = 0);

// X_t - X_s for n_paths independent streams (ledgers not retained)
std::vector<Vec> sample_increments(const BoundedLevyMeasure& nu, const SamplerConfig& cfg,
                                   double s, double t);

struct McPropagation {
  GridFunction mean;
  double stderr_max;  // max over grid points of the pointwise standard error
};

// T_{t,s} phi(x) = E phi(x + X_t - X_s) by Monte Carlo over spectral shifts
McPropagation propagate_mc(const GridFunction& phi, const BoundedLevyMeasure& nu,
                           const SamplerConfig& cfg, double s, double t);

struct CutoffConsistency {
  double discrepancy;   // grid-max difference between the two cutoff estimates
  double combined_se;   // root-sum-square of their standard errors
};

// Common-random-numbers comparison of the Gaussian small-jump substitution
// at cutoffs r_cut and r_cut/2: both estimates share the jump realization
// above the finer cutoff, so the difference isolates the substitution error
// for the band in between instead of independent Monte Carlo noise.
CutoffConsistency compare_cutoff_halving(const GridFunction& phi, const BoundedLevyMeasure& nu,
                                         const SamplerConfig& cfg, double s, double t);

// exact Fourier multiplier e^{(t-s)(lambda psi(k) + i k . vartheta)} for
// constant lambda, vartheta on [s, t]
GridFunction propagate_spectral(const GridFunction& phi, const SymbolTable& psi, double s,
                                double t, double lambda_const, const Vec& vartheta_const);

struct FactorizationCheck {
  double discrepancy;  // grid-max difference between the two routes
  double combined_se;  // root-sum-square of the two Monte Carlo errors
};

// Splits the intensity into (lambda - lambda_floor) + lambda_floor and
// compares the direct Monte Carlo propagation against Monte Carlo over
// X^(1) of the constant-rate spectral factor.
FactorizationCheck check_factorization(const GridFunction& phi, const BoundedLevyMeasure& nu,
                                       const SamplerConfig& cfg, const SymbolTable& psi,
                                       double s, double t);

struct CharFunctionSample {
  Complex empirical;
  double se;  // per-component standard error
};

// empirical characteristic function (1/N) sum e^{i k . dX} with its
// standard error
CharFunctionSample empirical_char_function(const std::vector<Vec>& increments, const Vec& k,
                                           int dim);

// expected count of ledger jumps over [0, t_end]
double expected_jump_count(const BoundedLevyMeasure& nu, const SamplerConfig& cfg, double t_end);

}  // namespace torlevy
