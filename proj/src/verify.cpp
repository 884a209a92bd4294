#include "torlevy/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "torlevy/config.hpp"
#include "torlevy/quadrature.hpp"

namespace torlevy {

Json SuiteResult::to_json() const {
  Json j;
  j["suite"] = suite;
  j["passed"] = passed;
  Json stats = Json::object();
  for (const auto& m : metrics) stats[m.name] = m.value;
  j["empirical_constants"] = stats;
  j["failures"] = failures;
  return j;
}

namespace {

GridFunction plane_wave(const TorusGrid& g, int k0, int k1 = 0) {
  std::vector<Complex> spec(g.size(), Complex(0.0));
  const int n = g.n();
  auto idx = [&](int k) { return k >= 0 ? k : k + n; };
  spec[g.dim() == 1 ? static_cast<std::size_t>(idx(k0))
                    : static_cast<std::size_t>(idx(k0)) * n + idx(k1)] = Complex(1.0);
  return GridFunction::from_spectral(g, std::move(spec));
}

BoundedLevyMeasure canonical_measure(int dim, double alpha) {
  if (dim == 1)
    return BoundedLevyMeasure::constant(
        StableLevyMeasure(alpha, SphericalMeasure::symmetric_pair_1d()), 1.0);
  return BoundedLevyMeasure::constant(
      StableLevyMeasure(alpha, SphericalMeasure::uniform_2d(16)), 1.0);
}

double rel_change(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::string tag(double alpha, double p) {
  return "(alpha=" + format_double(alpha) + ",p=" + format_double(p) + ")";
}

}  // namespace

SuiteResult check_symbol_agreement(const VerifyOptions& opt) {
  SuiteResult res;
  res.suite = "symbol-agreement";
  res.csv.header = {"d", "alpha", "k1", "k2", "quad_re", "quad_im", "oracle_re", "oracle_im",
                    "rel_err"};
  const double tol = 1e-4;
  double worst = 0.0;

  QuadratureScheme scheme;
  scheme.r_min = 0.005;
  auto unit = KernelCoefficient::one();

  // d = 1
  {
    TorusGrid g(1, opt.n);
    for (double alpha : {0.5, 1.0, 1.5}) {
      auto nu = canonical_measure(1, alpha);
      NonlocalOperator op(nu, scheme, g);
      for (int k = 1; k <= 8; ++k) {
        Complex quad = op.multiplier_symbol(vec1(k), unit, 0.0);
        Complex oracle = char_exponent(nu, vec1(k));
        double err = std::abs(quad - oracle) / std::abs(oracle);
        worst = std::max(worst, err);
        res.csv.add_row({1, alpha, double(k), 0, quad.real(), quad.imag(), oracle.real(),
                         oracle.imag(), err});
      }
    }
  }
  // d = 2
  {
    TorusGrid g(2, 32);
    const std::vector<std::pair<int, int>> ks = {{1, 0}, {0, 1}, {1, 1}, {2, 1}, {2, 2}, {3, 1},
                                                 {4, 0}, {3, 3}, {4, 3}, {5, 1}, {6, 0}, {5, 5},
                                                 {6, 4}, {7, 2}, {8, 0}, {0, 8}};
    for (double alpha : {0.5, 1.0, 1.5}) {
      auto nu = canonical_measure(2, alpha);
      NonlocalOperator op(nu, scheme, g);
      for (auto [k1, k2] : ks) {
        Complex quad = op.multiplier_symbol(vec2(k1, k2), unit, 0.0);
        Complex oracle = char_exponent(nu, vec2(k1, k2));
        double err = std::abs(quad - oracle) / std::abs(oracle);
        worst = std::max(worst, err);
        res.csv.add_row({2, alpha, double(k1), double(k2), quad.real(), quad.imag(),
                         oracle.real(), oracle.imag(), err});
      }
    }
  }
  // plane-wave application path: L^nu e^{ikx} = psi_quad(k) e^{ikx}
  {
    TorusGrid g(1, opt.n);
    auto nu = canonical_measure(1, 1.5);
    NonlocalOperator op(nu, scheme, g);
    GridFunction w = plane_wave(g, 5);
    auto out = op.apply(w, unit, 0.0);
    Complex oracle = char_exponent(nu, vec1(5));
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      err = std::max(err, std::abs(out.field.nodal()[i] - oracle * w.nodal()[i]));
    worst = std::max(worst, err / std::abs(oracle));
  }

  res.metric("max_rel_err", worst);
  res.require(worst <= tol, "operator symbol deviates from the characteristic exponent by " +
                                format_double(worst) + " > 1e-4");
  return res;
}

namespace {

// shared two-sided ratio sweep used by criteria 2 and 3
struct TwoSidedStats {
  double c_lower, c_upper;
};

TwoSidedStats two_sided_ratios(int n, int ensemble, std::uint64_t seed, double alpha, double p,
                               const KernelCoefficient& coeff, bool with_lp_term,
                               SuiteResult* res) {
  TorusGrid g(1, n);
  // density-modulated measure: nu_1 <= nu <= nu_2 with a genuinely
  // scale-breaking density, so the two-sided bracket is not a single point
  auto nu = BoundedLevyMeasure::radial_power(
      StableLevyMeasure(alpha, SphericalMeasure::symmetric_pair_1d()), 0.6, 0.5);
  QuadratureScheme scheme;
  scheme.r_min = 0.005;
  NonlocalOperator op(nu, scheme, g);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (int s = 0; s < ensemble; ++s) {
    auto f = random_trig_polynomial(1, 8, seed + s).to_grid(g);
    GridFunction lf = op.apply(f, coeff, 0.0).field;
    double num = lp_norm(lf, p) + (with_lp_term ? lp_norm(f, p) : 0.0);
    double den = with_lp_term ? bessel_norm(f, NormOrder(alpha, p))
                              : lp_norm(fractional_laplacian(f, alpha), p);
    double ratio = num / den;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    if (res) res->csv.add_row({double(n), alpha, p, double(s), ratio});
  }
  return {lo, hi};
}

}  // namespace

SuiteResult check_symbol_equivalence(const VerifyOptions& opt) {
  SuiteResult res;
  res.suite = "symbol-equivalence";
  res.csv.header = {"n", "alpha", "p", "sample", "ratio"};
  auto unit = KernelCoefficient::one();
  for (double alpha : {0.5, 1.0, 1.5}) {
    for (double p : {1.5, 2.0, 4.0}) {
      auto base = two_sided_ratios(opt.n, opt.ensemble, opt.seed, alpha, p, unit, false, &res);
      auto fine =
          two_sided_ratios(2 * opt.n, opt.ensemble, opt.seed, alpha, p, unit, false, nullptr);
      res.metric("c_lower" + tag(alpha, p), base.c_lower);
      res.metric("C_upper" + tag(alpha, p), base.c_upper);
      res.require(base.c_lower > 0.0, "lower ratio bound must be positive " + tag(alpha, p));
      res.require(std::isfinite(base.c_upper), "upper ratio bound must be finite");
      res.require(rel_change(fine.c_lower, base.c_lower) <= 0.15,
                  "lower bound moved more than 15% under grid doubling " + tag(alpha, p));
      res.require(rel_change(fine.c_upper, base.c_upper) <= 0.15,
                  "upper bound moved more than 15% under grid doubling " + tag(alpha, p));
    }
  }
  return res;
}

SuiteResult check_variable_kernel_equivalence(const VerifyOptions& opt) {
  SuiteResult res;
  res.suite = "variable-kernel-equivalence";
  res.csv.header = {"n", "alpha", "p", "sample", "ratio"};
  auto coeff = KernelCoefficient::separable_sin_power(0.25, 0.25, 0.6);
  const int ens = opt.quick ? 20 : opt.ensemble;
  const std::vector<double> ps = {1.5, 2.0, 4.0};

  // bounds[p] = {min ratio, max ratio}; the operator output is shared
  // across p values
  auto sweep = [&](int n, double alpha, bool record) {
    TorusGrid g(1, n);
    auto nu = canonical_measure(1, alpha);
    NonlocalOperator op(nu, QuadratureScheme{}, g);
    std::map<double, std::pair<double, double>> bounds;
    for (double p : ps) bounds[p] = {std::numeric_limits<double>::infinity(), 0.0};
    for (int s = 0; s < ens; ++s) {
      auto f = random_trig_polynomial(1, 8, opt.seed + 31 * s).to_grid(g);
      GridFunction lf = op.apply(f, coeff, 0.0).field;
      for (double p : ps) {
        double ratio = (lp_norm(lf, p) + lp_norm(f, p)) / bessel_norm(f, NormOrder(alpha, p));
        bounds[p].first = std::min(bounds[p].first, ratio);
        bounds[p].second = std::max(bounds[p].second, ratio);
        if (record) res.csv.add_row({double(n), alpha, p, double(s), ratio});
      }
    }
    return bounds;
  };

  for (double alpha : {0.5, 1.0, 1.5}) {
    auto base = sweep(opt.n, alpha, true);
    auto fine = sweep(2 * opt.n, alpha, false);
    for (double p : ps) {
      res.metric("c_lower" + tag(alpha, p), base[p].first);
      res.metric("C_upper" + tag(alpha, p), base[p].second);
      res.require(base[p].first > 0.0,
                  "variable-kernel lower bound must be positive " + tag(alpha, p));
      res.require(rel_change(fine[p].first, base[p].first) <= 0.15,
                  "variable-kernel lower bound unstable under grid doubling " + tag(alpha, p));
      res.require(rel_change(fine[p].second, base[p].second) <= 0.15,
                  "variable-kernel upper bound unstable under grid doubling " + tag(alpha, p));
    }
  }
  return res;
}

SuiteResult check_dini_remainder(const VerifyOptions& opt) {
  SuiteResult res;
  res.suite = "dini-remainder";
  res.csv.header = {"sample", "eps", "lhs", "ratio"};
  const double alpha = 1.5, gamma = 0.6, p = 2.0;
  TorusGrid g(1, 512);
  auto nu = canonical_measure(1, alpha);
  QuadratureScheme scheme;
  scheme.r_min = 5e-4;
  auto coeff = KernelCoefficient::radial_bump(1.0, gamma);

  // Dini integral against the closed form eps^gamma / gamma
  {
    double eps = 0.5;
    std::vector<double> radii;
    for (int j = 24; j >= 0; --j) radii.push_back(eps * std::pow(2.0, -j));
    auto dini = estimate_dini(coeff, g, radii);
    double analytic = std::pow(eps, gamma) / gamma;
    double err = rel_change(dini.dini_integral0, analytic);
    res.metric("dini_integral_rel_err", err);
    res.require(err <= 0.05, "estimated Dini integral deviates from eps^gamma/gamma by " +
                                 format_double(err));
  }

  double global_max = 0.0;
  for (int s = 0; s < 3; ++s) {
    auto f = random_trig_polynomial_decay(1, 160, alpha + 0.5, opt.seed + 17 * s).to_grid(g);
    double prev = -1.0, lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int j = 1; j <= 5; ++j) {
      auto chk = near_field_remainder_check(f, nu, coeff, 0.0, std::pow(2.0, -j), p, scheme);
      res.csv.add_row({double(s), std::pow(2.0, -j), chk.lhs, chk.bound_ratio});
      lo = std::min(lo, chk.bound_ratio);
      hi = std::max(hi, chk.bound_ratio);
      if (prev > 0.0)
        res.require(rel_change(chk.bound_ratio, prev) <= 0.20,
                    "near-field remainder ratio moved more than 20% between eps halvings");
      prev = chk.bound_ratio;
    }
    global_max = std::max(global_max, hi);
    res.require(hi / lo <= 1.5, "near-field remainder ratio window exceeds 1.5 across the eps sweep");
  }
  res.metric("max_ratio", global_max);
  res.require(global_max < 10.0, "near-field remainder constant unbounded");
  return res;
}

SuiteResult check_norm_inequalities(const VerifyOptions& opt) {
  SuiteResult res;
  res.suite = "norm-inequalities";
  res.csv.header = {"kind", "beta", "p", "k_or_sample", "y", "ratio"};
  TorusGrid g(1, opt.n);

  // interpolation: plane waves are the exact equality case
  double worst_plane = 0.0;
  for (int k = 1; k <= 8; ++k) {
    auto chk = check_interpolation(plane_wave(g, k), 0.5, 1.5, 2.0);
    worst_plane = std::max(worst_plane, std::abs(chk.rhs_ratio - 1.0));
    res.csv.add_row({0, 0.5, 2.0, double(k), 0.0, chk.rhs_ratio});
  }
  res.metric("plane_wave_interpolation_dev", worst_plane);
  res.require(worst_plane <= 1e-10, "plane-wave interpolation ratio is not exactly 1");

  // translation bound: plane waves, p-uniform
  for (double beta : {0.3, 0.5, 0.7}) {
    double cap = std::pow(2.0, 1.0 - beta) + 1e-9;
    double worst = 0.0;
    for (double p : {1.5, 2.0, 4.0}) {
      for (int k = 1; k <= 8; ++k) {
        GridFunction w = plane_wave(g, k);
        for (int j = 0; j <= 8; ++j) {
          double y = std::pow(2.0, -j);
          double ratio = check_translation_bound(w, vec1(y), beta, p);
          worst = std::max(worst, ratio);
          if (p == 2.0) res.csv.add_row({1, beta, p, double(k), y, ratio});
        }
      }
    }
    res.metric("translation_C(beta=" + format_double(beta) + ")", worst);
    res.require(worst <= cap,
                "plane-wave translation constant exceeds 2^{1-beta} at beta = " +
                    format_double(beta));
  }

  // random ensemble: bounded and p-uniform
  {
    const int ens = opt.quick ? 10 : 30;
    double cp[3] = {0.0, 0.0, 0.0};
    const double ps[3] = {1.5, 2.0, 4.0};
    for (int s = 0; s < ens; ++s) {
      auto f = random_trig_polynomial(1, 8, opt.seed + 7 * s).to_grid(g);
      for (int pi = 0; pi < 3; ++pi) {
        for (int j = 1; j <= 6; ++j) {
          double ratio = check_translation_bound(f, vec1(std::pow(2.0, -j)), 0.5, ps[pi]);
          cp[pi] = std::max(cp[pi], ratio);
        }
      }
    }
    double cmax = std::max({cp[0], cp[1], cp[2]});
    double cmin = std::min({cp[0], cp[1], cp[2]});
    res.metric("translation_C_ensemble_max", cmax);
    res.metric("translation_C_p_spread", cmax / cmin - 1.0);
    res.require(cmax <= 4.0, "ensemble translation constant unbounded");
    res.require(cmax / cmin - 1.0 <= 0.5, "translation constant is not p-uniform");
  }

  // interpolation ensemble: finite and stable under grid doubling
  {
    const int ens = opt.quick ? 10 : 30;
    double base = 0.0, fine = 0.0;
    for (int s = 0; s < ens; ++s) {
      auto poly = random_trig_polynomial(1, 8, opt.seed + 11 * s);
      base = std::max(base,
                      check_interpolation(poly.to_grid(TorusGrid(1, opt.n)), 0.5, 1.5, 2.0)
                          .rhs_ratio);
      fine = std::max(fine,
                      check_interpolation(poly.to_grid(TorusGrid(1, 2 * opt.n)), 0.5, 1.5, 2.0)
                          .rhs_ratio);
    }
    res.metric("interpolation_C_ensemble", base);
    res.require(base <= 2.0, "interpolation constant unexpectedly large");
    res.require(rel_change(fine, base) <= 0.10,
                "interpolation constant moved more than 10% under grid doubling");
  }
  return res;
}

SuiteResult check_semigroup(const VerifyOptions& opt) {
  SuiteResult res;
  res.suite = "semigroup";
  res.csv.header = {"alpha", "k", "psi_re", "psi_im", "emp_re", "emp_im", "se"};
  TorusGrid g(1, opt.n);

  for (double alpha : {0.5, 1.0, 1.5}) {
    auto nu = canonical_measure(1, alpha);
    SamplerConfig cfg;
    cfg.r_cut = g.spacing() / 4.0;
    cfg.n_paths = opt.quick ? 2000 : opt.n_paths;
    cfg.seed = opt.seed;

    // empirical characteristic function of X_1 against e^{psi(k)}
    auto incr = sample_increments(nu, cfg, 0.0, 1.0);
    for (int k : {1, 2, 3}) {
      Complex psi = char_exponent(nu, vec1(k));
      Complex expect = std::exp(psi);
      auto emp = empirical_char_function(incr, vec1(k), 1);
      res.csv.add_row({alpha, double(k), psi.real(), psi.imag(), emp.empirical.real(),
                       emp.empirical.imag(), emp.se});
      double z = std::abs(emp.empirical - expect) / std::max(emp.se, 1e-12);
      res.metric("cf_z(alpha=" + format_double(alpha) + ",k=" + format_double(k) + ")", z);
      res.require(z <= 3.0, "empirical characteristic function off by more than 3 SE");
    }

    // MC propagation against the exact multiplier
    SymbolTable psi_tab(g, nu);
    auto phi = random_trig_polynomial(1, 5, opt.seed + 5).to_grid(g);
    auto mc = propagate_mc(phi, nu, cfg, 0.0, 0.7);
    GridFunction exact = propagate_spectral(phi, psi_tab, 0.0, 0.7, 1.0, Vec{0.0, 0.0});
    double disc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      disc = std::max(disc, std::abs(mc.mean.nodal()[i] - exact.nodal()[i]));
    double z = disc / std::max(mc.stderr_max, 1e-12);
    res.metric("mc_vs_spectral_z(alpha=" + format_double(alpha) + ")", z);
    res.require(z <= 3.0, "MC propagation deviates from the spectral factor by more than 3 SE");

    // factorization with a genuinely time-dependent intensity
    SamplerConfig cfg2 = cfg;
    cfg2.lambda = [](double t) { return 1.0 + t; };
    cfg2.lambda_floor = 1.0;
    auto fac = check_factorization(phi, nu, cfg2, psi_tab, 0.0, 0.6);
    double zf = fac.discrepancy / std::max(fac.combined_se, 1e-12);
    res.metric("factorization_z(alpha=" + format_double(alpha) + ")", zf);
    res.require(zf <= 3.0, "factorization identity off by more than 3 SE");
  }

  // Poisson jump-count consistency (cheap cutoff so counts are small)
  {
    auto nu = BoundedLevyMeasure::constant(
        StableLevyMeasure(0.8, SphericalMeasure::single_1d(1.0)), 1.0);
    SamplerConfig cfg;
    cfg.r_cut = 0.5;
    cfg.n_paths = opt.quick ? 2000 : opt.n_paths;
    cfg.seed = opt.seed + 99;
    double expected = expected_jump_count(nu, cfg, 1.0);
    double mean = 0.0;
    for (int p = 0; p < cfg.n_paths; ++p)
      mean += static_cast<double>(sample_path(nu, cfg, 1.0, p).jump_ledger.size());
    mean /= cfg.n_paths;
    double z = std::abs(mean - expected) / std::sqrt(expected / cfg.n_paths);
    res.metric("jump_count_z", z);
    res.require(z <= 3.0, "ledger jump count disagrees with the Poisson mean");
  }

  // halving r_cut with the Gaussian proxy moves the mean by less than one
  // combined standard error (common-random-numbers coupling, so the
  // difference isolates the substitution error of the cutoff band)
  {
    auto nu = canonical_measure(1, 1.5);
    auto phi = random_trig_polynomial(1, 5, opt.seed + 6).to_grid(g);
    SamplerConfig cfg;
    cfg.n_paths = opt.quick ? 2000 : opt.n_paths;
    cfg.seed = opt.seed + 7;
    cfg.r_cut = g.spacing() / 4.0;
    auto chk = compare_cutoff_halving(phi, nu, cfg, 0.0, 0.5);
    res.metric("rcut_halving_se_units", chk.discrepancy / chk.combined_se);
    res.require(chk.discrepancy < chk.combined_se,
                "halving r_cut moved the MC mean by one combined SE or more");
  }
  return res;
}

SuiteResult check_maximal_regularity(const VerifyOptions& opt) {
  SuiteResult res;
  res.suite = "maximal-regularity";
  res.csv.header = {"alpha", "p", "sample", "ratio"};
  TorusGrid g(1, 64);
  auto lambda = [](double t) { return 1.0 + 0.5 * t; };
  auto theta = [](double) { return 0.3; };
  const int ens = opt.quick ? 10 : 50;

  for (double alpha : {0.5, 1.0, 1.5}) {
    auto nu = canonical_measure(1, alpha);
    SymbolTable psi(g, nu);

    auto constant_for = [&](double p, int n_time) {
      double worst = 0.0;
      for (int s = 0; s < ens; ++s) {
        auto fa = random_trig_polynomial(1, 6, opt.seed + 13 * s).to_grid(g);
        auto fb = random_trig_polynomial(1, 6, opt.seed + 13 * s + 1).to_grid(g);
        double omega = 1.0 + (s % 5);
        const double T = 1.0;
        const double dt = T / n_time;
        auto f_at = [&](double t) {
          return std::cos(omega * t) * fa + std::sin(omega * t) * fb;
        };
        // cumulative Lambda(t), Theta(t) on the time grid
        std::vector<double> Lam(n_time + 1, 0.0), The(n_time + 1, 0.0);
        for (int i = 1; i <= n_time; ++i) {
          Lam[i] = Lam[i - 1] + integrate_gauss(lambda, (i - 1) * dt, i * dt, 8);
          The[i] = The[i - 1] + integrate_gauss(theta, (i - 1) * dt, i * dt, 8);
        }
        std::vector<GridFunction> fhat;
        fhat.reserve(n_time + 1);
        for (int i = 0; i <= n_time; ++i) fhat.push_back(f_at(i * dt));
        double num = 0.0, den = 0.0;
        for (int i = 1; i <= n_time; ++i) {
          // v(t_i) = int_0^{t_i} T_{t_i,s} f(s) ds by trapezoid in s
          std::vector<Complex> acc(g.size(), Complex(0.0));
          for (int j = 0; j <= i; ++j) {
            double w = (j == 0 || j == i) ? 0.5 * dt : dt;
            const auto& fs = fhat[j].spectral();
            for (std::size_t m = 0; m < g.size(); ++m) {
              Vec k = g.wavevec(m);
              Complex e = std::exp((Lam[i] - Lam[j]) * psi.at(m) +
                                   Complex(0.0, k[0] * (The[i] - The[j])));
              acc[m] += w * fs[m] * e;
            }
          }
          for (std::size_t m = 0; m < g.size(); ++m) acc[m] *= psi.at(m);
          GridFunction lv = GridFunction::from_spectral(g, std::move(acc));
          num += std::pow(lp_norm(lv, p), p) * dt;
          den += std::pow(lp_norm(fhat[i], p), p) * dt;
        }
        worst = std::max(worst, num / den);
        if (n_time == opt.time_steps) res.csv.add_row({alpha, p, double(s), num / den});
      }
      return worst;
    };

    for (double p : {1.5, 2.0, 4.0}) {
      double base = constant_for(p, opt.time_steps);
      double fine = constant_for(p, 2 * opt.time_steps);
      res.metric("maxreg_C" + tag(alpha, p), base);
      res.require(std::isfinite(base), "maximal-regularity constant not finite");
      res.require(rel_change(fine, base) <= 0.20,
                  "maximal-regularity constant moved more than 20% under time-grid doubling " +
                      tag(alpha, p));
    }
  }
  return res;
}

namespace {

struct EnsembleProblem {
  Problem prob;
  int steps;
};

Problem make_apriori_problem(int n, int idx, std::uint64_t seed, double T) {
  const double alphas[3] = {0.5, 1.0, 1.5};
  const double ps[3] = {1.5, 2.0, 4.0};
  double alpha = alphas[idx % 3];
  double p = ps[(idx / 3) % 3];
  TorusGrid g(1, n);
  auto nu = canonical_measure(1, alpha);
  double ax = 0.1 + 0.02 * (idx % 7);
  double ay = 0.15 + 0.015 * (idx % 5);
  double gamma = 0.5 + 0.05 * (idx % 4);
  auto coeff = KernelCoefficient::separable_sin_power(ax, ay, gamma);
  DriftField drift;
  if (alpha >= 1.0) {
    double amp = 0.1 + 0.02 * (idx % 3);
    drift.b = [amp](double, const Vec& x) { return vec1(amp * std::cos(x[0])); };
    drift.bound = 2.0 * amp;
    drift.modulus = [amp](double r) { return amp * std::min(r, 2.0); };
    drift.grad = [amp](double, const Vec& x, int) { return vec1(-amp * std::sin(x[0])); };
  }
  GridFunction phi = random_trig_polynomial_decay(1, 6, 1.2, seed + 101 * idx).to_grid(g);
  GridFunction fs = random_trig_polynomial(1, 5, seed + 101 * idx + 50).to_grid(g);
  auto forcing = [fs](double t) { return std::exp(-t) * fs; };
  return Problem(g, nu, coeff, drift, forcing, phi, T, p);
}

}  // namespace

SuiteResult check_apriori(const VerifyOptions& opt) {
  SuiteResult res;
  res.suite = "apriori-estimate";
  res.csv.header = {"problem", "n", "steps", "k", "ratio", "embedding_C"};
  const double T = 0.5;
  const int n_problems = opt.quick ? 6 : 20;
  const int base_n = 64, base_steps = 32;

  std::vector<double> ratios;
  for (int idx = 0; idx < n_problems; ++idx) {
    Problem prob = make_apriori_problem(base_n, idx, opt.seed, T);
    CauchySolver solver(std::move(prob));
    Solution sol = solver.solve_imex(base_steps);
    auto rep = solver.apriori_report(sol, 0);
    ratios.push_back(rep.ratio);
    // embedding: sup_t of the W-proxy norm against the X-norm
    double alpha = solver.problem().alpha(), p = solver.problem().p;
    double order = alpha - alpha / p;
    double supw = 0.0;
    for (const auto& u : sol.states) supw = std::max(supw, sobolev_w_norm(u, order, p));
    double emb = supw / rep.x_norm;
    res.csv.add_row({double(idx), double(base_n), double(base_steps), 0, rep.ratio, emb});
    res.require(std::isfinite(rep.ratio) && rep.ratio < 100.0,
                "a priori ratio unbounded on problem " + std::to_string(idx));
    res.require(emb < 10.0, "embedding constant unbounded on problem " + std::to_string(idx));
  }
  double rmax = *std::max_element(ratios.begin(), ratios.end());
  res.metric("apriori_ratio_max", rmax);

  // refinement stability on three problems
  for (int idx : {0, 4, 8}) {
    Problem coarse_p = make_apriori_problem(base_n, idx, opt.seed, T);
    CauchySolver coarse(std::move(coarse_p));
    double r0 = coarse.apriori_report(coarse.solve_imex(base_steps), 0).ratio;
    Problem fine_p = make_apriori_problem(2 * base_n, idx, opt.seed, T);
    CauchySolver fine(std::move(fine_p));
    double r1 = fine.apriori_report(fine.solve_imex(2 * base_steps), 0).ratio;
    res.metric("apriori_refinement_change(problem=" + std::to_string(idx) + ")",
               rel_change(r1, r0));
    res.require(rel_change(r1, r0) <= 0.25,
                "a priori ratio moved more than 25% under refinement on problem " +
                    std::to_string(idx));
  }

  // k = 1 differentiated system on one smooth problem
  {
    Problem prob = make_apriori_problem(base_n, 2, opt.seed, T);
    CauchySolver solver(std::move(prob));
    Solution sol = solver.solve_imex(base_steps);
    auto rep = solver.apriori_report(sol, 1);
    res.metric("apriori_ratio_k1", rep.ratio);
    res.require(std::isfinite(rep.ratio) && rep.ratio < 200.0,
                "k = 1 a priori ratio unbounded");
  }

  // mollification sweep: the constant must be eps-uniform
  {
    const int n = 128;
    Problem base_prob = make_apriori_problem(n, 1, opt.seed, T);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int j = 2; j <= 6; ++j) {
      double eps = std::pow(2.0, -j);
      auto [a_eps, b_eps] =
          mollify_coefficients(base_prob.coeff, base_prob.drift, eps, base_prob.grid);
      Problem mp(base_prob.grid, base_prob.nu, a_eps, b_eps, base_prob.forcing,
                 base_prob.initial, base_prob.horizon, base_prob.p, base_prob.scheme);
      CauchySolver solver(std::move(mp));
      double r = solver.apriori_report(solver.solve_imex(base_steps), 0).ratio;
      res.csv.add_row({1, double(n), double(base_steps), 0, r, eps});
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    res.metric("apriori_mollification_window", hi / lo);
    res.require(hi / lo <= 1.25,
                "a priori ratio varies more than 25% across the mollification sweep");
  }
  return res;
}

SuiteResult check_continuity_method(const VerifyOptions& opt) {
  SuiteResult res;
  res.suite = "continuity-method";
  res.csv.header = {"case", "lambda_steps", "iterations", "max_contraction", "final_vs_imex"};
  const int steps = 24;
  TorusGrid g(1, 64);

  // frozen case: one Picard iteration per lambda step
  {
    auto nu = canonical_measure(1, 1.5);
    GridFunction phi = random_trig_polynomial(1, 5, opt.seed).to_grid(g);
    GridFunction fs = random_trig_polynomial(1, 4, opt.seed + 1).to_grid(g);
    Problem prob(g, nu, KernelCoefficient::one(), DriftField{},
                 [fs](double t) { return std::exp(-t) * fs; }, phi, 0.5, 2.0);
    CauchySolver solver(std::move(prob));
    auto cont = solver.solve_continuity(steps, 1e-8);
    Solution direct = solver.solve_imex(steps);
    double diff = 0.0;
    for (std::size_t i = 0; i < direct.states.size(); ++i)
      diff = std::max(diff, (cont.solution.states[i] - direct.states[i]).max_abs());
    res.csv.add_row({0, double(cont.lambda_schedule.size() - 1), double(cont.iterations),
                     0.0, diff});
    res.metric("frozen_iterations_per_step",
               double(cont.iterations) / double(cont.lambda_schedule.size() - 1));
    res.require(cont.iterations == static_cast<int>(cont.lambda_schedule.size()) - 1,
                "frozen problem should converge in one Picard iteration per lambda step");
    res.require(cont.contraction_estimates.empty(),
                "frozen problem should record no contraction ratios");
    res.require(diff <= 1e-9, "frozen continuity solution deviates from the direct solve");
  }

  // variable-coefficient cases
  int case_id = 1;
  for (double alpha : {0.8, 1.5}) {
    auto nu = canonical_measure(1, alpha);
    auto coeff = KernelCoefficient::separable_sin_power(0.2, 0.2, 0.6);
    DriftField drift;
    if (alpha >= 1.0) {
      drift.b = [](double, const Vec& x) { return vec1(0.15 * std::cos(x[0])); };
      drift.bound = 0.3;
      drift.modulus = [](double r) { return 0.15 * std::min(r, 2.0); };
      drift.grad = [](double, const Vec& x, int) { return vec1(-0.15 * std::sin(x[0])); };
    }
    GridFunction phi = random_trig_polynomial(1, 5, opt.seed + case_id).to_grid(g);
    GridFunction fs = random_trig_polynomial(1, 4, opt.seed + 10 + case_id).to_grid(g);
    Problem prob(g, nu, coeff, drift, [fs](double t) { return std::exp(-t) * fs; }, phi, 0.5,
                 2.0);
    CauchySolver solver(std::move(prob));
    auto cont = solver.solve_continuity(steps, 1e-5);
    Solution direct = solver.solve_imex(steps);
    double diff = 0.0;
    for (std::size_t i = 0; i < direct.states.size(); ++i)
      diff = std::max(diff, lp_norm(cont.solution.states[i] - direct.states[i], 2.0));
    double max_rho = 0.0;
    for (double rho : cont.contraction_estimates) max_rho = std::max(max_rho, rho);
    double res_scale = 2.0 * std::max(cont.solution.residual, direct.residual);
    res.csv.add_row({double(case_id), double(cont.lambda_schedule.size() - 1),
                     double(cont.iterations), max_rho, diff});
    res.metric("max_contraction(alpha=" + format_double(alpha) + ")", max_rho);
    res.metric("final_vs_imex(alpha=" + format_double(alpha) + ")", diff);
    res.require(max_rho < 1.0, "contraction factor reached 1");
    res.require(diff <= res_scale,
                "continuity solution deviates from imex beyond twice the larger residual");
    ++case_id;
  }

  // schedule independence at the residual scale
  {
    auto nu = canonical_measure(1, 1.5);
    auto coeff = KernelCoefficient::separable_sin_power(0.2, 0.2, 0.6);
    GridFunction phi = random_trig_polynomial(1, 5, opt.seed + 77).to_grid(g);
    Problem prob(g, nu, coeff, DriftField{}, nullptr, phi, 0.5, 2.0);
    CauchySolver solver(std::move(prob));
    auto a = solver.solve_continuity(steps, 1e-6, 0.5);
    auto b = solver.solve_continuity(steps, 1e-6, 0.25);
    double diff = 0.0;
    for (std::size_t i = 0; i < a.solution.states.size(); ++i)
      diff = std::max(diff, lp_norm(a.solution.states[i] - b.solution.states[i], 2.0));
    res.metric("schedule_independence", diff);
    res.require(diff <= 10.0 * 1e-6,
                "lambda = 1 solution depends on the lambda-step schedule beyond tolerance");
  }
  return res;
}

SuiteResult check_nonlinear_flow(const VerifyOptions&) {
  SuiteResult res;
  res.suite = "nonlinear-flow";
  res.csv.header = {"case", "steps", "gap_or_energy"};
  TorusGrid g(1, 128);
  const double alpha = 1.2;

  // quadratic phi: the flow is the linear equation; first-order agreement
  // with the spectral Duhamel solution
  {
    NonlinearFlux flux;
    flux.phi_prime = [](double u) { return u; };
    flux.phi_value = [](double u) { return 0.5 * u * u; };
    flux.phi2_at_zero = 1.0;
    flux.Lambda = 1.0;
    auto kappa = [](double) { return 1.0; };
    std::vector<Complex> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = std::sin(g.point(i)[0]);
    GridFunction theta0 = GridFunction::from_nodal(g, std::move(v));

    auto nu = BoundedLevyMeasure::constant(
        StableLevyMeasure(alpha, SphericalMeasure::symmetric_pair_1d(1.0, 1.0)), 1.0);
    SymbolTable psi(g, nu);
    const double T = 0.25;
    GridFunction exact = propagate_spectral(theta0, psi, 0.0, T, 1.0, Vec{0.0, 0.0});

    QuadratureScheme scheme;
    scheme.r_max = 64.0 * kPi;
    std::vector<double> gaps;
    for (int steps : {50, 100, 200}) {
      Solution sol = solve_nonlinear(theta0, kappa, flux, alpha, steps, T, scheme);
      double gap = (sol.states.back() - exact).max_abs();
      gaps.push_back(gap);
      res.csv.add_row({0, double(steps), gap});
    }
    double slope = std::log(gaps[0] / gaps[1]) / std::log(2.0);
    res.metric("quadratic_case_order", slope);
    res.require(gaps[1] < gaps[0] && gaps[2] < gaps[1],
                "quadratic-case gap does not decrease under step refinement");
    res.require(slope > 0.6 && slope < 1.4,
                "quadratic case does not converge at first order in dt");
  }

  // non-quadratic flux: energy decreases over 200 steps
  {
    NonlinearFlux flux;
    flux.phi_prime = [](double u) { return u + 0.5 * std::sin(u); };
    flux.phi_value = [](double u) { return 0.5 * u * u + 0.5 * (1.0 - std::cos(u)); };
    flux.phi2_at_zero = 1.5;
    flux.Lambda = 2.0;
    auto kappa = [](double r) { return 1.0 + 0.25 * std::cos(r); };
    std::vector<Complex> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = std::sin(g.point(i)[0]);
    GridFunction theta0 = GridFunction::from_nodal(g, std::move(v));
    Solution sol = solve_nonlinear(theta0, kappa, flux, alpha, 200, 0.5);
    bool monotone = true;
    for (std::size_t i = 1; i < sol.energy.size(); ++i)
      if (sol.energy[i] > sol.energy[i - 1] + 1e-6 * sol.energy.front()) monotone = false;
    res.metric("energy_initial", sol.energy.front());
    res.metric("energy_final", sol.energy.back());
    res.require(monotone, "nonlinear energy increased along the flow");
    res.require(sol.energy.back() < sol.energy.front(), "nonlinear energy did not decrease");
    for (std::size_t i = 0; i < sol.energy.size(); i += 20)
      res.csv.add_row({1, double(i), sol.energy[i]});

    // constants are stationary points
    GridFunction c = GridFunction::constant(g, Complex(0.7, 0.0));
    Solution stat = solve_nonlinear(c, kappa, flux, alpha, 20, 0.1);
    res.require((stat.states.back() - c).max_abs() < 1e-12,
                "constant state is not stationary under the nonlinear flow");
  }
  return res;
}

std::vector<SuiteResult> run_suite(const std::string& name, const VerifyOptions& opt) {
  if (name == "norms") return {check_norm_inequalities(opt)};
  if (name == "operator")
    return {check_symbol_agreement(opt), check_symbol_equivalence(opt),
            check_variable_kernel_equivalence(opt), check_dini_remainder(opt)};
  if (name == "semigroup") return {check_semigroup(opt)};
  if (name == "regularity")
    return {check_maximal_regularity(opt), check_apriori(opt), check_continuity_method(opt)};
  throw ArgumentError("unknown verify suite '" + name + "'");
}

}  // namespace torlevy
