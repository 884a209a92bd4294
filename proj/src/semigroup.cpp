#include "torlevy/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "torlevy/quadrature.hpp"
#include "torlevy/rng.hpp"

namespace torlevy {

void SamplerConfig::validate() const {
  if (!(r_cut > 0.0 && r_cut <= 1.0)) throw ConfigError("SamplerConfig: r_cut must be in (0, 1]");
  if (n_paths < 100) throw ConfigError("SamplerConfig: n_paths must be >= 100");
  if (!(lambda_floor > 0.0)) throw ConfigError("SamplerConfig: lambda floor must be positive");
}

namespace {

struct WindowData {
  double lambda_int;  // int_s^t lambda
  double lambda_max;
  Vec drift;          // int_s^t vartheta
};

WindowData window_data(const SamplerConfig& cfg, double s, double t, bool check_floor) {
  WindowData wd{0.0, 0.0, {0.0, 0.0}};
  const int grid = 256;
  for (int i = 0; i <= grid; ++i) {
    double tt = s + (t - s) * i / grid;
    double lv = cfg.lambda(tt);
    if (check_floor && lv < cfg.lambda_floor - 1e-12)
      throw ConfigError("sampler: lambda(t) drops below the declared floor");
    wd.lambda_max = std::max(wd.lambda_max, lv);
  }
  wd.lambda_max *= 1.0 + 1e-9;
  wd.lambda_int = integrate_gauss(cfg.lambda, s, t, 32);
  wd.drift[0] = integrate_gauss([&](double r) { return cfg.vartheta(r)[0]; }, s, t, 32);
  wd.drift[1] = integrate_gauss([&](double r) { return cfg.vartheta(r)[1]; }, s, t, 32);
  return wd;
}

struct MeasureTables {
  double envelope_mass;           // m_hi * sum_j w_j * r_cut^-alpha / alpha
  std::vector<double> atom_cdf;   // cumulative weights / total
  Vec comp_moment{0.0, 0.0};      // per unit lambda-time compensator moment
  Vec small_mean{0.0, 0.0};       // per unit lambda-time mean of sub-cutoff jumps (alpha < 1)
  std::array<double, 3> small_cov{0.0, 0.0, 0.0};
};

MeasureTables measure_tables(const BoundedLevyMeasure& nu, const SamplerConfig& cfg) {
  MeasureTables mt;
  const double alpha = nu.alpha();
  const auto& atoms = nu.sigma().atoms();
  double total_w = nu.sigma().total_weight();
  mt.envelope_mass = nu.m_hi() * total_w * std::pow(cfg.r_cut, -alpha) / alpha;
  double acc = 0.0;
  for (const auto& a : atoms) {
    acc += a.weight / total_w;
    mt.atom_cdf.push_back(acc);
  }
  if (alpha > 1.0 + 1e-12) {
    mt.comp_moment = first_moment(nu, cfg.r_cut, std::numeric_limits<double>::infinity());
  } else if (std::abs(alpha - 1.0) <= 1e-12) {
    // compensation acts on r_cut < |y| <= 1 and must vanish there, or the
    // compensated construction is not defined
    if (cfg.r_cut < 1.0) mt.comp_moment = first_moment(nu, cfg.r_cut, 1.0);
    if (norm2(mt.comp_moment, nu.dim()) > 1e-8)
      throw HypothesisError("sampler: alpha = 1 restricted measure is asymmetric");
  } else {
    mt.small_mean = first_moment(nu, 1e-14, cfg.r_cut);
  }
  mt.small_cov = small_jump_covariance(nu, cfg.r_cut);
  return mt;
}

Vec gaussian_draw(const std::array<double, 3>& cov, double scale, int dim, RandomStream& rng) {
  double xx = cov[0] * scale, xy = cov[1] * scale, yy = cov[2] * scale;
  double z1 = rng.normal();
  if (dim == 1) return vec1(std::sqrt(std::max(xx, 0.0)) * z1);
  double z2 = rng.normal();
  double l11 = std::sqrt(std::max(xx, 0.0));
  double l21 = l11 > 0.0 ? xy / l11 : 0.0;
  double l22 = std::sqrt(std::max(yy - l21 * l21, 0.0));
  return vec2(l11 * z1, l21 * z1 + l22 * z2);
}

struct PathAccum {
  Vec jumps_sum{0.0, 0.0};
  std::vector<std::pair<double, Vec>> ledger;
  bool keep_ledger = false;
};

// thinning sampler: candidates at rate lambda_max * envelope, accepted with
// probability (lambda(tau)/lambda_max) * (m(r, theta)/m_hi); radii from the
// inverse CDF of the m_hi envelope, full support above r_cut
void simulate_jumps(const BoundedLevyMeasure& nu, const SamplerConfig& cfg, const WindowData& wd,
                    const MeasureTables& mt, double s, double t, RandomStream& rng,
                    PathAccum& out) {
  const double alpha = nu.alpha();
  const auto& atoms = nu.sigma().atoms();
  const double rate = wd.lambda_max * mt.envelope_mass;
  if (rate <= 0.0) return;
  double tau = s;
  for (;;) {
    tau += rng.exponential(rate);
    if (tau >= t) break;
    if (rng.uniform() * wd.lambda_max > cfg.lambda(tau)) continue;
    double u = rng.uniform();
    std::size_t j =
        std::lower_bound(mt.atom_cdf.begin(), mt.atom_cdf.end(), u) - mt.atom_cdf.begin();
    if (j >= atoms.size()) j = atoms.size() - 1;
    double r = cfg.r_cut * std::pow(rng.uniform_pos(), -1.0 / alpha);
    if (rng.uniform() * nu.m_hi() > nu.density(r, atoms[j].direction)) continue;
    Vec y = scaled(atoms[j].direction, r);
    out.jumps_sum = out.jumps_sum + y;
    if (out.keep_ledger) out.ledger.emplace_back(tau, y);
  }
}

// chi(k) = (1/N) sum_p e^{i k . dX_p} accumulated in fixed chunk order
std::vector<Complex> empirical_char_spectrum(const TorusGrid& g, const std::vector<Vec>& incr) {
  const int n = g.n();
  const int n_chunks = 64;
  std::vector<std::vector<Complex>> slabs(n_chunks);
  parallel_chunks(
      incr.size(),
      [&](int chunk, std::size_t lo, std::size_t hi) {
        auto& slab = slabs[chunk];
        slab.assign(g.size(), Complex(0.0));
        std::vector<Complex> t0(n), t1(n);
        auto fill = [&](std::vector<Complex>& tab, double y) {
          const Complex wp(std::cos(y), std::sin(y));
          const Complex wm = std::conj(wp);
          tab[0] = Complex(1.0);
          Complex accp(1.0), accm(1.0);
          for (int j = 1; j <= n / 2 - 1; ++j) {
            accp *= wp;
            tab[j] = accp;
          }
          for (int j = 1; j <= n / 2; ++j) {
            accm *= wm;
            tab[n - j] = accm;
          }
        };
        for (std::size_t p = lo; p < hi; ++p) {
          const Vec& dx = incr[p];
          fill(t0, dx[0]);
          if (g.dim() == 2) fill(t1, dx[1]);
          if (g.dim() == 1) {
            for (int j = 0; j < n; ++j) slab[j] += t0[j];
          } else {
            for (int r = 0; r < n; ++r)
              for (int c = 0; c < n; ++c) slab[r * n + c] += t0[r] * t1[c];
          }
        }
      },
      n_chunks);
  std::vector<Complex> chi(g.size(), Complex(0.0));
  for (const auto& slab : slabs) {
    if (slab.empty()) continue;
    for (std::size_t i = 0; i < chi.size(); ++i) chi[i] += slab[i];
  }
  const double inv = 1.0 / static_cast<double>(incr.size());
  for (auto& c : chi) c *= inv;
  return chi;
}

// mean and max pointwise standard error of chi-multiplied propagation
McPropagation apply_char_spectrum(const GridFunction& phi, const std::vector<Complex>& chi,
                                  int n_paths) {
  const TorusGrid& g = phi.grid();
  std::vector<Complex> mean_spec = phi.spectral();
  for (std::size_t i = 0; i < mean_spec.size(); ++i) mean_spec[i] *= chi[i];
  GridFunction mean = GridFunction::from_spectral(g, std::move(mean_spec));

  std::vector<Complex> sq(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) sq[i] = std::norm(phi.nodal()[i]);
  GridFunction sq_f = GridFunction::from_nodal(g, std::move(sq));
  std::vector<Complex> m2_spec = sq_f.spectral();
  for (std::size_t i = 0; i < m2_spec.size(); ++i) m2_spec[i] *= chi[i];
  GridFunction m2 = GridFunction::from_spectral(g, std::move(m2_spec));

  double se_max = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double var = m2.nodal()[i].real() - std::norm(mean.nodal()[i]);
    se_max = std::max(se_max, std::sqrt(std::max(var, 0.0) / n_paths));
  }
  return {std::move(mean), se_max};
}

std::vector<Vec> sample_increments_impl(const BoundedLevyMeasure& nu, const SamplerConfig& cfg,
                                        double s, double t, bool check_floor) {
  cfg.validate();
  if (!(t >= s)) throw ArgumentError("sample_increments: need t >= s");
  WindowData wd = window_data(cfg, s, t, check_floor);
  MeasureTables mt = measure_tables(nu, cfg);
  const double alpha = nu.alpha();
  std::vector<Vec> out(cfg.n_paths, Vec{0.0, 0.0});
  if (t == s) return out;
  parallel_chunks(
      static_cast<std::size_t>(cfg.n_paths),
      [&](int, std::size_t lo, std::size_t hi) {
        for (std::size_t p = lo; p < hi; ++p) {
          RandomStream rng(cfg.seed, p);
          PathAccum acc;
          simulate_jumps(nu, cfg, wd, mt, s, t, rng, acc);
          Vec x = wd.drift + acc.jumps_sum - scaled(mt.comp_moment, wd.lambda_int);
          if (cfg.gaussian_correction) {
            x = x + gaussian_draw(mt.small_cov, wd.lambda_int, nu.dim(), rng);
            if (alpha < 1.0 - 1e-12) x = x + scaled(mt.small_mean, wd.lambda_int);
          }
          out[p] = x;
        }
      },
      64);
  return out;
}

}  // namespace

LevyPathSample sample_path(const BoundedLevyMeasure& nu, const SamplerConfig& cfg, double t_end,
                           std::uint64_t path_index) {
  cfg.validate();
  if (!(t_end > 0.0)) throw ArgumentError("sample_path: t_end must be positive");
  WindowData wd = window_data(cfg, 0.0, t_end, true);
  MeasureTables mt = measure_tables(nu, cfg);
  RandomStream rng(cfg.seed, path_index);

  LevyPathSample out;
  out.seed_used = cfg.seed;
  PathAccum acc;
  acc.keep_ledger = true;
  simulate_jumps(nu, cfg, wd, mt, 0.0, t_end, rng, acc);
  out.jump_ledger = std::move(acc.ledger);

  out.drift_total = wd.drift;
  out.compensator_total = scaled(mt.comp_moment, wd.lambda_int);
  const double alpha = nu.alpha();
  if (cfg.gaussian_correction) {
    out.gaussian_increment = gaussian_draw(mt.small_cov, wd.lambda_int, nu.dim(), rng);
    if (alpha < 1.0 - 1e-12) out.small_jump_mean = scaled(mt.small_mean, wd.lambda_int);
  } else {
    out.dropped_small_jump_variance =
        (mt.small_cov[0] + (nu.dim() == 2 ? mt.small_cov[2] : 0.0)) * wd.lambda_int;
  }

  std::sort(out.jump_ledger.begin(), out.jump_ledger.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  out.time_nodes.push_back(0.0);
  out.positions.push_back({0.0, 0.0});
  Vec jumps{0.0, 0.0};
  auto lambda_frac = [&](double tau) {
    return wd.lambda_int > 0.0 ? integrate_gauss(cfg.lambda, 0.0, tau, 16) / wd.lambda_int : 0.0;
  };
  for (const auto& [tau, y] : out.jump_ledger) {
    jumps = jumps + y;
    double fr = lambda_frac(tau);
    Vec x = scaled(wd.drift, tau / t_end) + jumps - scaled(out.compensator_total, fr) +
            scaled(out.small_jump_mean, fr);
    out.time_nodes.push_back(tau);
    out.positions.push_back(x);
  }
  Vec x_end =
      wd.drift + jumps - out.compensator_total + out.small_jump_mean + out.gaussian_increment;
  out.time_nodes.push_back(t_end);
  out.positions.push_back(x_end);
  return out;
}

std::vector<Vec> sample_increments(const BoundedLevyMeasure& nu, const SamplerConfig& cfg,
                                   double s, double t) {
  return sample_increments_impl(nu, cfg, s, t, true);
}

McPropagation propagate_mc(const GridFunction& phi, const BoundedLevyMeasure& nu,
                           const SamplerConfig& cfg, double s, double t) {
  if (!(t >= s)) throw ArgumentError("propagate_mc: need t >= s");
  const TorusGrid& g = phi.grid();
  if (t == s) return {phi, 0.0};
  std::vector<Vec> incr = sample_increments(nu, cfg, s, t);
  std::vector<Complex> chi = empirical_char_spectrum(g, incr);
  return apply_char_spectrum(phi, chi, cfg.n_paths);
}

CutoffConsistency compare_cutoff_halving(const GridFunction& phi, const BoundedLevyMeasure& nu,
                                         const SamplerConfig& cfg, double s, double t) {
  cfg.validate();
  if (!(t > s)) throw ArgumentError("compare_cutoff_halving: need t > s");
  if (!cfg.gaussian_correction)
    throw ArgumentError("compare_cutoff_halving: needs the Gaussian correction enabled");
  const TorusGrid& g = phi.grid();
  const double alpha = nu.alpha();
  WindowData wd = window_data(cfg, s, t, true);
  SamplerConfig fine_cfg = cfg;
  fine_cfg.r_cut = cfg.r_cut / 2.0;
  MeasureTables coarse = measure_tables(nu, cfg);
  MeasureTables fine = measure_tables(nu, fine_cfg);
  // covariance of the band between the two cutoffs tops the fine Gaussian
  // up to the coarse one
  std::array<double, 3> band_cov{coarse.small_cov[0] - fine.small_cov[0],
                                 coarse.small_cov[1] - fine.small_cov[1],
                                 coarse.small_cov[2] - fine.small_cov[2]};

  std::vector<Vec> incr_fine(cfg.n_paths), incr_coarse(cfg.n_paths);
  parallel_chunks(
      static_cast<std::size_t>(cfg.n_paths),
      [&](int, std::size_t lo, std::size_t hi) {
        for (std::size_t p = lo; p < hi; ++p) {
          RandomStream rng(cfg.seed, p);
          PathAccum acc;
          acc.keep_ledger = true;  // classify jumps by size
          simulate_jumps(nu, fine_cfg, wd, fine, s, t, rng, acc);
          Vec big{0.0, 0.0};
          for (const auto& [tau, y] : acc.ledger) {
            (void)tau;
            if (norm2(y, nu.dim()) >= cfg.r_cut) big = big + y;
          }
          Vec z_fine = gaussian_draw(fine.small_cov, wd.lambda_int, nu.dim(), rng);
          Vec z_band = gaussian_draw(band_cov, wd.lambda_int, nu.dim(), rng);
          Vec x_fine = wd.drift + acc.jumps_sum - scaled(fine.comp_moment, wd.lambda_int) + z_fine;
          Vec x_coarse =
              wd.drift + big - scaled(coarse.comp_moment, wd.lambda_int) + z_fine + z_band;
          if (alpha < 1.0 - 1e-12) {
            x_fine = x_fine + scaled(fine.small_mean, wd.lambda_int);
            x_coarse = x_coarse + scaled(coarse.small_mean, wd.lambda_int);
          }
          incr_fine[p] = x_fine;
          incr_coarse[p] = x_coarse;
        }
      },
      64);

  McPropagation a = apply_char_spectrum(phi, empirical_char_spectrum(g, incr_fine), cfg.n_paths);
  McPropagation b = apply_char_spectrum(phi, empirical_char_spectrum(g, incr_coarse), cfg.n_paths);
  double disc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    disc = std::max(disc, std::abs(a.mean.nodal()[i] - b.mean.nodal()[i]));
  return {disc, std::sqrt(a.stderr_max * a.stderr_max + b.stderr_max * b.stderr_max)};
}

GridFunction propagate_spectral(const GridFunction& phi, const SymbolTable& psi, double s,
                                double t, double lambda_const, const Vec& vartheta_const) {
  if (!(phi.grid() == psi.grid())) throw ArgumentError("propagate_spectral: grid mismatch");
  if (!(t >= s)) throw ArgumentError("propagate_spectral: need t >= s");
  const double dt = t - s;
  std::vector<Complex> spec = phi.spectral();
  for (std::size_t i = 0; i < spec.size(); ++i) {
    Vec k = phi.grid().wavevec(i);
    Complex expo =
        dt * (lambda_const * psi.at(i) + Complex(0.0, dot(k, vartheta_const, phi.grid().dim())));
    spec[i] *= std::exp(expo);
  }
  return GridFunction::from_spectral(phi.grid(), std::move(spec));
}

FactorizationCheck check_factorization(const GridFunction& phi, const BoundedLevyMeasure& nu,
                                       const SamplerConfig& cfg, const SymbolTable& psi,
                                       double s, double t) {
  const int grid = 256;
  for (int i = 0; i <= grid; ++i) {
    double tt = s + (t - s) * i / grid;
    if (cfg.lambda(tt) < cfg.lambda_floor - 1e-12)
      throw ConfigError("check_factorization: lambda(t) below the declared floor");
  }
  McPropagation full = propagate_mc(phi, nu, cfg, s, t);

  // excess-intensity process X^(1), which carries the vartheta drift
  SamplerConfig excess = cfg;
  excess.lambda = [base = cfg.lambda, floor = cfg.lambda_floor](double tt) {
    return base(tt) - floor;
  };
  excess.lambda_floor = 1e-300;  // the excess rate may legitimately vanish
  std::vector<Vec> incr = sample_increments_impl(nu, excess, s, t, false);
  std::vector<Complex> chi = empirical_char_spectrum(phi.grid(), incr);
  GridFunction base = propagate_spectral(phi, psi, s, t, cfg.lambda_floor, Vec{0.0, 0.0});
  McPropagation rhs = apply_char_spectrum(base, chi, cfg.n_paths);

  double disc = 0.0;
  for (std::size_t i = 0; i < phi.grid().size(); ++i)
    disc = std::max(disc, std::abs(full.mean.nodal()[i] - rhs.mean.nodal()[i]));
  return {disc, std::sqrt(full.stderr_max * full.stderr_max + rhs.stderr_max * rhs.stderr_max)};
}

CharFunctionSample empirical_char_function(const std::vector<Vec>& increments, const Vec& k,
                                           int dim) {
  if (increments.empty()) throw ArgumentError("empirical_char_function: no samples");
  Complex sum(0.0);
  double sum_c2 = 0.0, sum_s2 = 0.0;
  for (const Vec& dx : increments) {
    double ph = dot(k, dx, dim);
    double c = std::cos(ph), s = std::sin(ph);
    sum += Complex(c, s);
    sum_c2 += c * c;
    sum_s2 += s * s;
  }
  const double n = static_cast<double>(increments.size());
  Complex mean = sum / n;
  double var_c = std::max(sum_c2 / n - mean.real() * mean.real(), 0.0);
  double var_s = std::max(sum_s2 / n - mean.imag() * mean.imag(), 0.0);
  return {mean, std::sqrt((var_c + var_s) / n)};
}

double expected_jump_count(const BoundedLevyMeasure& nu, const SamplerConfig& cfg, double t_end) {
  double lam_int = integrate_gauss(cfg.lambda, 0.0, t_end, 32);
  double mass = 0.0;
  const auto& atoms = nu.sigma().atoms();
  for (std::size_t j = 0; j < atoms.size(); ++j)
    mass += atoms[j].weight *
            nu.radial_integral(j, cfg.r_cut, std::numeric_limits<double>::infinity(), 0.0);
  return lam_int * mass;
}

}  // namespace torlevy
