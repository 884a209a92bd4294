#include "torlevy/operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "torlevy/norms.hpp"
#include "torlevy/quadrature.hpp"

namespace torlevy {

Vec compensator(const Vec& y, double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw ArgumentError("compensator: alpha must be in (0,2)");
  if (alpha > 1.0 + 1e-12) return y;
  if (std::abs(alpha - 1.0) <= 1e-12) {
    double r = std::sqrt(y[0] * y[0] + y[1] * y[1]);
    return r <= 1.0 ? y : Vec{0.0, 0.0};
  }
  return {0.0, 0.0};
}

double difference_j(const GridFunction& f, std::size_t point_idx, const Vec& y, double alpha) {
  const TorusGrid& g = f.grid();
  const Vec x = g.point(point_idx);
  const Vec xy = x + y;
  Complex shifted(0.0);
  Complex grad_dot(0.0);
  const Vec comp = compensator(y, alpha);
  for (std::size_t i = 0; i < g.size(); ++i) {
    Vec k = g.wavevec(i);
    double phase = dot(k, xy, g.dim());
    shifted += f.spectral()[i] * Complex(std::cos(phase), std::sin(phase));
    double phase0 = dot(k, x, g.dim());
    Complex ik_dot_comp(0.0, dot(k, comp, g.dim()));
    grad_dot += f.spectral()[i] * ik_dot_comp * Complex(std::cos(phase0), std::sin(phase0));
  }
  Complex at_x = f.nodal()[point_idx];
  return (shifted - at_x - grad_dot).real();
}

KernelCoefficient::KernelCoefficient(Fn a, double a0, double a1, bool x_independent,
                                     double y_saturation, GradFn grad_x,
                                     std::vector<double> derivative_bounds, std::string name)
    : a_(std::move(a)),
      grad_(std::move(grad_x)),
      a0_(a0),
      a1_(a1),
      x_independent_(x_independent),
      y_sat_(y_saturation),
      deriv_bounds_(std::move(derivative_bounds)),
      name_(std::move(name)) {
  if (!(a0_ > 0.0) || a1_ < a0_) throw ConfigError("KernelCoefficient: need 0 < a0 <= a1");
  if (!(y_sat_ > 0.0)) throw ConfigError("KernelCoefficient: y saturation radius must be positive");
}

double KernelCoefficient::grad_x(double t, const Vec& x, const Vec& y, int axis) const {
  if (!grad_) throw ArgumentError("KernelCoefficient: x-gradient not declared");
  return grad_(t, x, y, axis);
}

KernelCoefficient KernelCoefficient::one() { return constant(1.0); }

KernelCoefficient KernelCoefficient::constant(double c) {
  if (!(c > 0.0)) throw ConfigError("KernelCoefficient: constant must be positive");
  return KernelCoefficient([c](double, const Vec&, const Vec&) { return c; }, c, c, true, 1.0,
                           [](double, const Vec&, const Vec&, int) { return 0.0; }, {0.0},
                           "constant");
}

KernelCoefficient KernelCoefficient::radial_bump(double amp, double gamma) {
  if (amp < 0.0 || !(gamma > 0.0)) throw ConfigError("radial_bump: need amp >= 0, gamma > 0");
  auto a = [amp, gamma](double, const Vec&, const Vec& y) {
    double r = std::sqrt(y[0] * y[0] + y[1] * y[1]);
    return 1.0 + amp * std::min(std::pow(r, gamma), 1.0);
  };
  return KernelCoefficient(a, 1.0, 1.0, true, 1.0,
                           [](double, const Vec&, const Vec&, int) { return 0.0; }, {0.0},
                           "radial-bump");
}

KernelCoefficient KernelCoefficient::separable_sin_power(double ax, double ay, double gamma) {
  if (std::abs(ax) >= 1.0 || ay < 0.0 || !(gamma > 0.0))
    throw ConfigError("separable_sin_power: need |ax| < 1, ay >= 0, gamma > 0");
  auto a = [ax, ay, gamma](double, const Vec& x, const Vec& y) {
    double r = std::sqrt(y[0] * y[0] + y[1] * y[1]);
    return (1.0 + ax * std::sin(x[0])) * (1.0 + ay * std::min(std::pow(r, gamma), 1.0));
  };
  auto grad = [ax, ay, gamma](double, const Vec& x, const Vec& y, int axis) {
    if (axis != 0) return 0.0;
    double r = std::sqrt(y[0] * y[0] + y[1] * y[1]);
    return ax * std::cos(x[0]) * (1.0 + ay * std::min(std::pow(r, gamma), 1.0));
  };
  return KernelCoefficient(a, 1.0 - std::abs(ax), 1.0 + std::abs(ax), false, 1.0, grad,
                           {1.0 + std::abs(ax), std::abs(ax) * (1.0 + ay)}, "separable-sin-power");
}

KernelCoefficient KernelCoefficient::one_plus_sin(double ax) {
  if (std::abs(ax) >= 1.0) throw ConfigError("one_plus_sin: need |ax| < 1");
  auto a = [ax](double, const Vec& x, const Vec&) { return 1.0 + ax * std::sin(x[0]); };
  auto grad = [ax](double, const Vec& x, const Vec&, int axis) {
    return axis == 0 ? ax * std::cos(x[0]) : 0.0;
  };
  return KernelCoefficient(a, 1.0 - std::abs(ax), 1.0 + std::abs(ax), false, 1.0, grad,
                           {1.0 + std::abs(ax), std::abs(ax)}, "one-plus-sin");
}

void KernelCoefficient::validate_bounds(const TorusGrid& grid,
                                        const std::vector<double>& times) const {
  std::vector<double> radii{0.0, 1e-3, 0.05, 0.3, 0.9, 1.5, 5.0, 40.0};
  for (double t : times) {
    for (std::size_t i = 0; i < grid.size(); i += std::max<std::size_t>(1, grid.size() / 64)) {
      Vec x = grid.point(i);
      double az = a_(t, x, Vec{0.0, 0.0});
      if (az < a0_ - 1e-12 || az > a1_ + 1e-12)
        throw HypothesisError("KernelCoefficient: a(t,x,0) leaves [a0, a1]");
      for (double r : radii) {
        Vec y = grid.dim() == 1 ? vec1(r) : vec2(r * 0.6, r * 0.8);
        if (a_(t, x, y) < -1e-12)
          throw HypothesisError("KernelCoefficient: kernel is negative at a sampled point");
      }
    }
  }
}

void QuadratureScheme::validate() const {
  if (!(ratio > 1.0 && ratio <= 1.25))
    throw ConfigError("QuadratureScheme: geometric ratio must lie in (1, 1.25]");
  if (r_min < 0.0 || !(r_max > 0.0)) throw ConfigError("QuadratureScheme: bad radial range");
  if (!(osc_cap > 0.0)) throw ConfigError("QuadratureScheme: oscillation cap must be positive");
}

double DiniReport::integral0_upto(double eps) const {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < radii.size(); ++i) {
    if (radii[i + 1] > eps * (1.0 + 1e-12)) break;
    double du = std::log(radii[i + 1] / radii[i]);
    total += 0.5 * (omega0[i] + omega0[i + 1]) * du;
  }
  return total;
}

NonlocalOperator::NonlocalOperator(BoundedLevyMeasure nu, QuadratureScheme scheme, TorusGrid grid)
    : nu_(std::move(nu)), scheme_(scheme), grid_(grid) {
  scheme_.validate();
  if (nu_.dim() != grid_.dim()) throw ConfigError("NonlocalOperator: dimension mismatch");
  r_min_ = scheme_.r_min > 0.0 ? scheme_.r_min : grid_.spacing() / 4.0;
  if (r_min_ > grid_.spacing() * (1.0 + 1e-12))
    throw ConfigError("NonlocalOperator: r_min must not exceed the grid spacing");
  if (!(r_min_ < scheme_.r_max)) throw ConfigError("NonlocalOperator: r_min must be below r_max");
  if (scheme_.taylor_inner && alpha() >= 2.0 - 1e-6)
    throw ArgumentError("NonlocalOperator: Taylor inner correction invalid for alpha ~ 2");
}

NonlocalOperator::CellTable NonlocalOperator::build_cells(double kappa_max) const {
  CellTable tab;
  const double alpha = nu_.alpha();
  const double q = scheme_.ratio;
  const double osc_dr = kappa_max > 0.0 ? scheme_.osc_cap / kappa_max
                                        : std::numeric_limits<double>::infinity();
  double r = r_min_;
  while (r < scheme_.r_max * (1.0 - 1e-12)) {
    double step = std::min(r * (q - 1.0), osc_dr);
    double next = std::min(r + step, scheme_.r_max);
    // never straddle the alpha = 1 compensator break
    if (r < 1.0 && next > 1.0) next = 1.0;
    tab.lo.push_back(r);
    tab.hi.push_back(next);
    double mass = power_mass(r, next, alpha);
    double first = power_first(r, next, alpha);
    tab.mass.push_back(mass);
    tab.centroid.push_back(first / mass);
    bool comp = alpha > 1.0 + 1e-12 ||
                (std::abs(alpha - 1.0) <= 1e-12 && next <= 1.0 + 1e-12);
    tab.comp_moment.push_back(comp ? first : 0.0);
    r = next;
  }
  return tab;
}

const NonlocalOperator::CellTable& NonlocalOperator::cells_for(double kappa_max) const {
  static const int buckets[] = {0, 4, 8, 12, 16, 24, 32, 48, 64, 96, 128, 192, 256, 384, 512};
  int b = buckets[std::size(buckets) - 1];
  for (int cand : buckets) {
    if (kappa_max <= cand) {
      b = cand;
      break;
    }
  }
  std::lock_guard<std::mutex> lock(cache_mu_);
  auto it = cell_cache_.find(b);
  if (it != cell_cache_.end()) return it->second;
  return cell_cache_.emplace(b, build_cells(b)).first->second;
}

GridFunction NonlocalOperator::nodal_pass(const GridFunction& f, const KernelCoefficient::Fn& kernel,
                                          double t, bool x_independent, double a_at_zero_for_inner,
                                          double r_lo, double r_hi, bool inner_correction) const {
  const TorusGrid& g = grid_;
  const int dim = g.dim();
  const double alpha = nu_.alpha();
  const std::size_t npts = g.size();

  double kappa_max = f.active_band() * (dim == 2 ? std::sqrt(2.0) : 1.0);
  const CellTable& cells = cells_for(kappa_max);

  // gradient fields for the compensator term
  GridFunction gx = derivative(f, 0);
  GridFunction gy = dim == 2 ? derivative(f, 1) : GridFunction::zero(g);

  std::vector<Vec> pts(npts);
  for (std::size_t i = 0; i < npts; ++i) pts[i] = g.point(i);

  const auto& atoms = nu_.sigma().atoms();
  struct Task {
    std::size_t cell;
    std::size_t atom;
  };
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < cells.lo.size(); ++c) {
    if (cells.lo[c] < r_lo - 1e-12 || cells.hi[c] > r_hi + 1e-12) continue;
    for (std::size_t j = 0; j < atoms.size(); ++j) tasks.push_back({c, j});
  }

  const int n_chunks = 16;
  std::vector<std::vector<Complex>> slabs(n_chunks);
  parallel_chunks(
      tasks.size(),
      [&](int chunk, std::size_t lo, std::size_t hi) {
        auto& slab = slabs[chunk];
        slab.assign(npts, Complex(0.0));
        for (std::size_t ti = lo; ti < hi; ++ti) {
          const Task& task = tasks[ti];
          const auto& atom = atoms[task.atom];
          const double rbar = cells.centroid[task.cell];
          const Vec y = scaled(atom.direction, rbar);
          const double w =
              atom.weight * nu_.density(rbar, atom.direction) * cells.mass[task.cell];
          const double comp_r = compensated_at(alpha, rbar) ? rbar : 0.0;
          GridFunction shifted = translate(f, y);
          const auto& sn = shifted.nodal();
          const auto& fn = f.nodal();
          const auto& gxn = gx.nodal();
          const auto& gyn = gy.nodal();
          const double th0 = atom.direction[0], th1 = atom.direction[1];
          double hoisted = x_independent ? kernel(t, pts[0], y) : 0.0;
          for (std::size_t i = 0; i < npts; ++i) {
            Complex grad_dot = gxn[i] * th0;
            if (dim == 2) grad_dot += gyn[i] * th1;
            Complex J = sn[i] - fn[i] - comp_r * grad_dot;
            double aval = x_independent ? hoisted : kernel(t, pts[i], y);
            slab[i] += w * aval * J;
          }
        }
      },
      n_chunks);

  std::vector<Complex> acc(npts, Complex(0.0));
  for (const auto& slab : slabs) {
    if (slab.empty()) continue;
    for (std::size_t i = 0; i < npts; ++i) acc[i] += slab[i];
  }

  // analytic Taylor correction on |y| < r_min with a(t,x,0) frozen
  if (inner_correction && scheme_.taylor_inner && r_lo <= r_min_ * (1.0 + 1e-12)) {
    GridFunction hxx = second_derivative(f, 0, 0);
    GridFunction hxy = dim == 2 ? second_derivative(f, 0, 1) : GridFunction::zero(g);
    GridFunction hyy = dim == 2 ? second_derivative(f, 1, 1) : GridFunction::zero(g);
    const double grad_factor =
        alpha < 1.0 - 1e-12 ? std::pow(r_min_, 1.0 - alpha) / (1.0 - alpha) : 0.0;
    const double hess_factor = std::pow(r_min_, 2.0 - alpha) / (2.0 - alpha);
    for (const auto& atom : atoms) {
      const double m0 = nu_.density_at_zero(atom.direction);
      const double th0 = atom.direction[0], th1 = atom.direction[1];
      for (std::size_t i = 0; i < npts; ++i) {
        double a0v = a_at_zero_for_inner >= 0.0 ? a_at_zero_for_inner
                                                : kernel(t, pts[i], Vec{0.0, 0.0});
        Complex grad_dot = gx.nodal()[i] * th0;
        if (dim == 2) grad_dot += gy.nodal()[i] * th1;
        Complex quad = hxx.nodal()[i] * th0 * th0;
        if (dim == 2)
          quad += 2.0 * hxy.nodal()[i] * th0 * th1 + hyy.nodal()[i] * th1 * th1;
        acc[i] += atom.weight * m0 * a0v * (grad_factor * grad_dot + 0.5 * hess_factor * quad);
      }
    }
  }

  return GridFunction::from_nodal(g, std::move(acc));
}

Complex NonlocalOperator::multiplier_symbol_parts(const Vec& k, const KernelCoefficient& coeff,
                                                  double t, double r_lo, double r_hi,
                                                  bool include_inner, bool include_tail,
                                                  bool subtract_a0) const {
  const double alpha = nu_.alpha();
  const CellTable& cells = cells_for(0.0);
  const auto& atoms = nu_.sigma().atoms();
  const Vec origin{0.0, 0.0};
  const double a0v = coeff(t, origin, Vec{0.0, 0.0});
  Complex psi(0.0);
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    const auto& atom = atoms[j];
    const double kappa = dot(k, atom.direction, grid_.dim());
    if (kappa == 0.0) continue;
    Complex ray(0.0);
    for (std::size_t c = 0; c < cells.lo.size(); ++c) {
      if (cells.lo[c] < r_lo - 1e-12 || cells.hi[c] > r_hi + 1e-12) continue;
      const double rbar = cells.centroid[c];
      const Vec y = scaled(atom.direction, rbar);
      double am = nu_.density(rbar, atom.direction) *
                  (coeff(t, origin, y) - (subtract_a0 ? a0v : 0.0));
      Complex phi = oscillatory_cell_integral(cells.lo[c], cells.hi[c], kappa, alpha);
      Complex bracket = phi - cells.mass[c] - Complex(0.0, kappa * cells.comp_moment[c]);
      ray += am * bracket;
    }
    if (include_inner) {
      // Taylor bracket on |y| < r_min: i kappa r (alpha < 1 only) - kappa^2 r^2 / 2
      const double m0 = nu_.density_at_zero(atom.direction);
      double quad_term = -0.5 * kappa * kappa * std::pow(r_min_, 2.0 - alpha) / (2.0 - alpha);
      ray += m0 * a0v * Complex(quad_term, 0.0);
      if (alpha < 1.0 - 1e-12)
        ray += m0 * a0v * Complex(0.0, kappa * std::pow(r_min_, 1.0 - alpha) / (1.0 - alpha));
    }
    if (include_tail) {
      // |y| > r_max closed analytically; kernel and density are saturated there
      const double R = scheme_.r_max;
      const Vec y_sat = scaled(atom.direction, R * 1.0001);
      const double am_sat = nu_.density(R * 1.0001, atom.direction) *
                            (coeff(t, origin, y_sat) - (subtract_a0 ? a0v : 0.0));
      Complex tail =
          oscillatory_cell_integral(R, std::numeric_limits<double>::infinity(), kappa, alpha);
      tail -= std::pow(R, -alpha) / alpha;
      if (alpha > 1.0 + 1e-12)
        tail -= Complex(0.0, kappa * std::pow(R, 1.0 - alpha) / (alpha - 1.0));
      ray += am_sat * tail;
    }
    psi += atom.weight * ray;
  }
  return psi;
}

Complex NonlocalOperator::multiplier_symbol(const Vec& k, const KernelCoefficient& coeff,
                                            double t) const {
  return multiplier_symbol_parts(k, coeff, t, 0.0, std::numeric_limits<double>::infinity(), true,
                                 scheme_.extend_tail, false);
}

Complex NonlocalOperator::unit_symbol(std::size_t mode_idx) const {
  {
    std::lock_guard<std::mutex> lock(cache_mu_);
    if (unit_symbol_cache_.empty()) {
      unit_symbol_cache_.assign(grid_.size(), Complex(0.0));
      unit_symbol_done_.assign(grid_.size(), 0);
    }
    if (unit_symbol_done_[mode_idx]) return unit_symbol_cache_[mode_idx];
  }
  Complex psi = multiplier_symbol(grid_.wavevec(mode_idx), KernelCoefficient::one(), 0.0);
  std::lock_guard<std::mutex> lock(cache_mu_);
  unit_symbol_cache_[mode_idx] = psi;
  unit_symbol_done_[mode_idx] = 1;
  return psi;
}

namespace {

void check_resolved(const GridFunction& f) {
  const TorusGrid& g = f.grid();
  double peak = 0.0, nyq = 0.0;
  const int n = g.n();
  for (std::size_t i = 0; i < g.size(); ++i) {
    double mag = std::abs(f.spectral()[i]);
    peak = std::max(peak, mag);
    Vec k = g.wavevec(i);
    if (std::abs(k[0]) >= n / 2 - 1 || (g.dim() == 2 && std::abs(k[1]) >= n / 2 - 1))
      nyq = std::max(nyq, mag);
  }
  if (peak > 0.0 && nyq > 1e-10 * peak)
    throw ArgumentError("apply_operator: field is not spectrally resolved");
}

Vec annulus_kernel_integral(const BoundedLevyMeasure& nu, const KernelCoefficient& coeff,
                            double t, const Vec& x, double r, double R) {
  Vec out{0.0, 0.0};
  const auto& atoms = nu.sigma().atoms();
  const double alpha = nu.alpha();
  for (const auto& atom : atoms) {
    auto integrand = [&](double s) {
      Vec y = scaled(atom.direction, s);
      return coeff(t, x, y) * nu.density(s, atom.direction) * std::pow(s, -alpha);
    };
    int panels = std::max(2, static_cast<int>(std::ceil(std::log(R / r) / std::log(1.3))));
    double total = 0.0, lo = r;
    for (int p = 0; p < panels; ++p) {
      double hi = r * std::pow(R / r, static_cast<double>(p + 1) / panels);
      total += integrate_gauss(integrand, lo, hi, 10);
      lo = hi;
    }
    out = out + scaled(atom.direction, atom.weight * total);
  }
  return out;
}

}  // namespace

OperatorResult NonlocalOperator::apply(const GridFunction& f, const KernelCoefficient& coeff,
                                       double t) const {
  check_resolved(f);
  const double alpha = nu_.alpha();
  if (std::abs(alpha - 1.0) <= 1e-12) {
    for (auto [r, R] : {std::pair<double, double>{0.1, 1.0}, {0.5, 2.0}, {1.0, 8.0}}) {
      Vec v = check_alpha1_cancellation(nu_, r, R);
      if (norm2(v, grid_.dim()) > 1e-8)
        throw HypothesisError("apply_operator: alpha = 1 odd-part cancellation fails for nu");
      Vec xs = grid_.point(grid_.size() / 3);
      Vec va = annulus_kernel_integral(nu_, coeff, t, xs, r, R);
      if (norm2(va, grid_.dim()) > 1e-8)
        throw HypothesisError("apply_operator: alpha = 1 cancellation fails for a(t,x,y) nu");
    }
  }

  OperatorResult res{GridFunction::zero(grid_), 0.0, 0.0};
  const double w_mhi = nu_.sigma().total_weight() * nu_.m_hi();
  if (coeff.x_independent()) {
    std::vector<Complex> spec = f.spectral();
    std::vector<char> done(spec.size(), 0);
    const int n = grid_.n();
    for (std::size_t i = 0; i < spec.size(); ++i) {
      if (done[i]) continue;
      if (std::abs(spec[i]) == 0.0) {
        done[i] = 1;
        continue;
      }
      Vec k = grid_.wavevec(i);
      Complex psi = multiplier_symbol(k, coeff, t);
      spec[i] *= psi;
      done[i] = 1;
      int m0 = grid_.dim() == 1 ? static_cast<int>(i) : static_cast<int>(i) / n;
      int m1 = grid_.dim() == 1 ? 0 : static_cast<int>(i) % n;
      std::size_t ci = grid_.dim() == 1
                           ? static_cast<std::size_t>((n - m0) % n)
                           : static_cast<std::size_t>((n - m0) % n) * n + (n - m1) % n;
      if (!done[ci]) {
        spec[ci] *= std::conj(psi);
        done[ci] = 1;
      }
    }
    res.field = GridFunction::from_spectral(grid_, std::move(spec));
    if (!scheme_.extend_tail) {
      res.tail_f_bound = 2.0 * f.max_abs() * coeff.a1() * w_mhi *
                         std::pow(scheme_.r_max, -alpha) / alpha;
    }
  } else {
    auto kernel = [&coeff](double tt, const Vec& x, const Vec& y) { return coeff(tt, x, y); };
    res.field = nodal_pass(f, kernel, t, false, -1.0, 0.0,
                           std::numeric_limits<double>::infinity(), true);
    res.tail_f_bound =
        2.0 * f.max_abs() * coeff.a1() * w_mhi * std::pow(scheme_.r_max, -alpha) / alpha;
    if (alpha > 1.0 + 1e-12) {
      double grad_max = 0.0;
      for (int axis = 0; axis < grid_.dim(); ++axis)
        grad_max = std::max(grad_max, derivative(f, axis).max_abs());
      res.tail_grad_bound = grad_max * coeff.a1() * w_mhi *
                            std::pow(scheme_.r_max, 1.0 - alpha) / (alpha - 1.0);
    }
  }
  return res;
}

SplitResult NonlocalOperator::apply_split(const GridFunction& f, const KernelCoefficient& coeff,
                                          double t, double eps) const {
  if (!(eps > 0.0 && eps <= 1.0)) throw ArgumentError("apply_split: eps must be in (0, 1]");
  check_resolved(f);
  const double kappa_max =
      coeff.x_independent() ? 0.0 : f.active_band() * (grid_.dim() == 2 ? std::sqrt(2.0) : 1.0);
  const CellTable& cells = cells_for(kappa_max);
  // snap eps to the nearest cell edge
  double eps_used = r_min_;
  double best = std::abs(eps - r_min_);
  for (double edge : cells.hi) {
    if (std::abs(edge - eps) < best) {
      best = std::abs(edge - eps);
      eps_used = edge;
    }
  }

  if (coeff.x_independent()) {
    // per-mode split with the same cell brackets as the full symbol
    auto unit = KernelCoefficient::one();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<Complex> s1 = f.spectral(), s2 = f.spectral(), s3 = f.spectral();
    const double a0v = coeff(t, Vec{0.0, 0.0}, Vec{0.0, 0.0});
    for (std::size_t i = 0; i < s1.size(); ++i) {
      if (std::abs(f.spectral()[i]) == 0.0) continue;
      Vec k = grid_.wavevec(i);
      s1[i] *= a0v * multiplier_symbol_parts(k, unit, t, 0.0, inf, true, scheme_.extend_tail, false);
      s2[i] *= multiplier_symbol_parts(k, coeff, t, eps_used, inf, false, scheme_.extend_tail, true);
      s3[i] *= multiplier_symbol_parts(k, coeff, t, 0.0, eps_used, false, false, true);
    }
    return SplitResult{GridFunction::from_spectral(grid_, std::move(s1)),
                       GridFunction::from_spectral(grid_, std::move(s2)),
                       GridFunction::from_spectral(grid_, std::move(s3)), eps_used};
  }

  auto kernel_unit = [](double, const Vec&, const Vec&) { return 1.0; };
  GridFunction lnu = nodal_pass(f, kernel_unit, t, true, 1.0, 0.0,
                                std::numeric_limits<double>::infinity(), true);
  // I1 = a(t, x, 0) L^nu f
  std::vector<Complex> i1_vals(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i)
    i1_vals[i] = coeff.at_zero(t, grid_.point(i)) * lnu.nodal()[i];

  auto kernel_diff = [&coeff](double tt, const Vec& x, const Vec& y) {
    return coeff(tt, x, y) - coeff(tt, x, Vec{0.0, 0.0});
  };
  GridFunction i3 = nodal_pass(f, kernel_diff, t, false, -1.0, 0.0, eps_used, false);
  GridFunction i2 = nodal_pass(f, kernel_diff, t, false, -1.0, eps_used,
                               std::numeric_limits<double>::infinity(), false);

  return SplitResult{GridFunction::from_nodal(grid_, std::move(i1_vals)), std::move(i2),
                     std::move(i3), eps_used};
}

GridFunction NonlocalOperator::evaluate_nodal(const GridFunction& f,
                                              const KernelCoefficient::Fn& kernel, double t,
                                              double kernel_at_zero_hint) const {
  return nodal_pass(f, kernel, t, false, kernel_at_zero_hint, 0.0,
                    std::numeric_limits<double>::infinity(), true);
}

OperatorResult apply_operator(const GridFunction& f, const BoundedLevyMeasure& nu,
                              const KernelCoefficient& coeff, double t,
                              const QuadratureScheme& scheme) {
  NonlocalOperator op(nu, scheme, f.grid());
  return op.apply(f, coeff, t);
}

SplitResult apply_split(const GridFunction& f, const BoundedLevyMeasure& nu,
                        const KernelCoefficient& coeff, double t, double eps,
                        const QuadratureScheme& scheme) {
  NonlocalOperator op(nu, scheme, f.grid());
  return op.apply_split(f, coeff, t, eps);
}

DiniReport estimate_dini(const KernelCoefficient& coeff, const TorusGrid& grid,
                         const std::vector<double>& radii, const std::vector<double>& times) {
  if (radii.empty()) throw ArgumentError("estimate_dini: need at least one radius");
  for (std::size_t i = 0; i + 1 < radii.size(); ++i)
    if (!(radii[i] < radii[i + 1])) throw ArgumentError("estimate_dini: radii must be ascending");
  if (!(radii.front() > 0.0 && radii.back() <= 1.0))
    throw ArgumentError("estimate_dini: radii must lie in (0, 1]");

  DiniReport rep;
  rep.radii = radii;
  rep.omega0.assign(radii.size(), 0.0);
  rep.omega1.assign(radii.size(), 0.0);

  const int dim = grid.dim();
  const std::size_t x_stride = std::max<std::size_t>(1, grid.size() / 64);
  const int n_ball = 64;
  auto ball_point = [&](double r, int s) {
    if (dim == 1) {
      double frac = static_cast<double>(s / 2 + 1) / (n_ball / 2);
      return vec1((s % 2 == 0 ? 1.0 : -1.0) * r * frac);
    }
    // spiral covering of the disc
    double frac = static_cast<double>(s + 1) / n_ball;
    double ang = 2.399963229728653 * s;  // golden angle
    return vec2(r * frac * std::cos(ang), r * frac * std::sin(ang));
  };

  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    double r = radii[ri];
    double w0 = 0.0, w1 = 0.0;
    for (double t : times) {
      for (std::size_t i = 0; i < grid.size(); i += x_stride) {
        Vec x = grid.point(i);
        double az = coeff(t, x, Vec{0.0, 0.0});
        for (int s = 0; s < n_ball; ++s) {
          Vec y = ball_point(r, s);
          w0 = std::max(w0, std::abs(coeff(t, x, y) - az));
          w1 = std::max(w1, std::abs(coeff(t, x + y, Vec{0.0, 0.0}) - az));
        }
      }
    }
    rep.omega0[ri] = w0;
    rep.omega1[ri] = w1;
  }
  // enforce monotonicity against sampling noise
  for (std::size_t i = 1; i < radii.size(); ++i) {
    rep.omega0[i] = std::max(rep.omega0[i], rep.omega0[i - 1]);
    rep.omega1[i] = std::max(rep.omega1[i], rep.omega1[i - 1]);
  }
  for (std::size_t i = 0; i + 1 < radii.size(); ++i) {
    double du = std::log(radii[i + 1] / radii[i]);
    rep.dini_integral0 += 0.5 * (rep.omega0[i] + rep.omega0[i + 1]) * du;
    rep.dini_integral1 += 0.5 * (rep.omega1[i] + rep.omega1[i + 1]) * du;
  }
  return rep;
}

RemainderCheck near_field_remainder_check(const GridFunction& f, const BoundedLevyMeasure& nu,
                           const KernelCoefficient& coeff, double t, double eps, double p,
                           const QuadratureScheme& scheme) {
  NonlocalOperator op(nu, scheme, f.grid());
  SplitResult split = op.apply_split(f, coeff, t, eps);
  double lhs = lp_norm(split.i3, p);

  std::vector<double> radii;
  for (int j = 24; j >= 0; --j) radii.push_back(split.eps_used * std::pow(2.0, -j));
  DiniReport dini = estimate_dini(coeff, f.grid(), radii, {t});
  double gamma0 = dini.dini_integral0;
  double fnorm = lp_norm(fractional_laplacian(f, nu.alpha()), p);

  if (gamma0 < 1e-14 || fnorm < 1e-14) {
    if (lhs < 1e-10) return {0.0, 0.0};
    throw ArgumentError("near_field_remainder_check: degenerate denominator with nonzero I3");
  }
  return {lhs, lhs / (fnorm * gamma0)};
}

}  // namespace torlevy
