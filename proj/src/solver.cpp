#include "torlevy/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "torlevy/quadrature.hpp"

namespace torlevy {

namespace {

double check_margin_min(double a, double b) { return std::min(a, b); }

}  // namespace

std::vector<HypothesisCheck> hypothesis_report(const TorusGrid& grid, const BoundedLevyMeasure& nu,
                                               const KernelCoefficient& coeff,
                                               const DriftField& drift, double p, double horizon) {
  std::vector<HypothesisCheck> checks;
  const double alpha = nu.alpha();
  const bool is_one = std::abs(alpha - 1.0) <= 1e-12;

  checks.push_back({"alpha-range", alpha > 0.0 && alpha < 2.0, std::min(alpha, 2.0 - alpha)});
  checks.push_back({"horizon", horizon > 0.0 && horizon <= 1.0,
                    check_margin_min(horizon, 1.0 - horizon)});
  checks.push_back({"p-range", p > 1.0, p - 1.0});
  if (alpha > 1.0 + 1e-12) {
    double excluded = alpha / (alpha - 1.0);
    double margin = std::abs(p - excluded) - 1e-3;
    checks.push_back({"p-exclusion", margin > 0.0, margin});
  } else {
    checks.push_back({"p-exclusion", true, 1.0});
  }

  auto nd = check_nondegenerate(nu.sigma(), alpha, 256);
  checks.push_back({"nondegeneracy", nd.nondegenerate, nd.min_value - 1e-10});
  checks.push_back({"measure-lower-bound", nu.m_lo() > 0.0, nu.m_lo()});

  if (is_one) {
    double worst = 0.0;
    for (auto [r, R] : {std::pair<double, double>{0.1, 1.0}, {0.5, 2.0}, {1.0, 8.0}}) {
      worst = std::max(worst, norm2(check_alpha1_cancellation(nu, r, R), nu.dim()));
    }
    checks.push_back({"alpha1-cancellation-nu", worst <= 1e-8, 1e-8 - worst});
    // kernel-weighted cancellation, sampled in (t, x)
    double worst_a = 0.0;
    for (double t : {0.0, horizon / 2.0, horizon}) {
      for (std::size_t i = 0; i < grid.size(); i += std::max<std::size_t>(1, grid.size() / 8)) {
        Vec x = grid.point(i);
        for (auto [r, R] : {std::pair<double, double>{0.1, 1.0}, {0.5, 4.0}}) {
          Vec acc{0.0, 0.0};
          for (const auto& atom : nu.sigma().atoms()) {
            auto integrand = [&](double s) {
              Vec y = scaled(atom.direction, s);
              return coeff(t, x, y) * nu.density(s, atom.direction) * std::pow(s, -alpha);
            };
            double total = 0.0, lo = r;
            int panels = 12;
            for (int q = 0; q < panels; ++q) {
              double hi = r * std::pow(R / r, static_cast<double>(q + 1) / panels);
              total += integrate_gauss(integrand, lo, hi, 10);
              lo = hi;
            }
            acc = acc + scaled(atom.direction, atom.weight * total);
          }
          worst_a = std::max(worst_a, norm2(acc, nu.dim()));
        }
      }
    }
    checks.push_back({"alpha1-cancellation-kernel", worst_a <= 1e-8, 1e-8 - worst_a});
  } else {
    checks.push_back({"alpha1-cancellation-nu", true, 1e-8});
    checks.push_back({"alpha1-cancellation-kernel", true, 1e-8});
  }

  // (H^a): sampled bounds
  double margin_a = std::numeric_limits<double>::infinity();
  bool a_ok = true;
  try {
    coeff.validate_bounds(grid, {0.0, horizon / 2.0, horizon});
    for (double t : {0.0, horizon}) {
      for (std::size_t i = 0; i < grid.size(); i += std::max<std::size_t>(1, grid.size() / 32)) {
        double az = coeff.at_zero(t, grid.point(i));
        margin_a = std::min(margin_a, std::min(az - coeff.a0(), coeff.a1() - az) + 1e-12);
      }
    }
  } catch (const Error&) {
    a_ok = false;
    margin_a = -1.0;
  }
  checks.push_back({"kernel-bounds", a_ok, margin_a});

  // Dini moduli finite (informational margin: the integrals themselves)
  {
    std::vector<double> radii;
    for (int j = 16; j >= 0; --j) radii.push_back(std::pow(2.0, -j));
    auto dini = estimate_dini(coeff, grid, radii, {0.0, horizon});
    bool finite = std::isfinite(dini.dini_integral0) && std::isfinite(dini.dini_integral1);
    checks.push_back({"kernel-dini", finite, dini.dini_integral0 + dini.dini_integral1});
  }

  // drift regularity and the small-alpha indicator
  if (alpha < 1.0 - 1e-12) {
    bool zero_ok = drift.is_zero();
    if (!zero_ok) {
      zero_ok = true;
      for (double t : {0.0, horizon}) {
        for (std::size_t i = 0; i < grid.size(); i += std::max<std::size_t>(1, grid.size() / 16)) {
          if (norm2(drift.at(t, grid.point(i)), grid.dim()) > 1e-14) zero_ok = false;
        }
      }
    }
    checks.push_back({"drift-vanishes-for-small-alpha", zero_ok, zero_ok ? 1.0 : -1.0});
    checks.push_back({"drift-regularity", true, 1.0});
  } else {
    checks.push_back({"drift-vanishes-for-small-alpha", true, 1.0});
    double slack = std::numeric_limits<double>::infinity();
    bool b_ok = true;
    if (!drift.is_zero()) {
      for (double t : {0.0, horizon}) {
        for (std::size_t i = 0; i < grid.size(); i += std::max<std::size_t>(1, grid.size() / 16)) {
          Vec x = grid.point(i);
          for (double r : {0.05, 0.3, 1.0}) {
            Vec y = grid.dim() == 1 ? vec1(r) : vec2(r * 0.6, r * 0.8);
            double diff = norm2(drift.at(t, x + y) - drift.at(t, x), grid.dim());
            double allowed = is_one ? (drift.modulus ? drift.modulus(r) : drift.bound)
                                    : drift.bound;
            slack = std::min(slack, allowed + 1e-12 - diff);
            if (diff > allowed + 1e-9) b_ok = false;
          }
        }
      }
    }
    checks.push_back({"drift-regularity", b_ok, drift.is_zero() ? 1.0 : slack});
  }
  return checks;
}

Problem::Problem(TorusGrid grid_, BoundedLevyMeasure nu_, KernelCoefficient coeff_,
                 DriftField drift_, std::function<GridFunction(double)> forcing_,
                 GridFunction initial_, double horizon_, double p_, QuadratureScheme scheme_)
    : grid(grid_),
      nu(std::move(nu_)),
      coeff(std::move(coeff_)),
      drift(std::move(drift_)),
      forcing(std::move(forcing_)),
      initial(std::move(initial_)),
      horizon(horizon_),
      p(p_),
      scheme(scheme_) {
  if (!(initial.grid() == grid)) throw ConfigError("Problem: initial datum lives on another grid");
  auto checks = hypothesis_report(grid, nu, coeff, drift, p, horizon);
  for (const auto& c : checks) {
    if (!c.passed) throw HypothesisError("Problem: hypothesis check failed: " + c.name);
  }
}

CauchySolver::CauchySolver(Problem prob)
    : CauchySolver(std::move(prob), nullptr) {}

CauchySolver::CauchySolver(Problem prob, std::shared_ptr<const SymbolTable> shared_psi)
    : prob_(std::move(prob)),
      psi_(shared_psi ? std::move(shared_psi)
                      : std::make_shared<SymbolTable>(prob_.grid, prob_.nu)),
      op_(prob_.nu, prob_.scheme, prob_.grid) {}

GridFunction CauchySolver::forcing_at(double t) const {
  return prob_.forcing ? prob_.forcing(t) : GridFunction::zero(prob_.grid);
}

double CauchySolver::median_a0(double t) const {
  std::vector<double> vals;
  vals.reserve(prob_.grid.size());
  for (std::size_t i = 0; i < prob_.grid.size(); ++i)
    vals.push_back(prob_.coeff.at_zero(t, prob_.grid.point(i)));
  std::nth_element(vals.begin(), vals.begin() + vals.size() / 2, vals.end());
  return vals[vals.size() / 2];
}

GridFunction CauchySolver::drift_term(const GridFunction& u, double t) const {
  if (prob_.drift.is_zero()) return GridFunction::zero(prob_.grid);
  auto grads = gradient(u);
  std::vector<Complex> vals(prob_.grid.size());
  for (std::size_t i = 0; i < prob_.grid.size(); ++i) {
    Vec b = prob_.drift.at(t, prob_.grid.point(i));
    Complex s = b[0] * grads[0].nodal()[i];
    if (prob_.grid.dim() == 2) s += b[1] * grads[1].nodal()[i];
    vals[i] = s;
  }
  return GridFunction::from_nodal(prob_.grid, std::move(vals));
}

GridFunction CauchySolver::apply_kernel_shifted(const GridFunction& u, double t,
                                                double shift) const {
  if (prob_.coeff.x_independent()) {
    std::vector<Complex> spec = u.spectral();
    const TorusGrid& g = prob_.grid;
    const int n = g.n();
    std::vector<char> done(spec.size(), 0);
    for (std::size_t i = 0; i < spec.size(); ++i) {
      if (done[i]) continue;
      if (std::abs(spec[i]) == 0.0) {
        done[i] = 1;
        continue;
      }
      Complex m = op_.multiplier_symbol(g.wavevec(i), prob_.coeff, t) - shift * op_.unit_symbol(i);
      spec[i] *= m;
      done[i] = 1;
      int m0 = g.dim() == 1 ? static_cast<int>(i) : static_cast<int>(i) / n;
      int m1 = g.dim() == 1 ? 0 : static_cast<int>(i) % n;
      std::size_t ci = g.dim() == 1 ? static_cast<std::size_t>((n - m0) % n)
                                    : static_cast<std::size_t>((n - m0) % n) * n + (n - m1) % n;
      if (!done[ci]) {
        spec[ci] *= std::conj(m);
        done[ci] = 1;
      }
    }
    return GridFunction::from_spectral(g, std::move(spec));
  }
  auto kernel = [this, shift](double tt, const Vec& x, const Vec& y) {
    return prob_.coeff(tt, x, y) - shift;
  };
  return op_.evaluate_nodal(u, kernel, t, -1.0);
}

GridFunction CauchySolver::rhs(const GridFunction& u, double t) const {
  GridFunction lu = apply_kernel_shifted(u, t, 0.0);
  GridFunction out = lu + drift_term(u, t) + forcing_at(t);
  return out;
}

double solution_residual(const Solution& sol, double p) {
  if (sol.times.size() < 3) return 0.0;
  double worst = 0.0;
  for (std::size_t m = 1; m + 1 < sol.times.size(); ++m) {
    double dt2 = sol.times[m + 1] - sol.times[m - 1];
    GridFunction dudt = (1.0 / dt2) * (sol.states[m + 1] - sol.states[m - 1]);
    worst = std::max(worst, lp_norm(dudt - sol.rhs_history[m], p));
  }
  return worst;
}

Solution CauchySolver::solve_duhamel(int n_steps) const {
  const TorusGrid& g = prob_.grid;
  // frozen-coefficient regime: a == const, drift x-independent
  if (!prob_.coeff.x_independent())
    throw RouteError("solve_duhamel: variable coefficient; use the imex or continuity route");
  const double c = prob_.coeff(0.0, Vec{0.0, 0.0}, Vec{0.0, 0.0});
  for (double r : {0.01, 0.3, 0.8, 2.0, 20.0}) {
    Vec y = g.dim() == 1 ? vec1(r) : vec2(r * 0.6, r * 0.8);
    if (std::abs(prob_.coeff(0.0, Vec{0.0, 0.0}, y) - c) > 1e-13)
      throw RouteError("solve_duhamel: kernel varies in y; use the imex or continuity route");
  }
  if (!prob_.drift.is_zero()) {
    Vec b0 = prob_.drift.at(0.0, g.point(0));
    for (std::size_t i = 0; i < g.size(); i += std::max<std::size_t>(1, g.size() / 16)) {
      Vec bi = prob_.drift.at(0.0, g.point(i));
      if (norm2(bi - b0, g.dim()) > 1e-13)
        throw RouteError("solve_duhamel: drift varies in x; use the imex or continuity route");
    }
  }
  if (n_steps < 1) throw ArgumentError("solve_duhamel: need at least one step");

  Solution sol;
  sol.route = SolveRoute::duhamel;
  const double dt = prob_.horizon / n_steps;
  auto theta_at = [&](double t) { return prob_.drift.is_zero() ? Vec{0.0, 0.0}
                                                               : prob_.drift.at(t, g.point(0)); };

  GridFunction u = prob_.initial;
  sol.times.push_back(0.0);
  sol.states.push_back(u);
  sol.rhs_history.push_back(rhs(u, 0.0));

  const GaussRule& rule = gauss_legendre(8);
  for (int m = 0; m < n_steps; ++m) {
    double t0 = m * dt, t1 = (m + 1) * dt;
    // homogeneous factor over [t0, t1]
    Vec theta_int{0.0, 0.0};
    theta_int[0] = integrate_gauss([&](double s) { return theta_at(s)[0]; }, t0, t1, 16);
    theta_int[1] = integrate_gauss([&](double s) { return theta_at(s)[1]; }, t0, t1, 16);
    std::vector<Complex> spec = u.spectral();
    for (std::size_t i = 0; i < spec.size(); ++i) {
      Vec k = g.wavevec(i);
      spec[i] *= std::exp((t1 - t0) * c * psi_->at(i) +
                          Complex(0.0, dot(k, theta_int, g.dim())));
    }
    // forcing contribution by Gauss-Legendre in s
    if (prob_.forcing) {
      for (int q = 0; q < 8; ++q) {
        double s = 0.5 * (t0 + t1) + 0.5 * dt * rule.nodes[q];
        double w = 0.5 * dt * rule.weights[q];
        GridFunction fs = prob_.forcing(s);
        Vec theta_tail{0.0, 0.0};
        theta_tail[0] = integrate_gauss([&](double r) { return theta_at(r)[0]; }, s, t1, 8);
        theta_tail[1] = integrate_gauss([&](double r) { return theta_at(r)[1]; }, s, t1, 8);
        const auto& fspec = fs.spectral();
        for (std::size_t i = 0; i < spec.size(); ++i) {
          Vec k = g.wavevec(i);
          spec[i] += w * fspec[i] *
                     std::exp((t1 - s) * c * psi_->at(i) +
                              Complex(0.0, dot(k, theta_tail, g.dim())));
        }
      }
    }
    u = GridFunction::from_spectral(g, std::move(spec));
    sol.times.push_back(t1);
    sol.states.push_back(u);
    sol.rhs_history.push_back(rhs(u, t1));
  }
  sol.residual = solution_residual(sol, prob_.p);
  double scale = 0.0;
  for (const auto& r : sol.rhs_history) scale = std::max(scale, lp_norm(r, prob_.p));
  sol.expected_residual = dt * dt * 10.0 * scale + dt * dt;
  return sol;
}

Solution CauchySolver::solve_imex(int n_steps) const {
  if (n_steps < 16) throw ArgumentError("solve_imex: need at least 16 steps");
  const TorusGrid& g = prob_.grid;
  const double dt = prob_.horizon / n_steps;

  Solution sol;
  sol.route = SolveRoute::imex;
  GridFunction u = prob_.initial;
  sol.times.push_back(0.0);
  sol.states.push_back(u);

  for (int m = 0; m < n_steps; ++m) {
    double t0 = m * dt;
    double a_ref = median_a0(t0);
    GridFunction explicit_part =
        apply_kernel_shifted(u, t0, a_ref) + drift_term(u, t0) + forcing_at(t0);
    // rhs at (t0, u): a_ref L^nu u + explicit part
    {
      std::vector<Complex> spec = u.spectral();
      for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= a_ref * psi_->at(i);
      sol.rhs_history.push_back(GridFunction::from_spectral(g, std::move(spec)) + explicit_part);
    }
    std::vector<Complex> next = u.spectral();
    const auto& espec = explicit_part.spectral();
    for (std::size_t i = 0; i < next.size(); ++i) {
      next[i] = (next[i] + dt * espec[i]) / (1.0 - dt * a_ref * psi_->at(i));
    }
    GridFunction u_next = GridFunction::from_spectral(g, std::move(next));
    double before = lp_norm(u, prob_.p), after = lp_norm(u_next, prob_.p);
    if (after > 10.0 * before + 1e-9)
      throw StabilityError("solve_imex: explicit part unstable; increase n_steps");
    u = std::move(u_next);
    sol.times.push_back(t0 + dt);
    sol.states.push_back(u);
  }
  sol.rhs_history.push_back(rhs(u, prob_.horizon));
  sol.residual = solution_residual(sol, prob_.p);
  double scale = 0.0;
  for (const auto& r : sol.rhs_history) scale = std::max(scale, lp_norm(r, prob_.p));
  sol.expected_residual = dt * 4.0 * (scale + 1.0);
  return sol;
}

namespace {

KernelCoefficient blend_kernel(const KernelCoefficient& a, double lambda) {
  auto fn = [a, lambda](double t, const Vec& x, const Vec& y) {
    return lambda * a(t, x, y) + (1.0 - lambda);
  };
  KernelCoefficient::GradFn grad;
  if (a.has_grad()) {
    grad = [a, lambda](double t, const Vec& x, const Vec& y, int axis) {
      return lambda * a.grad_x(t, x, y, axis);
    };
  }
  return KernelCoefficient(fn, lambda * a.a0() + (1.0 - lambda), lambda * a.a1() + (1.0 - lambda),
                           a.x_independent(), a.y_saturation(), grad, a.derivative_bounds(),
                           a.name() + "-blended");
}

DriftField scale_drift(const DriftField& d, double lambda) {
  if (d.is_zero() || lambda == 0.0) return DriftField{};
  DriftField out;
  out.b = [b = d.b, lambda](double t, const Vec& x) { return scaled(b(t, x), lambda); };
  out.bound = lambda * d.bound;
  if (d.modulus) out.modulus = [m = d.modulus, lambda](double r) { return lambda * m(r); };
  if (d.grad)
    out.grad = [gfn = d.grad, lambda](double t, const Vec& x, int axis) {
      return scaled(gfn(t, x, axis), lambda);
    };
  return out;
}

}  // namespace

ContinuityResult CauchySolver::solve_continuity(int base_steps, double tol,
                                                double initial_lambda_step) const {
  if (!(tol > 0.0)) throw ArgumentError("solve_continuity: tol must be positive");
  const TorusGrid& g = prob_.grid;
  const double dt = prob_.horizon / base_steps;
  const double alpha = prob_.alpha();
  const double p = prob_.p;

  ContinuityResult out;
  auto solver_at = [&](double lambda) {
    Problem blended(g, prob_.nu, blend_kernel(prob_.coeff, lambda),
                    scale_drift(prob_.drift, lambda), prob_.forcing, prob_.initial, prob_.horizon,
                    p, prob_.scheme);
    return CauchySolver(std::move(blended), psi_);
  };

  auto xnorm_diff = [&](const Solution& a, const Solution& b) {
    SpaceTimeField diff;
    diff.times = a.times;
    for (std::size_t i = 0; i < a.states.size(); ++i) {
      diff.states.push_back(a.states[i] - b.states[i]);
      diff.dstates.push_back(a.rhs_history[i] - b.rhs_history[i]);
    }
    return spacetime_norms(diff, alpha, p).x_norm;
  };

  // lambda = 0 base solve
  double lambda0 = 0.0;
  CauchySolver base = solver_at(0.0);
  Solution u = base.solve_imex(base_steps);
  out.lambda_schedule.push_back(0.0);

  double step = initial_lambda_step;
  while (lambda0 < 1.0 - 1e-12) {
    double lambda = std::min(1.0, lambda0 + step);
    // Picard: w solves U_{lambda0} w = f + (U_{lambda0} - U_lambda) u
    Solution w_prev = u;
    bool converged = false;
    double worst_contraction = 0.0;
    std::vector<double> local_contractions;
    double prev_diff = -1.0;
    for (int it = 0; it < 30; ++it) {
      // forcing f + (lambda - lambda0)(L^{(a-1) nu} w_prev + b . grad w_prev)
      std::vector<GridFunction> extra;
      extra.reserve(w_prev.states.size());
      for (std::size_t mnode = 0; mnode < w_prev.states.size(); ++mnode) {
        double t = w_prev.times[mnode];
        GridFunction term =
            apply_kernel_shifted(w_prev.states[mnode], t, 1.0) + drift_term(w_prev.states[mnode], t);
        extra.push_back((lambda - lambda0) * term);
      }
      auto forcing_fn = [this, &extra, dt](double t) {
        std::size_t idx = static_cast<std::size_t>(std::llround(t / dt));
        idx = std::min(idx, extra.size() - 1);
        GridFunction f = extra[idx];
        if (prob_.forcing) f += prob_.forcing(t);
        return f;
      };
      Problem frozen_prob(g, prob_.nu, blend_kernel(prob_.coeff, lambda0),
                          scale_drift(prob_.drift, lambda0), forcing_fn, prob_.initial,
                          prob_.horizon, p, prob_.scheme);
      CauchySolver frozen_solver(std::move(frozen_prob), psi_);
      Solution w = frozen_solver.solve_imex(base_steps);
      out.iterations += 1;
      double diff = xnorm_diff(w, w_prev);
      if (prev_diff >= 0.0 && prev_diff > 1e-300) {
        double rho = diff / prev_diff;
        local_contractions.push_back(rho);
        worst_contraction = std::max(worst_contraction, rho);
      }
      w_prev = std::move(w);
      if (diff < tol) {
        converged = true;
        break;
      }
      prev_diff = diff;
    }
    if (!converged || worst_contraction >= 1.0) {
      step *= 0.5;
      if (step < 1e-3)
        throw NumericError(
            "solve_continuity: contraction failed below the minimum lambda step");
      continue;
    }
    if (worst_contraction >= 0.5 && step > 1e-3) {
      // mirror the epsilon = 1/(2 C0) choice: shrink the lambda step
      step *= 0.5;
      if (step < 1e-3) step = 1e-3;
    }
    for (double rho : local_contractions) out.contraction_estimates.push_back(rho);
    u = std::move(w_prev);
    lambda0 = lambda;
    out.lambda_schedule.push_back(lambda);
  }

  // final solution solves U_1 u = f; recompute the rhs history against the
  // original operator and report its residual
  Solution final = std::move(u);
  final.route = SolveRoute::continuity;
  for (std::size_t mnode = 0; mnode < final.states.size(); ++mnode)
    final.rhs_history[mnode] = rhs(final.states[mnode], final.times[mnode]);
  final.residual = solution_residual(final, p);
  out.solution = std::move(final);
  return out;
}

AprioriReport CauchySolver::apriori_report(const Solution& sol, int k) const {
  if (k != 0 && k != 1) throw ArgumentError("apriori_report: k must be 0 or 1");
  if (sol.residual > 10.0 * sol.expected_residual + 1e-12)
    throw ArgumentError("apriori_report: residual exceeds the route's expected discretization error");
  const double alpha = prob_.alpha();
  const double p = prob_.p;
  const double order = alpha - alpha / p;

  auto y0_norm = [&](const std::vector<GridFunction>& fields, const std::vector<double>& times) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
      double a = std::pow(lp_norm(fields[i], p), p);
      double b = std::pow(lp_norm(fields[i + 1], p), p);
      acc += 0.5 * (a + b) * (times[i + 1] - times[i]);
    }
    return std::pow(acc, 1.0 / p);
  };

  AprioriReport rep{0.0, 0.0, 0.0, 0.0};
  if (k == 0) {
    rep.x_norm = spacetime_norms(sol.as_field(), alpha, p).x_norm;
    rep.phi_norm = sobolev_w_norm(prob_.initial, order, p);
    std::vector<GridFunction> fvals;
    for (double t : sol.times) fvals.push_back(forcing_at(t));
    rep.f_norm = y0_norm(fvals, sol.times);
  } else {
    if (!prob_.coeff.has_grad())
      throw ArgumentError("apriori_report: k = 1 needs the kernel x-gradient");
    for (int axis = 0; axis < prob_.grid.dim(); ++axis) {
      SpaceTimeField w;
      w.times = sol.times;
      for (std::size_t i = 0; i < sol.states.size(); ++i) {
        w.states.push_back(derivative(sol.states[i], axis));
        w.dstates.push_back(derivative(sol.rhs_history[i], axis));
      }
      rep.x_norm += spacetime_norms(w, alpha, p).x_norm;
      rep.phi_norm += sobolev_w_norm(derivative(prob_.initial, axis), order, p);
      // g^(1) = grad f + L^{(grad_x a) nu} u + (grad b) . grad u
      std::vector<GridFunction> gvals;
      for (std::size_t i = 0; i < sol.states.size(); ++i) {
        double t = sol.times[i];
        GridFunction gf = derivative(forcing_at(t), axis);
        auto kernel = [this, axis](double tt, const Vec& x, const Vec& y) {
          return prob_.coeff.grad_x(tt, x, y, axis);
        };
        GridFunction lgrad = op_.evaluate_nodal(sol.states[i], kernel, t, -1.0);
        GridFunction bterm = GridFunction::zero(prob_.grid);
        if (!prob_.drift.is_zero() && prob_.drift.grad) {
          auto grads = gradient(sol.states[i]);
          std::vector<Complex> vals(prob_.grid.size());
          for (std::size_t q = 0; q < prob_.grid.size(); ++q) {
            Vec db = prob_.drift.grad(t, prob_.grid.point(q), axis);
            Complex s = db[0] * grads[0].nodal()[q];
            if (prob_.grid.dim() == 2) s += db[1] * grads[1].nodal()[q];
            vals[q] = s;
          }
          bterm = GridFunction::from_nodal(prob_.grid, std::move(vals));
        }
        gvals.push_back(gf + lgrad + bterm);
      }
      rep.f_norm += y0_norm(gvals, sol.times);
    }
  }
  double denom = rep.phi_norm + rep.f_norm;
  if (denom < 1e-14) {
    if (rep.x_norm > 1e-8)
      throw ArgumentError("apriori_report: zero data with nonzero solution norm");
    rep.ratio = 0.0;
  } else {
    rep.ratio = rep.x_norm / denom;
  }
  return rep;
}

std::pair<KernelCoefficient, DriftField> mollify_coefficients(const KernelCoefficient& coeff,
                                                              const DriftField& drift, double eps,
                                                              const TorusGrid& grid) {
  if (!(eps > 0.0 && eps < 1.0)) throw ArgumentError("mollify_coefficients: eps must be in (0,1)");
  const double h = grid.spacing();
  const int dim = grid.dim();

  // bump weights on grid offsets strictly inside |z| < eps
  std::vector<std::pair<Vec, double>> weights;
  double total = 0.0;
  int reach = static_cast<int>(std::floor(eps / h));
  auto bump = [&](double rho) { return rho < 1.0 ? std::exp(-1.0 / (1.0 - rho * rho)) : 0.0; };
  if (dim == 1) {
    for (int m = -reach; m <= reach; ++m) {
      double z = m * h;
      double w = bump(std::abs(z) / eps);
      if (w > 0.0) weights.push_back({vec1(z), w}), total += w;
    }
  } else {
    for (int m0 = -reach; m0 <= reach; ++m0)
      for (int m1 = -reach; m1 <= reach; ++m1) {
        Vec z = vec2(m0 * h, m1 * h);
        double w = bump(norm2(z, 2) / eps);
        if (w > 0.0) weights.push_back({z, w}), total += w;
      }
  }
  if (weights.empty()) {
    weights.push_back({Vec{0.0, 0.0}, 1.0});
    total = 1.0;
  }
  for (auto& [z, w] : weights) w /= total;

  auto wcopy = std::make_shared<std::vector<std::pair<Vec, double>>>(weights);
  auto a_eps = [coeff, wcopy](double t, const Vec& x, const Vec& y) {
    double s = 0.0;
    for (const auto& [z, w] : *wcopy) s += w * coeff(t, x - z, y);
    return s;
  };
  KernelCoefficient::GradFn grad_eps;
  if (coeff.has_grad()) {
    grad_eps = [coeff, wcopy](double t, const Vec& x, const Vec& y, int axis) {
      double s = 0.0;
      for (const auto& [z, w] : *wcopy) s += w * coeff.grad_x(t, x - z, y, axis);
      return s;
    };
  }
  KernelCoefficient out_a(a_eps, coeff.a0(), coeff.a1(), coeff.x_independent(),
                          coeff.y_saturation(), grad_eps, coeff.derivative_bounds(),
                          coeff.name() + "-mollified");

  DriftField out_b;
  if (!drift.is_zero()) {
    out_b.b = [b = drift.b, wcopy](double t, const Vec& x) {
      Vec s{0.0, 0.0};
      for (const auto& [z, w] : *wcopy) s = s + scaled(b(t, x - z), w);
      return s;
    };
    out_b.bound = drift.bound;
    out_b.modulus = drift.modulus;
    if (drift.grad)
      out_b.grad = [gfn = drift.grad, wcopy](double t, const Vec& x, int axis) {
        Vec s{0.0, 0.0};
        for (const auto& [z, w] : *wcopy) s = s + scaled(gfn(t, x - z, axis), w);
        return s;
      };
  }

  // modulus spot check: |a_eps - a| on x-slices stays below omega_a^(1)(eps)
  {
    std::vector<double> radii{eps};
    auto dini = estimate_dini(coeff, grid, radii, {0.0});
    double omega1 = dini.omega1[0];
    for (std::size_t i = 0; i < grid.size(); i += std::max<std::size_t>(1, grid.size() / 32)) {
      Vec x = grid.point(i);
      double diff = std::abs(out_a(0.0, x, Vec{0.0, 0.0}) - coeff(0.0, x, Vec{0.0, 0.0}));
      if (diff > omega1 + 1e-8)
        throw NumericError("mollify_coefficients: modulus inequality violated");
    }
  }
  return {std::move(out_a), std::move(out_b)};
}

double nonlinear_energy(const GridFunction& theta, const std::function<double(double)>& kappa,
                        const NonlinearFlux& flux, double alpha) {
  const TorusGrid& g = theta.grid();
  if (g.dim() != 1) throw ConfigError("nonlinear_energy: double-sum form is d = 1 only");
  const int n = g.n();
  const double h = g.spacing();
  const auto& v = theta.nodal();
  double total = 0.0;
  for (int m = 1; m < n; ++m) {
    double dist = std::min(m * h, kTwoPi - m * h);
    double w = kappa(dist) * std::pow(dist, -1.0 - alpha);
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      int j = i + m < n ? i + m : i + m - n;
      s += flux.phi_value(v[i].real() - v[j].real());
    }
    total += w * s;
  }
  return h * h * total;
}

Solution solve_nonlinear(const GridFunction& theta0, const std::function<double(double)>& kappa,
                         const NonlinearFlux& flux, double alpha, int n_steps, double horizon,
                         const QuadratureScheme& scheme) {
  const TorusGrid& g = theta0.grid();
  if (!(alpha > 0.0 && alpha < 2.0)) throw ArgumentError("solve_nonlinear: alpha must be in (0,2)");
  if (n_steps < 1) throw ArgumentError("solve_nonlinear: need steps");
  // phi' odd with phi'(0) = 0; kappa even within [1/Lambda, Lambda]
  if (std::abs(flux.phi_prime(0.0)) > 1e-12)
    throw HypothesisError("solve_nonlinear: phi'(0) must vanish");
  for (double u : {0.1, 0.7, 2.0}) {
    if (std::abs(flux.phi_prime(u) + flux.phi_prime(-u)) > 1e-10)
      throw HypothesisError("solve_nonlinear: phi' must be odd");
  }
  for (double r : {0.05, 0.5, 2.0}) {
    double kv = kappa(r);
    if (kv < 1.0 / flux.Lambda - 1e-12 || kv > flux.Lambda + 1e-12)
      throw HypothesisError("solve_nonlinear: kappa leaves [1/Lambda, Lambda]");
  }

  QuadratureScheme s = scheme;
  s.validate();
  const double r_min = s.r_min > 0.0 ? s.r_min : g.spacing() / 4.0;

  // paired-ray radial cells (both rays carry weight 1 in nu(dz) = |z|^{-1-alpha} dz)
  std::vector<double> lo, hi, mass, centroid;
  {
    double kappa_max = theta0.active_band() * 1.0 + 8.0;
    const double osc_dr = s.osc_cap / std::max(kappa_max, 1.0);
    double r = r_min;
    while (r < s.r_max * (1.0 - 1e-12)) {
      double next = std::min({r + std::min(r * (s.ratio - 1.0), osc_dr), s.r_max});
      lo.push_back(r);
      hi.push_back(next);
      double m = power_mass(r, next, alpha);
      mass.push_back(m);
      centroid.push_back(power_first(r, next, alpha) / m);
      r = next;
    }
  }

  const double dt = horizon / n_steps;
  Solution sol;
  sol.route = SolveRoute::nonlinear;
  GridFunction th = theta0;
  sol.times.push_back(0.0);
  sol.states.push_back(th);
  sol.energy.push_back(nonlinear_energy(th, kappa, flux, alpha));

  auto rhs_of = [&](const GridFunction& theta) {
    std::vector<Complex> acc(g.size(), Complex(0.0));
    for (std::size_t c = 0; c < lo.size(); ++c) {
      GridFunction up = translate(theta, vec1(centroid[c]));
      GridFunction dn = translate(theta, vec1(-centroid[c]));
      double w = kappa(centroid[c]) * mass[c];
      for (std::size_t i = 0; i < g.size(); ++i) {
        double base = theta.nodal()[i].real();
        acc[i] += w * (flux.phi_prime(up.nodal()[i].real() - base) +
                       flux.phi_prime(dn.nodal()[i].real() - base));
      }
    }
    // inner correction: paired Taylor gives phi''(0) theta'' r^2 / 2 per ray
    GridFunction thxx = second_derivative(theta, 0, 0);
    const double inner = std::pow(r_min, 2.0 - alpha) / (2.0 - alpha);
    const double k0 = kappa(1e-12);
    for (std::size_t i = 0; i < g.size(); ++i)
      acc[i] += k0 * flux.phi2_at_zero * thxx.nodal()[i].real() * inner;
    return GridFunction::from_nodal(g, std::move(acc));
  };

  for (int m = 0; m < n_steps; ++m) {
    GridFunction r = rhs_of(th);
    sol.rhs_history.push_back(r);
    th = th + dt * r;
    sol.times.push_back((m + 1) * dt);
    sol.states.push_back(th);
    double e = nonlinear_energy(th, kappa, flux, alpha);
    if (e > sol.energy.front() * 1e-6 + sol.energy.back())
      throw StabilityError("solve_nonlinear: energy increased; reduce the step size");
    sol.energy.push_back(e);
  }
  sol.rhs_history.push_back(rhs_of(th));
  sol.residual = solution_residual(sol, 2.0);
  double scale = 0.0;
  for (const auto& r : sol.rhs_history) scale = std::max(scale, lp_norm(r, 2.0));
  sol.expected_residual = dt * 4.0 * (scale + 1.0);
  return sol;
}

}  // namespace torlevy
