#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <torlevy/solver.hpp>

using namespace torlevy;

namespace {

BoundedLevyMeasure canonical(double alpha) {
  return BoundedLevyMeasure::constant(
      StableLevyMeasure(alpha, SphericalMeasure::symmetric_pair_1d()), 1.0);
}

GridFunction sine_field(const TorusGrid& g, int k = 1) {
  std::vector<Complex> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = std::sin(k * g.point(i)[0]);
  return GridFunction::from_nodal(g, std::move(v));
}

GridFunction plane_wave(const TorusGrid& g, int k) {
  std::vector<Complex> spec(g.size(), Complex(0.0));
  spec[k >= 0 ? k : k + g.n()] = Complex(1.0);
  return GridFunction::from_spectral(g, std::move(spec));
}

DriftField cos_drift(double amp) {
  DriftField d;
  d.b = [amp](double, const Vec& x) { return vec1(amp * std::cos(x[0])); };
  d.bound = 2.0 * amp;
  d.modulus = [amp](double r) { return amp * std::min(r, 2.0); };
  d.grad = [amp](double, const Vec& x, int) { return vec1(-amp * std::sin(x[0])); };
  return d;
}

}  // namespace

TEST_CASE("problem validation: exclusions and indicators") {
  TorusGrid g(1, 64);
  GridFunction phi = sine_field(g);
  // p = alpha/(alpha-1) is rejected for alpha in (1,2)
  CHECK_THROWS_AS(
      Problem(g, canonical(1.5), KernelCoefficient::one(), DriftField{}, nullptr, phi, 0.5, 3.0),
      HypothesisError);
  CHECK_NOTHROW(
      Problem(g, canonical(1.5), KernelCoefficient::one(), DriftField{}, nullptr, phi, 0.5, 2.0));
  // drift must vanish for alpha < 1
  CHECK_THROWS_AS(Problem(g, canonical(0.8), KernelCoefficient::one(), cos_drift(0.2), nullptr,
                          phi, 0.5, 2.0),
                  HypothesisError);
  // degenerate measure rejected
  SphericalMeasure axis_only(2, {{vec2(1, 0), 1.0}, {vec2(-1, 0), 1.0}});
  auto nu_bad = BoundedLevyMeasure::constant(StableLevyMeasure(1.5, axis_only), 1.0);
  TorusGrid g2(2, 16);
  GridFunction phi2 = GridFunction::zero(g2);
  CHECK_THROWS_AS(Problem(g2, nu_bad, KernelCoefficient::one(), DriftField{}, nullptr, phi2, 0.5,
                          2.0),
                  HypothesisError);
}

TEST_CASE("hypothesis report names every check with margins") {
  TorusGrid g(1, 64);
  auto checks = hypothesis_report(g, canonical(1.5), KernelCoefficient::one(), DriftField{}, 2.0,
                                  0.5);
  bool found_exclusion = false, found_nondegeneracy = false;
  for (const auto& c : checks) {
    CHECK(c.passed);
    if (c.name == "p-exclusion") found_exclusion = true;
    if (c.name == "nondegeneracy") found_nondegeneracy = true;
  }
  CHECK(found_exclusion);
  CHECK(found_nondegeneracy);
}

TEST_CASE("duhamel: plane-wave decay matches the exponent oracle") {
  TorusGrid g(1, 64);
  for (double alpha : {0.5, 1.5}) {
    auto nu = canonical(alpha);
    GridFunction phi = plane_wave(g, 3);
    Problem prob(g, nu, KernelCoefficient::one(), DriftField{}, nullptr, phi, 0.5, 2.0);
    CauchySolver solver(std::move(prob));
    Solution sol = solver.solve_duhamel(8);
    Complex psi = char_exponent(nu, vec1(3));
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      Complex expect = std::exp(0.5 * psi) * phi.nodal()[i];
      err = std::max(err, std::abs(sol.states.back().nodal()[i] - expect));
    }
    CHECK(err < 1e-8);
  }
}

TEST_CASE("duhamel: constant forcing integrates to t*c") {
  TorusGrid g(1, 64);
  auto nu = canonical(1.2);
  GridFunction zero = GridFunction::zero(g);
  auto forcing = [&g](double) { return GridFunction::constant(g, Complex(0.7, 0.0)); };
  Problem prob(g, nu, KernelCoefficient::one(), DriftField{}, forcing, zero, 0.8, 2.0);
  CauchySolver solver(std::move(prob));
  Solution sol = solver.solve_duhamel(8);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    err = std::max(err, std::abs(sol.states.back().nodal()[i] - Complex(0.8 * 0.7, 0.0)));
  CHECK(err < 1e-10);
}

TEST_CASE("duhamel: restart consistency (flow property)") {
  TorusGrid g(1, 64);
  auto nu = canonical(1.5);
  auto fs = random_trig_polynomial(1, 4, 3).to_grid(g);
  auto forcing = [fs](double t) { return std::cos(t) * fs; };
  GridFunction phi = random_trig_polynomial(1, 5, 4).to_grid(g);
  Problem prob(g, nu, KernelCoefficient::one(), DriftField{}, forcing, phi, 0.6, 2.0);
  CauchySolver solver(std::move(prob));
  Solution full = solver.solve_duhamel(12);

  Problem probA(g, nu, KernelCoefficient::one(), DriftField{}, forcing, phi, 0.3, 2.0);
  Solution first = CauchySolver(std::move(probA)).solve_duhamel(6);
  auto shifted_forcing = [forcing](double t) { return forcing(t + 0.3); };
  Problem probB(g, nu, KernelCoefficient::one(), DriftField{}, shifted_forcing,
                first.states.back(), 0.3, 2.0);
  Solution second = CauchySolver(std::move(probB)).solve_duhamel(6);
  CHECK((second.states.back() - full.states.back()).max_abs() < 1e-9);
}

TEST_CASE("duhamel rejects variable coefficients with a route error") {
  TorusGrid g(1, 64);
  auto nu = canonical(1.5);
  GridFunction phi = sine_field(g);
  Problem prob(g, nu, KernelCoefficient::one_plus_sin(0.2), DriftField{}, nullptr, phi, 0.5, 2.0);
  CauchySolver solver(std::move(prob));
  CHECK_THROWS_AS(solver.solve_duhamel(8), RouteError);
}

TEST_CASE("imex: constants are stationary") {
  TorusGrid g(1, 64);
  auto nu = canonical(1.5);
  GridFunction c = GridFunction::constant(g, Complex(1.3, 0.0));
  Problem prob(g, nu, KernelCoefficient::one(), DriftField{}, nullptr, c, 0.5, 2.0);
  CauchySolver solver(std::move(prob));
  Solution sol = solver.solve_imex(16);
  CHECK((sol.states.back() - c).max_abs() < 1e-12);
  CHECK_THROWS_AS(solver.solve_imex(8), ArgumentError);  // fewer than 16 steps
}

TEST_CASE("imex converges to duhamel at first order in dt") {
  TorusGrid g(1, 64);
  auto nu = canonical(1.5);
  GridFunction phi = random_trig_polynomial(1, 4, 7).to_grid(g);
  auto fs = random_trig_polynomial(1, 3, 8).to_grid(g);
  auto forcing = [fs](double t) { return std::exp(-t) * fs; };
  Problem prob(g, nu, KernelCoefficient::one(), DriftField{}, forcing, phi, 0.5, 2.0);
  CauchySolver solver(std::move(prob));
  Solution exact = solver.solve_duhamel(16);
  double prev_gap = -1.0;
  std::vector<double> gaps;
  for (int steps : {16, 32, 64}) {
    Solution approx = solver.solve_imex(steps);
    double gap = (approx.states.back() - exact.states.back()).max_abs();
    gaps.push_back(gap);
    if (prev_gap > 0.0) {
      double slope = std::log2(prev_gap / gap);
      CHECK(slope > 0.8);
      CHECK(slope < 1.2);
    }
    prev_gap = gap;
  }
}

TEST_CASE("imex residual decreases at order >= 1 under step refinement") {
  TorusGrid g(1, 64);
  auto nu = canonical(1.5);
  auto coeff = KernelCoefficient::separable_sin_power(0.25, 0.25, 0.6);
  GridFunction phi = sine_field(g);
  auto fs = random_trig_polynomial(1, 3, 12).to_grid(g);
  auto forcing = [fs](double t) { return std::exp(-t) * fs; };
  Problem prob(g, nu, coeff, cos_drift(0.25), forcing, phi, 0.5, 2.0);
  CauchySolver solver(std::move(prob));
  double prev = -1.0;
  for (int steps : {32, 64, 128}) {
    Solution sol = solver.solve_imex(steps);
    if (prev > 0.0) {
      double slope = std::log2(prev / sol.residual);
      CHECK(slope > 0.8);  // first-order convergence in the asymptotic range
    }
    prev = sol.residual;
  }
}

TEST_CASE("continuity method: frozen problems converge in one Picard pass per step") {
  TorusGrid g(1, 64);
  auto nu = canonical(1.5);
  GridFunction phi = random_trig_polynomial(1, 4, 2).to_grid(g);
  Problem prob(g, nu, KernelCoefficient::one(), DriftField{}, nullptr, phi, 0.5, 2.0);
  CauchySolver solver(std::move(prob));
  auto cont = solver.solve_continuity(16, 1e-8);
  CHECK(cont.iterations == static_cast<int>(cont.lambda_schedule.size()) - 1);
  CHECK(cont.contraction_estimates.empty());
  Solution direct = solver.solve_imex(16);
  double diff = 0.0;
  for (std::size_t i = 0; i < direct.states.size(); ++i)
    diff = std::max(diff, (cont.solution.states[i] - direct.states[i]).max_abs());
  CHECK(diff < 1e-10);
}

TEST_CASE("continuity method agrees with imex on a variable-coefficient problem") {
  TorusGrid g(1, 64);
  auto nu = canonical(1.5);
  auto coeff = KernelCoefficient::separable_sin_power(0.2, 0.2, 0.6);
  GridFunction phi = random_trig_polynomial(1, 4, 5).to_grid(g);
  Problem prob(g, nu, coeff, cos_drift(0.15), nullptr, phi, 0.4, 2.0);
  CauchySolver solver(std::move(prob));
  auto cont = solver.solve_continuity(16, 1e-5);
  for (double rho : cont.contraction_estimates) CHECK(rho < 1.0);
  Solution direct = solver.solve_imex(16);
  double diff = 0.0;
  for (std::size_t i = 0; i < direct.states.size(); ++i)
    diff = std::max(diff, lp_norm(cont.solution.states[i] - direct.states[i], 2.0));
  CHECK(diff <= 2.0 * std::max(cont.solution.residual, direct.residual));
}

TEST_CASE("mollification: identity for x-constant kernels and Fourier damping for sin") {
  TorusGrid g(1, 128);
  auto flat = KernelCoefficient::radial_bump(0.5, 0.7);
  auto [flat_eps, d0] = mollify_coefficients(flat, DriftField{}, 0.25, g);
  for (double x : {0.1, 2.0, 5.0}) {
    CHECK(flat_eps(0.0, vec1(x), vec1(0.4)) ==
          doctest::Approx(flat(0.0, vec1(x), vec1(0.4))).epsilon(1e-14));
  }

  auto wavy = KernelCoefficient::one_plus_sin(0.25);
  double eps = 0.5;
  auto [wavy_eps, d1] = mollify_coefficients(wavy, DriftField{}, eps, g);
  // convolved coefficient is 1 + (c_hat/4) sin(x) with c_hat the bump's
  // first Fourier coefficient; compute c_hat directly from the weights
  double expected_at_pi2 = wavy_eps(0.0, vec1(kPi / 2.0), Vec{0.0, 0.0});
  double chat = (expected_at_pi2 - 1.0) / 0.25;
  CHECK(chat > 0.0);
  CHECK(chat <= 1.0);
  for (double x : {0.3, 1.1, 4.0}) {
    CHECK(wavy_eps(0.0, vec1(x), Vec{0.0, 0.0}) ==
          doctest::Approx(1.0 + 0.25 * chat * std::sin(x)).epsilon(1e-10));
  }
  // |a_eps - a| <= (1 - c_hat)/4, within omega^(1)(eps)
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    Vec x = g.point(i);
    worst = std::max(worst, std::abs(wavy_eps(0.0, x, Vec{0.0, 0.0}) - wavy(0.0, x, Vec{0.0, 0.0})));
  }
  CHECK(worst == doctest::Approx(0.25 * (1.0 - chat)).epsilon(1e-8));

  // eps -> 0: the deviation shrinks monotonically
  double prev = worst;
  for (int j = 2; j <= 5; ++j) {
    auto [a_eps, dd] = mollify_coefficients(wavy, DriftField{}, std::pow(2.0, -j), g);
    double dev = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      Vec x = g.point(i);
      dev = std::max(dev, std::abs(a_eps(0.0, x, Vec{0.0, 0.0}) - wavy(0.0, x, Vec{0.0, 0.0})));
    }
    CHECK(dev <= prev + 1e-12);
    prev = dev;
  }
}

TEST_CASE("apriori report: zero data gives zero norms") {
  TorusGrid g(1, 64);
  auto nu = canonical(1.5);
  GridFunction zero = GridFunction::zero(g);
  Problem prob(g, nu, KernelCoefficient::one(), DriftField{}, nullptr, zero, 0.5, 2.0);
  CauchySolver solver(std::move(prob));
  Solution sol = solver.solve_imex(16);
  auto rep = solver.apriori_report(sol, 0);
  CHECK(rep.x_norm == 0.0);
  CHECK(rep.ratio == 0.0);
}

TEST_CASE("apriori report: frozen plane-wave problem has a finite ratio") {
  TorusGrid g(1, 64);
  auto nu = canonical(1.5);
  GridFunction phi = sine_field(g, 2);
  Problem prob(g, nu, KernelCoefficient::one(), DriftField{}, nullptr, phi, 0.5, 2.0);
  CauchySolver solver(std::move(prob));
  Solution sol = solver.solve_duhamel(16);
  auto rep = solver.apriori_report(sol, 0);
  CHECK(rep.phi_norm > 0.0);
  CHECK(std::isfinite(rep.ratio));
  CHECK(rep.ratio > 0.0);
}

TEST_CASE("apriori report with k = 1 uses the differentiated system") {
  TorusGrid g(1, 64);
  auto nu = canonical(1.5);
  auto coeff = KernelCoefficient::separable_sin_power(0.2, 0.2, 0.6);
  GridFunction phi = random_trig_polynomial(1, 4, 31).to_grid(g);
  Problem prob(g, nu, coeff, cos_drift(0.1), nullptr, phi, 0.4, 2.0);
  CauchySolver solver(std::move(prob));
  Solution sol = solver.solve_imex(32);
  auto rep = solver.apriori_report(sol, 1);
  CHECK(std::isfinite(rep.ratio));
  CHECK(rep.phi_norm > 0.0);
  CHECK_THROWS_AS(solver.apriori_report(sol, 2), ArgumentError);
}

TEST_CASE("nonlinear flow: constants are stationary and quadratic flux is linear") {
  TorusGrid g(1, 64);
  NonlinearFlux quad;
  quad.phi_prime = [](double u) { return u; };
  quad.phi_value = [](double u) { return 0.5 * u * u; };
  quad.phi2_at_zero = 1.0;
  quad.Lambda = 1.0;
  auto kappa = [](double) { return 1.0; };

  GridFunction c = GridFunction::constant(g, Complex(0.4, 0.0));
  Solution stat = solve_nonlinear(c, kappa, quad, 1.2, 10, 0.1);
  CHECK((stat.states.back() - c).max_abs() < 1e-13);

  // oddness violation is rejected
  NonlinearFlux bad = quad;
  bad.phi_prime = [](double u) { return u + 0.1 * u * u; };
  CHECK_THROWS_AS(solve_nonlinear(c, kappa, bad, 1.2, 10, 0.1), HypothesisError);
}

TEST_CASE("nonlinear flow: energy decreases for a genuinely nonlinear flux") {
  TorusGrid g(1, 64);
  NonlinearFlux flux;
  flux.phi_prime = [](double u) { return u + 0.5 * std::sin(u); };
  flux.phi_value = [](double u) { return 0.5 * u * u + 0.5 * (1.0 - std::cos(u)); };
  flux.phi2_at_zero = 1.5;
  flux.Lambda = 2.0;
  auto kappa = [](double r) { return 1.0 + 0.25 * std::cos(r); };
  GridFunction theta0 = sine_field(g);
  Solution sol = solve_nonlinear(theta0, kappa, flux, 1.2, 50, 0.2);
  for (std::size_t i = 1; i < sol.energy.size(); ++i)
    CHECK(sol.energy[i] <= sol.energy[i - 1] + 1e-6 * sol.energy.front());
  CHECK(sol.energy.back() < sol.energy.front());
}

TEST_CASE("imex solve runs in d = 2 with the uniform 16-atom measure") {
  TorusGrid g(2, 16);
  auto nu = BoundedLevyMeasure::constant(
      StableLevyMeasure(1.5, SphericalMeasure::uniform_2d(16)), 1.0);
  auto poly = random_trig_polynomial(2, 3, 14);
  GridFunction phi = poly.to_grid(g);
  QuadratureScheme scheme;
  scheme.r_max = 4.0 * kPi;  // keep the 2-d cell count small
  Problem prob(g, nu, KernelCoefficient::separable_sin_power(0.2, 0.2, 0.6), DriftField{},
               nullptr, phi, 0.25, 2.0, scheme);
  CauchySolver solver(std::move(prob));
  Solution sol = solver.solve_imex(16);
  CHECK(std::isfinite(sol.residual));
  CHECK(lp_norm(sol.states.back(), 2.0) < lp_norm(phi, 2.0));  // diffusion decays
  auto rep = solver.apriori_report(sol, 0);
  CHECK(std::isfinite(rep.ratio));
  CHECK(rep.ratio > 0.0);
}

TEST_CASE("solutions start exactly at the initial datum") {
  TorusGrid g(1, 64);
  auto nu = canonical(1.5);
  GridFunction phi = random_trig_polynomial(1, 5, 44).to_grid(g);
  Problem prob(g, nu, KernelCoefficient::one(), DriftField{}, nullptr, phi, 0.5, 2.0);
  CauchySolver solver(std::move(prob));
  for (const Solution& sol : {solver.solve_duhamel(8), solver.solve_imex(16)}) {
    CHECK(sol.times.front() == 0.0);
    for (std::size_t i = 0; i < g.size(); ++i)
      CHECK(sol.states.front().nodal()[i] == phi.nodal()[i]);
  }
}
