#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <torlevy/solver.hpp>
#include <torlevy/verify.hpp>

namespace py = pybind11;
using namespace torlevy;

namespace {

Vec to_vec(const std::vector<double>& v) {
  if (v.empty() || v.size() > 2) throw ArgumentError("expected a length-1 or length-2 vector");
  Vec out{v[0], 0.0};
  if (v.size() == 2) out[1] = v[1];
  return out;
}

GridFunction field_from_array(const TorusGrid& g, py::array_t<std::complex<double>> arr) {
  auto buf = arr.request();
  if (static_cast<std::size_t>(buf.size) != g.size())
    throw ArgumentError("array size does not match the grid");
  const auto* ptr = static_cast<const std::complex<double>*>(buf.ptr);
  return GridFunction::from_nodal(g, std::vector<Complex>(ptr, ptr + buf.size));
}

py::array_t<std::complex<double>> array_from(const std::vector<Complex>& v, const TorusGrid& g) {
  std::vector<py::ssize_t> shape;
  if (g.dim() == 1)
    shape = {static_cast<py::ssize_t>(v.size())};
  else
    shape = {g.n(), g.n()};
  py::array_t<std::complex<double>> out(shape);
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

BoundedLevyMeasure make_measure(double alpha,
                                const std::vector<std::pair<std::vector<double>, double>>& atoms,
                                const std::string& density, double param_a, double param_b) {
  int dim = atoms.empty() ? 1 : static_cast<int>(atoms.front().first.size());
  std::vector<SphericalMeasure::Atom> a;
  for (const auto& [dir, w] : atoms) a.push_back({to_vec(dir), w});
  StableLevyMeasure ref(alpha, SphericalMeasure(dim, std::move(a)));
  if (density == "constant") return BoundedLevyMeasure::constant(std::move(ref), param_a);
  if (density == "radial-power")
    return BoundedLevyMeasure::radial_power(std::move(ref), param_a, param_b);
  if (density == "angular-wobble")
    return BoundedLevyMeasure::angular_wobble(std::move(ref), param_a);
  if (density == "truncated") return BoundedLevyMeasure::truncated(std::move(ref), param_a, param_b);
  throw ArgumentError("unknown density built-in: " + density);
}

}  // namespace

PYBIND11_MODULE(torlevy, m) {
  m.doc() = "Nonlocal parabolic equations with stable-type Levy kernels on the torus";

  py::register_exception<ConfigError>(m, "TorlevyConfigError");
  py::register_exception<HypothesisError>(m, "TorlevyHypothesisError");

  py::class_<TorusGrid>(m, "TorusGrid")
      .def(py::init<int, int>(), py::arg("dim"), py::arg("n"))
      .def_property_readonly("dim", &TorusGrid::dim)
      .def_property_readonly("n", &TorusGrid::n)
      .def_property_readonly("spacing", &TorusGrid::spacing)
      .def("point", [](const TorusGrid& g, std::size_t i) {
        Vec p = g.point(i);
        return g.dim() == 1 ? std::vector<double>{p[0]} : std::vector<double>{p[0], p[1]};
      });

  py::class_<GridFunction>(m, "GridFunction")
      .def_static("from_values", &field_from_array, py::arg("grid"), py::arg("values"))
      .def_static("zero", &GridFunction::zero)
      .def_static("constant",
                  [](const TorusGrid& g, double c) {
                    return GridFunction::constant(g, Complex(c, 0.0));
                  })
      .def_property_readonly("grid", &GridFunction::grid)
      .def("values", [](const GridFunction& f) { return array_from(f.nodal(), f.grid()); })
      .def("spectrum", [](const GridFunction& f) { return array_from(f.spectral(), f.grid()); })
      .def("max_abs", &GridFunction::max_abs)
      .def("__add__", [](const GridFunction& a, const GridFunction& b) { return a + b; })
      .def("__sub__", [](const GridFunction& a, const GridFunction& b) { return a - b; })
      .def("__rmul__", [](const GridFunction& a, double c) { return c * a; });

  m.def("random_trig_field",
        [](const TorusGrid& g, int kmax, std::uint64_t seed, double decay) {
          return random_trig_polynomial_decay(g.dim(), kmax, decay, seed).to_grid(g);
        },
        py::arg("grid"), py::arg("kmax") = 8, py::arg("seed") = 1, py::arg("decay") = 1.0);
  m.def("translate",
        [](const GridFunction& f, const std::vector<double>& y) { return translate(f, to_vec(y)); });
  m.def("gradient", [](const GridFunction& f) { return gradient(f); });
  m.def("fractional_laplacian", &fractional_laplacian, py::arg("f"), py::arg("beta"));

  m.def("lp_norm", &lp_norm, py::arg("f"), py::arg("p"));
  m.def("bessel_norm",
        [](const GridFunction& f, double beta, double p) {
          return bessel_norm(f, NormOrder(beta, p));
        },
        py::arg("f"), py::arg("beta"), py::arg("p"));
  m.def("slobodeckij_seminorm", &slobodeckij_seminorm, py::arg("f"), py::arg("beta"),
        py::arg("p"));
  m.def("sobolev_w_norm", &sobolev_w_norm, py::arg("f"), py::arg("order"), py::arg("p"));
  m.def("check_interpolation",
        [](const GridFunction& f, double beta, double gamma, double p) {
          auto r = check_interpolation(f, beta, gamma, p);
          return py::make_tuple(r.lhs, r.rhs_ratio);
        });
  m.def("check_translation_bound",
        [](const GridFunction& f, const std::vector<double>& y, double beta, double p) {
          return check_translation_bound(f, to_vec(y), beta, p);
        });

  py::class_<BoundedLevyMeasure>(m, "LevyMeasure")
      .def_property_readonly("alpha", &BoundedLevyMeasure::alpha)
      .def_property_readonly("dim", &BoundedLevyMeasure::dim)
      .def("density", [](const BoundedLevyMeasure& nu, double r, const std::vector<double>& th) {
        return nu.density(r, to_vec(th));
      });
  m.def("stable_measure", &make_measure, py::arg("alpha"), py::arg("atoms"),
        py::arg("density") = "constant", py::arg("param_a") = 1.0, py::arg("param_b") = 1.0,
        "Density-modulated stable-type measure; atoms are (direction, weight) pairs");
  m.def("check_nondegenerate",
        [](const BoundedLevyMeasure& nu, int resolution) {
          auto r = check_nondegenerate(nu.sigma(), nu.alpha(), resolution);
          return py::make_tuple(r.nondegenerate, r.min_value);
        },
        py::arg("measure"), py::arg("resolution") = 256);
  m.def("tail_mass",
        [](const BoundedLevyMeasure& nu, double eps) {
          auto t = tail_mass(nu, eps);
          return py::make_tuple(t.quadrature, t.remainder_bound);
        });
  m.def("char_exponent",
        [](const BoundedLevyMeasure& nu, const std::vector<double>& k) {
          return char_exponent(nu, to_vec(k));
        });

  py::class_<KernelCoefficient>(m, "KernelCoefficient")
      .def("__call__", [](const KernelCoefficient& a, double t, const std::vector<double>& x,
                          const std::vector<double>& y) { return a(t, to_vec(x), to_vec(y)); })
      .def_property_readonly("name", &KernelCoefficient::name);
  m.def("kernel_constant", &KernelCoefficient::constant, py::arg("c") = 1.0);
  m.def("kernel_radial_bump", &KernelCoefficient::radial_bump, py::arg("amp"), py::arg("gamma"));
  m.def("kernel_one_plus_sin", &KernelCoefficient::one_plus_sin, py::arg("ax"));
  m.def("kernel_separable_sin_power", &KernelCoefficient::separable_sin_power, py::arg("ax"),
        py::arg("ay"), py::arg("gamma"));

  py::class_<QuadratureScheme>(m, "QuadratureScheme")
      .def(py::init<>())
      .def_readwrite("r_min", &QuadratureScheme::r_min)
      .def_readwrite("r_max", &QuadratureScheme::r_max)
      .def_readwrite("ratio", &QuadratureScheme::ratio)
      .def_readwrite("osc_cap", &QuadratureScheme::osc_cap)
      .def_readwrite("extend_tail", &QuadratureScheme::extend_tail);

  m.def("apply_operator",
        [](const GridFunction& f, const BoundedLevyMeasure& nu, const KernelCoefficient& coeff,
           double t, const QuadratureScheme& scheme) {
          auto r = apply_operator(f, nu, coeff, t, scheme);
          return py::make_tuple(r.field, r.tail_f_bound);
        },
        py::arg("f"), py::arg("measure"), py::arg("kernel"), py::arg("t") = 0.0,
        py::arg("scheme") = QuadratureScheme{});
  m.def("apply_split",
        [](const GridFunction& f, const BoundedLevyMeasure& nu, const KernelCoefficient& coeff,
           double t, double eps, const QuadratureScheme& scheme) {
          auto r = apply_split(f, nu, coeff, t, eps, scheme);
          return py::make_tuple(r.i1, r.i2, r.i3, r.eps_used);
        },
        py::arg("f"), py::arg("measure"), py::arg("kernel"), py::arg("t"), py::arg("eps"),
        py::arg("scheme") = QuadratureScheme{});

  py::class_<SymbolTable>(m, "SymbolTable")
      .def(py::init<const TorusGrid&, const BoundedLevyMeasure&>())
      .def("at", &SymbolTable::at);

  py::class_<SamplerConfig>(m, "SamplerConfig")
      .def(py::init<>())
      .def_readwrite("r_cut", &SamplerConfig::r_cut)
      .def_readwrite("gaussian_correction", &SamplerConfig::gaussian_correction)
      .def_readwrite("n_paths", &SamplerConfig::n_paths)
      .def_readwrite("seed", &SamplerConfig::seed);

  m.def("sample_increments",
        [](const BoundedLevyMeasure& nu, const SamplerConfig& cfg, double s, double t) {
          auto incr = sample_increments(nu, cfg, s, t);
          std::vector<double> flat;
          flat.reserve(incr.size() * nu.dim());
          for (const Vec& dx : incr)
            for (int c = 0; c < nu.dim(); ++c) flat.push_back(dx[c]);
          py::array_t<double> out(std::vector<py::ssize_t>{
              static_cast<py::ssize_t>(incr.size()), static_cast<py::ssize_t>(nu.dim())});
          std::copy(flat.begin(), flat.end(), out.mutable_data());
          return out;
        });
  m.def("propagate_mc",
        [](const GridFunction& phi, const BoundedLevyMeasure& nu, const SamplerConfig& cfg,
           double s, double t) {
          auto r = propagate_mc(phi, nu, cfg, s, t);
          return py::make_tuple(r.mean, r.stderr_max);
        });
  m.def("propagate_spectral", &propagate_spectral, py::arg("phi"), py::arg("symbol"),
        py::arg("s"), py::arg("t"), py::arg("lambda_const") = 1.0,
        py::arg("vartheta") = Vec{0.0, 0.0});

  py::class_<Solution>(m, "Solution")
      .def_readonly("times", &Solution::times)
      .def_readonly("residual", &Solution::residual)
      .def_readonly("energy", &Solution::energy)
      .def("state", [](const Solution& s, std::size_t i) { return s.states.at(i); })
      .def("final_state", [](const Solution& s) { return s.states.back(); })
      .def("__len__", [](const Solution& s) { return s.times.size(); });

  py::class_<Problem>(m, "Problem")
      .def(py::init([](const TorusGrid& g, const BoundedLevyMeasure& nu,
                       const KernelCoefficient& coeff, const GridFunction& initial,
                       double horizon, double p) {
             return Problem(g, nu, coeff, DriftField{}, nullptr, initial, horizon, p);
           }),
           py::arg("grid"), py::arg("measure"), py::arg("kernel"), py::arg("initial"),
           py::arg("horizon"), py::arg("p"));

  py::class_<CauchySolver>(m, "CauchySolver")
      .def(py::init<Problem>())
      .def("solve_imex", &CauchySolver::solve_imex, py::arg("n_steps"))
      .def("solve_duhamel", &CauchySolver::solve_duhamel, py::arg("n_steps"))
      .def("solve_continuity",
           [](const CauchySolver& s, int steps, double tol) {
             auto r = s.solve_continuity(steps, tol);
             return py::make_tuple(r.solution, r.iterations, r.contraction_estimates);
           },
           py::arg("n_steps"), py::arg("tol") = 1e-6)
      .def("apriori_report", [](const CauchySolver& s, const Solution& sol, int k) {
        auto r = s.apriori_report(sol, k);
        py::dict d;
        d["x_norm"] = r.x_norm;
        d["phi_norm"] = r.phi_norm;
        d["f_norm"] = r.f_norm;
        d["ratio"] = r.ratio;
        return d;
      }, py::arg("solution"), py::arg("k") = 0);

  m.def("solve_nonlinear",
        [](const GridFunction& theta0, double alpha, int n_steps, double horizon) {
          // the motivating flow with the built-in perturbed-quadratic flux
          NonlinearFlux flux;
          flux.phi_prime = [](double u) { return u + 0.5 * std::sin(u); };
          flux.phi_value = [](double u) { return 0.5 * u * u + 0.5 * (1.0 - std::cos(u)); };
          flux.phi2_at_zero = 1.5;
          flux.Lambda = 2.0;
          auto kappa = [](double r) { return 1.0 + 0.25 * std::cos(r); };
          return solve_nonlinear(theta0, kappa, flux, alpha, n_steps, horizon);
        },
        py::arg("theta0"), py::arg("alpha"), py::arg("n_steps"), py::arg("horizon"));

  m.attr("__version__") = version_string();
}
