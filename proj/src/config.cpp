#include "torlevy/config.hpp"

#include <cmath>

namespace torlevy {

void reject_unknown_keys(const Json& obj, const std::vector<std::string>& allowed,
                         const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

namespace {

double need_number(const Json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing required key '" + key + "'");
  if (!j[key].is_number()) throw ConfigError(where + ": '" + key + "' must be a number");
  return j[key].get<double>();
}

double opt_number(const Json& j, const std::string& key, double fallback) {
  return j.contains(key) ? j[key].get<double>() : fallback;
}

std::string need_string(const Json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_string())
    throw ConfigError(where + ": missing string key '" + key + "'");
  return j[key].get<std::string>();
}

}  // namespace

TorusGrid parse_grid(const Json& j) {
  reject_unknown_keys(j, {"d", "n"}, "grid");
  int d = static_cast<int>(need_number(j, "d", "grid"));
  int n = static_cast<int>(need_number(j, "n", "grid"));
  return TorusGrid(d, n);
}

BoundedLevyMeasure parse_measure(const Json& j, int dim) {
  reject_unknown_keys(j, {"alpha", "atoms", "density"}, "measure");
  double alpha = need_number(j, "alpha", "measure");
  if (!j.contains("atoms") || !j["atoms"].is_array())
    throw ConfigError("measure: missing 'atoms' array");
  std::vector<SphericalMeasure::Atom> atoms;
  for (const auto& entry : j["atoms"]) {
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_array())
      throw ConfigError("measure: each atom must be [[dir...], weight]");
    const auto& dir = entry[0];
    if (static_cast<int>(dir.size()) != dim)
      throw ConfigError("measure: atom direction dimension mismatch");
    Vec v{0.0, 0.0};
    for (int c = 0; c < dim; ++c) v[c] = dir[c].get<double>();
    atoms.push_back({v, entry[1].get<double>()});
  }
  StableLevyMeasure ref(alpha, SphericalMeasure(dim, std::move(atoms)));

  if (!j.contains("density")) throw ConfigError("measure: missing 'density'");
  const Json& dj = j["density"];
  std::string name = need_string(dj, "name", "measure.density");
  if (name == "constant") {
    reject_unknown_keys(dj, {"name", "c"}, "measure.density");
    return BoundedLevyMeasure::constant(std::move(ref), opt_number(dj, "c", 1.0));
  }
  if (name == "radial-power") {
    reject_unknown_keys(dj, {"name", "gamma", "amp"}, "measure.density");
    return BoundedLevyMeasure::radial_power(std::move(ref),
                                            need_number(dj, "gamma", "measure.density"),
                                            need_number(dj, "amp", "measure.density"));
  }
  if (name == "angular-wobble") {
    reject_unknown_keys(dj, {"name", "delta"}, "measure.density");
    return BoundedLevyMeasure::angular_wobble(std::move(ref),
                                              need_number(dj, "delta", "measure.density"));
  }
  if (name == "truncated") {
    reject_unknown_keys(dj, {"name", "radius", "c"}, "measure.density");
    return BoundedLevyMeasure::truncated(std::move(ref),
                                         need_number(dj, "radius", "measure.density"),
                                         opt_number(dj, "c", 1.0));
  }
  throw ConfigError("measure.density: unknown built-in '" + name + "'");
}

KernelCoefficient parse_kernel(const Json& j) {
  std::string name = need_string(j, "name", "kernel");
  if (name == "constant") {
    reject_unknown_keys(j, {"name", "c"}, "kernel");
    return KernelCoefficient::constant(need_number(j, "c", "kernel"));
  }
  if (name == "radial-bump") {
    reject_unknown_keys(j, {"name", "amp", "gamma"}, "kernel");
    return KernelCoefficient::radial_bump(need_number(j, "amp", "kernel"),
                                          need_number(j, "gamma", "kernel"));
  }
  if (name == "one-plus-sin") {
    reject_unknown_keys(j, {"name", "ax"}, "kernel");
    return KernelCoefficient::one_plus_sin(need_number(j, "ax", "kernel"));
  }
  if (name == "separable-sin-power") {
    reject_unknown_keys(j, {"name", "ax", "ay", "gamma"}, "kernel");
    return KernelCoefficient::separable_sin_power(need_number(j, "ax", "kernel"),
                                                  need_number(j, "ay", "kernel"),
                                                  need_number(j, "gamma", "kernel"));
  }
  throw ConfigError("kernel: unknown built-in '" + name + "'");
}

DriftField parse_drift(const Json& j, int dim) {
  std::string name = need_string(j, "name", "drift");
  if (name == "zero") {
    reject_unknown_keys(j, {"name"}, "drift");
    return DriftField{};
  }
  if (name == "constant") {
    reject_unknown_keys(j, {"name", "value"}, "drift");
    if (!j.contains("value") || !j["value"].is_array() ||
        static_cast<int>(j["value"].size()) != dim)
      throw ConfigError("drift: 'value' must be a length-d array");
    Vec v{0.0, 0.0};
    for (int c = 0; c < dim; ++c) v[c] = j["value"][c].get<double>();
    DriftField d;
    d.b = [v](double, const Vec&) { return v; };
    d.bound = 1e-12;
    d.modulus = [](double) { return 1e-12; };
    d.grad = [](double, const Vec&, int) { return Vec{0.0, 0.0}; };
    return d;
  }
  if (name == "cos") {
    reject_unknown_keys(j, {"name", "amp"}, "drift");
    double amp = need_number(j, "amp", "drift");
    DriftField d;
    d.b = [amp](double, const Vec& x) { return vec1(amp * std::cos(x[0])); };
    d.bound = 2.0 * std::abs(amp);
    d.modulus = [amp](double r) { return std::abs(amp) * std::min(r, 2.0); };
    d.grad = [amp](double, const Vec& x, int axis) {
      return axis == 0 ? vec1(-amp * std::sin(x[0])) : Vec{0.0, 0.0};
    };
    return d;
  }
  throw ConfigError("drift: unknown built-in '" + name + "'");
}

QuadratureScheme parse_quadrature(const Json& j) {
  reject_unknown_keys(j, {"r_min", "r_max", "ratio", "nodes_per_decade", "osc_cap",
                          "taylor_inner", "extend_tail"},
                      "quadrature");
  QuadratureScheme s;
  s.r_min = opt_number(j, "r_min", s.r_min);
  s.r_max = opt_number(j, "r_max", s.r_max);
  s.ratio = opt_number(j, "ratio", s.ratio);
  if (j.contains("nodes_per_decade")) {
    if (j.contains("ratio"))
      throw ConfigError("quadrature: give either 'ratio' or 'nodes_per_decade', not both");
    s.ratio = std::pow(10.0, 1.0 / need_number(j, "nodes_per_decade", "quadrature"));
  }
  s.osc_cap = opt_number(j, "osc_cap", s.osc_cap);
  if (j.contains("taylor_inner")) s.taylor_inner = j["taylor_inner"].get<bool>();
  if (j.contains("extend_tail")) s.extend_tail = j["extend_tail"].get<bool>();
  s.validate();
  return s;
}

namespace {

std::function<double(double)> parse_scalar_fn(const Json& j, const std::string& where) {
  std::string name = need_string(j, "name", where);
  if (name == "constant") {
    reject_unknown_keys(j, {"name", "value"}, where);
    double v = need_number(j, "value", where);
    return [v](double) { return v; };
  }
  if (name == "linear") {
    reject_unknown_keys(j, {"name", "base", "slope"}, where);
    double b = need_number(j, "base", where), s = need_number(j, "slope", where);
    return [b, s](double t) { return b + s * t; };
  }
  throw ConfigError(where + ": unknown built-in '" + name + "'");
}

}  // namespace

SamplerConfig parse_sampler(const Json& j, int dim) {
  reject_unknown_keys(
      j, {"r_cut", "gaussian_correction", "paths", "seed", "lambda", "lambda_floor", "vartheta"},
      "sampler");
  SamplerConfig cfg;
  cfg.r_cut = opt_number(j, "r_cut", cfg.r_cut);
  if (j.contains("gaussian_correction")) cfg.gaussian_correction = j["gaussian_correction"].get<bool>();
  cfg.n_paths = static_cast<int>(opt_number(j, "paths", cfg.n_paths));
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("lambda")) cfg.lambda = parse_scalar_fn(j["lambda"], "sampler.lambda");
  cfg.lambda_floor = opt_number(j, "lambda_floor", cfg.lambda_floor);
  if (j.contains("vartheta")) {
    const Json& vj = j["vartheta"];
    std::string name = need_string(vj, "name", "sampler.vartheta");
    if (name == "zero") {
      cfg.vartheta = [](double) { return Vec{0.0, 0.0}; };
    } else if (name == "constant") {
      reject_unknown_keys(vj, {"name", "value"}, "sampler.vartheta");
      Vec v{0.0, 0.0};
      for (int c = 0; c < dim; ++c) v[c] = vj["value"][c].get<double>();
      cfg.vartheta = [v](double) { return v; };
    } else {
      throw ConfigError("sampler.vartheta: unknown built-in '" + name + "'");
    }
  }
  cfg.validate();
  return cfg;
}

GridFunction parse_field(const Json& j, const TorusGrid& grid) {
  std::string name = need_string(j, "name", "field");
  if (name == "zero") return GridFunction::zero(grid);
  if (name == "constant") {
    reject_unknown_keys(j, {"name", "c"}, "field");
    return GridFunction::constant(grid, Complex(need_number(j, "c", "field"), 0.0));
  }
  if (name == "sin" || name == "cos") {
    reject_unknown_keys(j, {"name", "k"}, "field");
    int k = static_cast<int>(need_number(j, "k", "field"));
    std::vector<Complex> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double x = grid.point(i)[0];
      v[i] = name == "sin" ? std::sin(k * x) : std::cos(k * x);
    }
    return GridFunction::from_nodal(grid, std::move(v));
  }
  if (name == "random-trig") {
    reject_unknown_keys(j, {"name", "kmax", "seed", "decay"}, "field");
    int kmax = static_cast<int>(opt_number(j, "kmax", 8));
    double decay = opt_number(j, "decay", 1.0);
    std::uint64_t seed = j.contains("seed") ? j["seed"].get<std::uint64_t>() : 1;
    return random_trig_polynomial_decay(grid.dim(), kmax, decay, seed).to_grid(grid);
  }
  throw ConfigError("field: unknown built-in '" + name + "'");
}

std::function<GridFunction(double)> parse_forcing(const Json& j, const TorusGrid& grid) {
  std::string name = need_string(j, "name", "forcing");
  if (name == "zero") return nullptr;
  if (name == "separable") {
    reject_unknown_keys(j, {"name", "space", "time"}, "forcing");
    if (!j.contains("space")) throw ConfigError("forcing: missing 'space'");
    GridFunction space = parse_field(j["space"], grid);
    std::function<double(double)> timefn = [](double) { return 1.0; };
    if (j.contains("time")) {
      const Json& tj = j["time"];
      std::string tname = need_string(tj, "name", "forcing.time");
      if (tname == "constant") {
        timefn = [](double) { return 1.0; };
      } else if (tname == "exp-decay") {
        double rate = need_number(tj, "rate", "forcing.time");
        timefn = [rate](double t) { return std::exp(-rate * t); };
      } else {
        throw ConfigError("forcing.time: unknown built-in '" + tname + "'");
      }
    }
    return [space, timefn](double t) { return timefn(t) * space; };
  }
  throw ConfigError("forcing: unknown built-in '" + name + "'");
}

Problem parse_problem(const Json& root) {
  reject_unknown_keys(root,
                      {"grid", "measure", "kernel", "drift", "problem", "quadrature", "sampler",
                       "verify", "output"},
                      "config");
  for (const char* key : {"grid", "measure", "kernel", "problem"}) {
    if (!root.contains(key)) throw ConfigError(std::string("config: missing section '") + key + "'");
  }
  TorusGrid grid = parse_grid(root["grid"]);
  BoundedLevyMeasure nu = parse_measure(root["measure"], grid.dim());
  KernelCoefficient coeff = parse_kernel(root["kernel"]);
  DriftField drift =
      root.contains("drift") ? parse_drift(root["drift"], grid.dim()) : DriftField{};
  QuadratureScheme scheme =
      root.contains("quadrature") ? parse_quadrature(root["quadrature"]) : QuadratureScheme{};

  const Json& pj = root["problem"];
  reject_unknown_keys(pj, {"initial", "forcing", "horizon", "p", "route", "steps", "tol"},
                      "problem");
  if (!pj.contains("initial")) throw ConfigError("problem: missing 'initial'");
  GridFunction initial = parse_field(pj["initial"], grid);
  std::function<GridFunction(double)> forcing =
      pj.contains("forcing") ? parse_forcing(pj["forcing"], grid) : nullptr;
  double horizon = need_number(pj, "horizon", "problem");
  double p = need_number(pj, "p", "problem");
  return Problem(grid, std::move(nu), std::move(coeff), std::move(drift), std::move(forcing),
                 std::move(initial), horizon, p, scheme);
}

}  // namespace torlevy
