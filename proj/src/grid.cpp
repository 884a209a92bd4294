#include "torlevy/grid.hpp"

#include <algorithm>

#include "torlevy/fft.hpp"
#include "torlevy/rng.hpp"

namespace torlevy {

TorusGrid::TorusGrid(int dim, int n) : dim_(dim), n_(n) {
  if (dim != 1 && dim != 2) throw ConfigError("TorusGrid: dimension must be 1 or 2");
  if (!is_power_of_two(n) || n < 8)
    throw ConfigError("TorusGrid: points per axis must be a power of two >= 8");
  size_ = static_cast<std::size_t>(n);
  if (dim == 2) size_ *= n;
}

Vec TorusGrid::point(std::size_t idx) const {
  const double h = spacing();
  if (dim_ == 1) return vec1(h * static_cast<double>(idx));
  return vec2(h * static_cast<double>(idx / n_), h * static_cast<double>(idx % n_));
}

Vec TorusGrid::wavevec(std::size_t idx) const {
  if (dim_ == 1) return vec1(wavenumber(static_cast<int>(idx)));
  return vec2(wavenumber(static_cast<int>(idx / n_)), wavenumber(static_cast<int>(idx % n_)));
}

namespace {

std::vector<Complex> nodal_to_spectral(const TorusGrid& g, std::vector<Complex> v) {
  if (g.dim() == 1)
    fft_inplace(v, false);
  else
    fft2_inplace(v, g.n(), false);
  const double scale = 1.0 / static_cast<double>(g.size());
  for (auto& c : v) c *= scale;
  return v;
}

std::vector<Complex> spectral_to_nodal(const TorusGrid& g, std::vector<Complex> v) {
  if (g.dim() == 1)
    fft_inplace(v, true);
  else
    fft2_inplace(v, g.n(), true);
  return v;
}

}  // namespace

GridFunction GridFunction::from_nodal(const TorusGrid& g, std::vector<Complex> nodal) {
  if (nodal.size() != g.size()) throw ArgumentError("GridFunction: nodal size mismatch");
  GridFunction f(g);
  f.spectral_ = nodal_to_spectral(g, nodal);
  f.nodal_ = std::move(nodal);
  return f;
}

GridFunction GridFunction::from_spectral(const TorusGrid& g, std::vector<Complex> spectral) {
  if (spectral.size() != g.size()) throw ArgumentError("GridFunction: spectral size mismatch");
  GridFunction f(g);
  f.nodal_ = spectral_to_nodal(g, spectral);
  f.spectral_ = std::move(spectral);
  return f;
}

GridFunction GridFunction::zero(const TorusGrid& g) {
  GridFunction f(g);
  f.nodal_.assign(g.size(), Complex(0.0));
  f.spectral_.assign(g.size(), Complex(0.0));
  return f;
}

GridFunction GridFunction::constant(const TorusGrid& g, Complex c) {
  GridFunction f(g);
  f.nodal_.assign(g.size(), c);
  f.spectral_.assign(g.size(), Complex(0.0));
  f.spectral_[0] = c;
  return f;
}

double GridFunction::max_abs() const {
  double m = 0;
  for (const auto& v : nodal_) m = std::max(m, std::abs(v));
  return m;
}

double GridFunction::max_abs_imag() const {
  double m = 0;
  for (const auto& v : nodal_) m = std::max(m, std::abs(v.imag()));
  return m;
}

int GridFunction::active_band(double tol) const {
  double peak = 0;
  for (const auto& c : spectral_) peak = std::max(peak, std::abs(c));
  if (peak == 0) return 0;
  int band = 0;
  for (std::size_t i = 0; i < spectral_.size(); ++i) {
    if (std::abs(spectral_[i]) > tol * peak) {
      Vec k = grid_.wavevec(i);
      int kk = static_cast<int>(std::max(std::abs(k[0]), std::abs(k[1])));
      band = std::max(band, kk);
    }
  }
  return band;
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  if (!(grid_ == o.grid_)) throw ArgumentError("GridFunction: grid mismatch");
  for (std::size_t i = 0; i < nodal_.size(); ++i) {
    nodal_[i] += o.nodal_[i];
    spectral_[i] += o.spectral_[i];
  }
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
  if (!(grid_ == o.grid_)) throw ArgumentError("GridFunction: grid mismatch");
  for (std::size_t i = 0; i < nodal_.size(); ++i) {
    nodal_[i] -= o.nodal_[i];
    spectral_[i] -= o.spectral_[i];
  }
  return *this;
}

GridFunction& GridFunction::operator*=(double c) {
  for (std::size_t i = 0; i < nodal_.size(); ++i) {
    nodal_[i] *= c;
    spectral_[i] *= c;
  }
  return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(double c, GridFunction a) { return a *= c; }

GridFunction transform(const GridFunction& f) {
  return GridFunction::from_nodal(f.grid(), f.nodal());
}

namespace {

// phase table e^{i k y} for k = wavenumber(idx), built by repeated
// multiplication from e^{iy} (cheaper than n sincos calls, error O(n eps))
std::vector<Complex> phase_table(int n, double y) {
  std::vector<Complex> t(n);
  const Complex wp(std::cos(y), std::sin(y));
  const Complex wm = std::conj(wp);
  t[0] = Complex(1.0);
  Complex acc(1.0);
  for (int j = 1; j <= n / 2 - 1; ++j) {
    acc *= wp;
    t[j] = acc;
  }
  acc = Complex(1.0);
  for (int j = 1; j <= n / 2; ++j) {
    acc *= wm;
    t[n - j] = acc;
  }
  return t;
}

}  // namespace

GridFunction translate(const GridFunction& f, const Vec& y) {
  const TorusGrid& g = f.grid();
  const int n = g.n();
  std::vector<Complex> spec = f.spectral();
  if (g.dim() == 1) {
    auto t = phase_table(n, y[0]);
    for (int j = 0; j < n; ++j) spec[j] *= t[j];
  } else {
    auto t0 = phase_table(n, y[0]);
    auto t1 = phase_table(n, y[1]);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) spec[r * n + c] *= t0[r] * t1[c];
  }
  return GridFunction::from_spectral(g, std::move(spec));
}

GridFunction derivative(const GridFunction& f, int axis) {
  const TorusGrid& g = f.grid();
  if (axis < 0 || axis >= g.dim()) throw ArgumentError("derivative: bad axis");
  const int n = g.n();
  std::vector<Complex> spec = f.spectral();
  for (std::size_t i = 0; i < spec.size(); ++i) {
    int mode = g.dim() == 1 ? static_cast<int>(i)
                            : (axis == 0 ? static_cast<int>(i) / n : static_cast<int>(i) % n);
    int k = g.wavenumber(mode);
    if (mode == n / 2) k = 0;  // odd-derivative multiplier: drop the Nyquist mode
    spec[i] *= Complex(0.0, static_cast<double>(k));
  }
  return GridFunction::from_spectral(g, std::move(spec));
}

std::vector<GridFunction> gradient(const GridFunction& f) {
  std::vector<GridFunction> out;
  out.reserve(f.grid().dim());
  for (int a = 0; a < f.grid().dim(); ++a) out.push_back(derivative(f, a));
  return out;
}

GridFunction second_derivative(const GridFunction& f, int a, int b) {
  return derivative(derivative(f, a), b);
}

GridFunction spectral_multiply(const GridFunction& f,
                               const std::function<Complex(const Vec&)>& mult) {
  std::vector<Complex> spec = f.spectral();
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= mult(f.grid().wavevec(i));
  return GridFunction::from_spectral(f.grid(), std::move(spec));
}

double TrigPolynomial::eval(const Vec& x) const {
  double s = 0.0;
  for (const auto& m : modes) {
    double phase = dot(m.k, x, dim);
    // mode plus its conjugate partner
    s += 2.0 * (m.coeff.real() * std::cos(phase) - m.coeff.imag() * std::sin(phase));
  }
  return s;
}

GridFunction TrigPolynomial::to_grid(const TorusGrid& g) const {
  if (g.dim() != dim) throw ArgumentError("TrigPolynomial: dimension mismatch");
  std::vector<Complex> spec(g.size(), Complex(0.0));
  const int n = g.n();
  auto mode_index = [&](int k) { return k >= 0 ? k : k + n; };
  for (const auto& m : modes) {
    int k0 = static_cast<int>(m.k[0]);
    int k1 = static_cast<int>(m.k[1]);
    std::size_t ip, im;
    if (dim == 1) {
      ip = mode_index(k0);
      im = mode_index(-k0);
    } else {
      ip = static_cast<std::size_t>(mode_index(k0)) * n + mode_index(k1);
      im = static_cast<std::size_t>(mode_index(-k0)) * n + mode_index(-k1);
    }
    spec[ip] += m.coeff;
    spec[im] += std::conj(m.coeff);
  }
  return GridFunction::from_spectral(g, std::move(spec));
}

TrigPolynomial random_trig_polynomial_decay(int dim, int kmax, double decay,
                                            std::uint64_t seed) {
  TrigPolynomial p;
  p.dim = dim;
  RandomStream rng(seed);
  if (dim == 1) {
    for (int k = 1; k <= kmax; ++k) {
      Complex c(rng.normal(), rng.normal());
      p.modes.push_back({vec1(k), c * std::pow(k, -decay)});
    }
  } else {
    // half-space of modes so the conjugate pairs do not double up
    for (int k0 = 0; k0 <= kmax; ++k0) {
      for (int k1 = -kmax; k1 <= kmax; ++k1) {
        if (k0 == 0 && k1 <= 0) continue;
        double kk = std::sqrt(double(k0) * k0 + double(k1) * k1);
        if (kk > kmax) continue;
        Complex c(rng.normal(), rng.normal());
        p.modes.push_back({vec2(k0, k1), c * std::pow(kk, -decay)});
      }
    }
  }
  return p;
}

TrigPolynomial random_trig_polynomial(int dim, int kmax, std::uint64_t seed) {
  return random_trig_polynomial_decay(dim, kmax, 1.0, seed);
}

}  // namespace torlevy
