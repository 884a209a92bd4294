#include "torlevy/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "torlevy/quadrature.hpp"

namespace torlevy {

SphericalMeasure::SphericalMeasure(int dim, std::vector<Atom> atoms)
    : dim_(dim), atoms_(std::move(atoms)) {
  if (dim != 1 && dim != 2) throw ConfigError("SphericalMeasure: dimension must be 1 or 2");
  for (const auto& a : atoms_) {
    if (std::abs(norm2(a.direction, dim_) - 1.0) > 1e-12)
      throw ConfigError("SphericalMeasure: direction is not a unit vector");
    if (!(a.weight > 0.0)) throw ConfigError("SphericalMeasure: weights must be positive");
  }
}

SphericalMeasure SphericalMeasure::symmetric_pair_1d(double w_plus, double w_minus) {
  return SphericalMeasure(1, {{vec1(1.0), w_plus}, {vec1(-1.0), w_minus}});
}

SphericalMeasure SphericalMeasure::single_1d(double weight, int sign) {
  return SphericalMeasure(1, {{vec1(sign >= 0 ? 1.0 : -1.0), weight}});
}

SphericalMeasure SphericalMeasure::uniform_2d(int count, double total_weight) {
  std::vector<Atom> atoms;
  atoms.reserve(count);
  for (int j = 0; j < count; ++j) {
    double phi = kTwoPi * (j + 0.5) / count;
    atoms.push_back({vec2(std::cos(phi), std::sin(phi)), total_weight / count});
  }
  return SphericalMeasure(2, std::move(atoms));
}

SphericalMeasure SphericalMeasure::axes_2d(double weight_each) {
  return SphericalMeasure(2, {{vec2(1, 0), weight_each},
                              {vec2(-1, 0), weight_each},
                              {vec2(0, 1), weight_each},
                              {vec2(0, -1), weight_each}});
}

double SphericalMeasure::total_weight() const {
  double s = 0;
  for (const auto& a : atoms_) s += a.weight;
  return s;
}

bool SphericalMeasure::has_symmetric_pairs(double tol) const {
  std::vector<bool> used(atoms_.size(), false);
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (used[i]) continue;
    bool found = false;
    for (std::size_t j = i + 1; j < atoms_.size(); ++j) {
      if (used[j]) continue;
      Vec s = atoms_[i].direction + atoms_[j].direction;
      if (norm2(s, dim_) < tol && std::abs(atoms_[i].weight - atoms_[j].weight) < tol) {
        used[i] = used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

StableLevyMeasure::StableLevyMeasure(double alpha_, SphericalMeasure sigma_)
    : alpha(alpha_), sigma(std::move(sigma_)) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw ConfigError("StableLevyMeasure: alpha must lie strictly inside (0, 2)");
}

BoundedLevyMeasure::BoundedLevyMeasure(StableLevyMeasure reference, Density m, double m_lo,
                                       double m_hi, double saturation_radius,
                                       std::string density_name)
    : reference_(std::move(reference)),
      m_(std::move(m)),
      m_lo_(m_lo),
      m_hi_(m_hi),
      r_sat_(saturation_radius),
      name_(std::move(density_name)) {
  if (m_lo_ < 0.0 || m_hi_ < m_lo_) throw ConfigError("BoundedLevyMeasure: need 0 <= m_lo <= m_hi");
  if (!(r_sat_ > 0.0)) throw ConfigError("BoundedLevyMeasure: saturation radius must be positive");
  // sampled bound / saturation validation
  for (const auto& atom : reference_.sigma.atoms()) {
    double m_sat = m_(r_sat_ * 1.0001, atom.direction);
    for (double r : {1e-6, 1e-3, 0.01, 0.1, 0.3, 0.7, 0.999 * r_sat_, 1.3 * r_sat_, 4.0 * r_sat_,
                     100.0 * r_sat_}) {
      double v = m_(r, atom.direction);
      if (v < m_lo_ - 1e-12 || v > m_hi_ + 1e-12)
        throw ConfigError("BoundedLevyMeasure: density leaves [m_lo, m_hi] at sampled point");
      if (r > r_sat_ && std::abs(v - m_sat) > 1e-12)
        throw ConfigError("BoundedLevyMeasure: density not constant beyond saturation radius");
    }
  }
}

BoundedLevyMeasure BoundedLevyMeasure::constant(StableLevyMeasure reference, double c) {
  if (!(c > 0.0)) throw ConfigError("BoundedLevyMeasure: constant density must be positive");
  return BoundedLevyMeasure(std::move(reference), [c](double, const Vec&) { return c; }, c, c, 1.0,
                            "constant");
}

BoundedLevyMeasure BoundedLevyMeasure::radial_power(StableLevyMeasure reference, double gamma,
                                                    double amp) {
  if (!(gamma > 0.0) || amp < 0.0) throw ConfigError("radial_power density: need gamma > 0, amp >= 0");
  auto m = [gamma, amp](double r, const Vec&) {
    return 1.0 + amp * std::min(std::pow(r, gamma), 1.0);
  };
  return BoundedLevyMeasure(std::move(reference), m, 1.0, 1.0 + amp, 1.0, "radial-power");
}

BoundedLevyMeasure BoundedLevyMeasure::angular_wobble(StableLevyMeasure reference, double delta) {
  if (!(std::abs(delta) < 1.0)) throw ConfigError("angular_wobble density: need |delta| < 1");
  int dim = reference.sigma.dim();
  Density m;
  if (dim == 2) {
    m = [delta](double, const Vec& theta) {
      // cos(2 phi) = theta_x^2 - theta_y^2
      return 1.0 + delta * (theta[0] * theta[0] - theta[1] * theta[1]);
    };
  } else {
    m = [delta](double, const Vec& theta) { return 1.0 + delta * theta[0]; };
  }
  return BoundedLevyMeasure(std::move(reference), std::move(m), 1.0 - std::abs(delta),
                            1.0 + std::abs(delta), 1.0, "angular-wobble");
}

BoundedLevyMeasure BoundedLevyMeasure::truncated(StableLevyMeasure reference, double radius,
                                                 double c) {
  if (!(radius > 0.0) || !(c > 0.0)) throw ConfigError("truncated density: need radius, c > 0");
  auto m = [radius, c](double r, const Vec&) { return r < radius ? c : 0.0; };
  return BoundedLevyMeasure(std::move(reference), std::move(m), 0.0, c, radius, "truncated");
}

double BoundedLevyMeasure::density_at_zero(const Vec& theta) const { return m_(1e-14, theta); }

double BoundedLevyMeasure::radial_integral(std::size_t atom, double a, double b,
                                           double power) const {
  const double alpha = reference_.alpha;
  const Vec& theta = reference_.sigma.atoms()[atom].direction;
  auto integrand = [&](double r) { return m_(r, theta) * std::pow(r, power - 1.0 - alpha); };

  double upper = b;
  double tail = 0.0;
  if (std::isinf(b)) {
    if (!(power < alpha)) throw ArgumentError("radial_integral: divergent tail moment");
    upper = std::max(a, r_sat_);
    double m_sat = m_(r_sat_ * 1.0001, theta);
    tail = m_sat * std::pow(upper, power - alpha) / (alpha - power);
    if (upper <= a) return tail * std::pow(a / upper, power - alpha);
  }
  if (upper <= a) return tail;

  // geometric panels, Gauss-Legendre per panel; break at the saturation
  // radius where built-in densities may have a kink
  double total = 0.0;
  std::vector<double> breaks{a};
  if (r_sat_ > a && r_sat_ < upper) breaks.push_back(r_sat_);
  breaks.push_back(upper);
  for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
    double lo = breaks[s], hi = breaks[s + 1];
    int panels = std::max(1, static_cast<int>(std::ceil(std::log(hi / lo) / std::log(1.35))));
    double r0 = lo;
    for (int p = 0; p < panels; ++p) {
      double r1 = lo * std::pow(hi / lo, static_cast<double>(p + 1) / panels);
      total += integrate_gauss(integrand, r0, r1, 10);
      r0 = r1;
    }
  }
  return total + tail;
}

NondegeneracyResult check_nondegenerate(const SphericalMeasure& sigma, double alpha,
                                        int resolution) {
  if (sigma.atoms().empty()) throw ConfigError("check_nondegenerate: empty atom list");
  auto value_at = [&](const Vec& theta0) {
    double s = 0.0;
    for (const auto& a : sigma.atoms())
      s += a.weight * std::pow(std::abs(dot(theta0, a.direction, sigma.dim())), alpha);
    return s;
  };
  double min_v;
  if (sigma.dim() == 1) {
    min_v = std::min(value_at(vec1(1.0)), value_at(vec1(-1.0)));
  } else {
    if (resolution < 64) throw ArgumentError("check_nondegenerate: resolution must be >= 64");
    min_v = std::numeric_limits<double>::infinity();
    for (int i = 0; i < resolution; ++i) {
      double phi = kTwoPi * i / resolution;
      min_v = std::min(min_v, value_at(vec2(std::cos(phi), std::sin(phi))));
    }
  }
  return {min_v > 1e-10, min_v};
}

Vec check_alpha1_cancellation(const BoundedLevyMeasure& nu, double r, double R) {
  if (!(r > 0.0 && r < R)) throw ArgumentError("check_alpha1_cancellation: need 0 < r < R");
  Vec out{0.0, 0.0};
  if (std::abs(nu.alpha() - 1.0) > 1e-12) return out;  // condition vacuous
  const auto& atoms = nu.sigma().atoms();
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    double radial = nu.radial_integral(j, r, R, 1.0);
    out = out + scaled(atoms[j].direction, atoms[j].weight * radial);
  }
  return out;
}

TailMass tail_mass(const BoundedLevyMeasure& nu, double eps, double r_max) {
  if (!(eps > 0.0)) throw ArgumentError("tail_mass: eps must be positive");
  const auto& atoms = nu.sigma().atoms();
  const double alpha = nu.alpha();
  TailMass tm{0.0, 0.0};
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    if (eps < r_max) tm.quadrature += atoms[j].weight * nu.radial_integral(j, eps, r_max, 0.0);
    tm.remainder_bound +=
        atoms[j].weight * nu.m_hi() * std::pow(std::max(eps, r_max), -alpha) / alpha;
  }
  return tm;
}

Vec first_moment(const BoundedLevyMeasure& nu, double a, double b) {
  const auto& atoms = nu.sigma().atoms();
  Vec out{0.0, 0.0};
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    double radial = nu.radial_integral(j, a, b, 1.0);
    out = out + scaled(atoms[j].direction, atoms[j].weight * radial);
  }
  return out;
}

std::array<double, 3> small_jump_covariance(const BoundedLevyMeasure& nu, double eps) {
  const auto& atoms = nu.sigma().atoms();
  std::array<double, 3> cov{0.0, 0.0, 0.0};
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    double radial = nu.radial_integral(j, 1e-14, eps, 2.0);
    const Vec& th = atoms[j].direction;
    cov[0] += atoms[j].weight * radial * th[0] * th[0];
    cov[1] += atoms[j].weight * radial * th[0] * th[1];
    cov[2] += atoms[j].weight * radial * th[1] * th[1];
  }
  return cov;
}

}  // namespace torlevy
