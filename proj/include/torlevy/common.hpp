#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace torlevy {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

// Error taxonomy used across the library.  ConfigError maps to CLI exit
// code 2, the others to exit code 1.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct ArgumentError : Error {
  using Error::Error;
};
struct HypothesisError : Error {
  using Error::Error;
};
struct StabilityError : Error {
  using Error::Error;
};
struct NumericError : Error {
  using Error::Error;
};
struct RouteError : Error {
  using Error::Error;
};

// Point / displacement in dimension d <= 2.  Component [1] is unused when
// d == 1; helpers below take the dimension explicitly.
using Vec = std::array<double, 2>;

inline Vec vec1(double x) { return {x, 0.0}; }
inline Vec vec2(double x, double y) { return {x, y}; }

inline double dot(const Vec& a, const Vec& b, int dim) {
  double s = a[0] * b[0];
  if (dim == 2) s += a[1] * b[1];
  return s;
}

inline double norm2(const Vec& a, int dim) { return std::sqrt(dot(a, a, dim)); }

inline Vec scaled(const Vec& a, double c) { return {a[0] * c, a[1] * c}; }

inline Vec operator+(const Vec& a, const Vec& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec operator-(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1]}; }

// Global worker cap shared by the parallel loops (CLI --threads).
void set_max_threads(int n);
int max_threads();

// Runs fn(begin..end) split into a fixed number of chunks whose partial
// results the caller combines in chunk order, so results do not depend on
// the worker count.  fn(chunk_index, lo, hi).
void parallel_chunks(std::size_t n_items, const std::function<void(int, std::size_t, std::size_t)>& fn,
                     int n_chunks = 64);

std::string version_string();

}  // namespace torlevy
