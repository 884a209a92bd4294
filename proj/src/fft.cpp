#include "torlevy/fft.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace torlevy {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

namespace {

// Forward-direction twiddles e^{-2pi i j / n} for j < n/2, cached per size.
std::shared_ptr<const std::vector<Complex>> twiddles_for(int n) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const std::vector<Complex>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto tw = std::make_shared<std::vector<Complex>>(n / 2);
  for (int j = 0; j < n / 2; ++j) {
    double ang = -kTwoPi * j / n;
    (*tw)[j] = Complex(std::cos(ang), std::sin(ang));
  }
  cache.emplace(n, tw);
  return tw;
}

}  // namespace

void fft_inplace(std::vector<Complex>& a, bool inverse) {
  const int n = static_cast<int>(a.size());
  if (n <= 1) return;
  if (!is_power_of_two(n)) throw ConfigError("fft: length must be a power of two");

  // bit reversal
  for (int i = 1, j = 0; i < n; ++i) {
    int bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  auto tw = twiddles_for(n);
  for (int len = 2; len <= n; len <<= 1) {
    const int stride = n / len;
    for (int i = 0; i < n; i += len) {
      for (int j = 0; j < len / 2; ++j) {
        Complex w = (*tw)[j * stride];
        if (inverse) w = std::conj(w);
        Complex u = a[i + j];
        Complex v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
      }
    }
  }
}

void fft2_inplace(std::vector<Complex>& data, int n, bool inverse) {
  if (static_cast<int>(data.size()) != n * n)
    throw ConfigError("fft2: size mismatch");
  std::vector<Complex> scratch(n);
  // rows
  for (int r = 0; r < n; ++r) {
    std::copy(data.begin() + r * n, data.begin() + (r + 1) * n, scratch.begin());
    fft_inplace(scratch, inverse);
    std::copy(scratch.begin(), scratch.end(), data.begin() + r * n);
  }
  // columns
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < n; ++r) scratch[r] = data[r * n + c];
    fft_inplace(scratch, inverse);
    for (int r = 0; r < n; ++r) data[r * n + c] = scratch[r];
  }
}

}  // namespace torlevy
