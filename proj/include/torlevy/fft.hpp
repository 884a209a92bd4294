#pragma once

#include <vector>

#include "torlevy/common.hpp"

namespace torlevy {

// In-place radix-2 FFT on a power-of-two length.  forward uses the
// e^{-ikx} kernel; inverse uses e^{+ikx} and does NOT rescale.
void fft_inplace(std::vector<Complex>& data, bool inverse);

// 2-d transform of an n-by-n row-major array (rows then columns).
void fft2_inplace(std::vector<Complex>& data, int n, bool inverse);

bool is_power_of_two(int n);

}  // namespace torlevy
