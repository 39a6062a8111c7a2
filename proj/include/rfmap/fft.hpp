#pragma once

#include <complex>
#include <span>

namespace rfmap {

bool is_power_of_two(std::size_t n);

// In-place iterative radix-2 FFT, forward sign exp(-2 pi i k n / N).
// The length must be a power of two.
void fft_radix2(std::span<std::complex<double>> data);

}  // namespace rfmap
