#include "rfmap/fft.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "rfmap/errors.hpp"

namespace rfmap {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void fft_radix2(std::span<std::complex<double>> data) {
  const std::size_t n = data.size();
  if (!is_power_of_two(n)) throw ContractViolation("FFT length must be a power of two");

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
    const std::size_t half = len / 2;
    for (std::size_t k = 0; k < half; ++k) {
      // Twiddles from cos/sin directly rather than by recurrence.
      const std::complex<double> w(std::cos(ang * static_cast<double>(k)),
                                   std::sin(ang * static_cast<double>(k)));
      for (std::size_t i = 0; i < n; i += len) {
        const std::complex<double> u = data[i + k];
        const std::complex<double> v = data[i + k + half] * w;
        data[i + k] = u + v;
        data[i + k + half] = u - v;
      }
    }
  }
}

}  // namespace rfmap
