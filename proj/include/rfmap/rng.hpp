#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace rfmap {

// Reproducible random streams.
//
// Every stream is a std::mt19937_64 (its output sequence is fixed by the
// standard) seeded from a master seed, a label and an index:
//
//   seed = splitmix64(splitmix64(master ^ fnv1a64(label)) + index)
//
// Labels used across the toolkit: "sources", "sensors", "shadowing",
// "mc-trials", "mc-radii", "mc-points". Variates are generated here rather than with
// std:: distributions, whose output differs between standard libraries.
std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t fnv1a64(std::string_view s) noexcept;
std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                          std::uint64_t index = 0) noexcept;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t master, std::string_view label, std::uint64_t index = 0)
      : engine_(derive_seed(master, label, index)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via the Marsaglia polar method; the spare is cached.
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Exact Poisson variate: inversion below mean 10, PTRS above.
  std::uint64_t poisson(double mean);

 private:
  std::uint64_t poisson_inversion(double mean);
  std::uint64_t poisson_ptrs(double mean);

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rfmap
