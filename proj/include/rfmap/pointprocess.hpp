#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "rfmap/geometry.hpp"

namespace rfmap {

// One realization of a homogeneous PPP on a rectangle.
struct PointSet {
  std::vector<Point> points;
  double intensity = 0.0;  // points per km^2
  Region region;
  std::uint64_t seed = 0;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  friend bool operator==(const PointSet&, const PointSet&) = default;
};

// Draws N ~ Poisson(intensity * area), then N i.i.d. uniform points.
// The generator is seeded directly with `seed`; callers derive per-purpose
// seeds with derive_seed().
PointSet sample_ppp(const Region& region, double intensity, std::uint64_t seed);

struct CountMoments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  std::size_t trials = 0;
};

// Sample mean and variance of the PPP count over n_trials independent draws.
CountMoments count_distribution_check(const Region& region, double intensity,
                                      std::size_t n_trials, std::uint64_t seed);

nlohmann::json to_json(const PointSet& set);
PointSet point_set_from_json(const nlohmann::json& j);

}  // namespace rfmap
