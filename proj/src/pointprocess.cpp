#include "rfmap/pointprocess.hpp"

#include <string>

#include "rfmap/errors.hpp"
#include "rfmap/rng.hpp"

namespace rfmap {

bool Region::valid() const {
  return std::isfinite(x_min) && std::isfinite(x_max) && std::isfinite(y_min) &&
         std::isfinite(y_max) && x_max > x_min && y_max > y_min;
}

void Region::validate() const {
  if (!valid()) {
    throw ContractViolation("invalid region [" + std::to_string(x_min) + ", " +
                            std::to_string(x_max) + "] x [" + std::to_string(y_min) +
                            ", " + std::to_string(y_max) + "]");
  }
}

Region make_region(double x_min, double x_max, double y_min, double y_max) {
  Region r{x_min, x_max, y_min, y_max};
  r.validate();
  return r;
}

PointSet sample_ppp(const Region& region, double intensity, std::uint64_t seed) {
  region.validate();
  if (!(intensity >= 0.0) || !std::isfinite(intensity)) {
    throw ContractViolation("intensity must be finite and >= 0");
  }
  PointSet out;
  out.intensity = intensity;
  out.region = region;
  out.seed = seed;

  Rng rng(seed);
  const std::uint64_t n = rng.poisson(intensity * region.area());
  out.points.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const double x = rng.uniform(region.x_min, region.x_max);
    const double y = rng.uniform(region.y_min, region.y_max);
    out.points.push_back({x, y});
  }
  return out;
}

CountMoments count_distribution_check(const Region& region, double intensity,
                                      std::size_t n_trials, std::uint64_t seed) {
  if (n_trials < 1) throw ContractViolation("n_trials must be >= 1");
  region.validate();
  // Trial t sees the same count as sample_ppp(region, intensity,
  // derive_seed(seed, "count-check", t)) without drawing coordinates.
  double mean = 0.0, m2 = 0.0;
  for (std::size_t t = 0; t < n_trials; ++t) {
    Rng rng(derive_seed(seed, "count-check", t));
    const double n = static_cast<double>(rng.poisson(intensity * region.area()));
    const double delta = n - mean;
    mean += delta / static_cast<double>(t + 1);
    m2 += delta * (n - mean);
  }
  CountMoments m;
  m.trials = n_trials;
  m.mean = mean;
  m.variance = n_trials > 1 ? m2 / static_cast<double>(n_trials - 1) : 0.0;
  return m;
}

nlohmann::json to_json(const PointSet& set) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : set.points) pts.push_back({p.x, p.y});
  return {{"seed", set.seed},
          {"intensity", set.intensity},
          {"region",
           {set.region.x_min, set.region.x_max, set.region.y_min, set.region.y_max}},
          {"points", std::move(pts)}};
}

PointSet point_set_from_json(const nlohmann::json& j) {
  PointSet s;
  s.seed = j.at("seed").get<std::uint64_t>();
  s.intensity = j.at("intensity").get<double>();
  const auto& r = j.at("region");
  s.region = make_region(r.at(0).get<double>(), r.at(1).get<double>(),
                         r.at(2).get<double>(), r.at(3).get<double>());
  for (const auto& p : j.at("points")) {
    s.points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  }
  return s;
}

}  // namespace rfmap
