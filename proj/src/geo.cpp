#include "rfmap/geo.hpp"

#include <cmath>
#include <numbers>

#include "rfmap/errors.hpp"

namespace rfmap {

LocalProjection::LocalProjection(LatLon origin, Point anchor)
    : origin_(origin), anchor_(anchor) {
  if (!(std::fabs(origin.lat) < 89.0)) {
    throw ContractViolation("projection origin latitude must be within (-89, 89)");
  }
  const double deg = std::numbers::pi / 180.0;
  km_per_deg_lat_ = kEarthRadiusKm * deg;
  km_per_deg_lon_ = kEarthRadiusKm * deg * std::cos(origin.lat * deg);
}

Point LocalProjection::to_local(const LatLon& g) const {
  return {anchor_.x + (g.lon - origin_.lon) * km_per_deg_lon_,
          anchor_.y + (g.lat - origin_.lat) * km_per_deg_lat_};
}

LatLon LocalProjection::to_geo(const Point& p) const {
  return {origin_.lat + (p.y - anchor_.y) / km_per_deg_lat_,
          origin_.lon + (p.x - anchor_.x) / km_per_deg_lon_};
}

}  // namespace rfmap
