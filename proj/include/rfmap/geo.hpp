#pragma once

#include "rfmap/geometry.hpp"

namespace rfmap {

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
};

// Equirectangular projection about a reference point. The reference lat/lon
// maps to `anchor` in local km; adequate at city scale.
class LocalProjection {
 public:
  static constexpr double kEarthRadiusKm = 6371.0088;

  LocalProjection() : LocalProjection({0.0, 0.0}, {0.0, 0.0}) {}
  LocalProjection(LatLon origin, Point anchor);

  Point to_local(const LatLon& g) const;
  LatLon to_geo(const Point& p) const;

  LatLon origin() const { return origin_; }
  Point anchor() const { return anchor_; }

 private:
  LatLon origin_;
  Point anchor_;
  double km_per_deg_lat_ = 0.0;
  double km_per_deg_lon_ = 0.0;
};

}  // namespace rfmap
