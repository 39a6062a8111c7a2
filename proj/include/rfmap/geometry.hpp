#pragma once

#include <cmath>
#include <compare>

namespace rfmap {

// Planar point in km.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
  friend auto operator<=>(const Point&, const Point&) = default;
};

inline double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Axis-aligned rectangle in km. Construct through make_region() or validate()
// before use; the operations that accept a Region check it themselves.
struct Region {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  Point centroid() const { return {0.5 * (x_min + x_max), 0.5 * (y_min + y_max)}; }

  bool contains(const Point& p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
  bool valid() const;
  void validate() const;  // throws ContractViolation
  Region dilated(double margin) const {
    return {x_min - margin, x_max + margin, y_min - margin, y_max + margin};
  }

  friend bool operator==(const Region&, const Region&) = default;
};

Region make_region(double x_min, double x_max, double y_min, double y_max);

}  // namespace rfmap
