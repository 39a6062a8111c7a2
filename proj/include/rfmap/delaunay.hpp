#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "rfmap/geometry.hpp"
#include "rfmap/grid.hpp"

namespace rfmap {

// A sample site carrying a power value in dBm.
struct Site {
  double x = 0.0;
  double y = 0.0;
  double z_dbm = 0.0;

  Point point() const { return {x, y}; }
  friend bool operator==(const Site&, const Site&) = default;
};

// z = a x + b y + c over one triangle.
struct Plane {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double operator()(double x, double y) const { return a * x + b * y + c; }
};

using TriangleIndices = std::array<std::size_t, 3>;

// What interpolate_grid writes at nodes outside the convex hull.
enum class HullFill {
  kMask,         // NaN, mask = 0
  kNearestSite,  // nearest site's z, mask stays 0
};

// Delaunay triangulation of a site set with one interpolating plane per
// triangle. Immutable once built; all queries are const and thread-safe.
//
// Sites are stored in lexicographic (x, y) order after fusing exact
// duplicates (their z values are averaged in mW and converted back to dBm).
// Triangles are counter-clockwise. neighbors()[t][i] is the triangle across
// the edge opposite vertex i, or kNoNeighbor on the hull.
class Triangulation {
 public:
  static constexpr std::size_t kNoNeighbor = static_cast<std::size_t>(-1);

  std::span<const Site> sites() const { return sites_; }
  std::span<const TriangleIndices> triangles() const { return triangles_; }
  std::span<const TriangleIndices> neighbors() const { return neighbors_; }
  std::span<const Plane> planes() const { return planes_; }
  std::size_t input_count() const { return input_count_; }

  // Index of a triangle containing p (closed triangles, so hull boundary
  // points are inside), or nullopt outside the convex hull. `hint` seeds the
  // walk; any value is accepted.
  std::optional<std::size_t> locate(const Point& p, std::size_t hint = 0) const;

  // Plane value of the containing triangle, nullopt outside the hull.
  std::optional<double> interpolate(const Point& p) const;
  std::optional<double> interpolate(const Point& p, std::size_t& hint) const;

  // Grid evaluation; equal to calling interpolate() node by node.
  GridValues interpolate_grid(const GridSpec& grid, HullFill fill = HullFill::kMask) const;

  double nearest_site_z(const Point& p) const;

  nlohmann::json to_json() const;

 private:
  friend Triangulation triangulate(std::span<const Site> sites);

  std::optional<std::size_t> locate_by_scan(const Point& p) const;
  bool contains(std::size_t t, const Point& p) const;
  std::size_t canonical(std::size_t t, const Point& p) const;

  std::vector<Site> sites_;
  std::vector<TriangleIndices> triangles_;
  std::vector<TriangleIndices> neighbors_;
  std::vector<Plane> planes_;
  std::size_t input_count_ = 0;
};

// Throws DegenerateInput (carrying the distinct-site count) for fewer than
// three distinct sites or when every site is collinear.
Triangulation triangulate(std::span<const Site> sites);

// Plane through three sites; the vertices must not be collinear.
Plane plane_through(const Site& p1, const Site& p2, const Site& p3);

}  // namespace rfmap
