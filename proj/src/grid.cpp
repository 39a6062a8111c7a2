#include "rfmap/grid.hpp"

#include <algorithm>

#include "rfmap/errors.hpp"

namespace rfmap {

namespace {
double lerp_node(double lo, double hi, std::size_t i, std::size_t n) {
  if (n == 1) return 0.5 * (lo + hi);
  if (i + 1 == n) return hi;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}
}  // namespace

double GridSpec::node_x(std::size_t ix) const {
  return lerp_node(region.x_min, region.x_max, ix, nx);
}

double GridSpec::node_y(std::size_t iy) const {
  return lerp_node(region.y_min, region.y_max, iy, ny);
}

void GridSpec::validate() const {
  region.validate();
  if (nx < 1 || ny < 1) throw ContractViolation("grid needs at least one node per axis");
}

std::size_t GridValues::valid_count() const {
  return static_cast<std::size_t>(std::count_if(mask.begin(), mask.end(),
                                                [](std::uint8_t m) { return m != 0; }));
}

}  // namespace rfmap
