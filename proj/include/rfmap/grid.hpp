#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rfmap/geometry.hpp"

namespace rfmap {

// Mesh of nx * ny nodes spanning a region, corners included.
struct GridSpec {
  Region region;
  std::size_t nx = 100;
  std::size_t ny = 100;

  std::size_t size() const { return nx * ny; }
  double node_x(std::size_t ix) const;
  double node_y(std::size_t iy) const;
  Point node(std::size_t ix, std::size_t iy) const { return {node_x(ix), node_y(iy)}; }
  void validate() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// Row-major values (row = y index). mask[i] != 0 marks a node that carries a
// real value; unmasked-out nodes hold the fill value.
struct GridValues {
  GridSpec spec;
  std::vector<double> values;
  std::vector<std::uint8_t> mask;

  double at(std::size_t ix, std::size_t iy) const { return values[iy * spec.nx + ix]; }
  bool valid(std::size_t ix, std::size_t iy) const { return mask[iy * spec.nx + ix] != 0; }
  std::size_t valid_count() const;
};

}  // namespace rfmap
