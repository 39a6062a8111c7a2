#pragma once

#include "rfmap/geometry.hpp"

namespace rfmap::predicates {

// Exact-sign geometric predicates. A floating-point evaluation with a
// forward error bound decides the sign whenever it can; otherwise the
// determinant is recomputed in exact rational arithmetic.

// +1 if a, b, c turn counter-clockwise, -1 if clockwise, 0 if collinear.
int orient2d(const Point& a, const Point& b, const Point& c);

// For counter-clockwise a, b, c: +1 if d is strictly inside their
// circumcircle, -1 if strictly outside, 0 if co-circular.
int incircle(const Point& a, const Point& b, const Point& c, const Point& d);

}  // namespace rfmap::predicates
