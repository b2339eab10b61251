#pragma once

// Orientation and in-circle tests with a floating-point filter and an exact
// expansion-arithmetic fallback. Signs are exact for all finite inputs.

#include "spatraf/types.hpp"

namespace spatraf::detail {

// > 0 if a, b, c are counter-clockwise, < 0 if clockwise, 0 if collinear.
// Only the sign is meaningful.
double orient2d(Point a, Point b, Point c);

// > 0 if d lies strictly inside the circle through counter-clockwise a, b, c;
// 0 if cocircular. Only the sign is meaningful.
double incircle(Point a, Point b, Point c, Point d);

}  // namespace spatraf::detail
