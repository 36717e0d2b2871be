#pragma once

#include <cmath>

namespace seisloc {

/// Position in the field plane, in km.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(Point a, Point b) { return std::hypot(b.x - a.x, b.y - a.y); }

}  // namespace seisloc
