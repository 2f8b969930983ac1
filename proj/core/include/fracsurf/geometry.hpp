#pragma once

#include <cmath>

namespace fracsurf {

/// Axis-aligned rectangle [a,b] x [c,d].
struct Rect {
  double a = 0.0;
  double b = 1.0;
  double c = 0.0;
  double d = 1.0;

  double width() const noexcept { return b - a; }
  double height() const noexcept { return d - c; }
  double diagonal() const noexcept { return std::hypot(width(), height()); }
  bool contains(double x, double y, double slack = 0.0) const noexcept {
    return x >= a - slack && x <= b + slack && y >= c - slack && y <= d + slack;
  }
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Point3&, const Point3&) = default;
};

inline double distance(const Point3& p, const Point3& q) noexcept {
  const double dx = p.x - q.x;
  const double dy = p.y - q.y;
  const double dz = p.z - q.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace fracsurf
