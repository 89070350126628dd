#pragma once

#include <cmath>

namespace brickgram {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 normalized() const {
    double n = norm();
    return n > 0.0 ? Vec3{x / n, y / n, z / n} : Vec3{};
  }
};

/// 2D wall-surface coordinates in mm: u horizontal along the wall, v vertical up.
struct Point2 {
  double u = 0.0;
  double v = 0.0;

  bool operator==(const Point2&) const = default;
};

inline double distance(const Point2& a, const Point2& b) {
  return std::hypot(a.u - b.u, a.v - b.v);
}

/// Axis-aligned rectangle fitted to one brick, sides parallel to the u/v axes.
struct BrickRect {
  int id = -1;
  Point2 center;
  double width = 0.0;   // mm, > 0
  double height = 0.0;  // mm, > 0
  int row = -1;         // assigned by group_rows, bottom-up from 0

  double left() const { return center.u - width / 2.0; }
  double right() const { return center.u + width / 2.0; }
  double bottom() const { return center.v - height / 2.0; }
  double top() const { return center.v + height / 2.0; }
  double area() const { return width * height; }

  bool operator==(const BrickRect&) const = default;
};

/// Horizontal overlap length of two rects' u-intervals (0 if disjoint).
inline double u_overlap(const BrickRect& a, const BrickRect& b) {
  return std::min(a.right(), b.right()) - std::max(a.left(), b.left());
}

inline bool interiors_overlap(const BrickRect& a, const BrickRect& b) {
  return a.left() < b.right() && b.left() < a.right() &&
         a.bottom() < b.top() && b.bottom() < a.top();
}

/// Closed axis-aligned region of the wall envelope.
struct Bounds2 {
  double u_min = 0.0;
  double v_min = 0.0;
  double u_max = 0.0;
  double v_max = 0.0;

  double width() const { return u_max - u_min; }
  double height() const { return v_max - v_min; }
  bool contains(const Point2& p) const {
    return p.u >= u_min && p.u <= u_max && p.v >= v_min && p.v <= v_max;
  }
};

}  // namespace brickgram
