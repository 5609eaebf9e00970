#pragma once

// 2D geometry primitives for the arena simulation. All intersection
// routines operate on doubles and return distances along the query
// direction; callers decide how to clamp or categorize hits.

#include <algorithm>
#include <cmath>
#include <optional>

namespace skirmish {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2& operator-=(Vec2 o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr bool operator==(const Vec2&) const = default;

  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::sqrt(x * x + y * y); }
  double norm_sq() const { return x * x + y * y; }

  bool finite() const { return std::isfinite(x) && std::isfinite(y); }

  // Returns the zero vector unchanged.
  Vec2 normalized() const {
    double n = norm();
    return n > 0.0 ? Vec2{x / n, y / n} : Vec2{};
  }

  // Counterclockwise perpendicular.
  Vec2 perp_ccw() const { return {-y, x}; }
  // Clockwise perpendicular ("right of" this direction).
  Vec2 perp_cw() const { return {y, -x}; }

  Vec2 rotated(double radians) const {
    double c = std::cos(radians), s = std::sin(radians);
    return {x * c - y * s, x * s + y * c};
  }
};

inline constexpr Vec2 operator*(double s, Vec2 v) { return {v.x * s, v.y * s}; }

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

// Signed angle from `a` to `b` in (-pi, pi].
inline double angle_between(Vec2 a, Vec2 b) { return std::atan2(a.cross(b), a.dot(b)); }

constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }

// Axis-aligned rectangle, min corner strictly below max corner.
struct Rect {
  Vec2 lo;
  Vec2 hi;

  bool contains(Vec2 p) const { return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y; }
  bool contains_strict(Vec2 p) const { return p.x > lo.x && p.x < hi.x && p.y > lo.y && p.y < hi.y; }
  Vec2 center() const { return (lo + hi) * 0.5; }
  Rect inflated(double r) const { return {{lo.x - r, lo.y - r}, {hi.x + r, hi.y + r}}; }

  // Distance from p to the rectangle boundary region (0 inside).
  double distance_to(Vec2 p) const {
    double dx = std::max({lo.x - p.x, 0.0, p.x - hi.x});
    double dy = std::max({lo.y - p.y, 0.0, p.y - hi.y});
    return std::sqrt(dx * dx + dy * dy);
  }
};

// First intersection of the ray origin + t*dir (t >= 0) with the rectangle
// boundary. A ray starting inside reports the exit point. Returns nullopt on
// a miss. `dir` need not be unit length; t is in units of |dir|.
inline std::optional<double> ray_rect_first_hit(Vec2 origin, Vec2 dir, const Rect& r) {
  double tmin = -std::numeric_limits<double>::infinity();
  double tmax = std::numeric_limits<double>::infinity();
  const double o[2] = {origin.x, origin.y};
  const double d[2] = {dir.x, dir.y};
  const double lo[2] = {r.lo.x, r.lo.y};
  const double hi[2] = {r.hi.x, r.hi.y};
  for (int i = 0; i < 2; ++i) {
    if (d[i] == 0.0) {
      if (o[i] < lo[i] || o[i] > hi[i]) return std::nullopt;
    } else {
      double t1 = (lo[i] - o[i]) / d[i];
      double t2 = (hi[i] - o[i]) / d[i];
      if (t1 > t2) std::swap(t1, t2);
      tmin = std::max(tmin, t1);
      tmax = std::min(tmax, t2);
      if (tmin > tmax) return std::nullopt;
    }
  }
  if (tmax < 0.0) return std::nullopt;
  return tmin >= 0.0 ? tmin : tmax;
}

// First intersection of the ray with a circle of radius `radius` at `center`.
// A ray starting inside reports the exit point.
inline std::optional<double> ray_circle_first_hit(Vec2 origin, Vec2 dir, Vec2 center,
                                                  double radius) {
  Vec2 oc = origin - center;
  double a = dir.norm_sq();
  if (a == 0.0) return std::nullopt;
  double b = 2.0 * oc.dot(dir);
  double c = oc.norm_sq() - radius * radius;
  double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return std::nullopt;
  double sq = std::sqrt(disc);
  double t1 = (-b - sq) / (2.0 * a);
  double t2 = (-b + sq) / (2.0 * a);
  if (t2 < 0.0) return std::nullopt;
  return t1 >= 0.0 ? t1 : t2;
}

// True iff the closed segment a-b intersects the rectangle.
inline bool segment_intersects_rect(Vec2 a, Vec2 b, const Rect& r) {
  if (r.contains(a) || r.contains(b)) return true;
  Vec2 d = b - a;
  auto t = ray_rect_first_hit(a, d, r);
  return t.has_value() && *t <= 1.0;
}

// True iff the open segment a-b passes through the rectangle interior.
// Touching the boundary (including sliding along an edge) does not count,
// so line-of-sight grazing an obstacle corner stays clear.
inline bool segment_crosses_rect_interior(Vec2 a, Vec2 b, const Rect& r) {
  double tmin = 0.0, tmax = 1.0;
  Vec2 d = b - a;
  const double o[2] = {a.x, a.y};
  const double dd[2] = {d.x, d.y};
  const double lo[2] = {r.lo.x, r.lo.y};
  const double hi[2] = {r.hi.x, r.hi.y};
  for (int i = 0; i < 2; ++i) {
    if (dd[i] == 0.0) {
      if (o[i] <= lo[i] || o[i] >= hi[i]) return false;
    } else {
      double t1 = (lo[i] - o[i]) / dd[i];
      double t2 = (hi[i] - o[i]) / dd[i];
      if (t1 > t2) std::swap(t1, t2);
      tmin = std::max(tmin, t1);
      tmax = std::min(tmax, t2);
      if (tmin >= tmax) return false;
    }
  }
  return true;
}

inline std::optional<double> segment_circle_first_hit(Vec2 a, Vec2 b, Vec2 center,
                                                      double radius) {
  auto t = ray_circle_first_hit(a, b - a, center, radius);
  if (t && *t <= 1.0) return t;
  return std::nullopt;
}

}  // namespace skirmish
