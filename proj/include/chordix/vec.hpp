#pragma once

#include <cmath>

namespace chordix {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
constexpr Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
constexpr Vec3 operator*(Vec3 v, double s) { return s * v; }

constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

constexpr double norm2(Vec3 v) { return dot(v, v); }

inline double norm(Vec3 v) { return std::sqrt(norm2(v)); }

inline Vec3 normalized(Vec3 v) {
  const double n = norm(v);
  return {v.x / n, v.y / n, v.z / n};
}

inline double distance(Vec3 a, Vec3 b) { return norm(a - b); }

/// Deterministic orthonormal frame (e1, e2) perpendicular to unit vector d.
inline void orthonormal_frame(Vec3 d, Vec3& e1, Vec3& e2) {
  const Vec3 h = (std::fabs(d.x) < 0.577) ? Vec3{1.0, 0.0, 0.0}
               : (std::fabs(d.y) < 0.577) ? Vec3{0.0, 1.0, 0.0}
                                          : Vec3{0.0, 0.0, 1.0};
  e1 = normalized(cross(d, h));
  e2 = cross(d, e1);
}

}  // namespace chordix
