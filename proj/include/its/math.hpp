#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace its {

struct Vec2 {
  double u = 0.0;
  double v = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.u + b.u, a.v + b.v}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.u - b.u, a.v - b.v}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.u, s * a.v}; }
  friend bool operator==(Vec2 a, Vec2 b) { return a.u == b.u && a.v == b.v; }
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend bool operator==(Vec3 a, Vec3 b) { return a.x == b.x && a.y == b.y && a.z == b.z; }
};

inline double dot(Vec2 a, Vec2 b) { return a.u * b.u + a.v * b.v; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double length(Vec2 a) { return std::sqrt(dot(a, a)); }
inline double length(Vec3 a) { return std::sqrt(dot(a, a)); }

inline double distance(Vec2 a, Vec2 b) { return length(a - b); }
inline double distance(Vec3 a, Vec3 b) { return length(a - b); }

inline Vec3 normalized(Vec3 a) {
  const double len = length(a);
  return len > 0.0 ? (1.0 / len) * a : a;
}

/// 4x4 real matrix, row-major. Maps homogeneous column vectors [x y z 1]^T.
struct Mat4 {
  std::array<double, 16> m{};

  static Mat4 identity() {
    Mat4 r;
    r.m = {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};
    return r;
  }

  static Mat4 translation(Vec3 t) {
    Mat4 r = identity();
    r.m[3] = t.x;
    r.m[7] = t.y;
    r.m[11] = t.z;
    return r;
  }

  static Mat4 scale(Vec3 s) {
    Mat4 r = identity();
    r.m[0] = s.x;
    r.m[5] = s.y;
    r.m[10] = s.z;
    return r;
  }

  /// Rotation about a unit axis by angle radians (Rodrigues form).
  static Mat4 rotation(Vec3 axis, double angle) {
    const Vec3 a = normalized(axis);
    const double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
    Mat4 r = identity();
    r.m[0] = t * a.x * a.x + c;
    r.m[1] = t * a.x * a.y - s * a.z;
    r.m[2] = t * a.x * a.z + s * a.y;
    r.m[4] = t * a.x * a.y + s * a.z;
    r.m[5] = t * a.y * a.y + c;
    r.m[6] = t * a.y * a.z - s * a.x;
    r.m[8] = t * a.x * a.z - s * a.y;
    r.m[9] = t * a.y * a.z + s * a.x;
    r.m[10] = t * a.z * a.z + c;
    return r;
  }

  double at(int row, int col) const { return m[static_cast<std::size_t>(row) * 4 + col]; }
  double& at(int row, int col) { return m[static_cast<std::size_t>(row) * 4 + col]; }

  friend Mat4 operator*(const Mat4& a, const Mat4& b) {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        double acc = 0.0;
        for (int k = 0; k < 4; ++k) acc += a.at(i, k) * b.at(k, j);
        r.at(i, j) = acc;
      }
    return r;
  }

  bool affine_bottom_row(double tol = 0.0) const {
    return std::abs(m[12]) <= tol && std::abs(m[13]) <= tol && std::abs(m[14]) <= tol &&
           std::abs(m[15] - 1.0) <= tol;
  }

  /// Determinant of the upper-left 3x3 block.
  double det3() const {
    return at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) -
           at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0)) +
           at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
  }
};

}  // namespace its
