#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "its/mesh.hpp"

namespace its {

/// Plane ax + by + cz + d = 0 with unit normal (a,b,c).
struct Plane {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
};

inline double signed_distance(const Plane& p, Vec3 q) {
  return p.a * q.x + p.b * q.y + p.c * q.z + p.d;
}

/// Symmetric 4x4 error matrix, 10 stored coefficients. The quadratic form at
/// a homogeneous point [x y z 1] gives the summed squared distances to the
/// planes accumulated into it.
struct Quadric {
  double xx = 0, xy = 0, xz = 0, xw = 0;
  double yy = 0, yz = 0, yw = 0;
  double zz = 0, zw = 0;
  double ww = 0;

  Quadric& operator+=(const Quadric& o) {
    xx += o.xx;
    xy += o.xy;
    xz += o.xz;
    xw += o.xw;
    yy += o.yy;
    yz += o.yz;
    yw += o.yw;
    zz += o.zz;
    zw += o.zw;
    ww += o.ww;
    return *this;
  }

  friend Quadric operator+(Quadric a, const Quadric& b) {
    a += b;
    return a;
  }

  /// Full 4x4 entry, for tests and diagnostics.
  double entry(int row, int col) const {
    const double full[4][4] = {{xx, xy, xz, xw}, {xy, yy, yz, yw}, {xz, yz, zz, zw}, {xw, yw, zw, ww}};
    return full[row][col];
  }
};

inline constexpr double kDegenerateFaceArea = 1e-12;

/// Unit-normal plane through a face, oriented by corner winding.
/// Returns nullopt for degenerate (zero-area) faces, which contribute no
/// quadric.
inline std::optional<Plane> plane_of_face(const RefMesh& mesh, std::size_t f) {
  const Face& face = mesh.faces.at(f);
  const Vec3 p0 = mesh.positions[face.corners[0].position];
  const Vec3 p1 = mesh.positions[face.corners[1].position];
  const Vec3 p2 = mesh.positions[face.corners[2].position];
  const Vec3 n = cross(p1 - p0, p2 - p0);
  const double len = length(n);
  if (0.5 * len <= kDegenerateFaceArea) return std::nullopt;
  const Vec3 nn = (1.0 / len) * n;
  return Plane{nn.x, nn.y, nn.z, -dot(nn, p0)};
}

/// K_p = p p^T for plane p = [a b c d].
inline Quadric fundamental_quadric(const Plane& p) {
  Quadric q;
  q.xx = p.a * p.a;
  q.xy = p.a * p.b;
  q.xz = p.a * p.c;
  q.xw = p.a * p.d;
  q.yy = p.b * p.b;
  q.yz = p.b * p.c;
  q.yw = p.b * p.d;
  q.zz = p.c * p.c;
  q.zw = p.c * p.d;
  q.ww = p.d * p.d;
  return q;
}

/// Sum of the fundamental quadrics of the faces incident to v. Zero quadric
/// for isolated vertices.
inline Quadric vertex_quadric(const RefMesh& mesh, std::uint32_t v) {
  Quadric q;
  for (std::uint32_t f : vertex_star(mesh, v)) {
    if (const auto plane = plane_of_face(mesh, f)) q += fundamental_quadric(*plane);
  }
  return q;
}

/// v^T Q v at homogeneous [x y z 1]. Tiny negatives from rounding are clamped
/// to zero; anything below -1e-9 means the quadric was not built from planes.
inline double quadric_error(const Quadric& q, Vec3 p) {
  const double e = q.xx * p.x * p.x + q.yy * p.y * p.y + q.zz * p.z * p.z + q.ww +
                   2.0 * (q.xy * p.x * p.y + q.xz * p.x * p.z + q.yz * p.y * p.z + q.xw * p.x +
                          q.yw * p.y + q.zw * p.z);
  if (e < 0.0) {
    if (e < -1e-9) throw std::logic_error("quadric_error: corrupted quadric (negative form)");
    return 0.0;
  }
  return e;
}

/// (Q1 + Q2) evaluated at the survivor position of a collapsing pair.
inline double collapse_geometric_error(const Quadric& q1, const Quadric& q2, Vec3 survivor) {
  return quadric_error(q1 + q2, survivor);
}

}  // namespace its
