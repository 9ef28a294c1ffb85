#pragma once

#include <stdexcept>
#include <vector>

#include "its/mesh.hpp"

namespace its {

inline constexpr double kSingularDeterminant = 1e-12;

/// m . [x y z 1]^T for an affine m.
inline Vec3 transform_point(const Mat4& m, Vec3 p) {
  return {m.at(0, 0) * p.x + m.at(0, 1) * p.y + m.at(0, 2) * p.z + m.at(0, 3),
          m.at(1, 0) * p.x + m.at(1, 1) * p.y + m.at(1, 2) * p.z + m.at(1, 3),
          m.at(2, 0) * p.x + m.at(2, 1) * p.y + m.at(2, 2) * p.z + m.at(2, 3)};
}

/// normalize((M3x3^-1)^T . n). The inverse-transpose is the cofactor matrix
/// over the determinant, which keeps normals perpendicular under non-uniform
/// scale. Throws on a singular upper-left block.
inline Vec3 transform_normal(const Mat4& m, Vec3 n) {
  const double det = m.det3();
  if (std::abs(det) <= kSingularDeterminant)
    throw std::invalid_argument("transform_normal: singular upper-left 3x3 block");
  // Cofactor matrix of the upper-left 3x3.
  const double c00 = m.at(1, 1) * m.at(2, 2) - m.at(1, 2) * m.at(2, 1);
  const double c01 = m.at(1, 2) * m.at(2, 0) - m.at(1, 0) * m.at(2, 2);
  const double c02 = m.at(1, 0) * m.at(2, 1) - m.at(1, 1) * m.at(2, 0);
  const double c10 = m.at(0, 2) * m.at(2, 1) - m.at(0, 1) * m.at(2, 2);
  const double c11 = m.at(0, 0) * m.at(2, 2) - m.at(0, 2) * m.at(2, 0);
  const double c12 = m.at(0, 1) * m.at(2, 0) - m.at(0, 0) * m.at(2, 1);
  const double c20 = m.at(0, 1) * m.at(1, 2) - m.at(0, 2) * m.at(1, 1);
  const double c21 = m.at(0, 2) * m.at(1, 0) - m.at(0, 0) * m.at(1, 2);
  const double c22 = m.at(0, 0) * m.at(1, 1) - m.at(0, 1) * m.at(1, 0);
  const double inv_det = 1.0 / det;
  const Vec3 t{inv_det * (c00 * n.x + c01 * n.y + c02 * n.z),
               inv_det * (c10 * n.x + c11 * n.y + c12 * n.z),
               inv_det * (c20 * n.x + c21 * n.y + c22 * n.z)};
  return normalized(t);
}

/// One instance of the reference mesh realized in world space. Texcoords are
/// shared with the reference; faces are the reference faces with per-instance
/// index offsets applied by consumers.
struct ExpandedInstance {
  std::vector<Vec3> positions;
  std::vector<Vec3> normals;
};

/// Applies each instance transform to the reference mesh, in instance order.
inline std::vector<ExpandedInstance> expand_scene(const Scene& scene) {
  std::vector<ExpandedInstance> out;
  out.reserve(scene.instances.size());
  for (const Instance& inst : scene.instances) {
    ExpandedInstance e;
    e.positions.reserve(scene.mesh.positions.size());
    for (const Vec3& p : scene.mesh.positions) e.positions.push_back(transform_point(inst.transform, p));
    e.normals.reserve(scene.mesh.normals.size());
    for (const Vec3& n : scene.mesh.normals) e.normals.push_back(transform_normal(inst.transform, n));
    out.push_back(std::move(e));
  }
  return out;
}

/// Bakes every instance into one indexed mesh under a single identity
/// instance: positions and normals are duplicated per instance and
/// transformed, texcoords stay shared, faces are re-indexed.
inline Scene flatten_scene(const Scene& scene) {
  const auto expanded = expand_scene(scene);
  Scene flat;
  flat.material_lib = scene.material_lib;
  flat.object_name = scene.object_name;
  flat.instances.push_back(Instance{Mat4::identity()});
  RefMesh& mesh = flat.mesh;
  mesh.texcoords = scene.mesh.texcoords;

  const std::size_t v_count = scene.mesh.positions.size();
  const std::size_t n_count = scene.mesh.normals.size();
  const std::size_t c_count = scene.mesh.colors.size();
  for (std::size_t i = 0; i < expanded.size(); ++i) {
    const ExpandedInstance& e = expanded[i];
    mesh.positions.insert(mesh.positions.end(), e.positions.begin(), e.positions.end());
    mesh.normals.insert(mesh.normals.end(), e.normals.begin(), e.normals.end());
    mesh.colors.insert(mesh.colors.end(), scene.mesh.colors.begin(), scene.mesh.colors.end());
    const std::uint32_t v_off = static_cast<std::uint32_t>(i * v_count);
    const std::uint32_t n_off = static_cast<std::uint32_t>(i * n_count);
    const std::uint32_t c_off = static_cast<std::uint32_t>(i * c_count);
    for (const Face& f : scene.mesh.faces) {
      Face g = f;
      for (Corner& c : g.corners) {
        c.position += v_off;
        if (c.normal != kNoIndex) c.normal += n_off;
        if (c.color != kNoIndex) c.color += c_off;
      }
      mesh.faces.push_back(g);
    }
  }
  return flat;
}

}  // namespace its
