#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "its/math.hpp"

namespace its {

/// Sentinel for an absent attribute index on a face corner.
inline constexpr std::uint32_t kNoIndex = std::numeric_limits<std::uint32_t>::max();

/// One face corner: a position index plus optional attribute indices
/// (OBJ-style v/vt/vn triplet, extended with a color slot).
struct Corner {
  std::uint32_t position = 0;
  std::uint32_t texcoord = kNoIndex;
  std::uint32_t normal = kNoIndex;
  std::uint32_t color = kNoIndex;
};

struct Face {
  std::array<Corner, 3> corners;
};

/// Reference triangle mesh with corner-indexed attributes. Attribute
/// discontinuities (UV seams, creases) are representable because each corner
/// carries its own attribute indices.
struct RefMesh {
  std::vector<Vec3> positions;
  std::vector<Vec2> texcoords;
  std::vector<Vec3> normals;
  std::vector<Vec3> colors;  // optional channel, parallel to positions when present
  std::vector<Face> faces;

  bool has_texcoords() const { return !texcoords.empty(); }
  bool has_normals() const { return !normals.empty(); }
  bool has_colors() const { return !colors.empty(); }
};

/// A placement of the reference mesh: a 4x4 affine transform.
struct Instance {
  Mat4 transform = Mat4::identity();
};

/// One reference mesh plus every placement of it in the scene.
struct Scene {
  RefMesh mesh;
  std::vector<Instance> instances;
  std::string material_lib;  // empty when absent
  std::string object_name;   // empty when absent
};

struct ValidationIssue {
  enum class Kind { IndexOutOfRange, DegenerateFace, MixedAttributes };
  Kind kind;
  std::size_t face = 0;
  int corner = -1;  // -1 when the issue is face-wide
  std::string message;
};

inline std::vector<ValidationIssue> validate_mesh(const RefMesh& mesh) {
  std::vector<ValidationIssue> issues;
  const auto out_of_range = [&](std::size_t f, int c, const char* list) {
    issues.push_back({ValidationIssue::Kind::IndexOutOfRange, f, c,
                      std::string(list) + " index out of range at face " + std::to_string(f) +
                          " corner " + std::to_string(c)});
  };
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Face& face = mesh.faces[f];
    int with_tex = 0, with_nrm = 0;
    for (int c = 0; c < 3; ++c) {
      const Corner& corner = face.corners[c];
      if (corner.position >= mesh.positions.size()) out_of_range(f, c, "position");
      if (corner.texcoord != kNoIndex) {
        ++with_tex;
        if (corner.texcoord >= mesh.texcoords.size()) out_of_range(f, c, "texcoord");
      }
      if (corner.normal != kNoIndex) {
        ++with_nrm;
        if (corner.normal >= mesh.normals.size()) out_of_range(f, c, "normal");
      }
      if (corner.color != kNoIndex && corner.color >= mesh.colors.size())
        out_of_range(f, c, "color");
    }
    if ((with_tex != 0 && with_tex != 3) || (with_nrm != 0 && with_nrm != 3)) {
      issues.push_back({ValidationIssue::Kind::MixedAttributes, f, -1,
                        "face " + std::to_string(f) + " mixes corners with and without attributes"});
    }
    const std::uint32_t a = face.corners[0].position;
    const std::uint32_t b = face.corners[1].position;
    const std::uint32_t c = face.corners[2].position;
    if (a == b || b == c || a == c) {
      issues.push_back({ValidationIssue::Kind::DegenerateFace, f, -1,
                        "face " + std::to_string(f) + " repeats a position index"});
    }
  }
  return issues;
}

/// Faces incident to position index v, ascending.
inline std::vector<std::uint32_t> vertex_star(const RefMesh& mesh, std::uint32_t v) {
  if (v >= mesh.positions.size()) throw std::out_of_range("vertex_star: vertex index out of range");
  std::vector<std::uint32_t> star;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Face& face = mesh.faces[f];
    if (face.corners[0].position == v || face.corners[1].position == v ||
        face.corners[2].position == v)
      star.push_back(static_cast<std::uint32_t>(f));
  }
  return star;
}

inline double face_area(const RefMesh& mesh, std::size_t f) {
  const Face& face = mesh.faces.at(f);
  const Vec3 p0 = mesh.positions[face.corners[0].position];
  const Vec3 p1 = mesh.positions[face.corners[1].position];
  const Vec3 p2 = mesh.positions[face.corners[2].position];
  return 0.5 * length(cross(p1 - p0, p2 - p0));
}

/// Total area of the faces incident to v; zero for isolated vertices.
inline double vertex_surface_area(const RefMesh& mesh, std::uint32_t v) {
  double area = 0.0;
  for (std::uint32_t f : vertex_star(mesh, v)) area += face_area(mesh, f);
  return area;
}

inline double bounding_box_diagonal(const RefMesh& mesh) {
  if (mesh.positions.empty())
    throw std::invalid_argument("bounding_box_diagonal: mesh has no positions");
  Vec3 lo = mesh.positions.front(), hi = lo;
  for (const Vec3& p : mesh.positions) {
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    lo.z = std::min(lo.z, p.z);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
    hi.z = std::max(hi.z, p.z);
  }
  return length(hi - lo);
}

}  // namespace its
