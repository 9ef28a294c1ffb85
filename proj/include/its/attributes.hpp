#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "its/mesh.hpp"

namespace its {

enum class AttributeChannel { Texture, Normal, Color };

inline int channel_dim(AttributeChannel c) { return c == AttributeChannel::Texture ? 2 : 3; }

struct CloudPoint {
  std::array<double, 3> value{};  // first channel_dim entries meaningful
  double weight = 0.0;
};

/// Weighted attribute-space point set attached to a vertex. The total weight
/// X0 is the denominator of the average error A(p).
struct AttributeCloud {
  AttributeChannel channel = AttributeChannel::Texture;
  std::vector<CloudPoint> points;

  double total_weight() const {
    double w = 0.0;
    for (const CloudPoint& p : points) w += p.weight;
    return w;
  }
  bool empty() const { return points.empty(); }
};

namespace detail {

inline std::array<double, 3> to_array(Vec2 v) { return {v.u, v.v, 0.0}; }
inline std::array<double, 3> to_array(Vec3 v) { return {v.x, v.y, v.z}; }

inline double dist2(const std::array<double, 3>& a, const std::array<double, 3>& b, int dim) {
  double acc = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

}  // namespace detail

/// A(p) = sqrt(Pi(p) / X0), the weighted RMS distance of p to the cloud.
/// An empty cloud contributes nothing and evaluates to 0.
inline double cloud_error(const AttributeCloud& cloud, const std::array<double, 3>& p) {
  if (cloud.points.empty()) return 0.0;
  const int dim = channel_dim(cloud.channel);
  double weighted_sq = 0.0, total_w = 0.0;
  for (const CloudPoint& cp : cloud.points) {
    weighted_sq += cp.weight * detail::dist2(cp.value, p, dim);
    total_w += cp.weight;
  }
  return std::sqrt(weighted_sq / total_w);
}

inline double cloud_error(const AttributeCloud& cloud, Vec2 p) {
  return cloud_error(cloud, detail::to_array(p));
}
inline double cloud_error(const AttributeCloud& cloud, Vec3 p) {
  return cloud_error(cloud, detail::to_array(p));
}

/// A(p) over the union of two clouds without materializing the merge.
inline double cloud_error_merged(const AttributeCloud& a, const AttributeCloud& b,
                                 const std::array<double, 3>& p) {
  if (a.channel != b.channel) throw std::invalid_argument("cloud_error_merged: channel mismatch");
  if (a.points.empty() && b.points.empty()) return 0.0;
  const int dim = channel_dim(a.channel);
  double weighted_sq = 0.0, total_w = 0.0;
  for (const AttributeCloud* c : {&a, &b})
    for (const CloudPoint& cp : c->points) {
      weighted_sq += cp.weight * detail::dist2(cp.value, p, dim);
      total_w += cp.weight;
    }
  return std::sqrt(weighted_sq / total_w);
}

/// Point-list concatenation; X0 of the result is the sum of the inputs'.
inline AttributeCloud merge_clouds(const AttributeCloud& a, const AttributeCloud& b) {
  if (a.channel != b.channel) throw std::invalid_argument("merge_clouds: channel mismatch");
  AttributeCloud out;
  out.channel = a.channel;
  out.points.reserve(a.points.size() + b.points.size());
  out.points.insert(out.points.end(), a.points.begin(), a.points.end());
  out.points.insert(out.points.end(), b.points.begin(), b.points.end());
  return out;
}

/// One distinct attribute combination used at a vertex by some face corner.
struct Wedge {
  std::uint32_t texcoord = kNoIndex;
  std::uint32_t normal = kNoIndex;
  std::uint32_t color = kNoIndex;

  friend bool operator==(const Wedge&, const Wedge&) = default;
};

inline Wedge corner_wedge(const Corner& c) { return Wedge{c.texcoord, c.normal, c.color}; }

/// Distinct wedges at v over the given faces, in first-seen face order.
inline std::vector<Wedge> vertex_wedges(const RefMesh& mesh, std::span<const std::uint32_t> faces,
                                        std::uint32_t v) {
  std::vector<Wedge> wedges;
  for (std::uint32_t f : faces) {
    for (const Corner& c : mesh.faces[f].corners) {
      if (c.position != v) continue;
      const Wedge w = corner_wedge(c);
      if (std::find(wedges.begin(), wedges.end(), w) == wedges.end()) wedges.push_back(w);
    }
  }
  return wedges;
}

inline std::vector<Wedge> vertex_wedges(const RefMesh& mesh, std::uint32_t v) {
  const auto star = vertex_star(mesh, v);
  return vertex_wedges(mesh, std::span<const std::uint32_t>(star), v);
}

/// One cloud point per distinct wedge value at v; each point weighs
/// S(v) / (number of distinct values), so X0 = S(v) for a populated channel.
inline AttributeCloud init_cloud(const RefMesh& mesh, std::uint32_t v, AttributeChannel channel) {
  AttributeCloud cloud;
  cloud.channel = channel;
  std::vector<std::array<double, 3>> values;
  for (const Wedge& w : vertex_wedges(mesh, v)) {
    std::optional<std::array<double, 3>> val;
    switch (channel) {
      case AttributeChannel::Texture:
        if (w.texcoord != kNoIndex) val = detail::to_array(mesh.texcoords[w.texcoord]);
        break;
      case AttributeChannel::Normal:
        if (w.normal != kNoIndex) val = detail::to_array(mesh.normals[w.normal]);
        break;
      case AttributeChannel::Color:
        if (w.color != kNoIndex) val = detail::to_array(mesh.colors[w.color]);
        break;
    }
    if (val && std::find(values.begin(), values.end(), *val) == values.end())
      values.push_back(*val);
  }
  if (values.empty()) return cloud;
  const double w = vertex_surface_area(mesh, v) / static_cast<double>(values.size());
  for (const auto& val : values) cloud.points.push_back({val, w});
  return cloud;
}

struct CloudTerm {
  double weight = 0.0;  // X0 of the channel's cloud
  double error = 0.0;   // A(p) probed at the candidate attribute value
};

/// E(v) = (S*Gamma + Xn*N + Xc*C + Xt*T) / (S + Xn + Xc + Xt).
/// With every cloud empty the metric is exactly the geometric error.
/// Returns nullopt when the denominator is not positive (nothing to weigh).
inline std::optional<double> unified_error(double surface_area, double geometric_error,
                                           CloudTerm normal, CloudTerm color, CloudTerm texture) {
  if (surface_area < 0.0 || normal.weight < 0.0 || color.weight < 0.0 || texture.weight < 0.0)
    throw std::invalid_argument("unified_error: negative weight");
  const double attr_weight = normal.weight + color.weight + texture.weight;
  if (attr_weight == 0.0) {
    if (surface_area <= 0.0) return std::nullopt;
    return geometric_error;
  }
  const double denom = surface_area + attr_weight;
  if (denom <= 0.0) return std::nullopt;
  return (surface_area * geometric_error + normal.weight * normal.error +
          color.weight * color.error + texture.weight * texture.error) /
         denom;
}

struct SurfaceHit {
  std::uint32_t face = 0;
  std::array<double, 3> bary{};
  double dist2 = 0.0;
  int exact_corner = -1;  // 0..2 when the hit is exactly a corner
};

namespace detail {

/// Closest point on triangle abc to p, as barycentric coordinates.
/// Corner hits come back as exact (1,0,0)-style coordinates.
inline std::array<double, 3> closest_point_barycentric(Vec3 p, Vec3 a, Vec3 b, Vec3 c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0.0 && d2 <= 0.0) return {1.0, 0.0, 0.0};

  const Vec3 bp = p - b;
  const double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0.0 && d4 <= d3) return {0.0, 1.0, 0.0};

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return {1.0 - v, v, 0.0};
  }

  const Vec3 cp = p - c;
  const double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0.0 && d5 <= d6) return {0.0, 0.0, 1.0};

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return {1.0 - w, 0.0, w};
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return {0.0, 1.0 - w, w};
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom, w = vc * denom;
  return {1.0 - v - w, v, w};
}

}  // namespace detail

/// Closest point to p across the given faces; equal distances resolve to the
/// lowest face index so results are deterministic.
inline SurfaceHit project_to_faces(const RefMesh& mesh, std::span<const std::uint32_t> faces,
                                   Vec3 p) {
  if (faces.empty()) throw std::invalid_argument("project_to_faces: empty face set");
  SurfaceHit best;
  bool found = false;
  for (std::uint32_t f : faces) {
    const Face& face = mesh.faces[f];
    const Vec3 a = mesh.positions[face.corners[0].position];
    const Vec3 b = mesh.positions[face.corners[1].position];
    const Vec3 c = mesh.positions[face.corners[2].position];
    const auto bary = detail::closest_point_barycentric(p, a, b, c);
    const Vec3 q = bary[0] * a + bary[1] * b + bary[2] * c;
    const double d2 = dot(p - q, p - q);
    const bool better = !found || d2 < best.dist2 || (d2 == best.dist2 && f < best.face);
    if (better) {
      best.face = f;
      best.bary = bary;
      best.dist2 = d2;
      best.exact_corner = -1;
      for (int i = 0; i < 3; ++i)
        if (bary[i] == 1.0) best.exact_corner = i;
      found = true;
    }
  }
  return best;
}

struct WedgeValues {
  std::optional<Vec2> texcoord;
  std::optional<Vec3> normal;
  std::optional<Vec3> color;
};

/// Barycentric attribute interpolation on one face. Normals are renormalized
/// after blending.
inline WedgeValues interpolate_on_face(const RefMesh& mesh, std::uint32_t f,
                                       const std::array<double, 3>& bary) {
  const Face& face = mesh.faces[f];
  WedgeValues out;
  const Corner& c0 = face.corners[0];
  const Corner& c1 = face.corners[1];
  const Corner& c2 = face.corners[2];
  if (c0.texcoord != kNoIndex && c1.texcoord != kNoIndex && c2.texcoord != kNoIndex) {
    out.texcoord = bary[0] * mesh.texcoords[c0.texcoord] + bary[1] * mesh.texcoords[c1.texcoord] +
                   bary[2] * mesh.texcoords[c2.texcoord];
  }
  if (c0.normal != kNoIndex && c1.normal != kNoIndex && c2.normal != kNoIndex) {
    out.normal = normalized(bary[0] * mesh.normals[c0.normal] + bary[1] * mesh.normals[c1.normal] +
                            bary[2] * mesh.normals[c2.normal]);
  }
  if (c0.color != kNoIndex && c1.color != kNoIndex && c2.color != kNoIndex) {
    out.color = bary[0] * mesh.colors[c0.color] + bary[1] * mesh.colors[c1.color] +
                bary[2] * mesh.colors[c2.color];
  }
  return out;
}

/// Planned attribute state for one wedge of the merged vertex. A slot with a
/// reuse index points at an existing attribute entry; otherwise the value is
/// new and needs to be appended to the attribute list on collapse.
struct WedgeMergeEntry {
  std::optional<Wedge> survivor_wedge;
  std::optional<Wedge> victim_wedge;

  template <typename V>
  struct Slot {
    bool present = false;
    V value{};
    std::uint32_t reuse_index = kNoIndex;
  };
  Slot<Vec2> texcoord;
  Slot<Vec3> normal;
  Slot<Vec3> color;
};

using WedgePlan = std::vector<WedgeMergeEntry>;

namespace detail {

inline double wedge_distance2(const RefMesh& mesh, const Wedge& a, const Wedge& b) {
  // Channels present on only one side get a large penalty so like matches
  // like whenever possible.
  constexpr double kPresenceMismatch = 1e30;
  double acc = 0.0;
  if (a.texcoord != kNoIndex && b.texcoord != kNoIndex) {
    const Vec2 d = mesh.texcoords[a.texcoord] - mesh.texcoords[b.texcoord];
    acc += dot(d, d);
  } else if (a.texcoord != b.texcoord) {
    acc += kPresenceMismatch;
  }
  if (a.normal != kNoIndex && b.normal != kNoIndex) {
    const Vec3 d = mesh.normals[a.normal] - mesh.normals[b.normal];
    acc += dot(d, d);
  } else if ((a.normal == kNoIndex) != (b.normal == kNoIndex)) {
    acc += kPresenceMismatch;
  }
  if (a.color != kNoIndex && b.color != kNoIndex) {
    const Vec3 d = mesh.colors[a.color] - mesh.colors[b.color];
    acc += dot(d, d);
  } else if ((a.color == kNoIndex) != (b.color == kNoIndex)) {
    acc += kPresenceMismatch;
  }
  return acc;
}

inline void fill_slots_from_wedge(const RefMesh& mesh, const Wedge& w, WedgeMergeEntry& entry) {
  if (w.texcoord != kNoIndex)
    entry.texcoord = {true, mesh.texcoords[w.texcoord], w.texcoord};
  if (w.normal != kNoIndex) entry.normal = {true, mesh.normals[w.normal], w.normal};
  if (w.color != kNoIndex) entry.color = {true, mesh.colors[w.color], w.color};
}

}  // namespace detail

/// Merged-vertex attribute interpolation: the survivor position is projected
/// onto the local geometry of the pair (the given incident faces, as they
/// stand before the merge) and attributes are interpolated at the hit. With
/// attribute discontinuities the projection runs once per matched wedge pair,
/// restricted to the faces that actually use those wedges; unmatched wedges
/// survive unchanged.
inline WedgePlan interpolate_attributes(const RefMesh& mesh,
                                        std::span<const std::uint32_t> faces_v1,
                                        std::span<const std::uint32_t> faces_v2,
                                        std::uint32_t survivor, std::uint32_t victim,
                                        Vec3 survivor_pos) {
  const auto survivor_faces = faces_v1;  // caller passes survivor faces first
  const std::vector<Wedge> sw = vertex_wedges(mesh, faces_v1, survivor);
  const std::vector<Wedge> vw = vertex_wedges(mesh, faces_v2, victim);

  struct MatchCandidate {
    double dist2;
    std::size_t si, vi;
  };
  std::vector<MatchCandidate> order;
  order.reserve(sw.size() * vw.size());
  for (std::size_t i = 0; i < sw.size(); ++i)
    for (std::size_t j = 0; j < vw.size(); ++j)
      order.push_back({detail::wedge_distance2(mesh, sw[i], vw[j]), i, j});
  std::sort(order.begin(), order.end(), [](const MatchCandidate& a, const MatchCandidate& b) {
    if (a.dist2 != b.dist2) return a.dist2 < b.dist2;
    if (a.si != b.si) return a.si < b.si;
    return a.vi < b.vi;
  });

  std::vector<bool> s_used(sw.size(), false), v_used(vw.size(), false);
  WedgePlan plan;

  for (const MatchCandidate& mc : order) {
    if (s_used[mc.si] || v_used[mc.vi]) continue;
    s_used[mc.si] = true;
    v_used[mc.vi] = true;
    const Wedge& ws = sw[mc.si];
    const Wedge& wv = vw[mc.vi];

    // Faces that carry either wedge of the pair at the relevant corner.
    std::vector<std::uint32_t> restricted;
    for (std::uint32_t f : survivor_faces)
      for (const Corner& c : mesh.faces[f].corners)
        if (c.position == survivor && corner_wedge(c) == ws) {
          restricted.push_back(f);
          break;
        }
    for (std::uint32_t f : faces_v2)
      for (const Corner& c : mesh.faces[f].corners)
        if (c.position == victim && corner_wedge(c) == wv) {
          if (std::find(restricted.begin(), restricted.end(), f) == restricted.end())
            restricted.push_back(f);
          break;
        }
    std::sort(restricted.begin(), restricted.end());

    WedgeMergeEntry entry;
    entry.survivor_wedge = ws;
    entry.victim_wedge = wv;

    if (restricted.empty()) {
      detail::fill_slots_from_wedge(mesh, ws, entry);
      plan.push_back(entry);
      continue;
    }

    const SurfaceHit hit = project_to_faces(mesh, restricted, survivor_pos);
    const Face& hit_face = mesh.faces[hit.face];
    const Corner* hit_corner =
        hit.exact_corner >= 0 ? &hit_face.corners[hit.exact_corner] : nullptr;
    const WedgeValues vals = interpolate_on_face(mesh, hit.face, hit.bary);

    const auto take = [&](auto& slot, std::uint32_t idx_s, std::uint32_t idx_v,
                          const auto& interpolated, const auto& list, std::uint32_t hit_idx) {
      const bool in_s = idx_s != kNoIndex;
      const bool in_v = idx_v != kNoIndex;
      if (in_s && in_v && interpolated.has_value()) {
        slot.present = true;
        if (hit_corner && hit_idx != kNoIndex) {
          slot.value = list[hit_idx];  // corner-exact hit: reuse the entry as-is
          slot.reuse_index = hit_idx;
        } else {
          slot.value = *interpolated;
        }
      } else if (in_s) {
        slot.present = true;
        slot.value = list[idx_s];
        slot.reuse_index = idx_s;
      } else if (in_v) {
        slot.present = true;
        slot.value = list[idx_v];
        slot.reuse_index = idx_v;
      }
    };
    take(entry.texcoord, ws.texcoord, wv.texcoord, vals.texcoord, mesh.texcoords,
         hit_corner ? hit_corner->texcoord : kNoIndex);
    take(entry.normal, ws.normal, wv.normal, vals.normal, mesh.normals,
         hit_corner ? hit_corner->normal : kNoIndex);
    take(entry.color, ws.color, wv.color, vals.color, mesh.colors,
         hit_corner ? hit_corner->color : kNoIndex);
    plan.push_back(entry);
  }

  for (std::size_t i = 0; i < sw.size(); ++i) {
    if (s_used[i]) continue;
    WedgeMergeEntry entry;
    entry.survivor_wedge = sw[i];
    detail::fill_slots_from_wedge(mesh, sw[i], entry);
    plan.push_back(entry);
  }
  for (std::size_t j = 0; j < vw.size(); ++j) {
    if (v_used[j]) continue;
    WedgeMergeEntry entry;
    entry.victim_wedge = vw[j];
    detail::fill_slots_from_wedge(mesh, vw[j], entry);
    plan.push_back(entry);
  }
  return plan;
}

/// Convenience overload over the full mesh (local geometry from vertex_star).
inline WedgePlan interpolate_attributes(const RefMesh& mesh, std::uint32_t v1, std::uint32_t v2,
                                        std::uint32_t survivor, Vec3 survivor_pos) {
  const std::uint32_t victim = survivor == v1 ? v2 : v1;
  const auto sf = vertex_star(mesh, survivor);
  const auto vf = vertex_star(mesh, victim);
  return interpolate_attributes(mesh, std::span<const std::uint32_t>(sf),
                                std::span<const std::uint32_t>(vf), survivor, victim, survivor_pos);
}

}  // namespace its
