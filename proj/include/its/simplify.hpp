#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "its/attributes.hpp"
#include "its/mesh.hpp"
#include "its/pairs.hpp"
#include "its/quadric.hpp"

namespace its {

enum class SimplifyMode { ITS, QuadricOnly };

struct SimplifyParams {
  double reduce_percent = 0.0;           // fraction of faces (or vertices) to remove
  std::optional<double> max_unified_error;    // stop once the best collapse exceeds this
  std::optional<double> max_geometric_error;  // gate: candidates above this are never collapsed
  SimplifyMode mode = SimplifyMode::ITS;
  bool proximity_pairs = false;
  double initial_threshold_fraction = 0.01;  // of the bounding box diagonal
  std::optional<double> fixed_threshold;     // bypasses threshold adaptation entirely
  bool target_vertices = false;              // reduce vertex count instead of face count
};

enum class StopReason { TargetReached, ErrorCapHit, NoCandidates };

struct SimplifyReport {
  std::size_t collapses = 0;
  std::size_t initial_vertices = 0, initial_texcoords = 0, initial_normals = 0,
              initial_faces = 0;
  std::size_t final_vertices = 0, final_texcoords = 0, final_normals = 0, final_faces = 0;
  double elapsed_ms = 0.0;
  StopReason stop_reason = StopReason::TargetReached;
};

struct StalePairError : std::logic_error {
  using std::logic_error::logic_error;
};

/// ceil(count * (100 - percent) / 100), robust at integer boundaries.
inline std::size_t reduction_target(std::size_t count, double percent) {
  const double keep = static_cast<double>(count) * (100.0 - percent) / 100.0;
  const double c = std::ceil(keep - 1e-9);
  return c <= 0.0 ? 0 : static_cast<std::size_t>(c);
}

/// Mutable simplification state over one reference mesh: live flags, per-vertex
/// quadrics and attribute clouds, incidence lists, and the live edge set.
/// Victim vertices are only marked dead; compact() produces the final mesh.
class Simplifier {
 public:
  explicit Simplifier(const RefMesh& mesh) : work_(mesh) {
    const std::size_t nv = work_.positions.size();
    const std::size_t nf = work_.faces.size();
    vertex_live_.assign(nv, true);
    face_live_.assign(nf, true);
    live_vertices_ = nv;
    live_faces_ = nf;

    face_areas_.resize(nf);
    incident_.resize(nv);
    quadrics_.assign(nv, Quadric{});
    std::vector<double> vertex_area(nv, 0.0);
    for (std::size_t f = 0; f < nf; ++f) {
      face_areas_[f] = face_area(work_, f);
      const auto plane = plane_of_face(work_, f);
      const Quadric k = plane ? fundamental_quadric(*plane) : Quadric{};
      for (const Corner& c : work_.faces[f].corners) {
        incident_[c.position].push_back(static_cast<std::uint32_t>(f));
        if (plane) quadrics_[c.position] += k;
        vertex_area[c.position] += face_areas_[f];
      }
      for (int i = 0; i < 3; ++i)
        add_edge_ref(work_.faces[f].corners[i].position,
                     work_.faces[f].corners[(i + 1) % 3].position);
    }

    init_clouds(vertex_area);
  }

  std::size_t live_vertex_count() const { return live_vertices_; }
  std::size_t live_face_count() const { return live_faces_; }
  bool vertex_live(std::uint32_t v) const { return vertex_live_[v]; }
  bool face_live(std::uint32_t f) const { return face_live_[f]; }
  const RefMesh& working_mesh() const { return work_; }
  const Quadric& vertex_quadric_state(std::uint32_t v) const { return quadrics_[v]; }
  const AttributeCloud& cloud(std::uint32_t v, AttributeChannel ch) const {
    return clouds(ch)[v];
  }

  /// Area of the live faces incident to v.
  double live_surface_area(std::uint32_t v) const {
    double area = 0.0;
    for (std::uint32_t f : incident_[v])
      if (face_live_[f]) area += face_areas_[f];
    return area;
  }

  /// One round of valid-pair discovery with threshold adaptation. Lands the
  /// count in [1, kPairWindowMax] when it can; after kMaxAdaptations
  /// halvings/doublings the current set is accepted as-is (falling back to
  /// the last non-empty set seen), which guarantees progress on meshes where
  /// the window is unreachable. Empty result means no pairs exist at any
  /// threshold.
  std::vector<CandidatePair> discover_candidates(ThresholdState& ts,
                                                 const SimplifyParams& params) {
    ts.adaptations = 0;
    if (live_vertices_ < 2) return {};
    if (params.fixed_threshold) {
      ts.t = *params.fixed_threshold;
      return collect_candidates(ts.t, params.proximity_pairs);
    }
    std::optional<double> last_nonempty_t;
    for (;;) {
      std::size_t count;
      std::vector<CandidatePair> collected;
      if (params.proximity_pairs) {
        collected = collect_candidates(ts.t, true);
        count = collected.size();
      } else {
        count = count_edges_under(ts.t, kPairWindowMax + 1);
      }
      if (count >= 1 && count <= kPairWindowMax) {
        if (params.proximity_pairs) return collected;
        return collect_candidates(ts.t, false);
      }
      if (ts.adaptations >= kMaxAdaptations) {
        if (count > 0) return params.proximity_pairs ? collected : collect_candidates(ts.t, false);
        if (last_nonempty_t) return collect_candidates(*last_nonempty_t, params.proximity_pairs);
        return {};
      }
      if (count > kPairWindowMax) last_nonempty_t = ts.t;
      adapt_threshold(ts, count);
    }
  }

  struct Evaluation {
    std::vector<CandidatePair> valid;  // errors filled
    std::size_t gated = 0;             // dropped by the geometric-error gate
    std::size_t invalid = 0;           // nothing to weigh (isolated pairs)
  };

  Evaluation evaluate_candidates(const std::vector<CandidatePair>& candidates,
                                 const SimplifyParams& params) const {
    Evaluation out;
    out.valid.reserve(candidates.size());
    for (CandidatePair c : candidates) {
      const Quadric q = quadrics_[c.v1] + quadrics_[c.v2];
      const double e1 = quadric_error(q, work_.positions[c.v1]);
      const double e2 = quadric_error(q, work_.positions[c.v2]);
      c.survivor = e2 < e1 ? c.v2 : c.v1;
      c.geometric_error = std::min(e1, e2);
      if (params.max_geometric_error && c.geometric_error > *params.max_geometric_error) {
        ++out.gated;
        continue;
      }

      const std::uint32_t victim = c.survivor == c.v1 ? c.v2 : c.v1;
      const double surface = live_surface_area(c.v1) + live_surface_area(c.v2) -
                             shared_live_area(c.v1, c.v2);

      CloudTerm nterm{}, cterm{}, tterm{};
      if (params.mode == SimplifyMode::ITS) {
        const auto sf = live_incident_sorted(c.survivor);
        const auto vf = live_incident_sorted(victim);
        const WedgePlan plan =
            interpolate_attributes(work_, sf, vf, c.survivor, victim,
                                   work_.positions[c.survivor]);
        tterm = channel_term(c.v1, c.v2, AttributeChannel::Texture, plan);
        nterm = channel_term(c.v1, c.v2, AttributeChannel::Normal, plan);
        cterm = channel_term(c.v1, c.v2, AttributeChannel::Color, plan);
      }
      c.normal_error = nterm.error;
      c.color_error = cterm.error;
      c.texture_error = tterm.error;

      const auto unified = unified_error(surface, c.geometric_error, nterm, cterm, tterm);
      if (!unified) {
        ++out.invalid;
        continue;
      }
      c.unified_error = *unified;
      out.valid.push_back(c);
    }
    return out;
  }

  /// Contracts the pair into its survivor: faces of the victim are re-pointed,
  /// faces containing both endpoints die, quadrics and clouds accumulate, and
  /// the survivor's wedge attributes follow the interpolation plan.
  void collapse(const CandidatePair& pair) {
    if (!vertex_live_[pair.v1] || !vertex_live_[pair.v2])
      throw StalePairError("collapse: pair references a dead vertex");
    const std::uint32_t s = pair.survivor;
    const std::uint32_t w = s == pair.v1 ? pair.v2 : pair.v1;
    if (s != pair.v1 && s != pair.v2)
      throw StalePairError("collapse: survivor is not an endpoint");

    const auto sf = live_incident_sorted(s);
    const auto vf = live_incident_sorted(w);
    const WedgePlan plan =
        interpolate_attributes(work_, sf, vf, s, w, work_.positions[s]);

    // Resolve planned slots to attribute indices, appending fresh entries for
    // truly interpolated values. Colors stay parallel to positions: the merged
    // value lands in the survivor's slot.
    struct ResolvedEntry {
      std::optional<Wedge> survivor_wedge, victim_wedge;
      Wedge result;
    };
    std::vector<ResolvedEntry> resolved;
    resolved.reserve(plan.size());
    for (const WedgeMergeEntry& e : plan) {
      ResolvedEntry r;
      r.survivor_wedge = e.survivor_wedge;
      r.victim_wedge = e.victim_wedge;
      if (e.texcoord.present) {
        r.result.texcoord = e.texcoord.reuse_index != kNoIndex
                                ? e.texcoord.reuse_index
                                : append_texcoord(e.texcoord.value);
      }
      if (e.normal.present) {
        r.result.normal = e.normal.reuse_index != kNoIndex ? e.normal.reuse_index
                                                           : append_normal(e.normal.value);
      }
      if (e.color.present) {
        work_.colors[s] = e.color.value;
        r.result.color = s;
      }
      resolved.push_back(r);
    }
    const auto result_for = [&](const Wedge& wedge, bool victim_side) -> const Wedge* {
      for (const ResolvedEntry& r : resolved) {
        const auto& src = victim_side ? r.victim_wedge : r.survivor_wedge;
        if (src && *src == wedge) return &r.result;
      }
      return nullptr;
    };

    // Victim faces: kill the ones containing the survivor, re-point the rest.
    for (std::uint32_t f : vf) {
      Face& face = work_.faces[f];
      const bool shared = face.corners[0].position == s || face.corners[1].position == s ||
                          face.corners[2].position == s;
      if (shared) {
        kill_face(f);
        continue;
      }
      for (Corner& c : face.corners) {
        if (c.position != w) continue;
        const Wedge* res = result_for(corner_wedge(c), true);
        release_edge_refs_of(f, w);
        c.position = s;
        if (res) {
          c.texcoord = res->texcoord;
          c.normal = res->normal;
          c.color = res->color;
        } else if (!work_.colors.empty()) {
          c.color = s;
        }
        add_edge_refs_of(f, s);
        break;
      }
      incident_[s].push_back(f);
    }

    // Survivor faces: apply merged wedge indices.
    for (std::uint32_t f : sf) {
      if (!face_live_[f]) continue;  // shared face killed above
      for (Corner& c : work_.faces[f].corners) {
        if (c.position != s) continue;
        if (const Wedge* res = result_for(corner_wedge(c), false)) {
          c.texcoord = res->texcoord;
          c.normal = res->normal;
          c.color = res->color;
        }
        break;
      }
    }

    quadrics_[s] += quadrics_[w];
    merge_vertex_clouds(s, w);
    vertex_live_[w] = false;
    --live_vertices_;
    prune_incident(s);
  }

  /// Final mesh: dead vertices and unreferenced attribute entries dropped,
  /// indices remapped, original order preserved throughout.
  RefMesh compact() const {
    RefMesh out;
    const std::size_t nv = work_.positions.size();
    std::vector<std::uint32_t> vmap(nv, kNoIndex);
    for (std::size_t v = 0; v < nv; ++v) {
      if (!vertex_live_[v]) continue;
      vmap[v] = static_cast<std::uint32_t>(out.positions.size());
      out.positions.push_back(work_.positions[v]);
      if (!work_.colors.empty()) out.colors.push_back(work_.colors[v]);
    }

    std::vector<bool> used_t(work_.texcoords.size(), false), used_n(work_.normals.size(), false);
    for (std::size_t f = 0; f < work_.faces.size(); ++f) {
      if (!face_live_[f]) continue;
      for (const Corner& c : work_.faces[f].corners) {
        if (c.texcoord != kNoIndex) used_t[c.texcoord] = true;
        if (c.normal != kNoIndex) used_n[c.normal] = true;
      }
    }
    std::vector<std::uint32_t> tmap(work_.texcoords.size(), kNoIndex),
        nmap(work_.normals.size(), kNoIndex);
    for (std::size_t i = 0; i < work_.texcoords.size(); ++i)
      if (used_t[i]) {
        tmap[i] = static_cast<std::uint32_t>(out.texcoords.size());
        out.texcoords.push_back(work_.texcoords[i]);
      }
    for (std::size_t i = 0; i < work_.normals.size(); ++i)
      if (used_n[i]) {
        nmap[i] = static_cast<std::uint32_t>(out.normals.size());
        out.normals.push_back(work_.normals[i]);
      }

    for (std::size_t f = 0; f < work_.faces.size(); ++f) {
      if (!face_live_[f]) continue;
      Face g = work_.faces[f];
      for (Corner& c : g.corners) {
        c.position = vmap[c.position];
        if (c.texcoord != kNoIndex) c.texcoord = tmap[c.texcoord];
        if (c.normal != kNoIndex) c.normal = nmap[c.normal];
        if (c.color != kNoIndex) c.color = c.position;
      }
      out.faces.push_back(g);
    }
    return out;
  }

 private:
  struct EdgeRec {
    std::uint32_t a, b;
    double len;
    int refs;
  };

  static std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
  }

  void add_edge_ref(std::uint32_t a, std::uint32_t b) {
    const std::uint64_t key = edge_key(a, b);
    const auto it = edge_slot_.find(key);
    if (it != edge_slot_.end()) {
      ++edges_[it->second].refs;
      return;
    }
    edge_slot_.emplace(key, static_cast<std::uint32_t>(edges_.size()));
    const auto [lo, hi] = std::minmax(a, b);
    edges_.push_back({lo, hi, distance(work_.positions[lo], work_.positions[hi]), 1});
  }

  void release_edge_ref(std::uint32_t a, std::uint32_t b) {
    const auto it = edge_slot_.find(edge_key(a, b));
    if (it != edge_slot_.end()) --edges_[it->second].refs;
  }

  void release_edge_refs_of(std::uint32_t f, std::uint32_t pivot) {
    const Face& face = work_.faces[f];
    for (const Corner& c : face.corners)
      if (c.position != pivot) release_edge_ref(pivot, c.position);
  }

  void add_edge_refs_of(std::uint32_t f, std::uint32_t pivot) {
    const Face& face = work_.faces[f];
    for (const Corner& c : face.corners)
      if (c.position != pivot) add_edge_ref(pivot, c.position);
  }

  void kill_face(std::uint32_t f) {
    face_live_[f] = false;
    --live_faces_;
    const Face& face = work_.faces[f];
    for (int i = 0; i < 3; ++i)
      release_edge_ref(face.corners[i].position, face.corners[(i + 1) % 3].position);
  }

  std::size_t count_edges_under(double t, std::size_t cap) const {
    std::size_t count = 0;
    for (const EdgeRec& e : edges_) {
      if (e.refs <= 0 || e.len >= t) continue;
      if (++count >= cap) return count;
    }
    return count;
  }

  std::vector<CandidatePair> collect_candidates(double t, bool proximity) const {
    std::vector<CandidatePair> out;
    if (!proximity) {
      for (const EdgeRec& e : edges_) {
        if (e.refs <= 0 || e.len >= t) continue;
        out.push_back({e.a, e.b, true});
      }
    } else {
      // All live vertex pairs within t, via a uniform grid of cell size t.
      const auto cell_of = [t](Vec3 p) {
        return std::array<long long, 3>{static_cast<long long>(std::floor(p.x / t)),
                                        static_cast<long long>(std::floor(p.y / t)),
                                        static_cast<long long>(std::floor(p.z / t))};
      };
      std::map<std::array<long long, 3>, std::vector<std::uint32_t>> grid;
      for (std::uint32_t v = 0; v < work_.positions.size(); ++v)
        if (vertex_live_[v]) grid[cell_of(work_.positions[v])].push_back(v);
      for (const auto& [key, verts] : grid) {
        for (long long dx = -1; dx <= 1; ++dx)
          for (long long dy = -1; dy <= 1; ++dy)
            for (long long dz = -1; dz <= 1; ++dz) {
              const auto it = grid.find({key[0] + dx, key[1] + dy, key[2] + dz});
              if (it == grid.end()) continue;
              for (std::uint32_t a : verts)
                for (std::uint32_t b : it->second) {
                  if (a >= b) continue;
                  if (distance(work_.positions[a], work_.positions[b]) < t) {
                    const auto slot = edge_slot_.find(edge_key(a, b));
                    const bool is_edge =
                        slot != edge_slot_.end() && edges_[slot->second].refs > 0;
                    out.push_back({a, b, is_edge});
                  }
                }
            }
      }
    }
    std::sort(out.begin(), out.end(), [](const CandidatePair& x, const CandidatePair& y) {
      return std::pair{x.v1, x.v2} < std::pair{y.v1, y.v2};
    });
    out.erase(std::unique(out.begin(), out.end(),
                          [](const CandidatePair& x, const CandidatePair& y) {
                            return x.v1 == y.v1 && x.v2 == y.v2;
                          }),
              out.end());
    return out;
  }

  std::vector<std::uint32_t> live_incident_sorted(std::uint32_t v) const {
    std::vector<std::uint32_t> out;
    out.reserve(incident_[v].size());
    for (std::uint32_t f : incident_[v])
      if (face_live_[f]) out.push_back(f);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  double shared_live_area(std::uint32_t v1, std::uint32_t v2) const {
    double area = 0.0;
    for (std::uint32_t f : incident_[v1]) {
      if (!face_live_[f]) continue;
      const Face& face = work_.faces[f];
      bool has2 = false;
      for (const Corner& c : face.corners) has2 |= c.position == v2;
      if (has2) area += face_areas_[f];
    }
    return area;
  }

  const std::vector<AttributeCloud>& clouds(AttributeChannel ch) const {
    switch (ch) {
      case AttributeChannel::Texture: return tex_clouds_;
      case AttributeChannel::Normal: return nrm_clouds_;
      default: return col_clouds_;
    }
  }
  std::vector<AttributeCloud>& clouds(AttributeChannel ch) {
    switch (ch) {
      case AttributeChannel::Texture: return tex_clouds_;
      case AttributeChannel::Normal: return nrm_clouds_;
      default: return col_clouds_;
    }
  }

  CloudTerm channel_term(std::uint32_t v1, std::uint32_t v2, AttributeChannel ch,
                         const WedgePlan& plan) const {
    const AttributeCloud& c1 = clouds(ch)[v1];
    const AttributeCloud& c2 = clouds(ch)[v2];
    CloudTerm term;
    term.weight = c1.total_weight() + c2.total_weight();
    if (term.weight <= 0.0) return {};

    double sum = 0.0;
    std::size_t probes = 0;
    for (const WedgeMergeEntry& e : plan) {
      std::optional<std::array<double, 3>> probe;
      switch (ch) {
        case AttributeChannel::Texture:
          if (e.texcoord.present) probe = detail::to_array(e.texcoord.value);
          break;
        case AttributeChannel::Normal:
          if (e.normal.present) probe = detail::to_array(e.normal.value);
          break;
        case AttributeChannel::Color:
          if (e.color.present) probe = detail::to_array(e.color.value);
          break;
      }
      if (!probe) continue;
      sum += cloud_error_merged(c1, c2, *probe);
      ++probes;
    }
    term.error = probes > 0 ? sum / static_cast<double>(probes) : 0.0;
    return term;
  }

  void init_clouds(const std::vector<double>& vertex_area) {
    const std::size_t nv = work_.positions.size();
    tex_clouds_.assign(nv, AttributeCloud{AttributeChannel::Texture, {}});
    nrm_clouds_.assign(nv, AttributeCloud{AttributeChannel::Normal, {}});
    col_clouds_.assign(nv, AttributeCloud{AttributeChannel::Color, {}});

    // Distinct wedge values per vertex, in first-seen face order; one cloud
    // point per value, weighted so each populated channel totals S(v).
    std::vector<std::vector<std::array<double, 3>>> tex_vals(nv), nrm_vals(nv), col_vals(nv);
    const auto push_distinct = [](std::vector<std::array<double, 3>>& vals,
                                  const std::array<double, 3>& v) {
      if (std::find(vals.begin(), vals.end(), v) == vals.end()) vals.push_back(v);
    };
    for (const Face& face : work_.faces) {
      for (const Corner& c : face.corners) {
        if (c.texcoord != kNoIndex)
          push_distinct(tex_vals[c.position], detail::to_array(work_.texcoords[c.texcoord]));
        if (c.normal != kNoIndex)
          push_distinct(nrm_vals[c.position], detail::to_array(work_.normals[c.normal]));
        if (c.color != kNoIndex)
          push_distinct(col_vals[c.position], detail::to_array(work_.colors[c.color]));
      }
    }
    const auto fill = [&](std::vector<AttributeCloud>& target,
                          const std::vector<std::vector<std::array<double, 3>>>& vals) {
      for (std::size_t v = 0; v < nv; ++v) {
        if (vals[v].empty()) continue;
        const double w = vertex_area[v] / static_cast<double>(vals[v].size());
        for (const auto& val : vals[v]) target[v].points.push_back({val, w});
      }
    };
    fill(tex_clouds_, tex_vals);
    fill(nrm_clouds_, nrm_vals);
    fill(col_clouds_, col_vals);
  }

  void merge_vertex_clouds(std::uint32_t s, std::uint32_t w) {
    for (AttributeChannel ch :
         {AttributeChannel::Texture, AttributeChannel::Normal, AttributeChannel::Color}) {
      auto& list = clouds(ch);
      auto& dst = list[s].points;
      auto& src = list[w].points;
      dst.insert(dst.end(), src.begin(), src.end());
      src.clear();
      src.shrink_to_fit();
    }
  }

  std::uint32_t append_texcoord(Vec2 v) {
    work_.texcoords.push_back(v);
    return static_cast<std::uint32_t>(work_.texcoords.size() - 1);
  }
  std::uint32_t append_normal(Vec3 v) {
    work_.normals.push_back(v);
    return static_cast<std::uint32_t>(work_.normals.size() - 1);
  }

  void prune_incident(std::uint32_t v) {
    auto& list = incident_[v];
    std::vector<std::uint32_t> live;
    live.reserve(list.size());
    for (std::uint32_t f : list)
      if (face_live_[f]) live.push_back(f);
    list = std::move(live);
  }

  RefMesh work_;
  std::vector<bool> vertex_live_, face_live_;
  std::size_t live_vertices_ = 0, live_faces_ = 0;
  std::vector<double> face_areas_;
  std::vector<std::vector<std::uint32_t>> incident_;
  std::vector<Quadric> quadrics_;
  std::vector<AttributeCloud> tex_clouds_, nrm_clouds_, col_clouds_;
  std::vector<EdgeRec> edges_;
  std::unordered_map<std::uint64_t, std::uint32_t> edge_slot_;
};

/// The full driver: adapt threshold, find valid pairs, rank by unified error,
/// collapse the best pair, repeat until the reduction target is met, the
/// error cap is hit, or candidates run out; then compact. The instance list
/// passes through untouched.
inline std::pair<Scene, SimplifyReport> simplify(const Scene& scene,
                                                 const SimplifyParams& params) {
  if (params.reduce_percent < 0.0 || params.reduce_percent > 100.0)
    throw std::invalid_argument("simplify: reduce_percent must be in [0, 100]");
  if (params.max_unified_error && *params.max_unified_error <= 0.0)
    throw std::invalid_argument("simplify: max_unified_error must be positive");
  if (params.max_geometric_error && *params.max_geometric_error <= 0.0)
    throw std::invalid_argument("simplify: max_geometric_error must be positive");
  if (params.initial_threshold_fraction <= 0.0)
    throw std::invalid_argument("simplify: initial_threshold_fraction must be positive");
  const RefMesh& mesh = scene.mesh;
  if (mesh.positions.empty()) throw std::invalid_argument("simplify: empty mesh");
  if (const auto issues = validate_mesh(mesh); !issues.empty())
    throw std::invalid_argument("simplify: invalid input mesh: " + issues.front().message);

  const auto t0 = std::chrono::steady_clock::now();
  SimplifyReport report;
  report.initial_vertices = mesh.positions.size();
  report.initial_texcoords = mesh.texcoords.size();
  report.initial_normals = mesh.normals.size();
  report.initial_faces = mesh.faces.size();

  const std::size_t target = params.target_vertices
                                 ? reduction_target(mesh.positions.size(), params.reduce_percent)
                                 : reduction_target(mesh.faces.size(), params.reduce_percent);

  Scene out;
  out.instances = scene.instances;
  out.material_lib = scene.material_lib;
  out.object_name = scene.object_name;

  Simplifier state(mesh);
  ThresholdState ts;
  const double diag = bounding_box_diagonal(mesh);
  ts.t_initial = params.fixed_threshold
                     ? *params.fixed_threshold
                     : (diag > 0.0 ? params.initial_threshold_fraction * diag : 1.0);
  ts.t = ts.t_initial;

  const auto at_target = [&] {
    return (params.target_vertices ? state.live_vertex_count() : state.live_face_count()) <=
           target;
  };

  StopReason reason = StopReason::TargetReached;
  while (!at_target()) {
    const auto candidates = state.discover_candidates(ts, params);
    if (candidates.empty()) {
      reason = StopReason::NoCandidates;
      break;
    }
    const auto eval = state.evaluate_candidates(candidates, params);
    if (eval.valid.empty()) {
      reason = eval.gated > 0 ? StopReason::ErrorCapHit : StopReason::NoCandidates;
      break;
    }
    const CandidatePair best = select_min_error_pair(eval.valid);
    if (params.max_unified_error && best.unified_error > *params.max_unified_error) {
      reason = StopReason::ErrorCapHit;
      break;
    }
    state.collapse(best);
    ++report.collapses;
  }

  out.mesh = report.collapses == 0 ? mesh : state.compact();
  report.final_vertices = out.mesh.positions.size();
  report.final_texcoords = out.mesh.texcoords.size();
  report.final_normals = out.mesh.normals.size();
  report.final_faces = out.mesh.faces.size();
  report.stop_reason = reason;
  report.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(out), report};
}

}  // namespace its
