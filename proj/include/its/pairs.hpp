#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "its/mesh.hpp"

namespace its {

/// Adaptive distance threshold for valid-pair discovery.
struct ThresholdState {
  double t = 1.0;
  double t_initial = 1.0;
  int adaptations = 0;  // halvings/doublings this iteration
};

enum class ThresholdDecision { Keep, Doubled, Halved };

inline constexpr std::size_t kPairWindowMax = 10;
inline constexpr int kMaxAdaptations = 64;

/// No pairs -> double; more than ten -> halve; otherwise the threshold stays.
inline ThresholdDecision adapt_threshold(ThresholdState& state, std::size_t pair_count) {
  if (pair_count == 0) {
    state.t *= 2.0;
    ++state.adaptations;
    return ThresholdDecision::Doubled;
  }
  if (pair_count > kPairWindowMax) {
    state.t *= 0.5;
    ++state.adaptations;
    return ThresholdDecision::Halved;
  }
  return ThresholdDecision::Keep;
}

struct CandidatePair {
  std::uint32_t v1 = 0;  // v1 < v2
  std::uint32_t v2 = 0;
  bool is_edge = false;
  double geometric_error = 0.0;
  double normal_error = 0.0;
  double texture_error = 0.0;
  double color_error = 0.0;
  double unified_error = 0.0;
  std::uint32_t survivor = 0;
};

/// Unordered edge set of a mesh as (a,b) pairs with a < b, ascending.
inline std::vector<std::pair<std::uint32_t, std::uint32_t>> mesh_edges(const RefMesh& mesh) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (const Face& f : mesh.faces) {
    for (int i = 0; i < 3; ++i) {
      std::uint32_t a = f.corners[i].position;
      std::uint32_t b = f.corners[(i + 1) % 3].position;
      if (a > b) std::swap(a, b);
      edges.insert({a, b});
    }
  }
  return {edges.begin(), edges.end()};
}

/// Contraction candidates under the current threshold. The default rule
/// admits edges shorter than t; with proximity_pairs any vertex pair closer
/// than t qualifies, edge or not. Errors are left unfilled.
inline std::vector<CandidatePair> find_valid_pairs(const RefMesh& mesh,
                                                   const ThresholdState& state,
                                                   bool proximity_pairs = false) {
  if (mesh.positions.size() < 2)
    throw std::invalid_argument("find_valid_pairs: mesh needs at least 2 vertices");
  std::vector<CandidatePair> out;
  const auto edges = mesh_edges(mesh);
  if (!proximity_pairs) {
    for (auto [a, b] : edges) {
      if (distance(mesh.positions[a], mesh.positions[b]) < state.t)
        out.push_back({a, b, true});
    }
    return out;
  }

  // Proximity mode: every pair within t, found by hashing vertices into a
  // uniform grid of cell size t.
  const std::set<std::pair<std::uint32_t, std::uint32_t>> edge_set(edges.begin(), edges.end());
  const double cell = state.t;
  const auto key_of = [cell](Vec3 p) {
    return std::array<long long, 3>{static_cast<long long>(std::floor(p.x / cell)),
                                    static_cast<long long>(std::floor(p.y / cell)),
                                    static_cast<long long>(std::floor(p.z / cell))};
  };
  std::map<std::array<long long, 3>, std::vector<std::uint32_t>> grid;
  for (std::uint32_t v = 0; v < mesh.positions.size(); ++v)
    grid[key_of(mesh.positions[v])].push_back(v);

  std::set<std::pair<std::uint32_t, std::uint32_t>> close;
  for (const auto& [key, cell_verts] : grid) {
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy)
        for (long long dz = -1; dz <= 1; ++dz) {
          const auto it = grid.find({key[0] + dx, key[1] + dy, key[2] + dz});
          if (it == grid.end()) continue;
          for (std::uint32_t a : cell_verts)
            for (std::uint32_t b : it->second) {
              if (a >= b) continue;
              if (distance(mesh.positions[a], mesh.positions[b]) < state.t) close.insert({a, b});
            }
        }
  }
  for (auto [a, b] : close) out.push_back({a, b, edge_set.count({a, b}) > 0});
  return out;
}

/// Minimum unified error; ties resolve to the lexicographically smallest
/// (v1, v2).
inline CandidatePair select_min_error_pair(std::span<const CandidatePair> candidates) {
  if (candidates.empty())
    throw std::invalid_argument("select_min_error_pair: empty candidate list");
  const CandidatePair* best = &candidates[0];
  for (const CandidatePair& c : candidates.subspan(1)) {
    if (c.unified_error < best->unified_error ||
        (c.unified_error == best->unified_error &&
         std::pair{c.v1, c.v2} < std::pair{best->v1, best->v2}))
      best = &c;
  }
  return *best;
}

}  // namespace its
