#pragma once

// Height-reduced layered expansions of a two-metric graph. The up graph has
// h+1 levels of copies of V with edges from level i to level i-1; the down
// graph mirrors it with edges from level i-1 to level i. Each layered edge
// stands for a shortest G-path under the level-i metric c + k^(1-i/h) * l.

#include <span>
#include <vector>

#include "bab/graph.h"
#include "json.hpp"

namespace bab {

enum class Direction { kUp, kDown };

// Largest level multiplier before saturation.
inline constexpr double kMultiplierCap = 1e18;

class LayeredGraph {
 public:
  Direction direction() const { return direction_; }
  int height() const { return height_; }
  int base_vertices() const { return base_vertices_; }
  const TwoMetricGraph& graph() const { return graph_; }

  VertexId Vertex(VertexId v, int level) const {
    return level * base_vertices_ + v;
  }
  VertexId Base(VertexId layered) const { return layered % base_vertices_; }
  int Level(VertexId layered) const { return layered / base_vertices_; }

  // Roots live on level 0, terminals on level h.
  VertexId RootVertex(VertexId r) const { return Vertex(r, 0); }
  VertexId TerminalVertex(VertexId v) const { return Vertex(v, height_); }

  // Upper level index i of a layered edge (the metric level).
  int EdgeLevel(EdgeId e) const { return edge_level_[e]; }
  const std::vector<EdgeId>& BackPath(EdgeId e) const { return back_path_[e]; }
  double Multiplier(int level) const { return multiplier_[level]; }

  // G-walk obtained by concatenating back paths.
  std::vector<EdgeId> PullBackPath(std::span<const EdgeId> layered_path) const;

  friend LayeredGraph BuildLayered(const TwoMetricGraph& g, int k, int h,
                                   Direction direction);

 private:
  Direction direction_ = Direction::kUp;
  int height_ = 1;
  int base_vertices_ = 0;
  TwoMetricGraph graph_;
  std::vector<int> edge_level_;
  std::vector<std::vector<EdgeId>> back_path_;
  std::vector<double> multiplier_;  // indexed by level 0..h
};

// For every level i in 1..h and every ordered pair (u, v) with v reachable
// from u (u = v included, as an empty path), adds one layered edge whose cost
// is the level-i shortest-path value and whose length is that path's l-length.
// Throws InvalidInput if h < 1 or k < 1.
LayeredGraph BuildLayered(const TwoMetricGraph& g, int k, int h,
                          Direction direction);

// Replaces every layered edge by its back path. Bought layered edges buy
// their whole back path; routed paths keep their pair keys with endpoints
// mapped to base vertices.
SolutionLedger PullBack(const LayeredGraph& layered, const TwoMetricGraph& g,
                        const SolutionLedger& layered_ledger);

// ceil(log2 n), at least 1.
int DefaultHeight(int n);

// Edge-list dump with "v@i" vertex ids.
nlohmann::json LayeredToJson(const LayeredGraph& layered);

}  // namespace bab
