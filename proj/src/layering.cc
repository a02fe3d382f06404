#include "bab/layering.h"

#include <algorithm>
#include <cmath>
#include <string>

#include <spdlog/spdlog.h>

#include "bab/errors.h"

namespace bab {
namespace {

double LevelMultiplier(int k, int level, int h) {
  const double m = std::pow(static_cast<double>(k),
                            1.0 - static_cast<double>(level) / h);
  if (!(m <= kMultiplierCap)) {
    spdlog::warn("level multiplier {} saturated at {}", m, kMultiplierCap);
    return kMultiplierCap;
  }
  return m;
}

}  // namespace

std::vector<EdgeId> LayeredGraph::PullBackPath(
    std::span<const EdgeId> layered_path) const {
  std::vector<EdgeId> out;
  for (EdgeId e : layered_path) {
    if (e < 0 || e >= graph_.num_edges()) {
      throw IntegrityError("layered edge " + std::to_string(e) +
                           " has no back path");
    }
    const auto& back = back_path_[e];
    out.insert(out.end(), back.begin(), back.end());
  }
  return out;
}

LayeredGraph BuildLayered(const TwoMetricGraph& g, int k, int h,
                          Direction direction) {
  if (h < 1) throw InvalidInput("layering height must be at least 1");
  if (k < 1) throw InvalidInput("layering needs at least one pair");
  const int n = g.num_vertices();

  if (direction == Direction::kDown) {
    // Build the up graph of the reverse, then flip every layered edge.
    LayeredGraph up = BuildLayered(g.Reversed(), k, h, Direction::kUp);
    LayeredGraph down;
    down.direction_ = Direction::kDown;
    down.height_ = h;
    down.base_vertices_ = n;
    down.multiplier_ = up.multiplier_;
    down.graph_ = TwoMetricGraph((h + 1) * n, /*directed=*/true);
    for (const Edge& e : up.graph_.edges()) {
      down.graph_.AddEdge(e.head, e.tail, e.cost, e.length);
      down.edge_level_.push_back(up.edge_level_[e.id]);
      std::vector<EdgeId> back = up.back_path_[e.id];
      std::reverse(back.begin(), back.end());
      down.back_path_.push_back(std::move(back));
    }
    return down;
  }

  LayeredGraph up;
  up.direction_ = Direction::kUp;
  up.height_ = h;
  up.base_vertices_ = n;
  up.graph_ = TwoMetricGraph((h + 1) * n, /*directed=*/true);
  up.multiplier_.resize(h + 1);
  for (int i = 0; i <= h; ++i) up.multiplier_[i] = LevelMultiplier(k, i, h);

  for (int i = h; i >= 1; --i) {
    const double m = up.multiplier_[i];
    const EdgeWeight weight = [m](const Edge& e) {
      return e.cost + m * e.length;
    };
    for (VertexId u = 0; u < n; ++u) {
      const ShortestPathTree tree = ShortestPathsFrom(g, weight, u);
      for (VertexId v = 0; v < n; ++v) {
        if (!tree.Reaches(v)) continue;
        std::vector<EdgeId> path = tree.PathTo(g, v);
        double cost = 0.0;
        for (EdgeId e : path) cost += g.edge(e).cost + m * g.edge(e).length;
        up.graph_.AddEdge(up.Vertex(u, i), up.Vertex(v, i - 1), cost,
                          PathLength(g, path));
        up.edge_level_.push_back(i);
        up.back_path_.push_back(std::move(path));
      }
    }
  }
  return up;
}

SolutionLedger PullBack(const LayeredGraph& layered, const TwoMetricGraph& g,
                        const SolutionLedger& layered_ledger) {
  SolutionLedger out;
  for (EdgeId e : layered_ledger.bought()) {
    for (EdgeId ge : layered.PullBackPath(std::span<const EdgeId>(&e, 1))) {
      out.Buy(g, ge);
    }
  }
  for (const auto& [pair, routed] : layered_ledger.paths()) {
    out.Route(g, pair, layered.Base(routed.source),
              layered.Base(routed.target), layered.PullBackPath(routed.edges));
  }
  return out;
}

int DefaultHeight(int n) {
  int h = 0;
  while ((1LL << h) < n) ++h;
  return std::max(1, h);
}

nlohmann::json LayeredToJson(const LayeredGraph& layered) {
  auto name = [&](VertexId v) {
    return std::to_string(layered.Base(v)) + "@" +
           std::to_string(layered.Level(v));
  };
  nlohmann::json j;
  j["directed"] = true;
  j["direction"] = layered.direction() == Direction::kUp ? "up" : "down";
  j["h"] = layered.height();
  j["n"] = layered.graph().num_vertices();
  j["edges"] = nlohmann::json::array();
  for (const Edge& e : layered.graph().edges()) {
    j["edges"].push_back({{"id", e.id},
                          {"tail", name(e.tail)},
                          {"head", name(e.head)},
                          {"c", e.cost},
                          {"l", e.length},
                          {"level", layered.EdgeLevel(e.id)},
                          {"back_path", layered.BackPath(e.id)}});
  }
  return j;
}

}  // namespace bab
