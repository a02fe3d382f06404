#include "bab/graph.h"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>
#include <utility>

#include "bab/errors.h"

namespace bab {
namespace {

void CheckWeight(double w, const char* what) {
  if (!(w >= 0.0) || std::isnan(w)) {
    throw InvalidInput(std::string("negative or NaN ") + what);
  }
}

double CheckedWeight(const EdgeWeight& weight, const Edge& e) {
  const double w = weight(e);
  if (std::isnan(w) || w < 0.0) {
    throw InvalidInput("shortest path weight must be nonnegative (edge " +
                       std::to_string(e.id) + ")");
  }
  return w;
}

using QueueEntry = std::pair<double, VertexId>;
using MinQueue = std::priority_queue<QueueEntry, std::vector<QueueEntry>,
                                     std::greater<QueueEntry>>;

}  // namespace

TwoMetricGraph::TwoMetricGraph(int num_vertices, bool directed)
    : num_vertices_(num_vertices),
      directed_(directed),
      out_(num_vertices),
      in_(num_vertices) {
  if (num_vertices < 0) throw InvalidInput("negative vertex count");
}

EdgeId TwoMetricGraph::AddEdge(VertexId tail, VertexId head, double cost,
                               double length, int origin) {
  if (!IsValidVertex(tail) || !IsValidVertex(head)) {
    throw InvalidInput("edge endpoint out of range: " + std::to_string(tail) +
                       "->" + std::to_string(head));
  }
  CheckWeight(cost, "edge cost");
  CheckWeight(length, "edge length");
  const EdgeId id = num_edges();
  edges_.push_back({id, tail, head, cost, length, kNoEdge, origin});
  out_[tail].push_back(id);
  in_[head].push_back(id);
  if (!directed_) {
    const EdgeId back = id + 1;
    edges_.push_back({back, head, tail, cost, length, id, origin});
    edges_[id].twin = back;
    out_[head].push_back(back);
    in_[tail].push_back(back);
  }
  return id;
}

EdgeId TwoMetricGraph::Canonical(EdgeId e) const {
  const EdgeId twin = edges_[e].twin;
  return twin == kNoEdge ? e : std::min(e, twin);
}

int TwoMetricGraph::num_canonical_edges() const {
  return directed_ ? num_edges() : num_edges() / 2;
}

TwoMetricGraph TwoMetricGraph::Reversed() const {
  TwoMetricGraph r;
  r.num_vertices_ = num_vertices_;
  r.directed_ = directed_;
  r.edges_ = edges_;
  r.out_ = in_;
  r.in_ = out_;
  for (Edge& e : r.edges_) std::swap(e.tail, e.head);
  return r;
}

TwoMetricGraph BabToTwoMetric(int num_vertices, bool directed,
                              std::span<const CabledEdge> edges) {
  TwoMetricGraph g(num_vertices, directed);
  for (const CabledEdge& e : edges) {
    if (e.cables.empty()) {
      throw InvalidInput("edge " + std::to_string(e.id) +
                         " has no cable types");
    }
    for (const CableType& cable : e.cables) {
      g.AddEdge(e.tail, e.head, cable.fixed_cost, cable.unit_cost, e.id);
    }
  }
  return g;
}

SplitGraph NodeSplit(const TwoMetricGraph& topology,
                     std::span<const NodeWeight> weights) {
  const int n = topology.num_vertices();
  if (static_cast<int>(weights.size()) != n) {
    throw InvalidInput("node weight count does not match vertex count");
  }
  SplitGraph split;
  split.original_vertices = n;
  split.graph = TwoMetricGraph(2 * n, /*directed=*/true);
  for (VertexId v = 0; v < n; ++v) {
    CheckWeight(weights[v].cost, "node cost");
    CheckWeight(weights[v].length, "node length");
    split.graph.AddEdge(SplitGraph::InVertex(v), SplitGraph::OutVertex(v),
                        weights[v].cost, weights[v].length, -1);
  }
  for (const Edge& e : topology.edges()) {
    if (e.cost != 0.0 || e.length != 0.0) {
      throw InvalidInput("node-weighted input must have zero edge weights");
    }
    // Undirected topology already stores both arcs.
    split.graph.AddEdge(SplitGraph::OutVertex(e.tail),
                        SplitGraph::InVertex(e.head), 0.0, 0.0, e.origin);
  }
  return split;
}

void SolutionLedger::Buy(const TwoMetricGraph& graph, EdgeId e) {
  if (e < 0 || e >= graph.num_edges()) {
    throw IntegrityError("buying unknown edge " + std::to_string(e));
  }
  bought_.insert(e);
  if (graph.edge(e).twin != kNoEdge) bought_.insert(graph.edge(e).twin);
}

void SolutionLedger::Route(const TwoMetricGraph& graph, int pair,
                           VertexId source, VertexId target,
                           std::vector<EdgeId> path) {
  ValidateWalk(graph, path, source, target);
  for (EdgeId e : path) Buy(graph, e);
  AddPath(graph, pair, source, target, std::move(path));
}

void SolutionLedger::AddPath(const TwoMetricGraph& graph, int pair,
                             VertexId source, VertexId target,
                             std::vector<EdgeId> path) {
  if (paths_.contains(pair)) {
    throw IntegrityError("pair " + std::to_string(pair) + " already routed");
  }
  ValidateWalk(graph, path, source, target);
  paths_[pair] = {source, target, std::move(path)};
}

double SolutionLedger::MarginalCost(const TwoMetricGraph& graph,
                                    std::span<const EdgeId> path) const {
  std::set<EdgeId> fresh;
  double cost = 0.0;
  for (EdgeId e : path) {
    const Edge& edge = graph.edge(e);
    cost += edge.length;
    if (!IsBought(e) && fresh.insert(graph.Canonical(e)).second) {
      cost += edge.cost;
    }
  }
  return cost;
}

void ValidateWalk(const TwoMetricGraph& graph, std::span<const EdgeId> path,
                  VertexId from, VertexId to) {
  VertexId at = from;
  for (EdgeId e : path) {
    if (e < 0 || e >= graph.num_edges()) {
      throw IntegrityError("path uses unknown edge " + std::to_string(e));
    }
    if (graph.edge(e).tail != at) {
      throw IntegrityError("path is not contiguous at edge " +
                           std::to_string(e));
    }
    at = graph.edge(e).head;
  }
  if (at != to) throw IntegrityError("path does not end at its target");
}

CostBreakdown SolutionCost(const TwoMetricGraph& graph,
                           const SolutionLedger& ledger) {
  CostBreakdown out;
  for (EdgeId e : ledger.bought()) {
    if (graph.Canonical(e) == e || !ledger.IsBought(graph.Canonical(e))) {
      out.buy += graph.edge(e).cost;
    }
  }
  for (const auto& [pair, routed] : ledger.paths()) {
    ValidateWalk(graph, routed.edges, routed.source, routed.target);
    for (EdgeId e : routed.edges) {
      if (!ledger.IsBought(e)) {
        throw IntegrityError("pair " + std::to_string(pair) +
                             " uses unbought edge " + std::to_string(e));
      }
      out.length += graph.edge(e).length;
    }
  }
  out.total = out.buy + out.length;
  return out;
}

std::optional<WeightedPath> ShortestPath(const TwoMetricGraph& graph,
                                         const EdgeWeight& weight,
                                         VertexId from, VertexId to) {
  if (!graph.IsValidVertex(from) || !graph.IsValidVertex(to)) {
    throw InvalidInput("shortest path endpoint out of range");
  }
  const int n = graph.num_vertices();
  std::vector<double> w(graph.num_edges());
  for (const Edge& e : graph.edges()) w[e.id] = CheckedWeight(weight, e);

  // Distances and hop counts to `to`, computed backwards. hops[v] is the
  // fewest edges over tight edges into already-settled vertices.
  std::vector<double> dist(n, kInfinity);
  std::vector<int> hops(n, std::numeric_limits<int>::max());
  std::vector<bool> done(n, false);
  MinQueue queue;
  dist[to] = 0.0;
  hops[to] = 0;
  queue.push({0.0, to});
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (done[v] || d > dist[v]) continue;
    done[v] = true;
    for (EdgeId e : graph.in_edges(v)) {
      if (w[e] == kInfinity) continue;
      const VertexId u = graph.edge(e).tail;
      if (done[u]) continue;
      const double nd = d + w[e];
      if (nd < dist[u] - kCostTolerance) {
        dist[u] = nd;
        hops[u] = hops[v] + 1;
        queue.push({nd, u});
      } else if (nd <= dist[u] + kCostTolerance && hops[v] + 1 < hops[u]) {
        hops[u] = hops[v] + 1;
        if (nd < dist[u]) {
          dist[u] = nd;
          queue.push({nd, u});
        }
      }
    }
  }
  if (dist[from] == kInfinity) return std::nullopt;

  WeightedPath path;
  VertexId at = from;
  while (at != to) {
    EdgeId best = kNoEdge;
    for (EdgeId e : graph.out_edges(at)) {
      if (w[e] == kInfinity) continue;
      const VertexId v = graph.edge(e).head;
      if (!done[v] || hops[v] != hops[at] - 1) continue;
      if (w[e] + dist[v] > dist[at] + kCostTolerance) continue;
      if (best == kNoEdge || e < best) best = e;
    }
    if (best == kNoEdge) {
      throw IntegrityError("shortest path reconstruction failed");
    }
    path.edges.push_back(best);
    path.weight += w[best];
    at = graph.edge(best).head;
  }
  return path;
}

std::vector<EdgeId> ShortestPathTree::PathTo(const TwoMetricGraph& graph,
                                             VertexId v) const {
  std::vector<EdgeId> path;
  if (!Reaches(v)) return path;
  while (v != source) {
    const EdgeId e = parent[v];
    path.push_back(e);
    v = graph.edge(e).tail;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

ShortestPathTree ShortestPathsFrom(const TwoMetricGraph& graph,
                                   const EdgeWeight& weight, VertexId source) {
  const int n = graph.num_vertices();
  std::vector<double> w(graph.num_edges());
  for (const Edge& e : graph.edges()) w[e.id] = CheckedWeight(weight, e);

  ShortestPathTree tree;
  tree.source = source;
  tree.dist.assign(n, kInfinity);
  tree.parent.assign(n, kNoEdge);
  tree.hops.assign(n, std::numeric_limits<int>::max());
  std::vector<bool> done(n, false);
  MinQueue queue;
  tree.dist[source] = 0.0;
  tree.hops[source] = 0;
  queue.push({0.0, source});
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (done[u] || d > tree.dist[u]) continue;
    done[u] = true;
    for (EdgeId e : graph.out_edges(u)) {
      if (w[e] == kInfinity) continue;
      const VertexId v = graph.edge(e).head;
      if (done[v]) continue;
      const double nd = d + w[e];
      const int nh = tree.hops[u] + 1;
      bool better = nd < tree.dist[v] - kCostTolerance;
      if (!better && nd <= tree.dist[v] + kCostTolerance) {
        better = nh < tree.hops[v] ||
                 (nh == tree.hops[v] && e < tree.parent[v]);
      }
      if (better) {
        const bool decreased = nd < tree.dist[v];
        tree.dist[v] = std::min(nd, tree.dist[v]);
        tree.hops[v] = nh;
        tree.parent[v] = e;
        if (decreased) queue.push({tree.dist[v], v});
      }
    }
  }
  return tree;
}

double CostPlusLength(const Edge& e) { return e.cost + e.length; }
double LengthOnly(const Edge& e) { return e.length; }
double UnitHop(const Edge&) { return 1.0; }

double PathLength(const TwoMetricGraph& graph, std::span<const EdgeId> path) {
  double total = 0.0;
  for (EdgeId e : path) total += graph.edge(e).length;
  return total;
}

double PathCost(const TwoMetricGraph& graph, std::span<const EdgeId> path) {
  double total = 0.0;
  for (EdgeId e : path) total += graph.edge(e).cost;
  return total;
}

}  // namespace bab
