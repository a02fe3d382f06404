#pragma once

// Two-metric graphs: every edge carries a one-time buying cost and a per-unit
// length. This header also holds the solution ledger used to account for
// bought edges and routed paths, and the shortest-path primitive shared by the
// rest of the library.

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

namespace bab {

using VertexId = int;
using EdgeId = int;

inline constexpr EdgeId kNoEdge = -1;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
// Absolute tolerance for cost comparisons.
inline constexpr double kCostTolerance = 1e-9;

struct Edge {
  EdgeId id = kNoEdge;
  VertexId tail = 0;
  VertexId head = 0;
  double cost = 0.0;    // c_e, paid once when the edge is bought
  double length = 0.0;  // l_e, paid per unit of routed demand
  EdgeId twin = kNoEdge;    // anti-parallel arc of an undirected edge
  int origin = -1;          // id of the input edge this arc was derived from
};

class TwoMetricGraph {
 public:
  TwoMetricGraph() = default;
  explicit TwoMetricGraph(int num_vertices, bool directed = true);

  // Adds an edge and returns its id. Undirected graphs store two anti-parallel
  // arcs with consecutive ids sharing cost and length; the first id is
  // returned. Throws InvalidInput on negative cost/length or bad endpoints.
  EdgeId AddEdge(VertexId tail, VertexId head, double cost, double length,
                 int origin = -1);

  int num_vertices() const { return num_vertices_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  bool directed() const { return directed_; }

  const Edge& edge(EdgeId e) const { return edges_[e]; }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const EdgeId> out_edges(VertexId v) const { return out_[v]; }
  std::span<const EdgeId> in_edges(VertexId v) const { return in_[v]; }

  // Representative of an undirected edge (smaller arc id); identity for arcs.
  EdgeId Canonical(EdgeId e) const;
  // Number of distinct canonical edges.
  int num_canonical_edges() const;

  // Same edge ids with every arc flipped. Twins are preserved.
  TwoMetricGraph Reversed() const;

  bool IsValidVertex(VertexId v) const {
    return v >= 0 && v < num_vertices_;
  }

 private:
  int num_vertices_ = 0;
  bool directed_ = true;
  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeId>> out_;
  std::vector<std::vector<EdgeId>> in_;
};

// One cable type of a piecewise-affine sub-additive cost f(x) = min(s + d*x).
struct CableType {
  double fixed_cost = 0.0;  // sigma
  double unit_cost = 0.0;   // delta
};

struct CabledEdge {
  int id = 0;
  VertexId tail = 0;
  VertexId head = 0;
  std::vector<CableType> cables;
};

// Replaces every edge by one parallel two-metric edge per cable type
// (c = sigma, l = delta). Edge::origin records the input edge id. Throws
// InvalidInput on an empty cable list.
TwoMetricGraph BabToTwoMetric(int num_vertices, bool directed,
                              std::span<const CabledEdge> edges);

struct NodeWeight {
  double cost = 0.0;
  double length = 0.0;
};

// Node-weighted graph turned into an edge-weighted digraph. Vertex v becomes
// InVertex(v) -> OutVertex(v) carrying the node weights; every original edge
// u-v becomes a free arc OutVertex(u) -> InVertex(v) (and the reverse when
// undirected). Sources map to OutVertex, sinks to InVertex.
struct SplitGraph {
  TwoMetricGraph graph;
  int original_vertices = 0;

  static VertexId InVertex(VertexId v) { return 2 * v; }
  static VertexId OutVertex(VertexId v) { return 2 * v + 1; }
  static VertexId Original(VertexId split) { return split / 2; }
  // Internal arc of original vertex v.
  static EdgeId NodeArc(VertexId v) { return v; }
};

// `topology` supplies vertices and adjacency; its edge costs must be zero.
SplitGraph NodeSplit(const TwoMetricGraph& topology,
                     std::span<const NodeWeight> weights);

struct CostBreakdown {
  double buy = 0.0;
  double length = 0.0;
  double total = 0.0;
};

// Bought edges plus one committed s->t walk per routed pair.
class SolutionLedger {
 public:
  struct RoutedPath {
    VertexId source = 0;
    VertexId target = 0;
    std::vector<EdgeId> edges;
  };

  // Marks `e` (and its twin, if any) bought. Idempotent.
  void Buy(const TwoMetricGraph& graph, EdgeId e);
  bool IsBought(EdgeId e) const { return bought_.contains(e); }
  // Buys every edge of `path` and records it for `pair`. Throws
  // IntegrityError if the pair already has a path or the walk is broken.
  void Route(const TwoMetricGraph& graph, int pair, VertexId source,
             VertexId target, std::vector<EdgeId> path);
  // Records a path without buying its edges; SolutionCost rejects the ledger
  // until they are bought.
  void AddPath(const TwoMetricGraph& graph, int pair, VertexId source,
               VertexId target, std::vector<EdgeId> path);

  const std::set<EdgeId>& bought() const { return bought_; }
  const std::map<int, RoutedPath>& paths() const { return paths_; }
  bool empty() const { return bought_.empty() && paths_.empty(); }

  // Cost `path` would add if routed now (unbought edges + its length).
  double MarginalCost(const TwoMetricGraph& graph,
                      std::span<const EdgeId> path) const;

 private:
  std::set<EdgeId> bought_;
  std::map<int, RoutedPath> paths_;
};

// Recomputes buy/length/total from scratch. An edge bought once but used by
// many paths contributes c once and l per traversal; anti-parallel twins are
// one edge. Throws IntegrityError if a path uses an unbought edge or is not a
// contiguous walk between its endpoints.
CostBreakdown SolutionCost(const TwoMetricGraph& graph,
                           const SolutionLedger& ledger);

// Throws IntegrityError unless `path` is a tail-to-head walk from `from` to
// `to` over existing edges.
void ValidateWalk(const TwoMetricGraph& graph, std::span<const EdgeId> path,
                  VertexId from, VertexId to);

// Per-edge weight; returning +infinity excludes the edge. Must be >= 0.
using EdgeWeight = std::function<double(const Edge&)>;

struct WeightedPath {
  std::vector<EdgeId> edges;
  double weight = 0.0;
};

// Minimum-weight walk from `from` to `to`, or nullopt when unreachable. Ties
// are broken by fewest edges, then greedily by smallest edge id from the
// start. Throws InvalidInput on a negative weight.
std::optional<WeightedPath> ShortestPath(const TwoMetricGraph& graph,
                                         const EdgeWeight& weight,
                                         VertexId from, VertexId to);

// Single-source shortest-path tree with deterministic parents.
struct ShortestPathTree {
  VertexId source = 0;
  std::vector<double> dist;      // kInfinity when unreachable
  std::vector<EdgeId> parent;    // kNoEdge at the source / unreachable
  std::vector<int> hops;

  bool Reaches(VertexId v) const { return dist[v] < kInfinity; }
  std::vector<EdgeId> PathTo(const TwoMetricGraph& graph, VertexId v) const;
};

ShortestPathTree ShortestPathsFrom(const TwoMetricGraph& graph,
                                   const EdgeWeight& weight, VertexId source);

// Common weights.
double CostPlusLength(const Edge& e);
double LengthOnly(const Edge& e);
double UnitHop(const Edge& e);

double PathLength(const TwoMetricGraph& graph, std::span<const EdgeId> path);
double PathCost(const TwoMetricGraph& graph, std::span<const EdgeId> path);

}  // namespace bab
