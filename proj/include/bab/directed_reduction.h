#pragma once

// The tuple forest H built from the layered graphs: per root an in-tree of
// up-tuples and an out-tree of down-tuples joined by a free root link, plus
// free terminal attachments. Single-sink sub-instances on one tree side map
// to group Steiner tree instances.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "bab/composite_lp.h"
#include "bab/graph.h"
#include "bab/layering.h"
#include "bab/single_sink.h"

namespace bab {

inline constexpr int64_t kDefaultNodeBudget = 1000000;

struct TupleVertex {
  int root = 0;
  Direction side = Direction::kUp;
  std::vector<VertexId> tuple;  // (v_1, ..., v_i); empty at the tree root
  int level() const { return static_cast<int>(tuple.size()); }
};

enum class HArcKind { kTree, kRootLink, kSourceAttach, kSinkAttach };

struct HArcInfo {
  HArcKind kind = HArcKind::kTree;
  int root = 0;
  Direction side = Direction::kUp;
  EdgeId layered_edge = kNoEdge;  // tree arcs only
};

class JunctionForest {
 public:
  const TwoMetricGraph& graph() const { return graph_; }
  int num_roots() const { return num_roots_; }
  int height() const { return height_; }
  int num_tuples() const { return static_cast<int>(tuples_.size()); }

  bool IsTuple(VertexId v) const { return v < num_tuples(); }
  const TupleVertex& tuple(VertexId v) const { return tuples_.at(v); }
  VertexId TreeRoot(int root, Direction side) const;
  EdgeId RootLink(int root) const { return root_link_.at(root); }
  VertexId SourceTerminal(VertexId w) const { return num_tuples() + w; }
  VertexId SinkTerminal(VertexId w) const {
    return num_tuples() + num_roots_ + w;
  }
  // Vertex of G an H vertex stands for: the terminal, the last tuple entry,
  // or the root for an empty tuple.
  VertexId BaseVertex(VertexId v) const;

  const HArcInfo& arc_info(EdgeId e) const { return arc_info_.at(e); }
  // Tree arc between a tuple vertex and its parent; kNoEdge at tree roots.
  EdgeId ParentArc(VertexId v) const { return parent_arc_.at(v); }
  VertexId Parent(VertexId v) const;
  const std::vector<VertexId>& Children(VertexId v) const {
    return children_.at(v);
  }
  // Terminal attachment of a leaf; kNoEdge for inner tuples.
  EdgeId AttachArc(VertexId v) const { return attach_arc_.at(v); }

  // G-walk of an H path: concatenated back paths of its tree arcs.
  std::vector<EdgeId> PullBackPath(const std::vector<EdgeId>& h_path) const;

  // "r|v1.v2:up", "r|:down", "s:w", "t:w".
  std::string VertexName(VertexId v) const;

  friend JunctionForest BuildH(const LayeredGraph& up,
                               const LayeredGraph& down, int64_t node_budget);

 private:
  TwoMetricGraph graph_;
  int num_roots_ = 0;
  int height_ = 0;
  std::vector<TupleVertex> tuples_;
  std::vector<EdgeId> parent_arc_;
  std::vector<std::vector<VertexId>> children_;
  std::vector<EdgeId> attach_arc_;
  std::vector<HArcInfo> arc_info_;
  std::vector<std::vector<EdgeId>> back_path_;  // by H arc, G edges
  std::vector<VertexId> up_root_;
  std::vector<VertexId> down_root_;
  std::vector<EdgeId> root_link_;
};

// Number of vertices H would have (saturating).
int64_t HNodeCount(const LayeredGraph& up, const LayeredGraph& down);

// Throws BudgetExceeded, naming the required budget, when H would have more
// than `node_budget` vertices.
JunctionForest BuildH(const LayeredGraph& up, const LayeredGraph& down,
                      int64_t node_budget = kDefaultNodeBudget);

// Number of root-link arcs on an H path.
int CountRootLinks(const JunctionForest& h, const std::vector<EdgeId>& path);

// Per-root up and down networks of H for the fractional solver; terminals
// are the attachment vertices.
LpNetworks NetworksFromH(const JunctionForest& h, int n,
                         bool prize_collecting);

// The subtree of H under a junction vertex as a group Steiner tree: internal
// arcs weigh their c, and each terminal gets one dangling leaf per matching
// H leaf, weighing the l-length of that leaf's path to the junction.
struct GstMapping {
  GstInstance instance;
  VertexId junction = 0;
  Direction side = Direction::kUp;
  std::vector<VertexId> h_vertex;  // by GST node; dangling nodes -> H leaf
  std::vector<bool> dangling;      // by GST node
  std::vector<double> length;      // by GST node, l-length to the junction
  std::vector<int> group_pair;     // by group
  std::vector<VertexId> group_terminal;  // by group, a G vertex
};

GstMapping MapToGst(const JunctionForest& h, VertexId junction,
                    const std::vector<std::pair<int, VertexId>>& terminals);

// Appends a group for `pair` with terminal w and returns its index. The group
// is empty (infeasible) when no leaf under the junction ends at w.
int AddGstTerminal(const JunctionForest& h, GstMapping& mapping, int pair,
                   VertexId w);

// H path of a dangling member: s:w -> ... -> junction on the up side,
// junction -> ... -> t:w on the down side.
std::vector<EdgeId> GstMemberPath(const JunctionForest& h,
                                  const GstMapping& mapping, int dangling);

// H ledger routing every group through its smallest connected dangling
// member. Throws InvalidInput when some group has none.
SolutionLedger MapBack(const JunctionForest& h, const GstMapping& mapping,
                       const std::vector<bool>& bought);

// G ledger of an H ledger: every routed H path is pulled back and routed.
SolutionLedger PullBackH(const JunctionForest& h, const TwoMetricGraph& g,
                         const SolutionLedger& h_ledger);

nlohmann::json HToJson(const JunctionForest& h);

}  // namespace bab
