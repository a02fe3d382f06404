#pragma once

// Online single-sink and single-source subroutines: greedy augmentation on a
// graph, and greedy group connection on a rooted tree.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bab/graph.h"

namespace bab {

// Greedy routing under the residual weight c * [unbought] + l.
class GreedyRouter {
 public:
  explicit GreedyRouter(const TwoMetricGraph& graph) : graph_(&graph) {}

  // Path the next Route(from, to) would take; nothing is bought.
  std::optional<WeightedPath> Plan(VertexId from, VertexId to) const;
  // Buys and records the planned path. Throws InvalidInput when `to` is
  // unreachable.
  std::vector<EdgeId> Route(int pair, VertexId from, VertexId to);

  const TwoMetricGraph& graph() const { return *graph_; }
  const SolutionLedger& ledger() const { return ledger_; }
  CostBreakdown cost() const { return SolutionCost(*graph_, ledger_); }

 private:
  const TwoMetricGraph* graph_;
  SolutionLedger ledger_;
};

enum class SinkSide {
  kSink,    // terminals route to the root
  kSource,  // the root routes to terminals
};

class SingleSinkAlg {
 public:
  virtual ~SingleSinkAlg() = default;

  // Path that OnTerminal(v) would commit, oriented terminal -> root for a
  // sink and root -> terminal for a source; nullopt when unreachable.
  virtual std::optional<std::vector<EdgeId>> Peek(VertexId v) const = 0;
  // Serves terminal v for `pair` and commits its path. Throws InvalidInput
  // when v and the root are disconnected.
  virtual std::vector<EdgeId> OnTerminal(int pair, VertexId v) = 0;

  virtual const SolutionLedger& ledger() const = 0;
  virtual CostBreakdown cost() const = 0;
  virtual VertexId root() const = 0;
  virtual SinkSide side() const = 0;
};

// Shortest path under c * [unbought] + l between the terminal and the root.
// The source side runs the sink rule on the reversed graph.
class GreedySingleSink : public SingleSinkAlg {
 public:
  GreedySingleSink(const TwoMetricGraph& graph, VertexId root, SinkSide side);

  std::optional<std::vector<EdgeId>> Peek(VertexId v) const override;
  std::vector<EdgeId> OnTerminal(int pair, VertexId v) override;
  const SolutionLedger& ledger() const override { return ledger_; }
  CostBreakdown cost() const override {
    return SolutionCost(*graph_, ledger_);
  }
  VertexId root() const override { return root_; }
  SinkSide side() const override { return side_; }

 private:
  const TwoMetricGraph* graph_;
  std::optional<TwoMetricGraph> reversed_;
  VertexId root_;
  SinkSide side_;
  SolutionLedger ledger_;
};

// Plug-in by name ("greedy"). Throws InvalidInput for unknown names.
std::unique_ptr<SingleSinkAlg> MakeSingleSink(const std::string& name,
                                              const TwoMetricGraph& graph,
                                              VertexId root, SinkSide side);

// Rooted tree with nonnegative weights on the arc from each node to its
// parent, plus groups of nodes to connect to the root.
struct GstInstance {
  int root = 0;
  std::vector<int> parent;     // -1 at the root
  std::vector<double> weight;  // of the arc to the parent; 0 at the root
  std::vector<std::vector<int>> groups;

  int num_nodes() const { return static_cast<int>(parent.size()); }
  int AddNode(int parent_node, double arc_weight);
};

// Weight of the arcs marked in `bought` (indexed by child node).
double GstWeight(const GstInstance& inst, const std::vector<bool>& bought);

// Nodes on the path from `node` up to (excluding) the root.
std::vector<int> TreePathToRoot(const GstInstance& inst, int node);

// Connects each arriving group through its member with the smallest residual
// root-path weight (smallest node id on ties), buying that path.
class TreeGroupGreedy {
 public:
  explicit TreeGroupGreedy(const GstInstance& inst) : inst_(&inst) {}

  // Member the next Connect(group) would pick and its marginal weight.
  std::pair<int, double> Peek(int group) const;
  // Throws InvalidInput on an empty group.
  int Connect(int group);

  bool IsBought(int node) const {
    return node < static_cast<int>(bought_.size()) && bought_[node];
  }
  const std::vector<bool>& bought() const { return bought_; }
  double cost() const { return cost_; }

 private:
  double Residual(int node) const;

  const GstInstance* inst_;
  std::vector<bool> bought_;
  double cost_ = 0.0;
};

}  // namespace bab
