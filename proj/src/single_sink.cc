#include "bab/single_sink.h"

#include <algorithm>
#include <string>

#include "bab/errors.h"

namespace bab {
namespace {

EdgeWeight ResidualWeight(const SolutionLedger& ledger) {
  return [&ledger](const Edge& e) {
    return (ledger.IsBought(e.id) ? 0.0 : e.cost) + e.length;
  };
}

}  // namespace

std::optional<WeightedPath> GreedyRouter::Plan(VertexId from,
                                               VertexId to) const {
  return ShortestPath(*graph_, ResidualWeight(ledger_), from, to);
}

std::vector<EdgeId> GreedyRouter::Route(int pair, VertexId from,
                                        VertexId to) {
  const std::optional<WeightedPath> path = Plan(from, to);
  if (!path) {
    throw InvalidInput("no path from " + std::to_string(from) + " to " +
                       std::to_string(to));
  }
  ledger_.Route(*graph_, pair, from, to, path->edges);
  return path->edges;
}

GreedySingleSink::GreedySingleSink(const TwoMetricGraph& graph, VertexId root,
                                   SinkSide side)
    : graph_(&graph), root_(root), side_(side) {
  if (!graph.IsValidVertex(root)) throw InvalidInput("root out of range");
  if (side == SinkSide::kSource) reversed_ = graph.Reversed();
}

std::optional<std::vector<EdgeId>> GreedySingleSink::Peek(VertexId v) const {
  if (!graph_->IsValidVertex(v)) throw InvalidInput("terminal out of range");
  const TwoMetricGraph& g = reversed_ ? *reversed_ : *graph_;
  std::optional<WeightedPath> path =
      ShortestPath(g, ResidualWeight(ledger_), v, root_);
  if (!path) return std::nullopt;
  if (reversed_) std::reverse(path->edges.begin(), path->edges.end());
  return std::move(path->edges);
}

std::vector<EdgeId> GreedySingleSink::OnTerminal(int pair, VertexId v) {
  std::optional<std::vector<EdgeId>> path = Peek(v);
  if (!path) {
    throw InvalidInput("terminal " + std::to_string(v) +
                       " is disconnected from root " + std::to_string(root_));
  }
  if (side_ == SinkSide::kSink) {
    ledger_.Route(*graph_, pair, v, root_, *path);
  } else {
    ledger_.Route(*graph_, pair, root_, v, *path);
  }
  return *path;
}

std::unique_ptr<SingleSinkAlg> MakeSingleSink(const std::string& name,
                                              const TwoMetricGraph& graph,
                                              VertexId root, SinkSide side) {
  if (name == "greedy") {
    return std::make_unique<GreedySingleSink>(graph, root, side);
  }
  throw InvalidInput("unknown single-sink algorithm '" + name + "'");
}

int GstInstance::AddNode(int parent_node, double arc_weight) {
  if (parent_node < 0 || parent_node >= num_nodes()) {
    throw InvalidInput("GST parent out of range");
  }
  if (!(arc_weight >= 0.0)) throw InvalidInput("negative GST weight");
  parent.push_back(parent_node);
  weight.push_back(arc_weight);
  return num_nodes() - 1;
}

double GstWeight(const GstInstance& inst, const std::vector<bool>& bought) {
  double total = 0.0;
  for (int v = 0; v < static_cast<int>(bought.size()); ++v) {
    if (bought[v] && v != inst.root) total += inst.weight[v];
  }
  return total;
}

std::vector<int> TreePathToRoot(const GstInstance& inst, int node) {
  std::vector<int> path;
  for (int v = node; v != inst.root; v = inst.parent[v]) {
    if (v < 0) throw IntegrityError("GST node does not reach the root");
    path.push_back(v);
  }
  return path;
}

double TreeGroupGreedy::Residual(int node) const {
  double total = 0.0;
  for (int v : TreePathToRoot(*inst_, node)) {
    if (!IsBought(v)) total += inst_->weight[v];
  }
  return total;
}

std::pair<int, double> TreeGroupGreedy::Peek(int group) const {
  const std::vector<int>& members = inst_->groups.at(group);
  if (members.empty()) throw InvalidInput("empty group");
  int best = -1;
  double best_weight = kInfinity;
  for (int u : members) {
    const double w = Residual(u);
    if (w < best_weight || (w == best_weight && u < best)) {
      best = u;
      best_weight = w;
    }
  }
  return {best, best_weight};
}

int TreeGroupGreedy::Connect(int group) {
  const int member = Peek(group).first;
  bought_.resize(inst_->num_nodes(), false);
  for (int v : TreePathToRoot(*inst_, member)) {
    if (!bought_[v]) {
      bought_[v] = true;
      cost_ += inst_->weight[v];
    }
  }
  return member;
}

}  // namespace bab
