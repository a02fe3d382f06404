#pragma once

// Min-cost flow and the auxiliary "maximize Delta" problem solved for every
// root during fractional growth.

#include <optional>
#include <vector>

#include "bab/graph.h"

namespace bab {

struct FlowArc {
  int tail = 0;
  int head = 0;
  double capacity = kInfinity;
  double unit_cost = 0.0;
};

class FlowNetwork {
 public:
  FlowNetwork() = default;
  explicit FlowNetwork(int num_nodes) : num_nodes_(num_nodes) {}

  // Throws InvalidInput on negative capacity/cost or bad endpoints.
  int AddArc(int tail, int head, double capacity, double unit_cost);

  int num_nodes() const { return num_nodes_; }
  int num_arcs() const { return static_cast<int>(arcs_.size()); }
  const FlowArc& arc(int a) const { return arcs_[a]; }
  const std::vector<FlowArc>& arcs() const { return arcs_; }
  void set_capacity(int a, double capacity);

 private:
  int num_nodes_ = 0;
  std::vector<FlowArc> arcs_;
};

struct FlowResult {
  double value = 0.0;
  std::vector<double> flow;  // per arc
  double total_cost = 0.0;
};

// Feasibility slack for flow values.
inline constexpr double kFlowTolerance = 1e-9;

// Exactly `target` units from source to sink at minimum cost, or nullopt if
// the max flow falls short of target - kFlowTolerance. Successive shortest
// paths with Dijkstra potentials; deterministic for a fixed network.
std::optional<FlowResult> MinCostFlow(const FlowNetwork& net, int source,
                                      int sink, double target);

// Maximum flow, stopped early at `limit`. May return kInfinity when an
// uncapacitated path exists and limit is infinite.
FlowResult MaxFlow(const FlowNetwork& net, int source, int sink,
                   double limit = kInfinity);

// Largest value v <= limit whose min-cost flow costs at most `budget`, with
// its flow. Cost is a convex piecewise-linear function of v, so this is one
// successive-shortest-path pass that stops when the budget runs out.
FlowResult BudgetedMaxFlow(const FlowNetwork& net, int source, int sink,
                           double limit, double budget);

enum class DeltaBound { kUnit, kBudget, kCapacity };

struct DeltaResult {
  double delta = 0.0;
  FlowResult up;
  FlowResult down;
  DeltaBound bound = DeltaBound::kCapacity;
};

// Largest Delta in [0, 1] such that each network carries Delta units from
// its source to its sink with l-cost at most `budget`. Unit costs are l_e;
// capacities encode the tight-edge limits. Disconnection yields Delta = 0.
DeltaResult MaxDelta(const FlowNetwork& up, int up_source, int up_sink,
                     const FlowNetwork& down, int down_source, int down_sink,
                     double budget);

}  // namespace bab
