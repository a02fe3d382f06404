#include "bab/flow.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <string>
#include <utility>

#include "bab/errors.h"

namespace bab {
namespace {

// Residual capacities at or below this are treated as saturated.
constexpr double kResidualEps = 1e-13;

// Residual graph: arc 2a is the forward copy of network arc a, 2a+1 its
// reverse.
class Residual {
 public:
  explicit Residual(const FlowNetwork& net)
      : net_(net), adj_(net.num_nodes()) {
    const int m = net.num_arcs();
    to_.resize(2 * m);
    cap_.resize(2 * m);
    cost_.resize(2 * m);
    for (int a = 0; a < m; ++a) {
      const FlowArc& arc = net.arc(a);
      to_[2 * a] = arc.head;
      cap_[2 * a] = arc.capacity;
      cost_[2 * a] = arc.unit_cost;
      to_[2 * a + 1] = arc.tail;
      cap_[2 * a + 1] = 0.0;
      cost_[2 * a + 1] = -arc.unit_cost;
      adj_[arc.tail].push_back(2 * a);
      adj_[arc.head].push_back(2 * a + 1);
    }
  }

  int num_nodes() const { return net_.num_nodes(); }

  // Dijkstra over reduced costs. Fills parent arcs; returns false when the
  // sink is unreachable.
  bool ShortestAugmentingPath(int source, int sink,
                              std::vector<double>& potential,
                              std::vector<int>& parent) {
    const int n = num_nodes();
    std::vector<double> dist(n, kInfinity);
    std::vector<bool> done(n, false);
    parent.assign(n, -1);
    using Entry = std::pair<double, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> queue;
    dist[source] = 0.0;
    queue.push({0.0, source});
    while (!queue.empty()) {
      const auto [d, u] = queue.top();
      queue.pop();
      if (done[u] || d > dist[u]) continue;
      done[u] = true;
      for (int ra : adj_[u]) {
        if (cap_[ra] <= kResidualEps) continue;
        const int v = to_[ra];
        if (done[v]) continue;
        const double reduced =
            std::max(0.0, cost_[ra] + potential[u] - potential[v]);
        const double nd = d + reduced;
        if (nd < dist[v] || (nd == dist[v] && ra < parent[v])) {
          dist[v] = nd;
          parent[v] = ra;
          queue.push({nd, v});
        }
      }
    }
    if (dist[sink] == kInfinity) return false;
    for (int v = 0; v < n; ++v) {
      if (dist[v] < kInfinity) potential[v] += dist[v];
    }
    return true;
  }

  // Breadth-first augmenting path (fewest arcs, smallest ids first).
  bool BfsPath(int source, int sink, std::vector<int>& parent) const {
    parent.assign(num_nodes(), -1);
    std::vector<bool> seen(num_nodes(), false);
    std::deque<int> queue{source};
    seen[source] = true;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int ra : adj_[u]) {
        const int v = to_[ra];
        if (seen[v] || cap_[ra] <= kResidualEps) continue;
        seen[v] = true;
        parent[v] = ra;
        if (v == sink) return true;
        queue.push_back(v);
      }
    }
    return false;
  }

  std::vector<int> Trace(int source, int sink,
                         const std::vector<int>& parent) const {
    std::vector<int> path;
    for (int v = sink; v != source; v = to_[parent[v] ^ 1]) {
      path.push_back(parent[v]);
    }
    std::reverse(path.begin(), path.end());
    return path;
  }

  double Bottleneck(const std::vector<int>& path) const {
    double b = kInfinity;
    for (int ra : path) b = std::min(b, cap_[ra]);
    return b;
  }

  double PathCost(const std::vector<int>& path) const {
    double c = 0.0;
    for (int ra : path) c += cost_[ra];
    return c;
  }

  void Augment(const std::vector<int>& path, double amount) {
    for (int ra : path) {
      cap_[ra] -= amount;
      cap_[ra ^ 1] += amount;
    }
  }

  FlowResult Extract(double value) const {
    FlowResult r;
    r.value = value;
    r.flow.resize(net_.num_arcs());
    for (int a = 0; a < net_.num_arcs(); ++a) {
      r.flow[a] = cap_[2 * a + 1];
      r.total_cost += r.flow[a] * net_.arc(a).unit_cost;
    }
    return r;
  }

 private:
  const FlowNetwork& net_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> to_;
  std::vector<double> cap_;
  std::vector<double> cost_;
};

FlowResult SuccessiveShortestPaths(const FlowNetwork& net, int source,
                                   int sink, double limit, double budget) {
  Residual residual(net);
  if (limit <= 0.0) return residual.Extract(0.0);
  if (source == sink) return residual.Extract(limit);
  std::vector<double> potential(net.num_nodes(), 0.0);
  std::vector<int> parent;
  double value = 0.0;
  double spent = 0.0;
  while (value < limit &&
         residual.ShortestAugmentingPath(source, sink, potential, parent)) {
    const std::vector<int> path = residual.Trace(source, sink, parent);
    const double unit = std::max(0.0, residual.PathCost(path));
    double amount = std::min(residual.Bottleneck(path), limit - value);
    bool out_of_budget = false;
    if (unit > 0.0 && budget < kInfinity) {
      const double affordable = std::max(0.0, budget - spent) / unit;
      if (affordable <= amount) {
        amount = affordable;
        out_of_budget = true;
      }
    }
    if (amount == kInfinity) return residual.Extract(kInfinity);
    if (amount <= 0.0) break;
    residual.Augment(path, amount);
    value += amount;
    spent += amount * unit;
    if (out_of_budget) break;
  }
  return residual.Extract(value);
}

}  // namespace

int FlowNetwork::AddArc(int tail, int head, double capacity,
                        double unit_cost) {
  if (tail < 0 || tail >= num_nodes_ || head < 0 || head >= num_nodes_) {
    throw InvalidInput("flow arc endpoint out of range");
  }
  if (!(capacity >= 0.0) || !(unit_cost >= 0.0)) {
    throw InvalidInput("flow arcs need nonnegative capacity and cost");
  }
  arcs_.push_back({tail, head, capacity, unit_cost});
  return num_arcs() - 1;
}

void FlowNetwork::set_capacity(int a, double capacity) {
  if (!(capacity >= 0.0)) throw InvalidInput("negative capacity");
  arcs_[a].capacity = capacity;
}

std::optional<FlowResult> MinCostFlow(const FlowNetwork& net, int source,
                                      int sink, double target) {
  if (!(target >= 0.0) || target == kInfinity) {
    throw InvalidInput("flow target must be finite and nonnegative");
  }
  FlowResult r = SuccessiveShortestPaths(net, source, sink, target, kInfinity);
  if (r.value < target - kFlowTolerance) return std::nullopt;
  return r;
}

FlowResult MaxFlow(const FlowNetwork& net, int source, int sink,
                   double limit) {
  Residual residual(net);
  if (source == sink) return residual.Extract(limit);
  std::vector<int> parent;
  double value = 0.0;
  while (value < limit && residual.BfsPath(source, sink, parent)) {
    const std::vector<int> path = residual.Trace(source, sink, parent);
    const double amount = std::min(residual.Bottleneck(path), limit - value);
    if (amount == kInfinity) return residual.Extract(kInfinity);
    residual.Augment(path, amount);
    value += amount;
  }
  return residual.Extract(value);
}

FlowResult BudgetedMaxFlow(const FlowNetwork& net, int source, int sink,
                           double limit, double budget) {
  if (!(budget >= 0.0)) throw InvalidInput("negative flow budget");
  return SuccessiveShortestPaths(net, source, sink, limit, budget);
}

DeltaResult MaxDelta(const FlowNetwork& up, int up_source, int up_sink,
                     const FlowNetwork& down, int down_source, int down_sink,
                     double budget) {
  DeltaResult out;
  FlowResult up_flow = BudgetedMaxFlow(up, up_source, up_sink, 1.0, budget);
  FlowResult down_flow =
      BudgetedMaxFlow(down, down_source, down_sink, 1.0, budget);
  out.delta = std::clamp(std::min(up_flow.value, down_flow.value), 0.0, 1.0);

  auto budget_bound = [&](const FlowResult& f) {
    return f.total_cost >= budget - 1e-12 * std::max(1.0, budget);
  };
  if (out.delta >= 1.0) {
    out.bound = DeltaBound::kUnit;
  } else {
    const bool up_binds = up_flow.value <= out.delta;
    const bool down_binds = down_flow.value <= out.delta;
    const bool by_budget = (up_binds && budget_bound(up_flow)) ||
                           (down_binds && budget_bound(down_flow));
    out.bound = by_budget ? DeltaBound::kBudget : DeltaBound::kCapacity;
  }

  auto fit = [&](const FlowNetwork& net, int s, int t, FlowResult& f) {
    if (f.value <= out.delta) return;
    // Deterministic SSP reproduces the prefix of the earlier run.
    auto exact = MinCostFlow(net, s, t, out.delta);
    if (!exact) throw IntegrityError("max delta refit lost feasibility");
    f = std::move(*exact);
  };
  fit(up, up_source, up_sink, up_flow);
  fit(down, down_source, down_sink, down_flow);
  if (out.delta == 0.0) {
    up_flow = FlowResult{0.0, std::vector<double>(up.num_arcs(), 0.0), 0.0};
    down_flow =
        FlowResult{0.0, std::vector<double>(down.num_arcs(), 0.0), 0.0};
  }
  out.up = std::move(up_flow);
  out.down = std::move(down_flow);
  return out;
}

}  // namespace bab
