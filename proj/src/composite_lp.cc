#include "bab/composite_lp.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "bab/errors.h"

namespace bab {
namespace {

// Nodes that can reach `target` (backward) or be reached from it (forward)
// over usable arcs.
std::vector<bool> Reachability(const LpSide& side,
                               const std::vector<bool>& usable, int offset,
                               int target, bool backward) {
  std::vector<std::vector<int>> adj(side.num_nodes);
  for (int a = 0; a < static_cast<int>(side.arcs.size()); ++a) {
    if (!usable[offset + a]) continue;
    const LpArc& arc = side.arcs[a];
    if (backward) {
      adj[arc.head].push_back(arc.tail);
    } else {
      adj[arc.tail].push_back(arc.head);
    }
  }
  std::vector<bool> seen(side.num_nodes, false);
  std::deque<int> queue{target};
  seen[target] = true;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = true;
        queue.push_back(v);
      }
    }
  }
  return seen;
}

}  // namespace

LpNetworks NetworksFromLayered(const LayeredGraph& up,
                               const LayeredGraph& down, int n,
                               bool prize_collecting) {
  LpNetworks nets;
  nets.n = n;
  nets.num_roots = up.base_vertices();
  nets.prize_collecting = prize_collecting;
  auto fill = [&](const LayeredGraph& lg, LpSide& side) {
    side.num_nodes = lg.graph().num_vertices();
    for (const Edge& e : lg.graph().edges()) {
      side.arcs.push_back({e.tail, e.head, e.cost, e.length, e.id});
    }
    for (VertexId v = 0; v < lg.base_vertices(); ++v) {
      side.root_node.push_back(lg.RootVertex(v));
      side.terminal_node.push_back(lg.TerminalVertex(v));
    }
  };
  fill(up, nets.up);
  fill(down, nets.down);
  return nets;
}

bool IsTight(double x, double f) { return x - f <= 1e-9 * x + 1e-15; }

bool IsTight(double x, double f_source, double f_sink) {
  return IsTight(x, f_source) || IsTight(x, f_sink);
}

double GrowTight(double x, double cost, double dt) {
  if (cost <= 0.0) return 1.0;
  return std::max(x, std::min(1.0, x * std::exp(dt / cost)));
}

double DefaultKappa(int n) {
  const double lg = DefaultHeight(std::max(2, n));
  return 64.0 * lg * lg * lg;
}

FractionalState::FractionalState(const LpNetworks& nets, double lambda,
                                 LpConfig config)
    : nets_(&nets),
      lambda_(lambda),
      config_(config),
      kappa_(config.kappa > 0 ? config.kappa : DefaultKappa(nets.n)),
      init_(1.0 / std::pow(static_cast<double>(std::max(1, nets.n)), 5)) {
  if (!(lambda > 0.0)) throw InvalidInput("epoch guess must be positive");
  const int m = nets.num_arcs();
  cost_.resize(m);
  length_.resize(m);
  pruned_.resize(m);
  for (int a = 0; a < m; ++a) {
    cost_[a] = nets.arc(a).cost / lambda;
    length_[a] = nets.arc(a).length / lambda;
    pruned_[a] = cost_[a] > 1.0 || length_[a] > 1.0;
  }
  std::vector<bool> usable(m);
  for (int a = 0; a < m; ++a) usable[a] = !pruned_[a];
  const int up_m = static_cast<int>(nets.up.arcs.size());
  up_arcs_.resize(nets.num_roots);
  down_arcs_.resize(nets.num_roots);
  up_reach_.resize(nets.num_roots);
  down_reach_.resize(nets.num_roots);
  x_.resize(nets.num_roots);
  for (int r = 0; r < nets.num_roots; ++r) {
    up_reach_[r] = Reachability(nets.up, usable, 0, nets.up.root_node[r],
                                /*backward=*/true);
    down_reach_[r] = Reachability(nets.down, usable, up_m,
                                  nets.down.root_node[r], /*backward=*/false);
    for (int a = 0; a < up_m; ++a) {
      if (usable[a] && up_reach_[r][nets.up.arcs[a].head]) {
        up_arcs_[r].push_back(a);
      }
    }
    for (int a = up_m; a < m; ++a) {
      if (usable[a] && down_reach_[r][nets.down.arcs[a - up_m].tail]) {
        down_arcs_[r].push_back(a);
      }
    }
    x_[r].assign(m, 0.0);
    for (int a = 0; a < m; ++a) {
      if (usable[a]) {
        x_[r][a] = init_;
        objective_ += cost_[a] * init_;
      }
    }
  }
}

const std::vector<int>& FractionalState::RootArcs(int root,
                                                  Direction side) const {
  return side == Direction::kUp ? up_arcs_[root] : down_arcs_[root];
}

FractionalState::SideView FractionalState::View(int pair, int root,
                                                Direction side) const {
  return ViewFor(pairs_.at(pair).pair, root, side);
}

FractionalState::SideView FractionalState::ViewFor(const TerminalPair& pair,
                                                   int root,
                                                   Direction side) const {
  SideView view;
  view.arcs = &RootArcs(root, side);
  if (side == Direction::kUp) {
    view.source = nets_->up.terminal_node[pair.s];
    view.sink = nets_->up.root_node[root];
    view.num_nodes = nets_->up.num_nodes;
  } else {
    view.source = nets_->down.root_node[root];
    view.sink = nets_->down.terminal_node[pair.t];
    view.num_nodes = nets_->down.num_nodes;
  }
  return view;
}

double FractionalState::PenaltyLength(const PairState& ps) const {
  return ps.pair.penalty.value_or(kInfinity) / 2.0 / lambda_;
}

bool FractionalState::Eligible(const TerminalPair& pair, int root,
                               const std::vector<bool>* usable) const {
  if (nets_->prize_collecting && root == nets_->VirtualRoot()) {
    if (!pair.penalty) return false;
    return usable != nullptr || *pair.penalty / 2.0 / lambda_ <= 1.0;
  }
  const int sn = nets_->up.terminal_node[pair.s];
  const int tn = nets_->down.terminal_node[pair.t];
  if (sn < 0 || tn < 0) return false;
  if (usable == nullptr) {
    return up_reach_[root][sn] && down_reach_[root][tn];
  }
  const int up_m = static_cast<int>(nets_->up.arcs.size());
  return Reachability(nets_->up, *usable, 0, nets_->up.root_node[root],
                      true)[sn] &&
         Reachability(nets_->down, *usable, up_m, nets_->down.root_node[root],
                      false)[tn];
}

std::vector<int> FractionalState::HopPath(const SideView& view) const {
  // Backward BFS from the sink, then the smallest-id arc that stays on a
  // shortest-hop path.
  std::vector<std::vector<int>> in(view.num_nodes);
  for (int a : *view.arcs) in[nets_->arc(a).head].push_back(a);
  std::vector<int> hops(view.num_nodes, -1);
  std::deque<int> queue{view.sink};
  hops[view.sink] = 0;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int a : in[v]) {
      const int u = nets_->arc(a).tail;
      if (hops[u] < 0) {
        hops[u] = hops[v] + 1;
        queue.push_back(u);
      }
    }
  }
  if (hops[view.source] < 0) {
    throw IntegrityError("eligible root lost its initialization path");
  }
  std::vector<std::vector<int>> out(view.num_nodes);
  for (int a : *view.arcs) out[nets_->arc(a).tail].push_back(a);
  std::vector<int> path;
  for (int u = view.source; u != view.sink;) {
    int best = -1;
    for (int a : out[u]) {
      const int v = nets_->arc(a).head;
      if (hops[v] == hops[u] - 1 && (best < 0 || a < best)) best = a;
    }
    path.push_back(best);
    u = nets_->arc(best).head;
  }
  return path;
}

ArrivalStatus FractionalState::ArrivalInit(const TerminalPair& pair) {
  if (pairs_.contains(pair.index)) {
    throw InvalidInput("pair " + std::to_string(pair.index) +
                       " already arrived in this epoch");
  }
  if (!nets_->up.terminal_node.empty() &&
      (pair.s < 0 ||
       pair.s >= static_cast<int>(nets_->up.terminal_node.size()) ||
       pair.t < 0 ||
       pair.t >= static_cast<int>(nets_->down.terminal_node.size()))) {
    throw InvalidInput("pair endpoint outside the LP networks");
  }
  const int total = nets_->TotalRoots();
  PairState ps;
  ps.pair = pair;
  for (int r = 0; r < total; ++r) {
    if (Eligible(pair, r, nullptr)) ps.roots.push_back(r);
  }
  if (ps.roots.empty()) {
    const std::vector<bool> all(nets_->num_arcs(), true);
    for (int r = 0; r < total; ++r) {
      if (Eligible(pair, r, &all)) return ArrivalStatus::kEpochOverflow;
    }
    return ArrivalStatus::kInfeasible;
  }
  ps.z.assign(total, 0.0);
  ps.f.resize(total);
  for (int r : ps.roots) {
    ps.z[r] = init_;
    if (nets_->prize_collecting && r == nets_->VirtualRoot()) {
      ps.f[r] = {init_, init_};
      objective_ += 2.0 * PenaltyLength(ps) * init_;
      continue;
    }
    ps.f[r].assign(nets_->num_arcs(), 0.0);
    for (Direction side : {Direction::kUp, Direction::kDown}) {
      for (int a : HopPath(ViewFor(pair, r, side))) {
        ps.f[r][a] += init_;
        objective_ += length_[a] * init_;
      }
    }
  }
  pairs_[pair.index] = std::move(ps);
  return ArrivalStatus::kSatisfied;
}

const std::vector<int>& FractionalState::eligible_roots(int pair) const {
  return pairs_.at(pair).roots;
}

std::vector<int> FractionalState::TightEdges(int pair, int root) const {
  const PairState& ps = pairs_.at(pair);
  std::vector<int> tight;
  if (root >= nets_->num_roots || ps.f[root].empty()) return tight;
  for (Direction side : {Direction::kUp, Direction::kDown}) {
    for (int a : RootArcs(root, side)) {
      const double f = ps.f[root][a];
      if (f > 0.0 && IsTight(x_[root][a], f)) tight.push_back(a);
    }
  }
  std::sort(tight.begin(), tight.end());
  return tight;
}

FlowNetwork FractionalState::BuildNetwork(const SideView& view, int root,
                                          const std::vector<int>& tight) const {
  FlowNetwork net(view.num_nodes);
  for (int a : *view.arcs) {
    const LpArc& arc = nets_->arc(a);
    double capacity = kInfinity;
    if (std::binary_search(tight.begin(), tight.end(), a) && cost_[a] > 0.0) {
      capacity = x_[root][a] / cost_[a];
    }
    net.AddArc(arc.tail, arc.head, capacity, length_[a]);
  }
  return net;
}

template <typename Fn>
void FractionalState::ForEachCrossing(const PairState& ps, const RootPlan& rp,
                                      Fn&& fn) const {
  const int r = rp.root;
  const double delta = rp.delta.delta;
  if (delta <= 0.0) return;
  if (nets_->prize_collecting && r == nets_->VirtualRoot()) return;
  const bool exponential =
      rp.delta.bound == DeltaBound::kBudget && ps.z[r] > 0.0;
  for (const auto* side : {&rp.up, &rp.down}) {
    const FlowResult& g = side == &rp.up ? rp.delta.up : rp.delta.down;
    for (size_t k = 0; k < side->arcs->size(); ++k) {
      if (g.flow[k] <= 0.0) continue;
      const int a = (*side->arcs)[k];
      if (std::binary_search(rp.tight.begin(), rp.tight.end(), a)) continue;
      const double gap = x_[r][a] - ps.f[r][a];
      if (gap <= 0.0) continue;
      if (exponential) {
        const double rho = delta / ps.z[r];
        fn(a, std::log1p(gap * delta / (g.flow[k] * ps.z[r])) / rho);
      } else {
        fn(a, gap / g.flow[k]);
      }
    }
  }
}

std::vector<FractionalState::RootPlan> FractionalState::Plan(
    const PairState& ps) const {
  std::vector<RootPlan> plan;
  for (int r : ps.roots) {
    RootPlan rp;
    rp.root = r;
    if (nets_->prize_collecting && r == nets_->VirtualRoot()) {
      // Pair-private penalty arcs: free to buy, length q/2 on each side.
      const double l = PenaltyLength(ps);
      const double z = ps.z[r];
      rp.delta.delta = l > 0.0 ? std::min(1.0, z / l) : 1.0;
      rp.delta.bound = rp.delta.delta < 1.0 ? DeltaBound::kBudget
                                            : DeltaBound::kUnit;
      plan.push_back(std::move(rp));
      continue;
    }
    rp.tight = TightEdges(ps.pair.index, r);
    rp.up = ViewFor(ps.pair, r, Direction::kUp);
    rp.down = ViewFor(ps.pair, r, Direction::kDown);
    // Arcs about to fill up within the snap window join the tight set, so
    // that near-tight arcs do not force vanishing steps.
    for (int round = 0; round < 8; ++round) {
      const FlowNetwork up = BuildNetwork(rp.up, r, rp.tight);
      const FlowNetwork down = BuildNetwork(rp.down, r, rp.tight);
      rp.delta = MaxDelta(up, rp.up.source, rp.up.sink, down, rp.down.source,
                          rp.down.sink, ps.z[r]);
      std::vector<int> snapped;
      ForEachCrossing(ps, rp, [&](int a, double t) {
        if (t < config_.snap_window) snapped.push_back(a);
      });
      if (snapped.empty()) break;
      rp.tight.insert(rp.tight.end(), snapped.begin(), snapped.end());
      std::sort(rp.tight.begin(), rp.tight.end());
      rp.tight.erase(std::unique(rp.tight.begin(), rp.tight.end()),
                     rp.tight.end());
    }
    plan.push_back(std::move(rp));
  }
  return plan;
}

double FractionalState::DeltaZ(const RootPlan& rp, double z,
                               double dt) const {
  const double delta = rp.delta.delta;
  if (delta <= 0.0) return 0.0;
  if (rp.delta.bound == DeltaBound::kBudget && z > 0.0) {
    // Budget-bound growth dz/dt = (delta/z) z is integrated exactly.
    return z * std::expm1(delta / z * dt);
  }
  return delta * dt;
}

FractionalState::StepResult FractionalState::Evaluate(
    const PairState& ps, const std::vector<RootPlan>& plan, double dt) const {
  StepResult step;
  for (const RootPlan& rp : plan) {
    const int r = rp.root;
    const double dz = DeltaZ(rp, ps.z[r], dt);
    step.z_add.push_back({r, dz});
    if (nets_->prize_collecting && r == nets_->VirtualRoot()) {
      step.f_add.push_back({r, {{0, dz}, {1, dz}}});
      step.objective_add += 2.0 * PenaltyLength(ps) * dz;
      continue;
    }
    std::vector<std::pair<int, double>> fs;
    if (rp.delta.delta > 0.0 && dz > 0.0) {
      const double scale = dz / rp.delta.delta;
      for (const auto* side : {&rp.up, &rp.down}) {
        const FlowResult& g = side == &rp.up ? rp.delta.up : rp.delta.down;
        for (size_t k = 0; k < side->arcs->size(); ++k) {
          if (g.flow[k] <= 0.0) continue;
          const int a = (*side->arcs)[k];
          const double df = g.flow[k] * scale;
          fs.push_back({a, df});
          step.objective_add += length_[a] * df;
        }
      }
      std::sort(fs.begin(), fs.end());
    }
    std::vector<std::pair<int, double>> xs;
    for (int a : rp.tight) {
      const double x = x_[r][a];
      double next = GrowTight(x, cost_[a], dt);
      // A tight arc's flow accelerates with z, its x with 1/c; over a finite
      // step x follows the flow.
      const auto it = std::lower_bound(fs.begin(), fs.end(),
                                       std::make_pair(a, -kInfinity));
      if (it != fs.end() && it->first == a) {
        next = std::min(1.0, std::max(next, ps.f[r][a] + it->second));
      }
      xs.push_back({a, next});
      step.objective_add += cost_[a] * (next - x);
    }
    step.x_new.push_back({r, std::move(xs)});
    step.f_add.push_back({r, std::move(fs)});
  }
  return step;
}

bool FractionalState::Violates(const PairState& ps,
                               const StepResult& step) const {
  for (const auto& [r, fs] : step.f_add) {
    if (nets_->prize_collecting && r == nets_->VirtualRoot()) continue;
    const std::vector<std::pair<int, double>>* xs = nullptr;
    for (const auto& entry : step.x_new) {
      if (entry.first == r) xs = &entry.second;
    }
    for (const auto& [a, df] : fs) {
      double x = x_[r][a];
      for (const auto& [xa, xv] : *xs) {
        if (xa == a) x = xv;
      }
      if (ps.f[r][a] + df > x + 1e-12 * std::max(1.0, x)) return true;
    }
  }
  for (const auto& [r, dz] : step.z_add) {
    if (ps.z[r] + dz > 1.0 + 1e-9) return true;
  }
  return false;
}

void FractionalState::Commit(PairState& ps, const StepResult& step) {
  for (const auto& [r, xs] : step.x_new) {
    for (const auto& [a, v] : xs) x_[r][a] = v;
  }
  for (const auto& [r, fs] : step.f_add) {
    for (const auto& [a, df] : fs) ps.f[r][a] += df;
  }
  for (const auto& [r, dz] : step.z_add) ps.z[r] += dz;
  objective_ += step.objective_add;
}

double FractionalState::ChooseStep(const PairState& ps,
                                   const std::vector<RootPlan>& plan) const {
  double dt = config_.delta_max;
  // Stop at the first moment a non-tight arc's flow reaches its cap.
  for (const RootPlan& rp : plan) {
    ForEachCrossing(ps, rp, [&dt](int, double t) { dt = std::min(dt, t); });
    if (rp.delta.bound == DeltaBound::kBudget && rp.delta.delta > 0.0 &&
        ps.z[rp.root] > 0.0) {
      dt = std::min(dt, config_.max_growth * ps.z[rp.root] / rp.delta.delta);
      // Stop where delta, linear in z, reaches the unit cap.
      if (rp.delta.delta < 1.0) {
        dt = std::min(dt, ps.z[rp.root] / rp.delta.delta *
                              std::log(1.0 / rp.delta.delta));
      }
    }
  }
  // Land exactly on sum_r z = 1.
  auto total_at = [&](double t) {
    double total = 0.0;
    for (const RootPlan& rp : plan) {
      total += ps.z[rp.root] + DeltaZ(rp, ps.z[rp.root], t);
    }
    return total;
  };
  if (total_at(dt) >= 1.0) {
    double lo = 0.0;
    double hi = dt;
    for (int it = 0; it < 200 && lo < hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (total_at(mid) >= 1.0 ? hi : lo) = mid;
    }
    dt = hi;
  }
  return dt;
}

void FractionalState::GrowthStep(const TerminalPair& pair, double dt) {
  PairState& ps = pairs_.at(pair.index);
  const std::vector<RootPlan> plan = Plan(ps);
  Commit(ps, Evaluate(ps, plan, dt));
}

ArrivalStatus FractionalState::OnArrival(const TerminalPair& pair,
                                         ArrivalTrace* trace) {
  PairState& ps = pairs_.at(pair.index);
  int64_t steps = 0;
  double time = 0.0;
  if (trace) trace->trajectory.clear();
  while (ZTotal(pair.index) < 1.0) {
    if (++steps > config_.max_steps) {
      throw SolverStalled("pair " + std::to_string(pair.index) +
                          " unsatisfied after " +
                          std::to_string(config_.max_steps) + " steps");
    }
    const std::vector<RootPlan> plan = Plan(ps);
    double dt = ChooseStep(ps, plan);
    StepResult step = Evaluate(ps, plan, dt);
    for (int halvings = 0; Violates(ps, step); ++halvings) {
      if (halvings >= 200) {
        throw SolverStalled("line search failed for pair " +
                            std::to_string(pair.index));
      }
      dt *= 0.5;
      step = Evaluate(ps, plan, dt);
    }
    if (objective_ + step.objective_add > kappa_) {
      if (trace) Finish(pair.index, steps, trace);
      return ArrivalStatus::kEpochOverflow;
    }
    Commit(ps, step);
    if (config_.check_invariants) CheckInvariants(pair.index, false);
    if (trace && config_.record_trajectory) {
      time += dt;
      trace->trajectory.push_back({time, ZTotal(pair.index)});
    }
  }
  if (trace) Finish(pair.index, steps, trace);
  return ArrivalStatus::kSatisfied;
}

void FractionalState::Finish(int pair, int64_t steps,
                             ArrivalTrace* trace) const {
  trace->pair = pair;
  trace->steps = steps;
  trace->z_total = ZTotal(pair);
  trace->lp_objective = Objective();
}

double FractionalState::x(int root, int arc) const {
  if (root >= nets_->num_roots) return 0.0;
  return x_[root][arc];
}

double FractionalState::f(int pair, int root, int arc) const {
  const PairState& ps = pairs_.at(pair);
  if (ps.f[root].empty()) return 0.0;
  return ps.f[root][arc];
}

std::vector<int> FractionalState::pair_ids() const {
  std::vector<int> ids;
  for (const auto& entry : pairs_) ids.push_back(entry.first);
  return ids;
}

double FractionalState::z(int pair, int root) const {
  return pairs_.at(pair).z[root];
}

double FractionalState::ZTotal(int pair) const {
  const PairState& ps = pairs_.at(pair);
  double total = 0.0;
  for (int r : ps.roots) total += ps.z[r];
  return total;
}

double FractionalState::Objective() const {
  double total = 0.0;
  const int m = nets_->num_arcs();
  for (int r = 0; r < nets_->num_roots; ++r) {
    for (int a = 0; a < m; ++a) {
      if (!pruned_[a]) total += cost_[a] * x_[r][a];
    }
  }
  for (const auto& [index, ps] : pairs_) {
    for (int r : ps.roots) {
      if (nets_->prize_collecting && r == nets_->VirtualRoot()) {
        total += PenaltyLength(ps) * (ps.f[r][0] + ps.f[r][1]);
        continue;
      }
      for (int a = 0; a < m; ++a) total += length_[a] * ps.f[r][a];
    }
  }
  return total * lambda_;
}

void FractionalState::CheckInvariants(int pair, bool satisfied) const {
  const PairState& ps = pairs_.at(pair);
  auto fail = [&](const std::string& what) {
    throw IntegrityError("pair " + std::to_string(pair) + ": " + what);
  };
  for (int r : ps.roots) {
    const double z = ps.z[r];
    if (z < 0.0 || z > 1.0 + 1e-9) fail("z out of range");
    if (nets_->prize_collecting && r == nets_->VirtualRoot()) {
      if (std::abs(ps.f[r][0] - z) > 1e-7 || std::abs(ps.f[r][1] - z) > 1e-7)
        fail("penalty flow differs from z");
      continue;
    }
    for (Direction side : {Direction::kUp, Direction::kDown}) {
      const SideView view = View(pair, r, side);
      std::vector<double> balance(view.num_nodes, 0.0);
      for (int a : *view.arcs) {
        const double f = ps.f[r][a];
        const double x = x_[r][a];
        if (f < 0.0) fail("negative flow");
        if (x > 1.0 + 1e-9) fail("x above 1");
        if (f > x + 1e-7) {
          fail("flow above x on arc " + std::to_string(a) + " root " +
               std::to_string(r));
        }
        balance[nets_->arc(a).tail] -= f;
        balance[nets_->arc(a).head] += f;
      }
      for (int v = 0; v < view.num_nodes; ++v) {
        double expected = 0.0;
        if (v == view.source) expected = -z;
        if (v == view.sink) expected = z;
        if (view.source == view.sink) expected = 0.0;
        if (std::abs(balance[v] - expected) > 1e-7) fail("conservation");
      }
    }
  }
  if (satisfied && ZTotal(pair) < 1.0 - 1e-7) fail("coverage below 1");
}

OnlineFractionalSolver::OnlineFractionalSolver(const LpNetworks& nets,
                                               LpConfig config)
    : nets_(&nets), config_(config) {}

bool OnlineFractionalSolver::Replay() {
  for (size_t i = 0; i + 1 < history_.size(); ++i) {
    const ArrivalStatus init = state_->ArrivalInit(history_[i]);
    if (init == ArrivalStatus::kEpochOverflow) return false;
    if (init == ArrivalStatus::kInfeasible) {
      throw IntegrityError("replayed pair became infeasible");
    }
    if (state_->OnArrival(history_[i], nullptr) ==
        ArrivalStatus::kEpochOverflow) {
      return false;
    }
  }
  return true;
}

OnlineFractionalSolver::Outcome OnlineFractionalSolver::Arrive(
    const TerminalPair& pair, double lambda0) {
  constexpr int kMaxDoublings = 200;
  Outcome out;
  if (!state_) state_.emplace(*nets_, lambda0, config_);
  history_.push_back(pair);
  for (int doublings = 0;; ++doublings) {
    if (doublings > kMaxDoublings) {
      throw SolverStalled("guess doubling did not converge");
    }
    ArrivalStatus status = state_->ArrivalInit(pair);
    if (status == ArrivalStatus::kInfeasible) {
      history_.pop_back();
      out.status = status;
      out.trace.pair = pair.index;
      return out;
    }
    if (status == ArrivalStatus::kSatisfied) {
      status = state_->OnArrival(pair, &out.trace);
    }
    if (status == ArrivalStatus::kSatisfied) {
      if (config_.check_invariants) state_->CheckInvariants(pair.index, true);
      out.status = status;
      return out;
    }
    // Overflow: double the guess, rebuild the epoch and replay history.
    bool replayed = false;
    while (!replayed) {
      const double next = state_->lambda() * 2.0;
      state_.emplace(*nets_, next, config_);
      ++epoch_;
      out.epoch_changed = true;
      replayed = Replay();
      if (++doublings > kMaxDoublings) {
        throw SolverStalled("guess doubling did not converge");
      }
    }
  }
}

}  // namespace bab
