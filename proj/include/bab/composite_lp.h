#pragma once

// Online fractional solver for the composite LP: pairs choose roots through
// assignment variables z_ir, and every root hosts a single-sink flow LP on the
// up side (s_i -> r) and a single-source flow LP on the down side (r -> t_i),
// with per-root edge variables x^r_e capping every commodity's flow.

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "bab/flow.h"
#include "bab/graph.h"
#include "bab/instance.h"
#include "bab/layering.h"

namespace bab {

struct LpArc {
  int tail = 0;
  int head = 0;
  double cost = 0.0;
  double length = 0.0;
  EdgeId source_edge = kNoEdge;  // edge of the graph this side was built from
};

// One side of the composite LP as a flow network over its own node ids.
struct LpSide {
  int num_nodes = 0;
  std::vector<LpArc> arcs;
  std::vector<int> root_node;      // by root index
  std::vector<int> terminal_node;  // by working-graph vertex, -1 if absent
};

struct LpNetworks {
  LpSide up;
  LpSide down;
  int num_roots = 0;
  // Number of vertices n used for the 1/n^5 initialization.
  int n = 0;
  // Adds a virtual root whose only arcs are pair-private penalty arcs.
  bool prize_collecting = false;

  int num_arcs() const {
    return static_cast<int>(up.arcs.size() + down.arcs.size());
  }
  // Global arc ids: up arcs first, then down arcs.
  bool IsUpArc(int arc) const {
    return arc < static_cast<int>(up.arcs.size());
  }
  const LpArc& arc(int global) const {
    return IsUpArc(global) ? up.arcs[global]
                           : down.arcs[global - up.arcs.size()];
  }
  int VirtualRoot() const { return num_roots; }
  int TotalRoots() const { return num_roots + (prize_collecting ? 1 : 0); }
};

// Roots are the level-0 copies of every vertex; terminals sit on level h.
LpNetworks NetworksFromLayered(const LayeredGraph& up,
                               const LayeredGraph& down, int n,
                               bool prize_collecting);

struct LpConfig {
  double kappa = 0.0;        // <= 0 selects DefaultKappa(n)
  double delta_max = 0.05;   // largest continuous-time step
  // Non-tight arcs whose flow would reach x within this time count as tight.
  double snap_window = 0.02;
  // Budget-bound z grows by at most exp(max_growth) per step.
  double max_growth = 0.5;
  int64_t max_steps = 1000000;
  bool check_invariants = false;  // verify after every step
  bool record_trajectory = false;  // fill ArrivalTrace::trajectory
};

// Tightness predicate: x equals the source- or sink-side flow, within a
// relative 1e-9.
bool IsTight(double x, double f);
bool IsTight(double x, double f_source, double f_sink);

// x after growing at rate x / cost for dt, capped at 1. Zero-cost edges
// jump to 1.
double GrowTight(double x, double cost, double dt);

// 64 * ceil(log2 n)^3.
double DefaultKappa(int n);

enum class ArrivalStatus { kSatisfied, kEpochOverflow, kInfeasible };

struct ArrivalTrace {
  int pair = 0;
  int64_t steps = 0;
  double z_total = 0.0;
  double lp_objective = 0.0;
  // (elapsed continuous time, sum_r z_ir) after every step.
  std::vector<std::pair<double, double>> trajectory;
};

// Fractional state of one epoch. All parameters are rescaled by 1/lambda;
// arcs with rescaled cost or length above 1 are pruned.
class FractionalState {
 public:
  FractionalState(const LpNetworks& nets, double lambda, LpConfig config);

  const LpNetworks& networks() const { return *nets_; }
  double lambda() const { return lambda_; }
  double initial_value() const { return init_; }
  double kappa() const { return kappa_; }

  bool IsPruned(int arc) const { return pruned_[arc]; }

  // Roots reachable from s_i on the up side and reaching t_i on the down
  // side, each seeded with z = 1/n^5 and one shortest-hop path of flow.
  // kEpochOverflow when only pruning cut every root off, kInfeasible when no
  // root works even unpruned.
  ArrivalStatus ArrivalInit(const TerminalPair& pair);
  const std::vector<int>& eligible_roots(int pair) const;

  // Grows the pair's variables until sum_r z_ir >= 1.
  ArrivalStatus OnArrival(const TerminalPair& pair, ArrivalTrace* trace);

  // One step of fixed length dt: tight edges grow, flows follow max_delta.
  void GrowthStep(const TerminalPair& pair, double dt);

  // Arcs of root r tight for the pair (x <= f within relative 1e-9).
  std::vector<int> TightEdges(int pair, int root) const;

  double x(int root, int arc) const;
  double f(int pair, int root, int arc) const;
  double z(int pair, int root) const;
  double ZTotal(int pair) const;
  bool HasPair(int pair) const { return pairs_.contains(pair); }
  std::vector<int> pair_ids() const;

  // Composite objective in original units, recomputed from scratch.
  double Objective() const;

  // Global arc ids of root r's up (down) network.
  const std::vector<int>& RootArcs(int root, Direction side) const;
  // Arc list and endpoints used for the pair's flow at root r on one side.
  struct SideView {
    const std::vector<int>* arcs = nullptr;  // global ids
    int source = 0;
    int sink = 0;
    int num_nodes = 0;
  };
  SideView View(int pair, int root, Direction side) const;

  // Throws IntegrityError on a violated invariant: bounds, conservation
  // (1e-7), f <= x + 1e-7, and, when `satisfied`, sum_r z >= 1 - 1e-7.
  void CheckInvariants(int pair, bool satisfied) const;

 private:
  struct PairState {
    TerminalPair pair;
    std::vector<int> roots;               // R_i
    std::vector<double> z;                // by root index (TotalRoots)
    std::vector<std::vector<double>> f;   // by root, dense over global arcs
  };
  struct RootPlan {
    int root = 0;
    std::vector<int> tight;
    DeltaResult delta;
    SideView up;
    SideView down;
  };
  struct StepResult {
    std::vector<std::pair<int, std::vector<std::pair<int, double>>>> x_new;
    std::vector<std::pair<int, std::vector<std::pair<int, double>>>> f_add;
    std::vector<std::pair<int, double>> z_add;
    double objective_add = 0.0;
  };

  double PenaltyLength(const PairState& ps) const;
  void Finish(int pair, int64_t steps, ArrivalTrace* trace) const;
  // `usable` == nullptr uses this epoch's pruned reachability.
  bool Eligible(const TerminalPair& pair, int root,
                const std::vector<bool>* usable) const;
  SideView ViewFor(const TerminalPair& pair, int root, Direction side) const;
  std::vector<int> HopPath(const SideView& view) const;
  std::vector<RootPlan> Plan(const PairState& ps) const;
  StepResult Evaluate(const PairState& ps, const std::vector<RootPlan>& plan,
                      double dt) const;
  bool Violates(const PairState& ps, const StepResult& step) const;
  void Commit(PairState& ps, const StepResult& step);
  double ChooseStep(const PairState& ps,
                    const std::vector<RootPlan>& plan) const;
  double DeltaZ(const RootPlan& rp, double z, double dt) const;
  // Calls fn(arc, time until its flow reaches x) for every non-tight arc
  // carrying flow in the plan.
  template <typename Fn>
  void ForEachCrossing(const PairState& ps, const RootPlan& rp,
                       Fn&& fn) const;
  FlowNetwork BuildNetwork(const SideView& view, int root,
                           const std::vector<int>& tight) const;

  const LpNetworks* nets_;
  double lambda_;
  LpConfig config_;
  double kappa_;
  double init_;
  std::vector<double> cost_;    // rescaled, by global arc
  std::vector<double> length_;  // rescaled, by global arc
  std::vector<bool> pruned_;
  std::vector<std::vector<int>> up_arcs_;    // by root
  std::vector<std::vector<int>> down_arcs_;  // by root
  std::vector<std::vector<bool>> up_reach_;    // nodes reaching the root
  std::vector<std::vector<bool>> down_reach_;  // nodes reached from the root
  std::vector<std::vector<double>> x_;       // by root, dense
  std::map<int, PairState> pairs_;
  double objective_ = 0.0;  // running, rescaled
};

// Guess-doubling wrapper: keeps the arrival history and restarts the epoch
// with a doubled guess whenever the epoch overflows.
class OnlineFractionalSolver {
 public:
  OnlineFractionalSolver(const LpNetworks& nets, LpConfig config);

  struct Outcome {
    ArrivalStatus status = ArrivalStatus::kSatisfied;
    bool epoch_changed = false;
    ArrivalTrace trace;
  };

  // First call fixes the initial guess lambda0 (> 0).
  Outcome Arrive(const TerminalPair& pair, double lambda0);

  const FractionalState& state() const { return *state_; }
  int epoch() const { return epoch_; }
  double lambda() const { return state_ ? state_->lambda() : 0.0; }

 private:
  bool Replay();

  const LpNetworks* nets_;
  LpConfig config_;
  std::optional<FractionalState> state_;
  std::vector<TerminalPair> history_;
  int epoch_ = 0;
};

}  // namespace bab
