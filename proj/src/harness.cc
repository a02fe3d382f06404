#include "bab/harness.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <memory>

#include <spdlog/spdlog.h>

#include "bab/composite_lp.h"
#include "bab/errors.h"
#include "bab/layering.h"
#include "bab/prize_collecting.h"
#include "bab/single_sink.h"

namespace bab {
namespace {

std::string Num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string OptNum(const std::optional<double>& v) {
  return v ? Num(*v) : std::string();
}

double InitialGuess(const TwoMetricGraph& g, const TerminalPair& pair) {
  double guess = 0.0;
  if (pair.s != pair.t) {
    guess = ShortestPath(g, CostPlusLength, pair.s, pair.t)->weight;
  }
  if (pair.penalty) guess = std::min(guess, *pair.penalty);
  if (guess > 0.0) return guess;
  double smallest = kInfinity;
  for (const Edge& e : g.edges()) {
    if (e.cost > 0.0) smallest = std::min(smallest, e.cost);
    if (e.length > 0.0) smallest = std::min(smallest, e.length);
  }
  return smallest < kInfinity ? 1e-3 * smallest : 1.0;
}

// Per-root single-sink and single-source instances; paths are returned as
// working-graph walks s -> r -> t.
class Dispatcher {
 public:
  virtual ~Dispatcher() = default;
  virtual std::optional<std::vector<EdgeId>> Peek(int root,
                                                  const TerminalPair& p) = 0;
  virtual void Commit(int root, const TerminalPair& p) = 0;
  virtual double LayeredCost() const = 0;
  virtual double PullbackCost(const TwoMetricGraph& g) const = 0;
};

std::vector<EdgeId> Concat(std::vector<EdgeId> a,
                           const std::vector<EdgeId>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

class LayeredDispatcher : public Dispatcher {
 public:
  LayeredDispatcher(const LayeredGraph& up, const LayeredGraph& down,
                    std::string alg)
      : up_(&up), down_(&down), alg_(std::move(alg)) {}

  std::optional<std::vector<EdgeId>> Peek(int root,
                                          const TerminalPair& p) override {
    Instances& inst = Get(root);
    const auto up_path = inst.up->Peek(up_->TerminalVertex(p.s));
    const auto down_path = inst.down->Peek(down_->TerminalVertex(p.t));
    if (!up_path || !down_path) return std::nullopt;
    return Concat(up_->PullBackPath(*up_path),
                  down_->PullBackPath(*down_path));
  }

  void Commit(int root, const TerminalPair& p) override {
    Instances& inst = Get(root);
    inst.up->OnTerminal(p.index, up_->TerminalVertex(p.s));
    inst.down->OnTerminal(p.index, down_->TerminalVertex(p.t));
  }

  double LayeredCost() const override {
    double total = 0.0;
    for (const auto& [root, inst] : instances_) {
      total += inst.up->cost().total + inst.down->cost().total;
    }
    return total;
  }

  double PullbackCost(const TwoMetricGraph& g) const override {
    double total = 0.0;
    for (const auto& [root, inst] : instances_) {
      total += SolutionCost(g, PullBack(*up_, g, inst.up->ledger())).total;
      total +=
          SolutionCost(g, PullBack(*down_, g, inst.down->ledger())).total;
    }
    return total;
  }

 private:
  struct Instances {
    std::unique_ptr<SingleSinkAlg> up;
    std::unique_ptr<SingleSinkAlg> down;
  };

  Instances& Get(int root) {
    auto it = instances_.find(root);
    if (it == instances_.end()) {
      Instances inst;
      inst.up = MakeSingleSink(alg_, up_->graph(), up_->RootVertex(root),
                               SinkSide::kSink);
      inst.down = MakeSingleSink(alg_, down_->graph(),
                                 down_->RootVertex(root), SinkSide::kSource);
      it = instances_.emplace(root, std::move(inst)).first;
    }
    return it->second;
  }

  const LayeredGraph* up_;
  const LayeredGraph* down_;
  std::string alg_;
  std::map<int, Instances> instances_;
};

// Group Steiner tree instances on the two trees of every root of H.
class ForestDispatcher : public Dispatcher {
 public:
  explicit ForestDispatcher(const JunctionForest& h) : h_(&h) {}

  std::optional<std::vector<EdgeId>> Peek(int root,
                                          const TerminalPair& p) override {
    std::vector<EdgeId> walk;
    for (Direction side : {Direction::kUp, Direction::kDown}) {
      Tree& tree = Get(root, side);
      const int group = Group(tree, p, side);
      if (tree.mapping.instance.groups[group].empty()) return std::nullopt;
      const int member = tree.alg->Peek(group).first;
      const std::vector<EdgeId> h_path =
          GstMemberPath(*h_, tree.mapping, member);
      walk = Concat(std::move(walk), h_->PullBackPath(h_path));
    }
    return walk;
  }

  void Commit(int root, const TerminalPair& p) override {
    for (Direction side : {Direction::kUp, Direction::kDown}) {
      Tree& tree = Get(root, side);
      const int member = tree.alg->Connect(Group(tree, p, side));
      const VertexId junction = tree.mapping.junction;
      const bool up = side == Direction::kUp;
      tree.ledger.Route(h_->graph(), p.index,
                        up ? h_->SourceTerminal(p.s) : junction,
                        up ? junction : h_->SinkTerminal(p.t),
                        GstMemberPath(*h_, tree.mapping, member));
    }
  }

  double LayeredCost() const override {
    double total = 0.0;
    for (const auto& [key, tree] : trees_) total += tree->alg->cost();
    return total;
  }

  double PullbackCost(const TwoMetricGraph& g) const override {
    double total = 0.0;
    for (const auto& [key, tree] : trees_) {
      total += SolutionCost(g, PullBackH(*h_, g, tree->ledger)).total;
    }
    return total;
  }

 private:
  struct Tree {
    GstMapping mapping;
    std::unique_ptr<TreeGroupGreedy> alg;
    std::map<int, int> group_of_pair;
    SolutionLedger ledger;  // in H
  };

  Tree& Get(int root, Direction side) {
    auto& slot = trees_[{root, side == Direction::kUp ? 0 : 1}];
    if (!slot) {
      slot = std::make_unique<Tree>();
      slot->mapping = MapToGst(*h_, h_->TreeRoot(root, side), {});
      slot->alg = std::make_unique<TreeGroupGreedy>(slot->mapping.instance);
    }
    return *slot;
  }

  int Group(Tree& tree, const TerminalPair& p, Direction side) {
    auto it = tree.group_of_pair.find(p.index);
    if (it != tree.group_of_pair.end()) return it->second;
    const VertexId w = side == Direction::kUp ? p.s : p.t;
    const int group = AddGstTerminal(*h_, tree.mapping, p.index, w);
    tree.group_of_pair.emplace(p.index, group);
    return group;
  }

  const JunctionForest* h_;
  std::map<std::pair<int, int>, std::unique_ptr<Tree>> trees_;
};

}  // namespace

std::optional<double> RunReport::ratio() const {
  if (!opt) return std::nullopt;
  if (*opt > 0.0) return total / *opt;
  return total > 0.0 ? kInfinity : 1.0;
}

double RunReport::fallback_rate() const {
  int routed = 0;
  for (const ArrivalRow& row : rows) {
    routed += row.outcome == "assigned" || row.outcome == "fallback";
  }
  return routed == 0 ? 0.0 : static_cast<double>(fallbacks) / routed;
}

RunReport RunOnline(const Instance& instance, const RunConfig& config) {
  const TwoMetricGraph& g = instance.graph;
  const Mode mode = config.mode.value_or(instance.mode);
  const bool prize = mode == Mode::kPrize;
  const bool directed = mode == Mode::kDirected;
  const int n = g.num_vertices();
  const int k = static_cast<int>(instance.pairs.size());
  if (n == 0) throw InvalidInput("empty graph");
  if (prize) {
    for (const TerminalPair& p : instance.pairs) {
      if (!p.penalty) throw InvalidInput("prize mode requires penalties");
    }
  }

  RunReport report;
  report.mode = ModeName(mode);
  report.n = instance.input_vertices > 0 ? instance.input_vertices : n;
  report.k = k;

  const int h = config.h.value_or(directed ? 2 : DefaultHeight(n));
  const LayeredGraph up = BuildLayered(g, std::max(k, 1), h, Direction::kUp);
  const LayeredGraph down =
      BuildLayered(g, std::max(k, 1), h, Direction::kDown);
  std::optional<JunctionForest> forest;
  LpNetworks nets;
  std::unique_ptr<Dispatcher> dispatcher;
  if (directed) {
    forest.emplace(BuildH(up, down, config.node_budget));
    nets = NetworksFromH(*forest, n, false);
    dispatcher = std::make_unique<ForestDispatcher>(*forest);
  } else {
    nets = NetworksFromLayered(up, down, n, false);
    MakeSingleSink(config.ss_alg, g, 0, SinkSide::kSink);  // validates name
    dispatcher =
        std::make_unique<LayeredDispatcher>(up, down, config.ss_alg);
  }
  if (prize) nets = AugmentWithPenalties(std::move(nets), instance.pairs);

  LpConfig lp;
  lp.kappa = config.kappa;
  lp.delta_max = config.delta_max;
  lp.check_invariants = config.check_invariants;
  OnlineFractionalSolver solver(nets, lp);
  std::map<int, ThresholdDraw> draws;
  PenaltyAccount penalties;
  SolutionLedger& ledger = report.ledger;
  double lambda0 = 0.0;
  double spent = 0.0;

  auto input_vertex = [&](VertexId v) {
    return instance.node_split ? SplitGraph::Original(v) : v;
  };

  for (const TerminalPair& pair : instance.pairs) {
    ArrivalRow row;
    row.pair = pair.index;
    row.s = input_vertex(pair.s);
    row.t = input_vertex(pair.t);
    row.epoch = solver.epoch();
    const double before = spent;
    auto drop = [&] {
      penalties.Drop(pair);
      row.outcome = "dropped";
      row.penalty = *pair.penalty;
      ++report.dropped;
    };
    auto route = [&](std::vector<EdgeId> walk) {
      ledger.Route(g, pair.index, pair.s, pair.t, std::move(walk));
    };

    const bool reachable =
        pair.s == pair.t || ShortestPath(g, UnitHop, pair.s, pair.t);
    if (!reachable) {
      if (prize) {
        drop();
      } else {
        row.outcome = "infeasible";
        ++report.infeasible;
        spdlog::warn("pair {} ({} -> {}) is unreachable", pair.index, row.s,
                     row.t);
      }
    } else {
      if (lambda0 == 0.0) lambda0 = InitialGuess(g, pair);
      const OnlineFractionalSolver::Outcome arrival =
          solver.Arrive(pair, lambda0);
      row.epoch = solver.epoch();
      AssignmentEntry entry;
      if (arrival.status == ArrivalStatus::kSatisfied) {
        auto it = draws.find(row.epoch);
        if (it == draws.end()) {
          ThresholdDraw draw = DrawThresholds(
              nets.TotalRoots(), n, EpochSeed(config.seed, row.epoch));
          if (config.fixed_threshold) {
            std::fill(draw.tau.begin(), draw.tau.end(),
                      *config.fixed_threshold);
          }
          it = draws.emplace(row.epoch, std::move(draw)).first;
        }
        entry = Assign(solver.state(), it->second, pair.index);
      }
      report.assignment.Record(pair.index, entry);
      row.root = entry.root;
      row.z = entry.z;
      row.tau = entry.tau;

      std::optional<std::vector<EdgeId>> walk;
      if (entry.outcome == Outcome::kAssigned) {
        walk = dispatcher->Peek(entry.root, pair);
        if (!walk) throw IntegrityError("assigned root cannot serve the pair");
      } else if (entry.outcome == Outcome::kFallback) {
        walk = pair.s == pair.t
                   ? std::vector<EdgeId>{}
                   : ShortestPath(g, CostPlusLength, pair.s, pair.t)->edges;
      }
      if (entry.outcome == Outcome::kDropped ||
          !WorthRouting(pair, ledger.MarginalCost(g, *walk))) {
        drop();
      } else if (entry.outcome == Outcome::kAssigned) {
        dispatcher->Commit(entry.root, pair);
        route(std::move(*walk));
        row.outcome = "assigned";
      } else {
        route(std::move(*walk));
        row.outcome = "fallback";
        ++report.fallbacks;
      }
    }
    spent = SolutionCost(g, ledger).total + penalties.total();
    row.marginal = spent - before;
    row.cumulative = spent;
    report.rows.push_back(std::move(row));
  }

  const CostBreakdown cost = SolutionCost(g, ledger);
  report.buy = cost.buy;
  report.length = cost.length;
  report.penalty = penalties.total();
  report.total = cost.total + report.penalty;
  report.epochs = solver.epoch() + 1;
  report.layered_cost = dispatcher->LayeredCost();
  report.pullback_cost = dispatcher->PullbackCost(g);

  if (config.oracle) {
    std::vector<TerminalPair> served;
    for (const TerminalPair& p : instance.pairs) {
      if (prize || p.s == p.t || ShortestPath(g, UnitHop, p.s, p.t)) {
        served.push_back(p);
      }
    }
    if (prize) {
      report.opt = PrizeCollectingOpt(g, served, false, config.oracle_budget);
      report.junction_opt =
          PrizeCollectingOpt(g, served, true, config.oracle_budget);
    } else {
      report.opt = OfflineOpt(g, served, config.oracle_budget).value;
      report.junction_opt = JunctionOpt(g, served, config.oracle_budget);
      report.lp_lb = LpLowerBound(g, served, config.oracle_budget);
    }
  }
  return report;
}

void WriteReportCsv(const RunReport& report, std::ostream& out) {
  out << "pair,s,t,outcome,root,epoch,z_value,tau,marginal,cumulative,"
         "penalty\n";
  for (const ArrivalRow& row : report.rows) {
    out << row.pair << ',' << row.s << ',' << row.t << ',' << row.outcome
        << ',' << row.root << ',' << row.epoch << ',' << Num(row.z) << ','
        << Num(row.tau) << ',' << Num(row.marginal) << ','
        << Num(row.cumulative) << ',' << Num(row.penalty) << '\n';
  }
  out << "# mode=" << report.mode << '\n'
      << "# n=" << report.n << '\n'
      << "# k=" << report.k << '\n'
      << "# buy=" << Num(report.buy) << '\n'
      << "# length=" << Num(report.length) << '\n'
      << "# penalty=" << Num(report.penalty) << '\n'
      << "# total=" << Num(report.total) << '\n'
      << "# fallbacks=" << report.fallbacks << '\n'
      << "# dropped=" << report.dropped << '\n'
      << "# infeasible=" << report.infeasible << '\n'
      << "# epochs=" << report.epochs << '\n'
      << "# layered_cost=" << Num(report.layered_cost) << '\n'
      << "# pullback_cost=" << Num(report.pullback_cost) << '\n';
  if (report.opt) {
    out << "# opt=" << Num(*report.opt) << '\n'
        << "# junction_opt=" << OptNum(report.junction_opt) << '\n'
        << "# lp_lb=" << OptNum(report.lp_lb) << '\n'
        << "# ratio=" << OptNum(report.ratio()) << '\n';
  }
}

}  // namespace bab
