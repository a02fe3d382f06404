#include <chrono>
#include <cmath>

#include <gtest/gtest.h>

#include "bab/composite_lp.h"
#include "bab/errors.h"
#include "lp_fixtures.h"

namespace bab {
namespace {

using testing::ClosedFormZ;
using testing::ConnectedGraph;
using testing::Layer;
using testing::LayeredNets;
using testing::Rng;
using testing::SinglePath;

TEST(TightEdgesTest, Predicate) {
  EXPECT_TRUE(IsTight(0.5, 0.5, 0.0));
  EXPECT_TRUE(IsTight(0.5, 0.3, 0.5));
  EXPECT_FALSE(IsTight(0.5, 0.3, 0.2));
}

TEST(GrowthStepTest, ExponentialEdgeUpdate) {
  EXPECT_NEAR(GrowTight(0.1, 1.0, std::log(2.0)), 0.2, 1e-15);
  EXPECT_EQ(GrowTight(0.1, 0.0, 1e-9), 1.0);
  EXPECT_EQ(GrowTight(0.9, 0.1, 10.0), 1.0);
}

TEST(EpochInitTest, InitialValuesAndPruning) {
  TwoMetricGraph g(10, true);
  for (int v = 0; v + 1 < 10; ++v) g.AddEdge(v, v + 1, 1, 0);
  g.AddEdge(9, 0, 3, 0);  // c = 3 Lambda
  const LayeredNets ln = Layer(g, 1, 1);
  const FractionalState state(ln.nets, /*lambda=*/1.0, LpConfig{});
  EXPECT_DOUBLE_EQ(state.initial_value(), 1e-5);
  int surviving = 0;
  for (int a = 0; a < ln.nets.num_arcs(); ++a) {
    // Layered costs at h = 1 are shortest (c + l)-path values.
    EXPECT_EQ(state.IsPruned(a), ln.nets.arc(a).cost > 1.0);
    if (!state.IsPruned(a)) {
      ++surviving;
      EXPECT_DOUBLE_EQ(state.x(0, a), 1e-5);
    }
  }
  EXPECT_GT(surviving, 0);
  // Initial objective: every surviving x at 1/n^5 with rescaled cost <= 1.
  const double vars = double(ln.nets.num_roots) * ln.nets.num_arcs();
  EXPECT_LE(state.Objective(), vars / 1e5);
}

TEST(EpochInitTest, EmptyGraphObjectiveIsZero) {
  const TwoMetricGraph g(2, true);
  const LayeredNets ln = Layer(g, 1, 1);
  const FractionalState state(ln.nets, 1.0, LpConfig{});
  EXPECT_EQ(state.Objective(), 0.0);
}

TEST(ArrivalInitTest, StronglyConnectedReachesEveryRoot) {
  Rng rng(1);
  const TwoMetricGraph g = ConnectedGraph(rng, 10, 3);
  const LayeredNets ln = Layer(g, 2, 3);
  FractionalState state(ln.nets, 1e6, LpConfig{});
  const TerminalPair pair{0, 2, 7, std::nullopt};
  ASSERT_EQ(state.ArrivalInit(pair), ArrivalStatus::kSatisfied);
  EXPECT_EQ(state.eligible_roots(0).size(), 10u);
  for (int r = 0; r < 10; ++r) EXPECT_DOUBLE_EQ(state.z(0, r), 1e-5);
  state.CheckInvariants(0, false);
}

TEST(ArrivalInitTest, DisconnectedRootExcluded) {
  TwoMetricGraph g(3, true);
  g.AddEdge(0, 1, 1, 1);
  const LayeredNets ln = Layer(g, 1, 1);
  FractionalState state(ln.nets, 100.0, LpConfig{});
  // Pair (0, 1): root 0 reaches 1, root 1 is reached from 0; root 2 neither.
  ASSERT_EQ(state.ArrivalInit({0, 0, 1, std::nullopt}),
            ArrivalStatus::kSatisfied);
  EXPECT_EQ(state.eligible_roots(0), (std::vector<int>{0, 1}));
  EXPECT_EQ(state.ArrivalInit({1, 1, 0, std::nullopt}),
            ArrivalStatus::kInfeasible);
}

TEST(ArrivalInitTest, PruningOnlyFailureIsOverflow) {
  TwoMetricGraph g(2, true);
  g.AddEdge(0, 1, 50, 0);
  const LayeredNets ln = Layer(g, 1, 1);
  FractionalState state(ln.nets, 1.0, LpConfig{});
  EXPECT_EQ(state.ArrivalInit({0, 0, 1, std::nullopt}),
            ArrivalStatus::kEpochOverflow);
}

TEST(GrowthStepTest, SinglePathMatchesOdeClosedForm) {
  for (double length : {1.0, 0.5, 0.1, 0.02}) {
    for (int hops : {1, 3}) {
      const LpNetworks nets = SinglePath(hops, length, 10);
      LpConfig config;
      config.record_trajectory = true;
      config.check_invariants = true;
      FractionalState state(nets, 1.0, config);
      const TerminalPair pair{0, 0, 0, std::nullopt};
      ASSERT_EQ(state.ArrivalInit(pair), ArrivalStatus::kSatisfied);
      ArrivalTrace trace;
      ASSERT_EQ(state.OnArrival(pair, &trace), ArrivalStatus::kSatisfied);
      ASSERT_FALSE(trace.trajectory.empty());
      for (const auto& [t, z] : trace.trajectory) {
        const double expected = ClosedFormZ(1e-5, length, t);
        EXPECT_LE(std::abs(z - expected), 0.05 * expected)
            << "L=" << length << " t=" << t;
      }
      const double finish = trace.trajectory.back().first;
      const double expected_finish =
          length >= 1.0 ? length * std::log(1e5)
                        : length * std::log(length / 1e-5) + (1.0 - length);
      EXPECT_NEAR(finish, expected_finish, 0.05 * expected_finish);
    }
  }
}

TEST(OnArrivalTest, CloseTerminalsAreCheap) {
  // Root 1 sits between s = 0 and t = 2 on tiny-length arcs.
  TwoMetricGraph g(3, true);
  g.AddEdge(0, 1, 0.001, 0.0001);
  g.AddEdge(1, 2, 0.001, 0.0001);
  const LayeredNets ln = Layer(g, 1, 1);
  LpConfig config;
  config.check_invariants = true;
  FractionalState state(ln.nets, 1.0, config);
  const TerminalPair pair{0, 0, 2, std::nullopt};
  ASSERT_EQ(state.ArrivalInit(pair), ArrivalStatus::kSatisfied);
  const double before = state.Objective();
  ArrivalTrace trace;
  ASSERT_EQ(state.OnArrival(pair, &trace), ArrivalStatus::kSatisfied);
  EXPECT_GE(state.ZTotal(0), 1.0 - 1e-7);
  EXPECT_LT(trace.steps, 400);
  EXPECT_GE(state.Objective(), before);
  EXPECT_LT(state.Objective() - before, 0.05);
}

TEST(OnArrivalTest, GuessTooSmallOverflowsBeforeThreshold) {
  // Opt = 100 over 200 arcs of cost 0.5; guess 1 (100x too small).
  const int n = 201;
  TwoMetricGraph g(n, true);
  for (int v = 0; v + 1 < n; ++v) g.AddEdge(v, v + 1, 0.5, 0.0);
  LpNetworks nets;
  nets.n = 10;
  nets.num_roots = 1;
  nets.up.num_nodes = n;
  for (const Edge& e : g.edges()) {
    nets.up.arcs.push_back({e.tail, e.head, e.cost, e.length, e.id});
  }
  nets.up.root_node = {n - 1};
  nets.up.terminal_node = {0};
  nets.down.num_nodes = 1;
  nets.down.root_node = {0};
  nets.down.terminal_node = {0};
  LpConfig config;
  config.kappa = 4.0;
  FractionalState state(nets, 1.0, config);
  const TerminalPair pair{0, 0, 0, std::nullopt};
  ASSERT_EQ(state.ArrivalInit(pair), ArrivalStatus::kSatisfied);
  EXPECT_EQ(state.OnArrival(pair, nullptr), ArrivalStatus::kEpochOverflow);
  EXPECT_LE(state.Objective(), config.kappa * 1.0 * (1 + 1e-6));
}

TEST(OnArrivalTest, InvariantsAndMonotonicityOnRandomInstances) {
  Rng rng(9);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = rng.Int(5, 9);
    const TwoMetricGraph g = ConnectedGraph(rng, n, 3);
    const int k = 4;
    const LayeredNets ln = Layer(g, k, DefaultHeight(n));
    LpConfig config;
    config.check_invariants = true;
    FractionalState state(ln.nets, 40.0, config);
    double last_objective = state.Objective();
    for (int i = 0; i < k; ++i) {
      const TerminalPair pair{i, rng.Int(0, n - 1), rng.Int(0, n - 1),
                              std::nullopt};
      ASSERT_EQ(state.ArrivalInit(pair), ArrivalStatus::kSatisfied);
      std::vector<double> x_before;
      for (int r = 0; r < n; ++r) {
        for (int a = 0; a < ln.nets.num_arcs(); ++a) {
          x_before.push_back(state.x(r, a));
        }
      }
      const ArrivalStatus status = state.OnArrival(pair, nullptr);
      if (status == ArrivalStatus::kEpochOverflow) break;
      state.CheckInvariants(i, true);
      size_t idx = 0;
      for (int r = 0; r < n; ++r) {
        for (int a = 0; a < ln.nets.num_arcs(); ++a) {
          EXPECT_GE(state.x(r, a), x_before[idx++]);
        }
      }
      EXPECT_GE(state.Objective(), last_objective - 1e-12);
      last_objective = state.Objective();
    }
  }
}

TEST(OnArrivalTest, DeterministicReplay) {
  Rng rng(4);
  const TwoMetricGraph g = ConnectedGraph(rng, 7, 3);
  const LayeredNets ln = Layer(g, 3, 3);
  auto run = [&]() {
    FractionalState state(ln.nets, 30.0, LpConfig{});
    std::vector<double> zs;
    for (int i = 0; i < 3; ++i) {
      const TerminalPair pair{i, i, 6 - i, std::nullopt};
      state.ArrivalInit(pair);
      state.OnArrival(pair, nullptr);
      for (int r = 0; r < 7; ++r) zs.push_back(state.z(i, r));
    }
    zs.push_back(state.Objective());
    return zs;
  };
  EXPECT_EQ(run(), run());
}

TEST(OnlineFractionalSolverTest, DoublesGuessUntilFeasible) {
  Rng rng(12);
  const TwoMetricGraph g = ConnectedGraph(rng, 6, 2);
  const LayeredNets ln = Layer(g, 3, 2);
  OnlineFractionalSolver solver(ln.nets, LpConfig{});
  const auto out = solver.Arrive({0, 0, 3, std::nullopt}, 1e-3);
  EXPECT_EQ(out.status, ArrivalStatus::kSatisfied);
  EXPECT_TRUE(out.epoch_changed);
  EXPECT_GT(solver.epoch(), 0);
  EXPECT_DOUBLE_EQ(solver.lambda(), 1e-3 * std::pow(2.0, solver.epoch()));
  const auto second = solver.Arrive({1, 4, 1, std::nullopt}, 1e-3);
  EXPECT_EQ(second.status, ArrivalStatus::kSatisfied);
  solver.state().CheckInvariants(0, true);
  solver.state().CheckInvariants(1, true);
}

TEST(PrizeCollectingLpTest, ZeroPenaltyIsFree) {
  Rng rng(2);
  const TwoMetricGraph g = ConnectedGraph(rng, 6, 2);
  const LayeredNets ln = Layer(g, 1, 2, /*prize=*/true);
  FractionalState state(ln.nets, 20.0, LpConfig{});
  const TerminalPair pair{0, 0, 3, 0.0};
  ASSERT_EQ(state.ArrivalInit(pair), ArrivalStatus::kSatisfied);
  const int virtual_root = ln.nets.VirtualRoot();
  EXPECT_EQ(state.eligible_roots(0).back(), virtual_root);
  ASSERT_EQ(state.OnArrival(pair, nullptr), ArrivalStatus::kSatisfied);
  state.CheckInvariants(0, true);
  // The penalty root grows at the full unit rate, faster than any real root.
  for (int r = 0; r < virtual_root; ++r) {
    EXPECT_GE(state.z(0, virtual_root), state.z(0, r));
  }
}

TEST(PerformanceSmokeTest, TenVertexSequence) {
  Rng rng(77);
  const TwoMetricGraph g = ConnectedGraph(rng, 10, 5);
  const LayeredNets ln = Layer(g, 6, DefaultHeight(10));
  OnlineFractionalSolver solver(ln.nets, LpConfig{});
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < 6; ++i) {
    solver.Arrive({i, rng.Int(0, 9), rng.Int(0, 9), std::nullopt}, 2.0);
  }
  const double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  RecordProperty("seconds", std::to_string(secs));
  EXPECT_LT(secs, 30.0);
}

}  // namespace
}  // namespace bab
