#include <cmath>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "bab/errors.h"
#include "bab/flow.h"
#include "flow_oracle.h"
#include "test_util.h"

namespace bab {
namespace {

using testing::Rng;

void ExpectValidFlow(const FlowNetwork& net, const FlowResult& r, int s,
                     int t) {
  std::vector<double> balance(net.num_nodes(), 0.0);
  double cost = 0.0;
  for (int a = 0; a < net.num_arcs(); ++a) {
    const FlowArc& arc = net.arc(a);
    EXPECT_GE(r.flow[a], -1e-9);
    EXPECT_LE(r.flow[a], arc.capacity + 1e-9);
    balance[arc.tail] -= r.flow[a];
    balance[arc.head] += r.flow[a];
    cost += r.flow[a] * arc.unit_cost;
  }
  for (int v = 0; v < net.num_nodes(); ++v) {
    if (v == s || v == t) continue;
    EXPECT_NEAR(balance[v], 0.0, 1e-9);
  }
  if (s != t) EXPECT_NEAR(balance[t], r.value, 1e-9);
  EXPECT_NEAR(cost, r.total_cost, 1e-9);
}

TEST(MinCostFlowTest, ZeroTarget) {
  FlowNetwork net(2);
  net.AddArc(0, 1, 1, 1);
  const auto r = MinCostFlow(net, 0, 1, 0.0);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->value, 0);
  EXPECT_EQ(r->total_cost, 0);
}

TEST(MinCostFlowTest, ParallelArcsSplit) {
  FlowNetwork net(2);
  net.AddArc(0, 1, 1, 1);
  net.AddArc(0, 1, 1, 5);
  const auto r = MinCostFlow(net, 0, 1, 1.5);
  ASSERT_TRUE(r);
  EXPECT_NEAR(r->total_cost, 3.5, 1e-12);
  ExpectValidFlow(net, *r, 0, 1);
}

TEST(MinCostFlowTest, InsufficientCapacityIsInfeasible) {
  FlowNetwork net(2);
  net.AddArc(0, 1, 1, 1);
  EXPECT_FALSE(MinCostFlow(net, 0, 1, 2.0));
}

TEST(MinCostFlowTest, NegativeInputRejected) {
  FlowNetwork net(2);
  EXPECT_THROW(net.AddArc(0, 1, -1, 1), InvalidInput);
  EXPECT_THROW(net.AddArc(0, 1, 1, -1), InvalidInput);
  net.AddArc(0, 1, 1, 1);
  EXPECT_THROW(MinCostFlow(net, 0, 1, -1.0), InvalidInput);
}

TEST(MinCostFlowTest, MatchesVertexEnumeration) {
  Rng rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    const int nodes = rng.Int(2, 4);
    FlowNetwork net(nodes);
    const int arcs = rng.Int(1, 6);
    for (int a = 0; a < arcs; ++a) {
      const int u = rng.Int(0, nodes - 1);
      int v = rng.Int(0, nodes - 1);
      while (v == u) v = rng.Int(0, nodes - 1);
      const double cap = rng.Coin(0.2) ? kInfinity : rng.Real(0.0, 2.0);
      net.AddArc(u, v, cap, rng.Real(0.0, 5.0));
    }
    const int s = 0;
    const int t = nodes - 1;
    const double target = rng.Real(0.0, 2.0);
    const auto oracle = testing::EnumerateMinCostFlow(net, s, t, target);
    const auto got = MinCostFlow(net, s, t, target);
    ASSERT_EQ(oracle.has_value(), got.has_value()) << "trial " << trial;
    if (!got) continue;
    ExpectValidFlow(net, *got, s, t);
    EXPECT_NEAR(got->value, target, 1e-9);
    EXPECT_NEAR(got->total_cost, *oracle, 1e-7) << "trial " << trial;
  }
}

TEST(MaxFlowTest, UncapacitatedPathIsInfinite) {
  FlowNetwork net(3);
  net.AddArc(0, 1, kInfinity, 1);
  net.AddArc(1, 2, kInfinity, 1);
  EXPECT_EQ(MaxFlow(net, 0, 2).value, kInfinity);
  EXPECT_EQ(MaxFlow(net, 0, 2, 1.0).value, 1.0);
}

TEST(MaxFlowTest, BottleneckCut) {
  FlowNetwork net(4);
  net.AddArc(0, 1, 0.3, 0);
  net.AddArc(0, 2, 0.4, 0);
  net.AddArc(1, 3, kInfinity, 0);
  net.AddArc(2, 3, 0.1, 0);
  net.AddArc(1, 2, 1.0, 0);
  const FlowResult r = MaxFlow(net, 0, 3);
  EXPECT_NEAR(r.value, 0.4, 1e-12);
  ExpectValidFlow(net, r, 0, 3);
}

// s -> r over one tight edge of capacity 0.1, length 2; down side has
// length 1 and no capacity. Budget 0.5.
TEST(MaxDeltaTest, TightPathClosedForm) {
  FlowNetwork up(2);
  up.AddArc(0, 1, 0.1, 2.0);
  FlowNetwork down(2);
  down.AddArc(0, 1, kInfinity, 1.0);
  const DeltaResult r = MaxDelta(up, 0, 1, down, 0, 1, 0.5);
  EXPECT_NEAR(r.delta, 0.1, 1e-12);
  EXPECT_EQ(r.bound, DeltaBound::kCapacity);
  ExpectValidFlow(up, r.up, 0, 1);
  ExpectValidFlow(down, r.down, 0, 1);
  EXPECT_NEAR(r.up.value, 0.1, 1e-12);
  EXPECT_NEAR(r.down.value, 0.1, 1e-12);
}

TEST(MaxDeltaTest, UncapacitatedClosedForm) {
  FlowNetwork up(2);
  up.AddArc(0, 1, kInfinity, 4.0);
  FlowNetwork down(2);
  down.AddArc(0, 1, kInfinity, 1.0);
  const DeltaResult r = MaxDelta(up, 0, 1, down, 0, 1, 1.0);
  EXPECT_NEAR(r.delta, 0.25, 1e-12);
  EXPECT_EQ(r.bound, DeltaBound::kBudget);
}

TEST(MaxDeltaTest, ZeroBudgetWithPositiveLengths) {
  FlowNetwork up(2);
  up.AddArc(0, 1, kInfinity, 1.0);
  FlowNetwork down(2);
  down.AddArc(0, 1, kInfinity, 1.0);
  EXPECT_EQ(MaxDelta(up, 0, 1, down, 0, 1, 0.0).delta, 0.0);
}

TEST(MaxDeltaTest, DisconnectedGivesZero) {
  FlowNetwork up(2);
  FlowNetwork down(2);
  down.AddArc(0, 1, kInfinity, 0.0);
  const DeltaResult r = MaxDelta(up, 0, 1, down, 0, 1, 1.0);
  EXPECT_EQ(r.delta, 0.0);
  for (double f : r.down.flow) EXPECT_EQ(f, 0.0);
}

TEST(MaxDeltaTest, CapsAtOne) {
  FlowNetwork up(2);
  up.AddArc(0, 1, kInfinity, 0.0);
  FlowNetwork down(2);
  down.AddArc(0, 1, kInfinity, 0.5);
  const DeltaResult r = MaxDelta(up, 0, 1, down, 0, 1, 1.0);
  EXPECT_EQ(r.delta, 1.0);
  EXPECT_EQ(r.bound, DeltaBound::kUnit);
}

// Random series paths: Delta = min(1, min caps, z / L) per side.
TEST(MaxDeltaTest, PathNetworksMatchClosedForm) {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    auto build = [&](double& bound_cap, double& length) {
      const int hops = rng.Int(1, 4);
      FlowNetwork net(hops + 1);
      bound_cap = kInfinity;
      length = 0.0;
      for (int i = 0; i < hops; ++i) {
        const double cap = rng.Coin(0.5) ? rng.Real(0.0, 1.5) : kInfinity;
        const double l = rng.Coin(0.2) ? 0.0 : rng.Real(0.0, 3.0);
        net.AddArc(i, i + 1, cap, l);
        bound_cap = std::min(bound_cap, cap);
        length += l;
      }
      return net;
    };
    double cap_up, len_up, cap_down, len_down;
    const FlowNetwork up = build(cap_up, len_up);
    const FlowNetwork down = build(cap_down, len_down);
    const double z = rng.Real(0.0, 2.0);
    auto side = [&](double cap, double len) {
      return std::min(cap, len > 0 ? z / len : kInfinity);
    };
    const double expected =
        std::min({1.0, side(cap_up, len_up), side(cap_down, len_down)});
    const DeltaResult r =
        MaxDelta(up, 0, up.num_nodes() - 1, down, 0, down.num_nodes() - 1, z);
    EXPECT_NEAR(r.delta, expected, 1e-8) << "trial " << trial;
  }
}

FlowNetwork RandomNetwork(Rng& rng, int nodes, int arcs) {
  FlowNetwork net(nodes);
  for (int a = 0; a < arcs; ++a) {
    const int u = rng.Int(0, nodes - 1);
    int v = rng.Int(0, nodes - 1);
    while (v == u) v = rng.Int(0, nodes - 1);
    const double cap = rng.Coin(0.4) ? kInfinity : rng.Real(0.0, 1.0);
    net.AddArc(u, v, cap, rng.Coin(0.2) ? 0.0 : rng.Real(0.0, 3.0));
  }
  return net;
}

// Feasibility-query bisection, the direct reading of the auxiliary problem.
double BisectDelta(const FlowNetwork& up, const FlowNetwork& down, double z) {
  auto ok = [&](double d) {
    for (const FlowNetwork* net : {&up, &down}) {
      const auto f = MinCostFlow(*net, 0, net->num_nodes() - 1, d);
      if (!f || f->total_cost > z + 1e-12) return false;
    }
    return true;
  };
  if (ok(1.0)) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

TEST(MaxDeltaTest, MatchesBisectionAndRespectsBudget) {
  Rng rng(31);
  for (int trial = 0; trial < 150; ++trial) {
    const FlowNetwork up = RandomNetwork(rng, rng.Int(2, 5), rng.Int(1, 8));
    const FlowNetwork down = RandomNetwork(rng, rng.Int(2, 5), rng.Int(1, 8));
    const double z = rng.Real(0.0, 3.0);
    const int ut = up.num_nodes() - 1;
    const int dt = down.num_nodes() - 1;
    const DeltaResult r = MaxDelta(up, 0, ut, down, 0, dt, z);
    EXPECT_NEAR(r.delta, BisectDelta(up, down, z), 1e-7) << "trial " << trial;
    if (r.delta > 0) {
      ExpectValidFlow(up, r.up, 0, ut);
      ExpectValidFlow(down, r.down, 0, dt);
      EXPECT_NEAR(r.up.value, r.delta, 1e-9);
      EXPECT_NEAR(r.down.value, r.delta, 1e-9);
      EXPECT_LE(r.up.total_cost, z + 1e-9);
      EXPECT_LE(r.down.total_cost, z + 1e-9);
    }
  }
}

TEST(MaxDeltaTest, MonotoneInBudgetAndCapacity) {
  Rng rng(37);
  for (int trial = 0; trial < 150; ++trial) {
    FlowNetwork up = RandomNetwork(rng, rng.Int(2, 5), rng.Int(1, 8));
    const FlowNetwork down = RandomNetwork(rng, rng.Int(2, 5), rng.Int(1, 8));
    const double z = rng.Real(0.0, 2.0);
    const int ut = up.num_nodes() - 1;
    const int dt = down.num_nodes() - 1;
    const double base = MaxDelta(up, 0, ut, down, 0, dt, z).delta;
    EXPECT_GE(MaxDelta(up, 0, ut, down, 0, dt, z + rng.Real(0.0, 1.0)).delta,
              base - 1e-12);
    const int a = rng.Int(0, up.num_arcs() - 1);
    up.set_capacity(a, up.arc(a).capacity + rng.Real(0.0, 1.0));
    EXPECT_GE(MaxDelta(up, 0, ut, down, 0, dt, z).delta, base - 1e-12);
  }
}

}  // namespace
}  // namespace bab
