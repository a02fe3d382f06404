#include <algorithm>
#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "bab/errors.h"
#include "bab/oracle.h"
#include "test_util.h"

namespace bab {
namespace {

using testing::Rng;

std::vector<TerminalPair> Pairs(
    std::initializer_list<std::pair<VertexId, VertexId>> list) {
  std::vector<TerminalPair> out;
  for (const auto& [s, t] : list) {
    out.push_back({static_cast<int>(out.size()), s, t, std::nullopt});
  }
  return out;
}

std::vector<TerminalPair> RandomPairs(Rng& rng, int n, int k) {
  std::vector<TerminalPair> out;
  for (int i = 0; i < k; ++i) {
    out.push_back({i, rng.Int(0, n - 1), rng.Int(0, n - 1), std::nullopt});
  }
  return out;
}

// Independent optimum: every combination of one simple path per pair, paying
// each canonical edge once plus all path lengths.
double BruteForceOpt(const TwoMetricGraph& g,
                     const std::vector<TerminalPair>& pairs) {
  std::vector<std::vector<std::vector<EdgeId>>> options;
  for (const TerminalPair& p : pairs) {
    std::vector<std::vector<EdgeId>> paths;
    if (p.s == p.t) {
      paths.push_back({});
    } else {
      testing::ForEachSimplePath(g, p.s, p.t,
                                 [&](const std::vector<EdgeId>& path) {
                                   paths.push_back(path);
                                 });
    }
    if (paths.empty()) return kInfinity;
    options.push_back(std::move(paths));
  }
  double best = kInfinity;
  std::vector<size_t> choice(pairs.size(), 0);
  while (true) {
    std::set<EdgeId> bought;
    double total = 0.0;
    for (size_t i = 0; i < pairs.size(); ++i) {
      for (EdgeId e : options[i][choice[i]]) {
        bought.insert(g.Canonical(e));
        total += g.edge(e).length;
      }
    }
    for (EdgeId e : bought) total += g.edge(e).cost;
    best = std::min(best, total);
    size_t i = 0;
    while (i < pairs.size() && ++choice[i] == options[i].size()) {
      choice[i++] = 0;
    }
    if (i == pairs.size()) break;
  }
  return best;
}

TEST(OfflineOptTest, TriangleDetourIsCheaper) {
  // a = 0, b = 1, r = 2.
  TwoMetricGraph g(3, true);
  g.AddEdge(0, 2, 10, 1);
  g.AddEdge(0, 1, 1, 1);
  g.AddEdge(1, 2, 1, 1);
  const OracleResult opt = OfflineOpt(g, Pairs({{0, 2}}));
  EXPECT_EQ(opt.value, 4.0);
  EXPECT_EQ(opt.ledger.paths().at(0).edges, (std::vector<EdgeId>{1, 2}));
  EXPECT_EQ(SolutionCost(g, opt.ledger).total, 4.0);
}

TEST(OfflineOptTest, NoPairs) {
  TwoMetricGraph g(3, true);
  g.AddEdge(0, 1, 1, 1);
  const OracleResult opt = OfflineOpt(g, {});
  EXPECT_EQ(opt.value, 0.0);
  EXPECT_TRUE(opt.ledger.empty());
}

TEST(OfflineOptTest, SharedExpensiveEdgeBoughtOnce) {
  TwoMetricGraph g(4, true);
  g.AddEdge(0, 2, 0, 1);
  g.AddEdge(1, 2, 0, 1);
  const EdgeId hub = g.AddEdge(2, 3, 100, 1);
  g.AddEdge(0, 3, 60, 1);
  g.AddEdge(1, 3, 60, 1);
  const OracleResult opt = OfflineOpt(g, Pairs({{0, 3}, {1, 3}}));
  EXPECT_EQ(opt.value, 104.0);
  EXPECT_TRUE(opt.ledger.IsBought(hub));
  EXPECT_EQ(SolutionCost(g, opt.ledger).buy, 100.0);
}

TEST(OfflineOptTest, InfeasibleAndBudget) {
  TwoMetricGraph g(3, true);
  g.AddEdge(0, 1, 1, 1);
  EXPECT_THROW(OfflineOpt(g, Pairs({{1, 0}})), InvalidInput);
  TwoMetricGraph big(2, true);
  for (int i = 0; i < 21; ++i) big.AddEdge(0, 1, 1, 1);
  EXPECT_THROW(OfflineOpt(big, Pairs({{0, 1}})), BudgetExceeded);
  OracleBudget budget;
  budget.max_edges = 21;
  EXPECT_EQ(OfflineOpt(big, Pairs({{0, 1}}), budget).value, 2.0);
}

TEST(OfflineOptTest, MatchesBruteForcePaths) {
  Rng rng(3);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = rng.Int(2, 5);
    const TwoMetricGraph g =
        testing::RandomGraph(rng, n, rng.Int(1, 7), rng.Coin());
    const std::vector<TerminalPair> pairs = RandomPairs(rng, n, rng.Int(1, 3));
    const double brute = BruteForceOpt(g, pairs);
    if (brute == kInfinity) {
      EXPECT_THROW(OfflineOpt(g, pairs), InvalidInput);
      continue;
    }
    const OracleResult opt = OfflineOpt(g, pairs);
    EXPECT_EQ(opt.value, brute);
    EXPECT_EQ(SolutionCost(g, opt.ledger).total, opt.value);
    for (const TerminalPair& p : pairs) {
      ValidateWalk(g, opt.ledger.paths().at(p.index).edges, p.s, p.t);
    }
  }
}

TEST(OfflineOptTest, InvariantUnderEdgeAndPairPermutation) {
  Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = rng.Int(3, 5);
    const bool directed = rng.Coin();
    const TwoMetricGraph g = testing::RandomGraph(rng, n, 7, directed);
    std::vector<TerminalPair> pairs = RandomPairs(rng, n, 3);
    double base;
    try {
      base = OfflineOpt(g, pairs).value;
    } catch (const InvalidInput&) {
      continue;
    }
    std::vector<EdgeId> order;
    for (const Edge& e : g.edges()) {
      if (g.Canonical(e.id) == e.id) order.push_back(e.id);
    }
    std::shuffle(order.begin(), order.end(), rng.engine());
    TwoMetricGraph permuted(n, directed);
    for (EdgeId e : order) {
      const Edge& edge = g.edge(e);
      permuted.AddEdge(edge.tail, edge.head, edge.cost, edge.length);
    }
    std::shuffle(pairs.begin(), pairs.end(), rng.engine());
    EXPECT_EQ(OfflineOpt(permuted, pairs).value, base);
  }
}

TEST(SsOfflineOptTest, Examples) {
  TwoMetricGraph g(3, true);
  g.AddEdge(0, 2, 10, 1);
  g.AddEdge(0, 1, 1, 1);
  g.AddEdge(1, 2, 1, 1);
  const std::vector<VertexId> one = {0};
  EXPECT_EQ(SsOfflineOpt(g, one, 2, Direction::kUp), 4.0);
  const std::vector<VertexId> at_root = {2};
  EXPECT_EQ(SsOfflineOpt(g, at_root, 2, Direction::kUp), 0.0);
  EXPECT_EQ(SsOfflineOpt(g, one, 0, Direction::kDown), 0.0);
  const std::vector<VertexId> far = {2};
  EXPECT_EQ(SsOfflineOpt(g, far, 0, Direction::kDown), 4.0);
  EXPECT_THROW(SsOfflineOpt(g, far, 0, Direction::kUp), InvalidInput);
}

TEST(SsOfflineOptTest, StarHubCountedOnce) {
  // Leaves 1 and 2 reach the hub 3 for free; hub -> root 0 costs 9.
  TwoMetricGraph g(4, false);
  g.AddEdge(1, 3, 0, 1);
  g.AddEdge(2, 3, 0, 1);
  g.AddEdge(3, 0, 9, 1);
  const std::vector<VertexId> leaves = {1, 2};
  EXPECT_EQ(SsOfflineOpt(g, leaves, 0, Direction::kUp), 9.0 + 4.0);
  EXPECT_EQ(SsOfflineOpt(g, leaves, 0, Direction::kDown), 9.0 + 4.0);
}

TEST(SsOfflineOptTest, ConsistentWithOfflineOpt) {
  Rng rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = rng.Int(2, 5);
    const TwoMetricGraph g = testing::RandomGraph(rng, n, 6, rng.Coin());
    const VertexId root = rng.Int(0, n - 1);
    std::vector<VertexId> terms;
    std::vector<TerminalPair> up;
    std::vector<TerminalPair> down;
    for (int i = 0; i < 3; ++i) {
      const VertexId v = rng.Int(0, n - 1);
      terms.push_back(v);
      up.push_back({i, v, root, std::nullopt});
      down.push_back({i, root, v, std::nullopt});
    }
    for (auto [dir, pairs] : {std::pair{Direction::kUp, up},
                              std::pair{Direction::kDown, down}}) {
      try {
        const double opt = OfflineOpt(g, pairs).value;
        EXPECT_EQ(SsOfflineOpt(g, terms, root, dir), opt);
      } catch (const InvalidInput&) {
        EXPECT_THROW(SsOfflineOpt(g, terms, root, dir), InvalidInput);
      }
    }
  }
}

// Independent junction value: every pair -> root assignment, each group
// priced by its own single-sink and single-source optima.
double BruteForceJunction(const TwoMetricGraph& g,
                          const std::vector<TerminalPair>& pairs) {
  const int n = g.num_vertices();
  const int k = static_cast<int>(pairs.size());
  double best = kInfinity;
  std::vector<int> root(k, 0);
  while (true) {
    double total = 0.0;
    for (int r = 0; r < n && total < kInfinity; ++r) {
      std::vector<VertexId> sources;
      std::vector<VertexId> sinks;
      for (int i = 0; i < k; ++i) {
        if (root[i] != r) continue;
        sources.push_back(pairs[i].s);
        sinks.push_back(pairs[i].t);
      }
      try {
        total += SsOfflineOpt(g, sources, r, Direction::kUp) +
                 SsOfflineOpt(g, sinks, r, Direction::kDown);
      } catch (const InvalidInput&) {
        total = kInfinity;
      }
    }
    best = std::min(best, total);
    int i = 0;
    while (i < k && ++root[i] == n) root[i++] = 0;
    if (i == k) break;
  }
  return best;
}

TEST(JunctionOptTest, DirectedCycleCountsCopiesTwice) {
  TwoMetricGraph g(4, true);
  for (int v = 0; v < 4; ++v) g.AddEdge(v, (v + 1) % 4, 1, 0);
  const std::vector<TerminalPair> pairs = Pairs({{0, 3}, {2, 1}});
  EXPECT_EQ(OfflineOpt(g, pairs).value, 4.0);
  EXPECT_EQ(JunctionOpt(g, pairs), 5.0);
  EXPECT_EQ(BruteForceJunction(g, pairs), 5.0);
}

TEST(JunctionOptTest, SingleSinkInstanceMatchesOpt) {
  Rng rng(14);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = rng.Int(2, 5);
    const TwoMetricGraph g = testing::RandomGraph(rng, n, 6, rng.Coin());
    const VertexId root = rng.Int(0, n - 1);
    std::vector<TerminalPair> pairs;
    for (int i = 0; i < 3; ++i) {
      pairs.push_back({i, rng.Int(0, n - 1), root, std::nullopt});
    }
    try {
      const double opt = OfflineOpt(g, pairs).value;
      EXPECT_EQ(JunctionOpt(g, pairs), opt);
    } catch (const InvalidInput&) {
      EXPECT_THROW(JunctionOpt(g, pairs), InvalidInput);
    }
  }
}

TEST(JunctionOptTest, AtLeastOptAndMatchesAssignmentEnumeration) {
  Rng rng(15);
  int strict = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = rng.Int(2, 5);
    const TwoMetricGraph g = testing::RandomGraph(rng, n, 6, rng.Coin());
    const std::vector<TerminalPair> pairs = RandomPairs(rng, n, rng.Int(1, 3));
    const double brute = BruteForceJunction(g, pairs);
    if (brute == kInfinity) {
      EXPECT_THROW(JunctionOpt(g, pairs), InvalidInput);
      continue;
    }
    const double junction = JunctionOpt(g, pairs);
    EXPECT_EQ(junction, brute);
    const double opt = OfflineOpt(g, pairs).value;
    EXPECT_GE(junction, opt);
    strict += junction > opt;
  }
  EXPECT_GT(strict, 0);
}

TEST(JunctionOptTest, Budgets) {
  TwoMetricGraph g(9, true);
  g.AddEdge(0, 1, 1, 1);
  EXPECT_THROW(JunctionOpt(g, Pairs({{0, 1}})), BudgetExceeded);
  TwoMetricGraph small(2, true);
  small.AddEdge(0, 1, 1, 1);
  const std::vector<TerminalPair> six =
      Pairs({{0, 1}, {0, 1}, {0, 1}, {0, 1}, {0, 1}, {0, 1}});
  EXPECT_THROW(JunctionOpt(small, six), BudgetExceeded);
  EXPECT_EQ(JunctionOpt(small, {}), 0.0);
}

TEST(SolveStandardLpTest, SmallPrograms) {
  // min x + 2y s.t. x + y = 3, x - y + s = 1.
  const auto v = SolveStandardLp({{1, 1, 0}, {1, -1, 1}}, {3, 1}, {1, 2, 0});
  ASSERT_TRUE(v);
  EXPECT_NEAR(*v, 4.0, 1e-9);
  EXPECT_FALSE(SolveStandardLp({{1, 1}}, {-1}, {1, 1}));
  EXPECT_THROW(SolveStandardLp({{1, -1}}, {0}, {-1, 0}), SolverStalled);
  // Redundant equality rows.
  const auto r = SolveStandardLp({{1, 1}, {2, 2}}, {1, 2}, {3, 1});
  ASSERT_TRUE(r);
  EXPECT_NEAR(*r, 1.0, 1e-9);
}

TEST(LpLowerBoundTest, SinglePairIsShortestPath) {
  Rng rng(18);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = rng.Int(2, 5);
    const TwoMetricGraph g = testing::RandomGraph(rng, n, 6, rng.Coin());
    const VertexId s = rng.Int(0, n - 1);
    const VertexId t = rng.Int(0, n - 1);
    const std::vector<TerminalPair> pairs = {{0, s, t, std::nullopt}};
    const double d = s == t ? 0.0
                            : testing::BruteForceDistance(g, CostPlusLength,
                                                          s, t);
    if (d == kInfinity) {
      EXPECT_THROW(LpLowerBound(g, pairs), InvalidInput);
      continue;
    }
    EXPECT_NEAR(LpLowerBound(g, pairs), d, 1e-7);
  }
}

TEST(LpLowerBoundTest, BelowOpt) {
  Rng rng(19);
  int strict = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = rng.Int(3, 5);
    const TwoMetricGraph g = testing::RandomGraph(rng, n, 7, rng.Coin());
    const std::vector<TerminalPair> pairs = RandomPairs(rng, n, 3);
    double opt;
    try {
      opt = OfflineOpt(g, pairs).value;
    } catch (const InvalidInput&) {
      continue;
    }
    const double lb = LpLowerBound(g, pairs);
    EXPECT_LE(lb, opt + 1e-7);
    EXPECT_GE(lb, 0.0);
    strict += lb < opt - 1e-7;
  }
  RecordProperty("strict_gaps", strict);
}

TEST(PathChoiceOptTest, SimplePathOptionsGiveOfflineOpt) {
  Rng rng(23);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int n = rng.Int(2, 5);
    const TwoMetricGraph g =
        testing::RandomGraph(rng, n, rng.Int(1, 7), rng.Coin());
    const std::vector<TerminalPair> pairs = RandomPairs(rng, n, rng.Int(1, 3));
    std::vector<PathOptions> options;
    for (const TerminalPair& p : pairs) {
      options.push_back(AllSimplePaths(g, p.s, p.t));
    }
    double opt;
    try {
      opt = OfflineOpt(g, pairs).value;
    } catch (const InvalidInput&) {
      EXPECT_THROW(PathChoiceOpt(g, options), InvalidInput);
      continue;
    }
    EXPECT_EQ(PathChoiceOpt(g, options), opt);
    ++checked;
  }
  EXPECT_GT(checked, 20);
}

TEST(PathChoiceOptTest, SharedEdgeAndBudget) {
  TwoMetricGraph g(3, true);
  const EdgeId a = g.AddEdge(0, 1, 10, 1);
  const EdgeId b = g.AddEdge(1, 2, 0, 1);
  const EdgeId c = g.AddEdge(0, 2, 7, 1);
  // Both demands share a: 10 + 1 + (1 + 1) = 13 beats 7 + 1 + 10 + 1 = 19.
  const std::vector<PathOptions> options = {{{a}}, {{a, b}, {c}}};
  EXPECT_EQ(PathChoiceOpt(g, options), 13.0);
  EXPECT_EQ(PathChoiceOpt(g, {}), 0.0);
  EXPECT_THROW(PathChoiceOpt(g, options, 1.0), BudgetExceeded);
  EXPECT_THROW(AllSimplePaths(g, 0, 2, 1), BudgetExceeded);
  EXPECT_EQ(AllSimplePaths(g, 2, 2), PathOptions{{}});
}

TEST(LayeredSsOptTest, SingleArc) {
  TwoMetricGraph g(2, true);
  g.AddEdge(0, 1, 2, 3);
  const LayeredGraph up = BuildLayered(g, 1, 2, Direction::kUp);
  const std::vector<VertexId> terminals = {0};
  // One level carries the arc at c + l = 5 and length 3.
  EXPECT_EQ(LayeredSsOpt(up, terminals, 1), 8.0);
  EXPECT_EQ(SsOfflineOpt(g, terminals, 1, Direction::kUp), 5.0);
}

TEST(LayeredSsOptTest, NeverBelowOriginal) {
  Rng rng(29);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = rng.Int(2, 4);
    const TwoMetricGraph g = testing::RandomGraph(rng, n, 6, rng.Coin());
    const int k = rng.Int(1, 3);
    std::vector<VertexId> terminals;
    for (int i = 0; i < k; ++i) terminals.push_back(rng.Int(0, n - 1));
    const VertexId root = rng.Int(0, n - 1);
    for (Direction dir : {Direction::kUp, Direction::kDown}) {
      double base;
      try {
        base = SsOfflineOpt(g, terminals, root, dir);
      } catch (const InvalidInput&) {
        continue;
      }
      const LayeredGraph layered = BuildLayered(g, k, 2, dir);
      EXPECT_GE(LayeredSsOpt(layered, terminals, root), base - 1e-9);
    }
  }
}

TEST(HOptTest, NeverBelowJunctionOpt) {
  Rng rng(31);
  int checked = 0;
  for (int trial = 0; trial < 12; ++trial) {
    const int n = rng.Int(2, 3);
    const TwoMetricGraph g = testing::RandomGraph(rng, n, 5, true);
    const std::vector<TerminalPair> pairs = RandomPairs(rng, n, 2);
    double junction;
    try {
      junction = JunctionOpt(g, pairs);
    } catch (const InvalidInput&) {
      continue;
    }
    const LayeredGraph up = BuildLayered(g, 2, 2, Direction::kUp);
    const LayeredGraph down = BuildLayered(g, 2, 2, Direction::kDown);
    const JunctionForest h = BuildH(up, down);
    EXPECT_GE(HOpt(h, pairs), junction - 1e-9);
    ++checked;
  }
  EXPECT_GT(checked, 3);
}

}  // namespace
}  // namespace bab
