#include "bab/oracle.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "bab/errors.h"

namespace bab {
namespace {

constexpr double kEps = 1e-9;

// Bit positions of the canonical edges.
struct EdgeIndex {
  std::vector<EdgeId> canonical;  // by bit
  std::vector<int> bit;           // by arc
};

EdgeIndex IndexEdges(const TwoMetricGraph& g, const OracleBudget& budget) {
  EdgeIndex idx;
  idx.bit.assign(g.num_edges(), -1);
  for (const Edge& e : g.edges()) {
    if (g.Canonical(e.id) == e.id) {
      idx.bit[e.id] = static_cast<int>(idx.canonical.size());
      idx.canonical.push_back(e.id);
    }
  }
  for (const Edge& e : g.edges()) idx.bit[e.id] = idx.bit[g.Canonical(e.id)];
  const int m = static_cast<int>(idx.canonical.size());
  if (m > budget.max_edges || m > 30) {
    throw BudgetExceeded("subset enumeration over " + std::to_string(m) +
                         " edges exceeds the budget of " +
                         std::to_string(budget.max_edges));
  }
  return idx;
}

double MaskCost(const TwoMetricGraph& g, const EdgeIndex& idx,
                uint32_t mask) {
  double buy = 0.0;
  for (int b = 0; b < static_cast<int>(idx.canonical.size()); ++b) {
    if (mask >> b & 1) buy += g.edge(idx.canonical[b]).cost;
  }
  return buy;
}

// l-distances from `source` over arcs of the mask; `reverse` gives the
// distances to `source` instead.
void MaskedDistances(const TwoMetricGraph& g, const EdgeIndex& idx,
                     uint32_t mask, VertexId source, bool reverse,
                     std::vector<double>& dist) {
  const int n = g.num_vertices();
  dist.assign(n, kInfinity);
  std::vector<char> done(n, 0);
  dist[source] = 0.0;
  for (int round = 0; round < n; ++round) {
    VertexId u = -1;
    for (VertexId v = 0; v < n; ++v) {
      if (!done[v] && dist[v] < kInfinity && (u < 0 || dist[v] < dist[u])) {
        u = v;
      }
    }
    if (u < 0) break;
    done[u] = 1;
    for (EdgeId e : reverse ? g.in_edges(u) : g.out_edges(u)) {
      if (!(mask >> idx.bit[e] & 1)) continue;
      const Edge& edge = g.edge(e);
      const VertexId v = reverse ? edge.tail : edge.head;
      dist[v] = std::min(dist[v], dist[u] + edge.length);
    }
  }
}

void CheckVertex(const TwoMetricGraph& g, VertexId v) {
  if (!g.IsValidVertex(v)) {
    throw InvalidInput("vertex " + std::to_string(v) + " out of range");
  }
}

// Best buy + length for every subset of `terminals` (bitmask over their
// positions) sharing one root on one side.
std::vector<double> SsTable(const TwoMetricGraph& g, const EdgeIndex& idx,
                            const std::vector<VertexId>& terminals,
                            VertexId root, Direction direction) {
  const int k = static_cast<int>(terminals.size());
  const uint32_t subsets = 1u << k;
  std::vector<double> table(subsets, kInfinity);
  std::vector<double> dist;
  std::vector<double> sum(subsets, 0.0);
  const uint32_t masks = 1u << idx.canonical.size();
  for (uint32_t mask = 0; mask < masks; ++mask) {
    const double buy = MaskCost(g, idx, mask);
    MaskedDistances(g, idx, mask, root, direction == Direction::kUp, dist);
    for (uint32_t s = 1; s < subsets; ++s) {
      const int low = std::countr_zero(s);
      sum[s] = sum[s & (s - 1)] + dist[terminals[low]];
    }
    for (uint32_t s = 0; s < subsets; ++s) {
      table[s] = std::min(table[s], buy + sum[s]);
    }
  }
  return table;
}

}  // namespace

OracleResult OfflineOpt(const TwoMetricGraph& g,
                        std::span<const TerminalPair> pairs,
                        const OracleBudget& budget) {
  OracleResult result;
  if (pairs.empty()) return result;
  for (const TerminalPair& p : pairs) {
    CheckVertex(g, p.s);
    CheckVertex(g, p.t);
  }
  const EdgeIndex idx = IndexEdges(g, budget);
  std::map<VertexId, std::vector<VertexId>> by_source;
  for (const TerminalPair& p : pairs) by_source[p.s].push_back(p.t);

  double best = kInfinity;
  int64_t best_mask = -1;
  std::vector<double> dist;
  const uint32_t masks = 1u << idx.canonical.size();
  for (uint32_t mask = 0; mask < masks; ++mask) {
    double total = MaskCost(g, idx, mask);
    if (total >= best) continue;
    for (const auto& [s, sinks] : by_source) {
      MaskedDistances(g, idx, mask, s, false, dist);
      for (VertexId t : sinks) total += dist[t];
      if (total >= best) break;
    }
    if (total < best) {
      best = total;
      best_mask = mask;
    }
  }
  if (best_mask < 0) throw InvalidInput("infeasible instance");

  const uint32_t mask = static_cast<uint32_t>(best_mask);
  const EdgeWeight inside = [&](const Edge& e) {
    return (mask >> idx.bit[e.id] & 1) ? e.length : kInfinity;
  };
  for (const TerminalPair& p : pairs) {
    std::optional<WeightedPath> path = ShortestPath(g, inside, p.s, p.t);
    if (!path) throw IntegrityError("optimal subset lost a pair");
    result.ledger.Route(g, p.index, p.s, p.t, std::move(path->edges));
  }
  result.value = SolutionCost(g, result.ledger).total;
  return result;
}

double SsOfflineOpt(const TwoMetricGraph& g,
                    std::span<const VertexId> terminals, VertexId root,
                    Direction direction, const OracleBudget& budget) {
  CheckVertex(g, root);
  for (VertexId v : terminals) CheckVertex(g, v);
  if (terminals.empty()) return 0.0;
  const EdgeIndex idx = IndexEdges(g, budget);
  double best = kInfinity;
  std::vector<double> dist;
  const uint32_t masks = 1u << idx.canonical.size();
  for (uint32_t mask = 0; mask < masks; ++mask) {
    double total = MaskCost(g, idx, mask);
    if (total >= best) continue;
    MaskedDistances(g, idx, mask, root, direction == Direction::kUp, dist);
    for (VertexId v : terminals) total += dist[v];
    best = std::min(best, total);
  }
  if (best == kInfinity) throw InvalidInput("infeasible instance");
  return best;
}

double JunctionOpt(const TwoMetricGraph& g,
                   std::span<const TerminalPair> pairs,
                   const OracleBudget& budget) {
  const int k = static_cast<int>(pairs.size());
  if (k == 0) return 0.0;
  if (k > budget.max_pairs) {
    throw BudgetExceeded("junction enumeration over " + std::to_string(k) +
                         " pairs exceeds the budget of " +
                         std::to_string(budget.max_pairs));
  }
  if (g.num_vertices() > budget.max_vertices) {
    throw BudgetExceeded("junction enumeration over " +
                         std::to_string(g.num_vertices()) +
                         " vertices exceeds the budget of " +
                         std::to_string(budget.max_vertices));
  }
  std::vector<VertexId> sources;
  std::vector<VertexId> sinks;
  for (const TerminalPair& p : pairs) {
    CheckVertex(g, p.s);
    CheckVertex(g, p.t);
    sources.push_back(p.s);
    sinks.push_back(p.t);
  }
  const EdgeIndex idx = IndexEdges(g, budget);
  const uint32_t subsets = 1u << k;
  // Best single junction for every subset of pairs.
  std::vector<double> part(subsets, kInfinity);
  for (VertexId r = 0; r < g.num_vertices(); ++r) {
    const std::vector<double> up = SsTable(g, idx, sources, r, Direction::kUp);
    const std::vector<double> down =
        SsTable(g, idx, sinks, r, Direction::kDown);
    for (uint32_t s = 1; s < subsets; ++s) {
      part[s] = std::min(part[s], up[s] + down[s]);
    }
  }
  // Partition the pairs into junction groups; the group holding the lowest
  // remaining pair is chosen first.
  std::vector<double> best(subsets, kInfinity);
  best[0] = 0.0;
  for (uint32_t s = 1; s < subsets; ++s) {
    const uint32_t low = s & (~s + 1);
    const uint32_t rest = s ^ low;
    for (uint32_t sub = rest;; sub = (sub - 1) & rest) {
      const uint32_t group = sub | low;
      best[s] = std::min(best[s], part[group] + best[s ^ group]);
      if (sub == 0) break;
    }
  }
  if (best[subsets - 1] == kInfinity) {
    throw InvalidInput("infeasible instance");
  }
  return best[subsets - 1];
}

double PrizeCollectingOpt(const TwoMetricGraph& g,
                          std::span<const TerminalPair> pairs, bool junction,
                          const OracleBudget& budget) {
  const int k = static_cast<int>(pairs.size());
  if (k > 30) throw BudgetExceeded("too many pairs for drop enumeration");
  double best = kInfinity;
  for (uint32_t drop = 0; drop < (1u << k); ++drop) {
    double penalty = 0.0;
    std::vector<TerminalPair> kept;
    bool allowed = true;
    for (int i = 0; i < k; ++i) {
      if (!(drop >> i & 1)) {
        kept.push_back(pairs[i]);
      } else if (pairs[i].penalty) {
        penalty += *pairs[i].penalty;
      } else {
        allowed = false;
      }
    }
    if (!allowed || penalty >= best) continue;
    try {
      const double routed = junction ? JunctionOpt(g, kept, budget)
                                     : OfflineOpt(g, kept, budget).value;
      best = std::min(best, penalty + routed);
    } catch (const InvalidInput&) {
      // Some kept pair is unreachable.
    }
  }
  if (best == kInfinity) throw InvalidInput("infeasible instance");
  return best;
}

double LpLowerBound(const TwoMetricGraph& g,
                    std::span<const TerminalPair> pairs,
                    const OracleBudget& budget) {
  const EdgeIndex idx = IndexEdges(g, budget);
  std::vector<TerminalPair> active;
  for (const TerminalPair& p : pairs) {
    CheckVertex(g, p.s);
    CheckVertex(g, p.t);
    if (p.s != p.t) active.push_back(p);
  }
  if (active.empty()) return 0.0;
  const int m = static_cast<int>(idx.canonical.size());
  const int arcs = g.num_edges();
  const int n = g.num_vertices();
  const int k = static_cast<int>(active.size());
  // Columns: x by canonical edge, then f and slack by (pair, arc).
  const int cols = m + 2 * k * arcs;
  auto flow_col = [&](int i, EdgeId e) { return m + i * arcs + e; };
  auto slack_col = [&](int i, EdgeId e) { return m + (k + i) * arcs + e; };
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  std::vector<double> c(cols, 0.0);
  for (int bit = 0; bit < m; ++bit) c[bit] = g.edge(idx.canonical[bit]).cost;
  for (int i = 0; i < k; ++i) {
    for (const Edge& e : g.edges()) c[flow_col(i, e.id)] = e.length;
    for (VertexId v = 0; v < n; ++v) {
      std::vector<double> row(cols, 0.0);
      for (EdgeId e : g.out_edges(v)) row[flow_col(i, e)] += 1.0;
      for (EdgeId e : g.in_edges(v)) row[flow_col(i, e)] -= 1.0;
      a.push_back(std::move(row));
      b.push_back(v == active[i].s ? 1.0 : v == active[i].t ? -1.0 : 0.0);
    }
    for (const Edge& e : g.edges()) {
      std::vector<double> row(cols, 0.0);
      row[flow_col(i, e.id)] = 1.0;
      row[idx.bit[e.id]] = -1.0;
      row[slack_col(i, e.id)] = 1.0;
      a.push_back(std::move(row));
      b.push_back(0.0);
    }
  }
  const std::optional<double> value = SolveStandardLp(a, b, c);
  if (!value) throw InvalidInput("infeasible instance");
  return *value;
}

std::optional<double> SolveStandardLp(
    const std::vector<std::vector<double>>& a, const std::vector<double>& b,
    const std::vector<double>& c) {
  const int rows = static_cast<int>(a.size());
  const int n = static_cast<int>(c.size());
  const int width = n + rows + 1;  // originals, artificials, rhs
  std::vector<std::vector<double>> t(rows + 1, std::vector<double>(width));
  std::vector<int> basis(rows);
  for (int i = 0; i < rows; ++i) {
    const double sign = b[i] < 0 ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) t[i][j] = sign * a[i][j];
    t[i][n + i] = 1.0;
    t[i][width - 1] = sign * b[i];
    basis[i] = n + i;
  }
  std::vector<double>& obj = t[rows];

  auto pivot = [&](int r, int col) {
    const double p = t[r][col];
    for (double& v : t[r]) v /= p;
    for (int i = 0; i <= rows; ++i) {
      if (i == r || t[i][col] == 0.0) continue;
      const double factor = t[i][col];
      for (int j = 0; j < width; ++j) t[i][j] -= factor * t[r][j];
    }
    basis[r] = col;
  };
  // Bland's rule over columns [0, allowed).
  auto run = [&](int allowed) {
    for (int64_t iter = 0;; ++iter) {
      if (iter > 1000000) throw SolverStalled("simplex iteration cap");
      int col = -1;
      for (int j = 0; j < allowed; ++j) {
        if (obj[j] < -kEps) {
          col = j;
          break;
        }
      }
      if (col < 0) return;
      int r = -1;
      double best = kInfinity;
      for (int i = 0; i < rows; ++i) {
        if (t[i][col] <= kEps) continue;
        const double ratio = t[i][width - 1] / t[i][col];
        if (ratio < best - kEps ||
            (ratio <= best + kEps && r >= 0 && basis[i] < basis[r])) {
          best = std::min(best, ratio);
          r = i;
        }
      }
      if (r < 0) throw SolverStalled("unbounded LP");
      pivot(r, col);
    }
  };

  // Phase 1: minimize the artificials.
  for (int j = 0; j < width; ++j) {
    if (j >= n && j < n + rows) continue;
    double sum = 0.0;
    for (int i = 0; i < rows; ++i) sum += t[i][j];
    obj[j] = -sum;
  }
  run(n + rows);
  if (-obj[width - 1] > 1e-7) return std::nullopt;
  for (int i = 0; i < rows; ++i) {
    if (basis[i] < n) continue;
    for (int j = 0; j < n; ++j) {
      if (std::abs(t[i][j]) > kEps) {
        pivot(i, j);
        break;
      }
    }
  }

  // Phase 2 on the original costs; artificials never re-enter.
  std::fill(obj.begin(), obj.end(), 0.0);
  for (int j = 0; j < n; ++j) obj[j] = c[j];
  for (int i = 0; i < rows; ++i) {
    const double cb = basis[i] < n ? c[basis[i]] : 0.0;
    if (cb == 0.0) continue;
    for (int j = 0; j < width; ++j) obj[j] -= cb * t[i][j];
  }
  run(n);
  double value = 0.0;
  for (int i = 0; i < rows; ++i) {
    if (basis[i] < n) value += c[basis[i]] * t[i][width - 1];
  }
  return value;
}

PathOptions AllSimplePaths(const TwoMetricGraph& g, VertexId from,
                           VertexId to, int limit) {
  CheckVertex(g, from);
  CheckVertex(g, to);
  PathOptions paths;
  std::vector<char> on_path(g.num_vertices(), 0);
  std::vector<EdgeId> path;
  std::function<void(VertexId)> dfs = [&](VertexId u) {
    if (u == to) {
      if (static_cast<int>(paths.size()) >= limit) {
        throw BudgetExceeded("more than " + std::to_string(limit) +
                             " simple paths");
      }
      paths.push_back(path);
      return;
    }
    on_path[u] = 1;
    for (EdgeId e : g.out_edges(u)) {
      const VertexId v = g.edge(e).head;
      if (on_path[v]) continue;
      path.push_back(e);
      dfs(v);
      path.pop_back();
    }
    on_path[u] = 0;
  };
  dfs(from);
  return paths;
}

double PathChoiceOpt(const TwoMetricGraph& g,
                     const std::vector<PathOptions>& options,
                     double max_combinations) {
  const int d = static_cast<int>(options.size());
  double product = 1.0;
  for (const PathOptions& o : options) {
    if (o.empty()) throw InvalidInput("demand without a path option");
    product *= static_cast<double>(o.size());
  }
  if (product > max_combinations) {
    throw BudgetExceeded("path choice over " + std::to_string(product) +
                         " combinations exceeds the budget");
  }
  // Few-option demands first, cheap options first.
  std::vector<int> order(d);
  for (int i = 0; i < d; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return options[a].size() < options[b].size();
  });
  std::vector<PathOptions> sorted(d);
  std::vector<double> rest(d + 1, 0.0);
  for (int i = 0; i < d; ++i) {
    sorted[i] = options[order[i]];
    std::stable_sort(sorted[i].begin(), sorted[i].end(),
                     [&](const auto& a, const auto& b) {
                       return PathCost(g, a) + PathLength(g, a) <
                              PathCost(g, b) + PathLength(g, b);
                     });
  }
  for (int i = d - 1; i >= 0; --i) {
    double shortest = kInfinity;
    for (const auto& p : sorted[i]) {
      shortest = std::min(shortest, PathLength(g, p));
    }
    rest[i] = rest[i + 1] + shortest;
  }

  std::vector<int> bought(g.num_edges(), 0);
  double best = kInfinity;
  std::function<void(int, double)> dfs = [&](int i, double cost) {
    if (cost + rest[i] >= best) return;
    if (i == d) {
      best = cost;
      return;
    }
    for (const auto& path : sorted[i]) {
      double add = 0.0;
      for (EdgeId e : path) {
        const Edge& edge = g.edge(e);
        add += edge.length;
        if (bought[g.Canonical(e)]++ == 0) add += edge.cost;
      }
      dfs(i + 1, cost + add);
      for (EdgeId e : path) --bought[g.Canonical(e)];
    }
  };
  dfs(0, 0.0);
  return best;
}

double LayeredSsOpt(const LayeredGraph& layered,
                    std::span<const VertexId> terminals, VertexId root) {
  const bool up = layered.direction() == Direction::kUp;
  std::vector<PathOptions> options;
  for (VertexId v : terminals) {
    const VertexId t = layered.TerminalVertex(v);
    const VertexId r = layered.RootVertex(root);
    options.push_back(up ? AllSimplePaths(layered.graph(), t, r)
                         : AllSimplePaths(layered.graph(), r, t));
  }
  return PathChoiceOpt(layered.graph(), options);
}

double HOpt(const JunctionForest& h, std::span<const TerminalPair> pairs,
            double max_combinations) {
  std::vector<PathOptions> options;
  for (const TerminalPair& p : pairs) {
    options.push_back(AllSimplePaths(h.graph(), h.SourceTerminal(p.s),
                                     h.SinkTerminal(p.t)));
  }
  return PathChoiceOpt(h.graph(), options, max_combinations);
}

}  // namespace bab
