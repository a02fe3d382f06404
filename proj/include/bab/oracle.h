#pragma once

// Exact offline baselines for tiny instances: the global optimum, the
// single-sink optimum, the junction-tree optimum, and an LP lower bound.

#include <optional>
#include <span>
#include <vector>

#include "bab/directed_reduction.h"
#include "bab/graph.h"
#include "bab/instance.h"
#include "bab/layering.h"

namespace bab {

struct OracleBudget {
  int max_edges = 20;    // canonical edges for subset enumeration
  int max_vertices = 8;  // candidate roots for junction enumeration
  int max_pairs = 5;     // pairs for junction enumeration
};

struct OracleResult {
  double value = 0.0;
  SolutionLedger ledger;
};

// Minimum Obj_2M over all bought-edge subsets, routing every pair on its
// shortest l-path inside the subset. Throws BudgetExceeded when the graph has
// too many edges and InvalidInput when some pair cannot be connected.
OracleResult OfflineOpt(const TwoMetricGraph& g,
                        std::span<const TerminalPair> pairs,
                        const OracleBudget& budget = {});

// OfflineOpt with every terminal routed to the root (kUp) or from the root
// (kDown). Repeated terminals pay their length once per occurrence.
double SsOfflineOpt(const TwoMetricGraph& g,
                    std::span<const VertexId> terminals, VertexId root,
                    Direction direction, const OracleBudget& budget = {});

// Minimum over pair -> root assignments of the per-root single-sink plus
// single-source optima, with every tree paying for its own edge copies.
double JunctionOpt(const TwoMetricGraph& g,
                   std::span<const TerminalPair> pairs,
                   const OracleBudget& budget = {});

// Prize-collecting optimum: the cheapest set of pairs to drop at their
// penalties plus OfflineOpt (JunctionOpt when `junction`) of the rest. Pairs
// without a penalty are never dropped.
double PrizeCollectingOpt(const TwoMetricGraph& g,
                          std::span<const TerminalPair> pairs, bool junction,
                          const OracleBudget& budget = {});

// Optimum of the relaxation min sum c_e x_e + sum_i sum_e l_e f_ie over unit
// s_i -> t_i flows with f_ie <= x_e. Throws as OfflineOpt.
double LpLowerBound(const TwoMetricGraph& g,
                    std::span<const TerminalPair> pairs,
                    const OracleBudget& budget = {});

// Path options of one demand.
using PathOptions = std::vector<std::vector<EdgeId>>;

// Every simple path from `from` to `to`. Throws BudgetExceeded past `limit`.
PathOptions AllSimplePaths(const TwoMetricGraph& g, VertexId from,
                           VertexId to, int limit = 100000);

// Minimum, over one option per demand, of the union's buy cost plus the
// chosen paths' lengths (branch and bound). Throws InvalidInput when a demand
// has no option and BudgetExceeded when the option product exceeds
// `max_combinations`.
double PathChoiceOpt(const TwoMetricGraph& g,
                     const std::vector<PathOptions>& options,
                     double max_combinations = 1e8);

// Single-sink (kUp) or single-source (kDown) optimum on a layered graph with
// the terminals on level h and the root on level 0.
double LayeredSsOpt(const LayeredGraph& layered,
                    std::span<const VertexId> terminals, VertexId root);

// Optimum of the pairs on H, over all s:s -> t:t paths.
double HOpt(const JunctionForest& h, std::span<const TerminalPair> pairs,
            double max_combinations = 1e8);

// Dense two-phase simplex with Bland's rule for min c.x s.t. A x = b, x >= 0.
// Returns nullopt when infeasible; throws SolverStalled when unbounded.
std::optional<double> SolveStandardLp(
    const std::vector<std::vector<double>>& a, const std::vector<double>& b,
    const std::vector<double>& c);

}  // namespace bab
