#pragma once

// End-to-end online runs: fractional solver, partial rounding, and per-root
// single-sink dispatch, with reports and experiment suites.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bab/directed_reduction.h"
#include "bab/graph.h"
#include "bab/instance.h"
#include "bab/oracle.h"
#include "bab/rounding.h"
#include "json.hpp"

namespace bab {

struct RunConfig {
  std::optional<Mode> mode;  // overrides the instance file's mode
  std::optional<int> h;      // layering height; default ceil(log2 n), 2 in
                             // directed mode
  double kappa = 0.0;        // <= 0 selects the default
  double delta_max = 0.05;
  uint64_t seed = 0;
  std::string ss_alg = "greedy";
  bool oracle = false;
  bool check_invariants = false;
  // Replaces the random thresholds of every root (ablations).
  std::optional<double> fixed_threshold;
  OracleBudget oracle_budget;
  int64_t node_budget = kDefaultNodeBudget;
};

struct ArrivalRow {
  int pair = 0;
  VertexId s = 0;  // input vertex ids
  VertexId t = 0;
  std::string outcome;  // assigned, fallback, dropped or infeasible
  int root = -1;
  int epoch = 0;
  double z = 0.0;
  double tau = 0.0;
  double marginal = 0.0;    // online cost added by this arrival
  double cumulative = 0.0;  // online total after it
  double penalty = 0.0;     // penalty paid by this arrival
};

struct RunReport {
  std::string mode;
  int n = 0;  // input vertices
  int k = 0;
  std::vector<ArrivalRow> rows;
  double buy = 0.0;
  double length = 0.0;
  double penalty = 0.0;
  double total = 0.0;
  int fallbacks = 0;
  int dropped = 0;
  int infeasible = 0;
  int epochs = 1;
  // Single-sink instances' cost in their own graph, and the cost of their
  // ledgers pulled back to the working graph.
  double layered_cost = 0.0;
  double pullback_cost = 0.0;
  std::optional<double> opt;
  std::optional<double> junction_opt;
  std::optional<double> lp_lb;

  // Final working-graph ledger and the rounding decisions.
  SolutionLedger ledger;
  Assignment assignment;

  // online total / opt; nullopt without an oracle value.
  std::optional<double> ratio() const;
  // Routed arrivals that used the fallback path.
  double fallback_rate() const;
};

// Throws InvalidInput on a malformed instance or config and BudgetExceeded
// when H or an enabled oracle exceeds its budget. Unreachable pairs without a
// penalty are reported as infeasible and skipped.
RunReport RunOnline(const Instance& instance, const RunConfig& config);

// Per-arrival rows followed by "# key=value" total lines; %.17g numbers.
void WriteReportCsv(const RunReport& report, std::ostream& out);

// Instance kinds: random-digraph, grid, star-of-paths, and adversarial, which
// wraps another kind ("inner") and reorders its pairs. Throws InvalidInput on
// bad parameters.
InstanceSpec Generate(const std::string& kind, const nlohmann::json& params,
                      uint64_t seed);

// Pair order (over at most 6 pairs) maximizing the cost of greedy routing;
// the lexicographically first worst permutation wins ties.
InstanceSpec AdversarialOrder(const InstanceSpec& spec);

// Cost of routing the pairs in order with greedy c * [unbought] + l shortest
// paths, skipping unreachable pairs.
double GreedyRoutingCost(const Instance& instance);

struct ExperimentRun {
  std::string instance;  // path, relative to the suite file
  std::optional<nlohmann::json> generate;  // {"kind", "params", "seed"}
  RunConfig config;
};

struct ExperimentSummary {
  int runs = 0;
  std::vector<std::string> failures;  // "<instance>: <message>"
  std::optional<double> max_ratio;
  std::optional<double> geomean_ratio;
};

// Suite JSON: {"runs": [{"instance": F | "generate": {...}, "mode", "seed",
// "h", "kappa", "dmax", "ss_alg", "oracle"}]}.
std::vector<ExperimentRun> ParseSuite(const nlohmann::json& suite,
                                      const std::string& base_dir);

// Writes the CSV header and one row per run in suite order. Failed runs get
// a row with blank results and an entry in the summary.
ExperimentSummary RunExperiment(const std::vector<ExperimentRun>& runs,
                                std::ostream& csv, int threads = 1);

inline constexpr const char* kExperimentHeader =
    "instance,n,k,mode,online_total,opt,junction_opt,ratio,fallback_rate,"
    "epochs,wall_ms";

}  // namespace bab
