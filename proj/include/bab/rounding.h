#pragma once

// Online partial rounding: per-root random thresholds turn the fractional
// assignment z into an integral pair -> root assignment.

#include <cstdint>
#include <map>
#include <ostream>
#include <utility>
#include <vector>

#include "bab/composite_lp.h"

namespace bab {

// Closed interval the thresholds are drawn from: [1/(2n), 1/(3 log2 n)],
// collapsing to (about) the lower end when that is the larger one.
std::pair<double, double> ThresholdInterval(int n);

struct ThresholdDraw {
  std::vector<double> tau;  // by root index, virtual root last
  uint64_t seed = 0;
};

// Independent uniform draws, one per root. Deterministic given the seed.
ThresholdDraw DrawThresholds(int num_roots, int n, uint64_t seed);

// Seed of the draw used in a given guess epoch.
uint64_t EpochSeed(uint64_t seed, int epoch);

// min(1, v / tau).
double ScaleValue(double v, double tau);

struct ScaledSolution {
  std::vector<std::vector<double>> x;  // by root, dense over global arcs
  // pair -> by root -> dense over global arcs (empty for ineligible roots)
  std::map<int, std::vector<std::vector<double>>> f;
  std::map<int, std::vector<int>> z;  // pair -> by root, 0 or 1
};

ScaledSolution Scale(const FractionalState& state, const ThresholdDraw& draw);

enum class Outcome { kAssigned, kFallback, kDropped };

const char* OutcomeName(Outcome outcome);

struct AssignmentEntry {
  Outcome outcome = Outcome::kFallback;
  int root = -1;
  double z = 0.0;    // z of the chosen root, or the largest z on fallback
  double tau = 0.0;  // threshold of that root
};

// Among roots with z >= tau the largest z wins, smallest id on ties. Picking
// `virtual_root` (-1 for none) means the pair is dropped.
AssignmentEntry ChooseRoot(const std::vector<int>& roots,
                           const std::vector<double>& z,
                           const std::vector<double>& tau, int virtual_root);

AssignmentEntry Assign(const FractionalState& state, const ThresholdDraw& draw,
                       int pair);

// Write-once pair -> assignment map.
class Assignment {
 public:
  // Throws IntegrityError when the pair already has an entry.
  void Record(int pair, const AssignmentEntry& entry);
  bool contains(int pair) const { return entries_.contains(pair); }
  const AssignmentEntry& at(int pair) const { return entries_.at(pair); }
  const std::map<int, AssignmentEntry>& entries() const { return entries_; }

  // Columns pair,outcome,root,z_value,tau.
  void WriteCsv(std::ostream& out) const;

 private:
  std::map<int, AssignmentEntry> entries_;
};

// Max flow from the pair's terminal to root r (or back) under capacities
// min(1, f / tau_r). At least 1 whenever z >= tau_r.
double ScaledFlowCut(const FractionalState& state, const ThresholdDraw& draw,
                     int pair, int root, Direction side);

}  // namespace bab
