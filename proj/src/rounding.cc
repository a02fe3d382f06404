#include "bab/rounding.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "bab/errors.h"
#include "bab/flow.h"

namespace bab {

std::pair<double, double> ThresholdInterval(int n) {
  if (n < 2) throw InvalidInput("thresholds need n >= 2");
  const double lo = 1.0 / (2.0 * n);
  const double hi = 1.0 / (3.0 * std::log2(static_cast<double>(n)));
  return {lo, std::max(lo * (1.0 + 1e-12), hi)};
}

ThresholdDraw DrawThresholds(int num_roots, int n, uint64_t seed) {
  const auto [lo, hi] = ThresholdInterval(n);
  std::seed_seq seq{static_cast<uint32_t>(seed),
                    static_cast<uint32_t>(seed >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> uniform(lo, hi);
  ThresholdDraw draw;
  draw.seed = seed;
  draw.tau.reserve(num_roots);
  for (int r = 0; r < num_roots; ++r) {
    draw.tau.push_back(std::clamp(uniform(rng), lo, hi));
  }
  return draw;
}

uint64_t EpochSeed(uint64_t seed, int epoch) {
  return seed * 0x9E3779B97F4A7C15ULL + static_cast<uint64_t>(epoch);
}

double ScaleValue(double v, double tau) { return std::min(1.0, v / tau); }

ScaledSolution Scale(const FractionalState& state, const ThresholdDraw& draw) {
  const LpNetworks& nets = state.networks();
  const int m = nets.num_arcs();
  ScaledSolution out;
  out.x.resize(nets.num_roots);
  for (int r = 0; r < nets.num_roots; ++r) {
    out.x[r].resize(m);
    for (int a = 0; a < m; ++a) {
      out.x[r][a] = ScaleValue(state.x(r, a), draw.tau[r]);
    }
  }
  for (const int pair : state.pair_ids()) {
    auto& fs = out.f[pair];
    auto& zs = out.z[pair];
    fs.resize(nets.TotalRoots());
    zs.assign(nets.TotalRoots(), 0);
    for (int r : state.eligible_roots(pair)) {
      zs[r] = state.z(pair, r) >= draw.tau[r] ? 1 : 0;
      if (nets.prize_collecting && r == nets.VirtualRoot()) {
        const double v = ScaleValue(state.z(pair, r), draw.tau[r]);
        fs[r] = {v, v};
        continue;
      }
      fs[r].resize(m);
      for (int a = 0; a < m; ++a) {
        fs[r][a] = ScaleValue(state.f(pair, r, a), draw.tau[r]);
      }
    }
  }
  return out;
}

const char* OutcomeName(Outcome outcome) {
  switch (outcome) {
    case Outcome::kAssigned:
      return "assigned";
    case Outcome::kFallback:
      return "fallback";
    case Outcome::kDropped:
      return "dropped";
  }
  return "?";
}

AssignmentEntry ChooseRoot(const std::vector<int>& roots,
                           const std::vector<double>& z,
                           const std::vector<double>& tau, int virtual_root) {
  AssignmentEntry best;
  AssignmentEntry largest;
  for (int r : roots) {
    if (largest.root < 0 || z[r] > largest.z ||
        (z[r] == largest.z && r < largest.root)) {
      largest = {Outcome::kFallback, r, z[r], tau[r]};
    }
    if (z[r] < tau[r]) continue;
    if (best.root < 0 || z[r] > best.z || (z[r] == best.z && r < best.root)) {
      best = {Outcome::kAssigned, r, z[r], tau[r]};
    }
  }
  if (best.root < 0) return largest;
  if (best.root == virtual_root) best.outcome = Outcome::kDropped;
  return best;
}

AssignmentEntry Assign(const FractionalState& state, const ThresholdDraw& draw,
                       int pair) {
  const LpNetworks& nets = state.networks();
  std::vector<double> z(nets.TotalRoots(), 0.0);
  const std::vector<int>& roots = state.eligible_roots(pair);
  for (int r : roots) z[r] = state.z(pair, r);
  return ChooseRoot(roots, z, draw.tau,
                    nets.prize_collecting ? nets.VirtualRoot() : -1);
}

void Assignment::Record(int pair, const AssignmentEntry& entry) {
  if (!entries_.emplace(pair, entry).second) {
    throw IntegrityError("pair " + std::to_string(pair) +
                         " already has an assignment");
  }
}

void Assignment::WriteCsv(std::ostream& out) const {
  out << "pair,outcome,root,z_value,tau\n";
  char buf[128];
  for (const auto& [pair, e] : entries_) {
    std::snprintf(buf, sizeof(buf), "%d,%s,%d,%.17g,%.17g\n", pair,
                  OutcomeName(e.outcome), e.root, e.z, e.tau);
    out << buf;
  }
}

double ScaledFlowCut(const FractionalState& state, const ThresholdDraw& draw,
                     int pair, int root, Direction side) {
  const FractionalState::SideView view = state.View(pair, root, side);
  FlowNetwork net(view.num_nodes);
  const LpNetworks& nets = state.networks();
  for (int a : *view.arcs) {
    const LpArc& arc = nets.arc(a);
    net.AddArc(arc.tail, arc.head,
               ScaleValue(state.f(pair, root, a), draw.tau[root]), 0.0);
  }
  return MaxFlow(net, view.source, view.sink).value;
}

}  // namespace bab
