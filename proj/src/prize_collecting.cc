#include "bab/prize_collecting.h"

#include <string>

#include "bab/errors.h"

namespace bab {

LpNetworks AugmentWithPenalties(LpNetworks nets,
                                std::span<const TerminalPair> pairs) {
  for (const TerminalPair& p : pairs) {
    if (!p.penalty) {
      throw InvalidInput("pair " + std::to_string(p.index) +
                         " has no penalty");
    }
    if (!(*p.penalty >= 0.0)) {
      throw InvalidInput("pair " + std::to_string(p.index) +
                         " has a negative penalty");
    }
  }
  nets.prize_collecting = true;
  return nets;
}

bool WorthRouting(const TerminalPair& pair, double marginal) {
  return !pair.penalty || marginal <= *pair.penalty;
}

bool PenaltyAccount::Settle(const TerminalPair& pair,
                            const AssignmentEntry& entry) {
  if (entry.outcome != Outcome::kDropped) return true;
  Drop(pair);
  return false;
}

void PenaltyAccount::Drop(const TerminalPair& pair) {
  if (!pair.penalty) {
    throw InvalidInput("pair " + std::to_string(pair.index) +
                       " cannot be dropped without a penalty");
  }
  if (!dropped_.emplace(pair.index, *pair.penalty).second) {
    throw IntegrityError("pair " + std::to_string(pair.index) +
                         " dropped twice");
  }
}

double PenaltyAccount::total() const {
  double sum = 0.0;
  for (const auto& [pair, q] : dropped_) sum += q;
  return sum;
}

}  // namespace bab
