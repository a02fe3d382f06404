#pragma once

// Discard option: every pair may be dropped for its penalty q_i. The
// fractional side lives in the composite LP's virtual root; this header
// holds the input checks and the penalty accounting.

#include <map>
#include <span>

#include "bab/composite_lp.h"
#include "bab/instance.h"
#include "bab/rounding.h"

namespace bab {

// Turns on the virtual root. Throws InvalidInput when a pair has no penalty
// or a negative one.
LpNetworks AugmentWithPenalties(LpNetworks nets,
                                std::span<const TerminalPair> pairs);

// Whether routing at `marginal` extra cost beats paying the pair's penalty.
// Always true outside prize-collecting mode.
bool WorthRouting(const TerminalPair& pair, double marginal);

// Penalties paid for dropped pairs.
class PenaltyAccount {
 public:
  // Dropped pairs pay q_i and return false; anything else must be routed.
  bool Settle(const TerminalPair& pair, const AssignmentEntry& entry);
  // Throws IntegrityError when the pair was already dropped and InvalidInput
  // when it has no penalty.
  void Drop(const TerminalPair& pair);

  bool IsDropped(int pair) const { return dropped_.contains(pair); }
  const std::map<int, double>& dropped() const { return dropped_; }
  // Summed in pair order.
  double total() const;

 private:
  std::map<int, double> dropped_;
};

}  // namespace bab
