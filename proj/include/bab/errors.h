#pragma once

#include <stdexcept>
#include <string>

namespace bab {

// Malformed or out-of-contract input (negative costs, unknown vertices, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An exponential routine refused to run because its size budget was exceeded.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Internal consistency check failed (ledger/path integrity, missing back paths).
class IntegrityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// An online computation did not converge within its iteration cap.
class SolverStalled : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bab
