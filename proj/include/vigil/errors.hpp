#pragma once

#include <stdexcept>
#include <string>

namespace vigil {

// Malformed input: bad files, dimension mismatches, violated preconditions.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyFeasibleSet : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Base for every combinatorial guard (enumeration, branching, patterns).
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EnumerationBudgetExceeded : BudgetExceeded {
  using BudgetExceeded::BudgetExceeded;
};

struct BranchBudgetExceeded : BudgetExceeded {
  using BudgetExceeded::BudgetExceeded;
};

struct NotDecomposable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when an algorithm contract is broken; indicates a bug, not bad input.
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

} // namespace vigil
