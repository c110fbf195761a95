#pragma once

#include <vector>

#include "vigil/model.hpp"

namespace vigil {

// Simultaneous unit-rate eating of the best available indifference class,
// on the unconstrained set of complete allocations. Availability uses Hall's
// condition over object subsets, so m should stay small (2^m subsets).
// Requires min(cap(i), supply(o)) <= 1 for every pair.
Allocation probabilistic_serial(const Instance& inst);

// Agent-proposing deferred acceptance. Priority ties are broken by position
// in tie_break (a permutation of agents; empty means 0, 1, ..., n-1).
// Requires strict preferences and integer supplies.
Allocation deferred_acceptance(const Instance& inst, std::vector<int> tie_break = {});

// Exact average of deferred_acceptance over all n! tie-breaking orders.
Allocation deferred_acceptance_uniform(const Instance& inst, long long budget = 1'000'000);

// Greedy picks in the given order; ties inside a class go to the lowest object index.
Allocation serial_dictatorship(const Instance& inst, const std::vector<int>& order);

// Exact average of serial_dictatorship over all n! orders.
Allocation random_priority(const Instance& inst, long long budget = 1'000'000);

} // namespace vigil
