#pragma once

#include <vector>

#include "vigil/feasible.hpp"
#include "vigil/model.hpp"

namespace vigil {

// pi[i][k]: guaranteed probability of agent i for her k-th indifference class.
using GuaranteeTable = std::vector<std::vector<Rational>>;

struct RateSegment {
  Rational start; // the segment runs from start until the next segment's start
  Rational rate;
};

// Piecewise-constant rate per agent. The first segment must start at 0;
// starts strictly increase; the last segment extends forever.
struct EatingRates {
  std::vector<std::vector<RateSegment>> agents;

  static EatingRates constant(int n, Rational rate = Rational(1));
  void validate(int n) const;
  Rational rate_at(int agent, const Rational& t) const;
  // Smallest segment start strictly after t over all agents, if any.
  std::optional<Rational> next_breakpoint(const Rational& t) const;
  int breakpoint_count() const;
};

struct VerRound {
  std::vector<int> active;       // agents in N' for this round
  std::vector<int> chosen_class; // E_i per active agent, parallel to active
  Rational delta;
  Rational time; // time at the start of the round
  GuaranteeTable pi;             // guarantees after the round
  long long lp_calls = 0;        // cumulative LP solves so far in this run
};

struct VerTrace {
  std::vector<VerRound> rounds;
  long long lp_calls = 0;
  int members = 0;
};

struct VerResult {
  Allocation allocation;
  VerTrace trace;
};

// Vigilant eating with unit rates. An empty order means 0, 1, ..., n-1.
VerResult ver(const Instance& inst, const FeasibleSet& x, std::vector<int> order = {});
VerResult ver_with_rates(const Instance& inst, const FeasibleSet& x, const EatingRates& rates, std::vector<int> order = {});

// Agents in sigma order each maximize their class guarantees best-first.
Allocation vigilant_priority(const Instance& inst, const FeasibleSet& x, std::vector<int> sigma = {});

// Feasibility LP over the members; first feasible member's point.
Allocation any_point(const FeasibleSet& x);

} // namespace vigil
