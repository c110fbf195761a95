#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vigil/feasible.hpp"
#include "vigil/model.hpp"

namespace vigil {

struct DominanceCheck {
  bool efficient = true;
  std::optional<Allocation> dominated_by;
  long long lp_solves = 0;
};

// Is there q in X with q(i) weakly sd-better than p(i) for all agents and
// strictly for one? One slack-maximizing LP per member.
DominanceCheck is_constrained_sd_efficient(const Allocation& p, const FeasibleSet& x, const Instance& inst);

// Same question for lexicographic dominance, searched over per-agent
// patterns ("equal everywhere" or "strictly better at class k, equal above").
DominanceCheck is_constrained_dl_efficient(const Allocation& p, const FeasibleSet& x, const Instance& inst,
                                           long long pattern_budget = 100'000);

// Leximin-optimal signature over a convex X by sequential LPs.
SignatureVector leximin_signature(const FeasibleSet& x, const Instance& inst);

enum class StabilityNotion { ExAnte, ExPost, Fractional, Claimwise };

std::string notion_name(StabilityNotion notion);
StabilityNotion parse_notion(const std::string& name);

struct StabilityCheck {
  bool stable = true;
  // First violation found. agent is the one with the complaint, other the
  // agent she complains about (-1 when the notion has none).
  int agent = -1;
  int other = -1;
  int object = -1;
};

StabilityCheck check_stability(const Allocation& p, const Instance& inst, StabilityNotion notion,
                               const BuildOptions& options = {});

enum class TreatmentMode { Full, Limited };

struct PairCheck {
  bool ok = true;
  int first = -1;
  int second = -1;
};

PairCheck check_equal_treatment(const Allocation& p, const Instance& inst, TreatmentMode mode);
// first envies second: same priority everywhere, p(second) strictly sd-better for first.
PairCheck check_weak_sd_envy(const Allocation& p, const Instance& inst);

struct LotteryTerm {
  Rational weight;
  Allocation outcome;
};

// Writes p as a lottery over deterministic allocations. With restrict_to,
// only those allocations may be used (NotDecomposable if p is outside their hull).
std::vector<LotteryTerm> bvn_decompose(const Allocation& p, const Instance& inst,
                                       const std::optional<std::vector<Allocation>>& restrict_to = std::nullopt,
                                       const BuildOptions& options = {});

// Dominance by both agent preferences and object priorities over the base
// polytope. Requires strict preferences.
DominanceCheck check_two_sided_sd_efficiency(const Allocation& p, const Instance& inst);

} // namespace vigil
