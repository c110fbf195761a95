#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "vigil/lp.hpp"
#include "vigil/model.hpp"

namespace vigil {

// One polytope of a feasible set. Its LP variables are either the n*m
// allocation variables themselves (empty embedding) or auxiliary variables,
// with embedding[var(i,o)] expressing p(i,o) in terms of them.
struct Member {
  lp::Polytope poly;
  std::vector<lp::LinearExpr> embedding;
  std::string label;

  bool is_identity() const { return embedding.empty(); }
  // Rewrites an expression over allocation variables into LP variables.
  lp::LinearExpr lift(const lp::LinearExpr& alloc_expr) const;
  lp::LinearConstraint lift(const lp::LinearConstraint& c) const;
  Allocation project(const std::vector<Rational>& point, int n, int m) const;
  // Exact membership of an allocation (an LP for lifted members).
  bool contains(const Allocation& p) const;
};

struct FeasibleSet {
  int n = 0;
  int m = 0;
  std::vector<Member> members;

  bool is_convex() const { return members.size() == 1; }
  bool contains(const Allocation& p) const;
  // Index of the first member containing p, or -1.
  int member_containing(const Allocation& p) const;
};

struct Quota {
  std::vector<int> agents;
  std::vector<int> objects;
  Rational lower;
  Rational upper;
};

struct ConstraintSpec {
  enum class Kind {
    Unconstrained,
    CustomLinear,
    Quotas,
    IndividualRationality,
    Claimwise,
    Fractional,
    ExPost,
    ExAnte,
    DeterministicOnly
  };

  Kind kind = Kind::Unconstrained;
  std::vector<lp::LinearConstraint> linear; // over allocation variables
  std::vector<Quota> quotas;
  Allocation endowment;
  std::shared_ptr<ConstraintSpec> base; // DeterministicOnly

  static ConstraintSpec of(Kind k) {
    ConstraintSpec s;
    s.kind = k;
    return s;
  }
};

std::string kind_name(ConstraintSpec::Kind kind);

struct BuildOptions {
  long long enumeration_budget = 10'000'000; // leaves visited while enumerating 0/1 allocations
  int branch_budget = 20;                    // nontrivial (agent, object) pairs for ex-ante stability
};

// Entries >= 0, column sums vs supply, row sums <= cap, plus p <= 1 bounds
// where caps and supplies do not already imply them.
lp::Polytope base_polytope(const Instance& inst);

FeasibleSet build(const ConstraintSpec& spec, const Instance& inst, const BuildOptions& options = {});

FeasibleSet claimwise_polytope(const Instance& inst);
FeasibleSet fractional_polytope(const Instance& inst);
FeasibleSet expost_hull(const Instance& inst, const BuildOptions& options = {});
FeasibleSet exante_union(const Instance& inst, const BuildOptions& options = {});
FeasibleSet ir_polytope(const Instance& inst, const Allocation& endowment);
FeasibleSet quota_polytope(const Instance& inst, const std::vector<Quota>& quotas);
FeasibleSet linear_polytope(const Instance& inst, const std::vector<lp::LinearConstraint>& rows);
FeasibleSet deterministic_only(const FeasibleSet& base, const Instance& inst, const BuildOptions& options = {});

// Pairwise stability of a 0/1 allocation under (weak) priorities.
bool is_deterministic_stable(const Allocation& p, const Instance& inst);

// Calls visit on every complete-or-partial (per inst.complete) 0/1 allocation
// respecting caps and integer supplies, in lexicographic order of the
// row-major assignment vector. Stops early when visit returns false.
void for_each_deterministic(const Instance& inst, long long budget, const std::function<bool(const Allocation&)>& visit);

std::vector<Allocation> enumerate_deterministic_stable(const Instance& inst, long long budget = 10'000'000);

} // namespace vigil
