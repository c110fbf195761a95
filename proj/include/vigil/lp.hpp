#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vigil/rational.hpp"

namespace vigil::lp {

enum class Relation { LessEqual, GreaterEqual, Equal };

struct Term {
  int var;
  Rational coef;
};

using LinearExpr = std::vector<Term>;

struct LinearConstraint {
  LinearExpr terms; // sorted by var, no duplicates, no zero coefficients
  Relation rel = Relation::LessEqual;
  Rational rhs;
  std::string label;
};

// Merges duplicate variables, drops zeros and sorts. Throws InputError when
// nothing is left, since a constraint must mention at least one variable.
LinearConstraint make_constraint(LinearExpr terms, Relation rel, Rational rhs, std::string label = {});
LinearExpr canonical(LinearExpr terms);

// {x >= 0 : every constraint holds}
struct Polytope {
  int num_vars = 0;
  std::vector<LinearConstraint> constraints;

  void add(LinearConstraint c) { constraints.push_back(std::move(c)); }
};

enum class Status { Optimal, Infeasible, Unbounded, TargetReached };

struct LpResult {
  Status status = Status::Infeasible;
  Rational objective_value;
  std::vector<Rational> point;

  bool feasible() const { return status == Status::Optimal || status == Status::TargetReached; }
};

struct LpOptions {
  // Stop phase 2 as soon as the objective exceeds this value. The point
  // returned is feasible, objective_value is its (not necessarily optimal) value.
  std::optional<Rational> stop_above;
};

LpResult lp_max(const Polytope& poly, const LinearExpr& objective, const LpOptions& options = {});

struct UnionResult {
  LpResult result;
  int member = -1;
};

// Maximum over the members; lowest index wins among equal optima.
UnionResult union_max(const std::vector<Polytope>& polys, const LinearExpr& objective);

Rational evaluate(const LinearExpr& expr, const std::vector<Rational>& point);
bool satisfies(const LinearConstraint& c, const std::vector<Rational>& point);
bool contains(const Polytope& poly, const std::vector<Rational>& point);

// Number of lp_max calls made by this thread since start.
long long call_count();

} // namespace vigil::lp
