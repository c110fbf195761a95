#include "vigil/verify.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "vigil/errors.hpp"

namespace vigil {
namespace {

using lp::LinearExpr;
using lp::Relation;

LinearExpr contour_expr(const Instance& inst, int i, int depth) {
  LinearExpr e;
  const auto& pref = inst.preferences[i];
  for (int k = 0; k < depth; ++k) {
    for (int o : pref[k]) e.push_back({inst.var(i, o), Rational(1)});
  }
  return lp::canonical(std::move(e));
}

LinearExpr class_expr(const Instance& inst, int i, int k) {
  LinearExpr e;
  for (int o : inst.preferences[i][k]) e.push_back({inst.var(i, o), Rational(1)});
  return lp::canonical(std::move(e));
}

// Adds "expr rel rhs"; returns false when expr is empty and the row fails.
bool add_row(lp::Polytope& poly, LinearExpr expr, Relation rel, const Rational& rhs, const char* label) {
  if (expr.empty()) {
    switch (rel) {
    case Relation::LessEqual:
      return rhs.sign() >= 0;
    case Relation::GreaterEqual:
      return rhs.sign() <= 0;
    case Relation::Equal:
      return rhs.is_zero();
    }
  }
  poly.constraints.push_back({std::move(expr), rel, rhs, label});
  return true;
}

void require_member(const Allocation& p, const FeasibleSet& x, const Instance& inst) {
  if (p.n() != inst.n() || p.m() != inst.m()) throw InputError("allocation dimensions do not match the instance");
  if (!x.contains(p)) throw InputError("allocation is not in the feasible set");
}

LinearExpr plus_var(LinearExpr e, int var, const Rational& coef) {
  e.push_back({var, coef});
  return e;
}

void require_square_unit(const Instance& inst, bool& unit) {
  unit = std::all_of(inst.capacities.begin(), inst.capacities.end(), [](int c) { return c == 1; }) &&
         std::all_of(inst.supplies.begin(), inst.supplies.end(), [](const Rational& s) { return s == Rational(1); });
}

// Kuhn's augmenting path on the boolean support matrix.
bool try_augment(int r, const std::vector<std::vector<char>>& allowed, const std::vector<char>& row_used,
                 std::vector<int>& col_match, std::vector<char>& seen) {
  const int size = static_cast<int>(allowed.size());
  for (int c = 0; c < size; ++c) {
    if (!allowed[r][c] || seen[c]) continue;
    seen[c] = 1;
    if (col_match[c] < 0 || try_augment(col_match[c], allowed, row_used, col_match, seen)) {
      col_match[c] = r;
      return true;
    }
  }
  return false;
}

bool has_perfect_matching(const std::vector<std::vector<char>>& allowed, const std::vector<char>& row_used,
                          const std::vector<char>& col_used) {
  const int size = static_cast<int>(allowed.size());
  std::vector<int> col_match(size, -1);
  for (int c = 0; c < size; ++c) {
    if (col_used[c]) col_match[c] = size; // blocked sentinel, never re-matched
  }
  for (int r = 0; r < size; ++r) {
    if (row_used[r]) continue;
    std::vector<char> seen(col_used.begin(), col_used.end());
    if (!try_augment(r, allowed, row_used, col_match, seen)) return false;
  }
  return true;
}

// Lexicographically smallest perfect matching (row r -> column) on the support.
std::vector<int> smallest_matching(const std::vector<std::vector<char>>& allowed) {
  const int size = static_cast<int>(allowed.size());
  std::vector<char> row_used(size, 0), col_used(size, 0);
  std::vector<int> match(size, -1);
  for (int r = 0; r < size; ++r) {
    row_used[r] = 1;
    for (int c = 0; c < size; ++c) {
      if (!allowed[r][c] || col_used[c]) continue;
      col_used[c] = 1;
      if (has_perfect_matching(allowed, row_used, col_used)) {
        match[r] = c;
        break;
      }
      col_used[c] = 0;
    }
    if (match[r] < 0) throw InternalError("support has no perfect matching");
  }
  return match;
}

std::vector<LotteryTerm> birkhoff(const Allocation& p) {
  const int n = p.n(), m = p.m();
  const int size = n; // complete unit instances have m <= n
  std::vector<std::vector<Rational>> a(size, std::vector<Rational>(size));
  std::vector<Rational> deficit(n);
  for (int i = 0; i < n; ++i) {
    for (int o = 0; o < m; ++o) a[i][o] = p(i, o);
    deficit[i] = Rational(1) - p.row_sum(i);
  }
  // Spread row deficits over the dummy columns (north-west corner rule).
  int col = m;
  Rational room(1);
  for (int i = 0; i < n && col < size; ++i) {
    while (deficit[i].sign() > 0 && col < size) {
      const Rational take = min(deficit[i], room);
      a[i][col] += take;
      deficit[i] -= take;
      room -= take;
      if (room.is_zero()) {
        ++col;
        room = Rational(1);
      }
    }
  }
  std::map<std::vector<Rational>, Rational> merged;
  std::vector<std::vector<Rational>> order;
  while (true) {
    std::vector<std::vector<char>> allowed(size, std::vector<char>(size, 0));
    bool any = false;
    for (int r = 0; r < size; ++r) {
      for (int c = 0; c < size; ++c) {
        allowed[r][c] = a[r][c].sign() > 0;
        any = any || allowed[r][c];
      }
    }
    if (!any) break;
    const auto match = smallest_matching(allowed);
    Rational weight = a[0][match[0]];
    for (int r = 1; r < size; ++r) weight = min(weight, a[r][match[r]]);
    Allocation q(n, m);
    for (int r = 0; r < size; ++r) {
      a[r][match[r]] -= weight;
      if (match[r] < m) q(r, match[r]) = Rational(1);
    }
    auto [it, inserted] = merged.try_emplace(q.flat(), Rational());
    if (inserted) order.push_back(q.flat());
    it->second += weight;
  }
  std::vector<LotteryTerm> out;
  for (const auto& flat : order) {
    Allocation q(n, m);
    for (int v = 0; v < n * m; ++v) q(v / m, v % m) = flat[v];
    out.push_back({merged[flat], q});
  }
  return out;
}

std::vector<LotteryTerm> decompose_over(const Allocation& p, const std::vector<Allocation>& candidates) {
  const int n = p.n(), m = p.m();
  lp::Polytope poly;
  poly.num_vars = static_cast<int>(candidates.size());
  LinearExpr sum;
  for (int k = 0; k < poly.num_vars; ++k) sum.push_back({k, Rational(1)});
  if (!add_row(poly, sum, Relation::Equal, Rational(1), "weights")) throw NotDecomposable("no candidate allocations");
  for (int v = 0; v < n * m; ++v) {
    LinearExpr row;
    for (int k = 0; k < poly.num_vars; ++k) {
      const Rational& x = candidates[k].flat()[v];
      if (!x.is_zero()) row.push_back({k, x});
    }
    if (!add_row(poly, row, Relation::Equal, p.flat()[v], "cell")) {
      throw NotDecomposable("no candidate covers entry " + std::to_string(v / m + 1) + "," + std::to_string(v % m + 1));
    }
  }
  auto r = lp::lp_max(poly, {});
  if (!r.feasible()) throw NotDecomposable("allocation is not in the convex hull of the candidates");
  std::vector<LotteryTerm> out;
  for (int k = 0; k < poly.num_vars; ++k) {
    if (r.point[k].sign() > 0) out.push_back({r.point[k], candidates[k]});
  }
  return out;
}

bool within_support(const Allocation& q, const Allocation& p) {
  for (size_t v = 0; v < q.flat().size(); ++v) {
    if (!q.flat()[v].is_zero() && p.flat()[v].is_zero()) return false;
  }
  return true;
}

} // namespace

DominanceCheck is_constrained_sd_efficient(const Allocation& p, const FeasibleSet& x, const Instance& inst) {
  require_member(p, x, inst);
  DominanceCheck out;
  for (const auto& mem : x.members) {
    lp::Polytope poly = mem.poly;
    LinearExpr objective;
    Rational base;
    bool possible = true;
    for (int i = 0; i < inst.n() && possible; ++i) {
      const auto contour = contour_sums(p.row(i), inst.preferences[i]);
      for (size_t k = 0; k < contour.size() && possible; ++k) {
        LinearExpr e = mem.lift(contour_expr(inst, i, static_cast<int>(k) + 1));
        objective.insert(objective.end(), e.begin(), e.end());
        base += contour[k];
        possible = add_row(poly, std::move(e), Relation::GreaterEqual, contour[k], "contour");
      }
    }
    if (!possible) continue;
    auto r = lp::lp_max(poly, lp::canonical(std::move(objective)));
    ++out.lp_solves;
    if (r.status == lp::Status::Optimal && r.objective_value > base) {
      out.efficient = false;
      out.dominated_by = mem.project(r.point, inst.n(), inst.m());
      return out;
    }
  }
  return out;
}

DominanceCheck is_constrained_dl_efficient(const Allocation& p, const FeasibleSet& x, const Instance& inst,
                                           long long pattern_budget) {
  require_member(p, x, inst);
  DominanceCheck out;
  const int n = inst.n();
  std::vector<std::vector<Rational>> sums(n);
  for (int i = 0; i < n; ++i) sums[i] = class_sums(p.row(i), inst.preferences[i]);
  for (const auto& mem : x.members) {
    const int eps = mem.poly.num_vars;
    // pattern[i] = -1: class sums equal p's; k >= 0: equal above k, strictly more at k.
    std::vector<int> pattern;
    std::function<bool()> rec = [&]() -> bool {
      lp::Polytope poly = mem.poly;
      poly.num_vars = eps + 1;
      bool strict = false;
      for (int i = 0; i < static_cast<int>(pattern.size()); ++i) {
        const int upto = pattern[i] < 0 ? inst.preferences[i].num_classes() : pattern[i];
        for (int k = 0; k < upto; ++k) {
          if (!add_row(poly, mem.lift(class_expr(inst, i, k)), Relation::Equal, sums[i][k], "equal")) return false;
        }
        if (pattern[i] >= 0) {
          strict = true;
          add_row(poly, plus_var(mem.lift(class_expr(inst, i, pattern[i])), eps, Rational(-1)), Relation::GreaterEqual,
                  sums[i][pattern[i]], "strict");
        }
      }
      if (++out.lp_solves > pattern_budget) {
        throw BudgetExceeded("dl-efficiency search exceeded " + std::to_string(pattern_budget) + " patterns");
      }
      lp::LpOptions opts;
      opts.stop_above = Rational(0);
      auto r = lp::lp_max(poly, strict ? LinearExpr{{eps, Rational(1)}} : LinearExpr{}, opts);
      if (!r.feasible() && r.status != lp::Status::Unbounded) return false;
      if (strict && r.status != lp::Status::Unbounded && r.objective_value.sign() <= 0) return false;
      if (static_cast<int>(pattern.size()) == n) {
        if (!strict) return false;
        if (r.status == lp::Status::Unbounded) throw InternalError("dominance LP is unbounded");
        r.point.pop_back();
        out.dominated_by = mem.project(r.point, inst.n(), inst.m());
        return true;
      }
      const int i = static_cast<int>(pattern.size());
      for (int choice = -1; choice < inst.preferences[i].num_classes(); ++choice) {
        pattern.push_back(choice);
        const bool found = rec();
        pattern.pop_back();
        if (found) return true;
      }
      return false;
    };
    if (rec()) {
      out.efficient = false;
      return out;
    }
  }
  return out;
}

SignatureVector leximin_signature(const FeasibleSet& x, const Instance& inst) {
  if (!x.is_convex()) throw InputError("leximin signature needs a single convex member");
  const Member& mem = x.members[0];
  struct Entry {
    int agent, depth;
    LinearExpr expr;
  };
  std::vector<Entry> entries;
  for (int i = 0; i < inst.n(); ++i) {
    for (int d = 1; d <= inst.preferences[i].num_classes(); ++d) {
      entries.push_back({i, d, mem.lift(contour_expr(inst, i, d))});
    }
  }
  const int base_vars = mem.poly.num_vars;
  std::vector<std::optional<Rational>> fixed(entries.size());
  auto with_fixed = [&]() {
    lp::Polytope poly = mem.poly;
    for (size_t e = 0; e < entries.size(); ++e) {
      if (fixed[e] && !add_row(poly, entries[e].expr, Relation::GreaterEqual, *fixed[e], "fixed")) {
        throw InternalError("leximin lost feasibility");
      }
    }
    return poly;
  };
  while (std::any_of(fixed.begin(), fixed.end(), [](const auto& f) { return !f; })) {
    lp::Polytope poly = with_fixed();
    const int z = base_vars;
    poly.num_vars = base_vars + 1;
    for (size_t e = 0; e < entries.size(); ++e) {
      if (!fixed[e]) add_row(poly, plus_var(entries[e].expr, z, Rational(-1)), Relation::GreaterEqual, Rational(0), "min");
    }
    auto r = lp::lp_max(poly, {{z, Rational(1)}});
    if (r.status == lp::Status::Infeasible) throw EmptyFeasibleSet("feasible set is empty");
    if (r.status != lp::Status::Optimal) throw InternalError("leximin level LP is unbounded");
    const Rational level = r.objective_value;
    // Entries that can rise above the level are found by maximizing the
    // total lift; whatever never rises is pinned at the level.
    std::vector<size_t> unknown;
    for (size_t e = 0; e < entries.size(); ++e) {
      if (!fixed[e]) unknown.push_back(e);
    }
    while (!unknown.empty()) {
      lp::Polytope probe = with_fixed();
      probe.num_vars = base_vars + static_cast<int>(unknown.size());
      for (size_t e = 0; e < entries.size(); ++e) {
        if (fixed[e]) continue;
        const auto pos = std::find(unknown.begin(), unknown.end(), e);
        if (pos == unknown.end()) {
          add_row(probe, entries[e].expr, Relation::GreaterEqual, level, "level");
        } else {
          const int s = base_vars + static_cast<int>(pos - unknown.begin());
          add_row(probe, plus_var(entries[e].expr, s, Rational(-1)), Relation::GreaterEqual, level, "lift");
          add_row(probe, {{s, Rational(1)}}, Relation::LessEqual, Rational(1), "cap");
        }
      }
      LinearExpr objective;
      for (size_t u = 0; u < unknown.size(); ++u) objective.push_back({base_vars + static_cast<int>(u), Rational(1)});
      auto q = lp::lp_max(probe, objective);
      if (q.status != lp::Status::Optimal) throw InternalError("leximin probe failed");
      if (q.objective_value.is_zero()) break;
      std::vector<size_t> still;
      for (size_t u = 0; u < unknown.size(); ++u) {
        if (q.point[base_vars + u].is_zero()) still.push_back(unknown[u]);
      }
      unknown = std::move(still);
    }
    if (unknown.empty()) throw InternalError("leximin step fixed no entry");
    for (size_t e : unknown) fixed[e] = level;
  }
  auto r = lp::lp_max(with_fixed(), {});
  if (!r.feasible()) throw InternalError("leximin final point infeasible");
  return signature(mem.project(r.point, inst.n(), inst.m()), inst);
}

std::string notion_name(StabilityNotion notion) {
  switch (notion) {
  case StabilityNotion::ExAnte:
    return "exante";
  case StabilityNotion::ExPost:
    return "expost";
  case StabilityNotion::Fractional:
    return "fractional";
  case StabilityNotion::Claimwise:
    return "claimwise";
  }
  return "?";
}

StabilityNotion parse_notion(const std::string& name) {
  for (auto n : {StabilityNotion::ExAnte, StabilityNotion::ExPost, StabilityNotion::Fractional, StabilityNotion::Claimwise}) {
    if (notion_name(n) == name) return n;
  }
  throw InputError("unknown stability notion '" + name + "'");
}

StabilityCheck check_stability(const Allocation& p, const Instance& inst, StabilityNotion notion, const BuildOptions& options) {
  if (!inst.priorities) throw InputError("stability needs priorities");
  if (p.n() != inst.n() || p.m() != inst.m()) throw InputError("allocation dimensions do not match the instance");
  const int n = inst.n(), m = inst.m();
  auto contour = [&](int i, int o, bool exclude_o) {
    Rational s;
    const auto& pref = inst.preferences[i];
    for (int k = 0; k <= pref.class_of(o); ++k) {
      for (int x : pref[k]) {
        if (!(exclude_o && x == o)) s += p(i, x);
      }
    }
    return s;
  };
  StabilityCheck out;
  switch (notion) {
  case StabilityNotion::Claimwise:
    for (int o = 0; o < m; ++o) {
      for (int i = 0; i < n; ++i) {
        const Rational held = contour(i, o, true);
        for (int j = 0; j < n; ++j) {
          if (inst.priority(o).prefers(i, j) && held < p(j, o)) return {false, i, j, o};
        }
      }
    }
    return out;
  case StabilityNotion::Fractional:
    for (int i = 0; i < n; ++i) {
      const Rational cap(inst.capacities[i]);
      for (int o = 0; o < m; ++o) {
        Rational higher;
        for (int j = 0; j < n; ++j) {
          if (inst.priority(o).weakly_prefers(j, i)) higher += p(j, o);
        }
        if (contour(i, o, true) + cap * higher < cap) return {false, i, -1, o};
      }
    }
    return out;
  case StabilityNotion::ExAnte:
    for (int o = 0; o < m; ++o) {
      for (int j = 0; j < n; ++j) {
        if (contour(j, o, false) >= Rational(inst.capacities[j])) continue;
        for (int i = 0; i < n; ++i) {
          if (inst.priority(o).prefers(j, i) && p(i, o).sign() > 0) return {false, j, i, o};
        }
      }
    }
    return out;
  case StabilityNotion::ExPost:
    try {
      const FeasibleSet hull = expost_hull(inst, options);
      out.stable = hull.members[0].contains(p);
    } catch (const EmptyFeasibleSet&) {
      out.stable = false;
    }
    return out;
  }
  return out;
}

PairCheck check_equal_treatment(const Allocation& p, const Instance& inst, TreatmentMode mode) {
  for (int i = 0; i < inst.n(); ++i) {
    for (int j = i + 1; j < inst.n(); ++j) {
      if (!(inst.preferences[i] == inst.preferences[j])) continue;
      if (mode == TreatmentMode::Limited) {
        if (inst.capacities[i] != inst.capacities[j]) continue;
        bool same = true;
        for (int o = 0; o < inst.m() && inst.priorities && same; ++o) same = inst.priority(o).indifferent(i, j);
        if (!same) continue;
      }
      if (class_sums(p.row(i), inst.preferences[i]) != class_sums(p.row(j), inst.preferences[i])) return {false, i, j};
    }
  }
  return {};
}

PairCheck check_weak_sd_envy(const Allocation& p, const Instance& inst) {
  for (int i = 0; i < inst.n(); ++i) {
    for (int j = 0; j < inst.n(); ++j) {
      if (i == j) continue;
      bool same = true;
      for (int o = 0; o < inst.m() && inst.priorities && same; ++o) same = inst.priority(o).indifferent(i, j);
      if (!same) continue;
      if (sd_dominates(p.row(j), p.row(i), inst.preferences[i]) == SdResult::Strict) return {false, i, j};
    }
  }
  return {};
}

std::vector<LotteryTerm> bvn_decompose(const Allocation& p, const Instance& inst,
                                       const std::optional<std::vector<Allocation>>& restrict_to,
                                       const BuildOptions& options) {
  const std::string problem = allocation_problem(p, inst);
  if (!problem.empty()) throw InputError("cannot decompose: " + problem);
  if (restrict_to) {
    std::vector<Allocation> candidates;
    for (const auto& q : *restrict_to) {
      if (q.n() != p.n() || q.m() != p.m() || !q.is_deterministic()) throw InputError("restriction must list deterministic allocations");
      if (!within_support(q, p)) continue;
      if (std::find(candidates.begin(), candidates.end(), q) == candidates.end()) candidates.push_back(q);
    }
    return decompose_over(p, candidates);
  }
  if (p.is_deterministic()) return {{Rational(1), p}};
  bool unit = false;
  require_square_unit(inst, unit);
  if (unit && inst.complete) return birkhoff(p);
  std::vector<Allocation> candidates;
  for_each_deterministic(inst, options.enumeration_budget, [&](const Allocation& q) {
    if (within_support(q, p)) candidates.push_back(q);
    return true;
  });
  return decompose_over(p, candidates);
}

DominanceCheck check_two_sided_sd_efficiency(const Allocation& p, const Instance& inst) {
  if (!inst.has_strict_preferences()) throw InputError("two-sided efficiency needs strict preferences");
  if (!inst.priorities) throw InputError("two-sided efficiency needs priorities");
  const std::string problem = allocation_problem(p, inst);
  if (!problem.empty()) throw InputError(problem);
  lp::Polytope poly = base_polytope(inst);
  LinearExpr objective;
  Rational base;
  auto require = [&](LinearExpr e, const Rational& value) {
    objective.insert(objective.end(), e.begin(), e.end());
    base += value;
    add_row(poly, std::move(e), Relation::GreaterEqual, value, "contour");
  };
  for (int i = 0; i < inst.n(); ++i) {
    const auto contour = contour_sums(p.row(i), inst.preferences[i]);
    for (size_t k = 0; k < contour.size(); ++k) require(contour_expr(inst, i, static_cast<int>(k) + 1), contour[k]);
  }
  for (int o = 0; o < inst.m(); ++o) {
    const auto& prio = inst.priority(o);
    LinearExpr e;
    Rational value;
    for (int k = 0; k < prio.num_classes(); ++k) {
      for (int j : prio[k]) {
        e.push_back({inst.var(j, o), Rational(1)});
        value += p(j, o);
      }
      require(lp::canonical(e), value);
    }
  }
  DominanceCheck out;
  auto r = lp::lp_max(poly, lp::canonical(std::move(objective)));
  out.lp_solves = 1;
  if (r.status == lp::Status::Optimal && r.objective_value > base) {
    out.efficient = false;
    Allocation q(inst.n(), inst.m());
    for (int v = 0; v < inst.n() * inst.m(); ++v) q(v / inst.m(), v % inst.m()) = r.point[v];
    out.dominated_by = q;
  }
  return out;
}

} // namespace vigil
