#include "vigil/feasible.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "vigil/errors.hpp"

namespace vigil {
namespace {

using lp::LinearConstraint;
using lp::LinearExpr;
using lp::Relation;

// Terms for agent i's objects weakly preferred to o; exclude_o drops o itself.
LinearExpr contour_terms(const Instance& inst, int i, int o, bool exclude_o) {
  LinearExpr terms;
  const auto& pref = inst.preferences[i];
  for (int k = 0; k <= pref.class_of(o); ++k) {
    for (int x : pref[k]) {
      if (exclude_o && x == o) continue;
      terms.push_back({inst.var(i, x), Rational(1)});
    }
  }
  return terms;
}

std::string pair_label(const Instance& inst, int i, int o) { return inst.agent_ids[i] + "," + inst.object_ids[o]; }

bool expr_less(const LinearExpr& a, const LinearExpr& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), [](const lp::Term& x, const lp::Term& y) {
    if (x.var != y.var) return x.var < y.var;
    return x.coef < y.coef;
  });
}

bool expr_equal(const LinearExpr& a, const LinearExpr& b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](const lp::Term& x, const lp::Term& y) {
           return x.var == y.var && x.coef == y.coef;
         });
}

// Canonical sort, then drop exact duplicates (labels ignored).
void dedupe(std::vector<LinearConstraint>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const LinearConstraint& a, const LinearConstraint& b) {
    if (!expr_equal(a.terms, b.terms)) return expr_less(a.terms, b.terms);
    if (a.rel != b.rel) return a.rel < b.rel;
    return a.rhs < b.rhs;
  });
  rows.erase(std::unique(rows.begin(), rows.end(),
                         [](const LinearConstraint& a, const LinearConstraint& b) {
                           return a.rel == b.rel && a.rhs == b.rhs && expr_equal(a.terms, b.terms);
                         }),
             rows.end());
}

FeasibleSet single(const Instance& inst, lp::Polytope poly, std::string label) {
  FeasibleSet fs;
  fs.n = inst.n();
  fs.m = inst.m();
  fs.members.push_back({std::move(poly), {}, std::move(label)});
  return fs;
}

void require_priorities(const Instance& inst) {
  if (!inst.priorities) throw InputError("stability constraints need object priorities");
}

bool feasible(const lp::Polytope& poly) { return lp::lp_max(poly, {}).feasible(); }

std::vector<int> integer_supplies(const Instance& inst) {
  std::vector<int> s;
  for (int o = 0; o < inst.m(); ++o) {
    const auto& x = inst.supplies[o];
    if (!x.is_integer() || x > Rational(inst.n())) {
      throw InputError("deterministic allocations need integer supplies (object " + inst.object_ids[o] + ")");
    }
    s.push_back(static_cast<int>(x.to_double()));
  }
  return s;
}

} // namespace

std::string kind_name(ConstraintSpec::Kind kind) {
  switch (kind) {
  case ConstraintSpec::Kind::Unconstrained:
    return "unconstrained";
  case ConstraintSpec::Kind::CustomLinear:
    return "linear";
  case ConstraintSpec::Kind::Quotas:
    return "quotas";
  case ConstraintSpec::Kind::IndividualRationality:
    return "ir";
  case ConstraintSpec::Kind::Claimwise:
    return "claimwise";
  case ConstraintSpec::Kind::Fractional:
    return "fractional";
  case ConstraintSpec::Kind::ExPost:
    return "expost";
  case ConstraintSpec::Kind::ExAnte:
    return "exante";
  case ConstraintSpec::Kind::DeterministicOnly:
    return "deterministic";
  }
  return "?";
}

LinearExpr Member::lift(const LinearExpr& alloc_expr) const {
  if (is_identity()) return alloc_expr;
  LinearExpr out;
  for (const auto& t : alloc_expr) {
    for (const auto& u : embedding.at(t.var)) out.push_back({u.var, t.coef * u.coef});
  }
  return lp::canonical(std::move(out));
}

LinearConstraint Member::lift(const LinearConstraint& c) const {
  if (is_identity()) return c;
  return {lift(c.terms), c.rel, c.rhs, c.label};
}

Allocation Member::project(const std::vector<Rational>& point, int n, int m) const {
  Allocation p(n, m);
  for (int i = 0; i < n; ++i) {
    for (int o = 0; o < m; ++o) {
      const int v = i * m + o;
      p(i, o) = is_identity() ? point.at(v) : lp::evaluate(embedding.at(v), point);
    }
  }
  return p;
}

bool Member::contains(const Allocation& p) const {
  if (is_identity()) return lp::contains(poly, p.flat());
  // With nonnegative embedding coefficients, a zero entry of p pins every
  // LP variable it mentions to zero, so those columns can be dropped.
  bool nonnegative = true;
  for (const auto& e : embedding) {
    for (const auto& t : e) nonnegative = nonnegative && t.coef.sign() >= 0;
  }
  std::vector<int> remap(poly.num_vars);
  std::iota(remap.begin(), remap.end(), 0);
  int kept = poly.num_vars;
  if (nonnegative) {
    std::vector<char> zero(poly.num_vars, 0);
    for (size_t v = 0; v < embedding.size(); ++v) {
      if (!p.flat()[v].is_zero()) continue;
      for (const auto& t : embedding[v]) zero[t.var] = 1;
    }
    kept = 0;
    for (int k = 0; k < poly.num_vars; ++k) remap[k] = zero[k] ? -1 : kept++;
  }
  auto reduce = [&](const LinearExpr& e) {
    LinearExpr out;
    for (const auto& t : e) {
      if (remap[t.var] >= 0) out.push_back({remap[t.var], t.coef});
    }
    return out;
  };
  lp::Polytope probe{kept, {}};
  auto add = [&](LinearExpr terms, Relation rel, const Rational& rhs) {
    if (terms.empty()) {
      // 0 rel rhs
      const int s = rhs.sign();
      return rel == Relation::LessEqual ? s >= 0 : rel == Relation::GreaterEqual ? s <= 0 : s == 0;
    }
    probe.add({std::move(terms), rel, rhs, {}});
    return true;
  };
  for (const auto& c : poly.constraints) {
    if (!add(reduce(c.terms), c.rel, c.rhs)) return false;
  }
  for (size_t v = 0; v < embedding.size(); ++v) {
    if (!add(reduce(embedding[v]), Relation::Equal, p.flat()[v])) return false;
  }
  return feasible(probe);
}

bool FeasibleSet::contains(const Allocation& p) const { return member_containing(p) >= 0; }

int FeasibleSet::member_containing(const Allocation& p) const {
  if (p.n() != n || p.m() != m) return -1;
  for (size_t k = 0; k < members.size(); ++k) {
    if (members[k].contains(p)) return static_cast<int>(k);
  }
  return -1;
}

lp::Polytope base_polytope(const Instance& inst) {
  const int n = inst.n(), m = inst.m();
  lp::Polytope poly;
  poly.num_vars = n * m;
  for (int i = 0; i < n; ++i) {
    LinearExpr row;
    for (int o = 0; o < m; ++o) row.push_back({inst.var(i, o), Rational(1)});
    poly.add(lp::make_constraint(row, Relation::LessEqual, Rational(inst.capacities[i]), "cap " + inst.agent_ids[i]));
  }
  for (int o = 0; o < m; ++o) {
    LinearExpr col;
    for (int i = 0; i < n; ++i) col.push_back({inst.var(i, o), Rational(1)});
    poly.add(lp::make_constraint(col, inst.complete ? Relation::Equal : Relation::LessEqual, inst.supplies[o],
                                 "supply " + inst.object_ids[o]));
  }
  for (int i = 0; i < n; ++i) {
    if (inst.capacities[i] <= 1) continue;
    for (int o = 0; o < m; ++o) {
      if (inst.supplies[o] <= Rational(1)) continue;
      poly.add(lp::make_constraint({{inst.var(i, o), Rational(1)}}, Relation::LessEqual, Rational(1),
                                   "unit " + pair_label(inst, i, o)));
    }
  }
  return poly;
}

FeasibleSet linear_polytope(const Instance& inst, const std::vector<LinearConstraint>& rows) {
  lp::Polytope poly = base_polytope(inst);
  std::vector<LinearConstraint> extra = rows;
  for (const auto& c : extra) {
    for (const auto& t : c.terms) {
      if (t.var < 0 || t.var >= poly.num_vars) throw InputError("linear constraint variable out of range");
    }
  }
  dedupe(extra);
  for (auto& c : extra) poly.add(std::move(c));
  return single(inst, std::move(poly), "linear");
}

FeasibleSet quota_polytope(const Instance& inst, const std::vector<Quota>& quotas) {
  std::vector<LinearConstraint> rows;
  for (const auto& q : quotas) {
    if (q.lower.sign() < 0 || q.lower > q.upper) throw InputError("quota bounds must satisfy 0 <= lower <= upper");
    LinearExpr terms;
    for (int i : q.agents) {
      for (int o : q.objects) {
        if (i < 0 || i >= inst.n() || o < 0 || o >= inst.m()) throw InputError("quota index out of range");
        terms.push_back({inst.var(i, o), Rational(1)});
      }
    }
    if (terms.empty()) continue;
    if (q.lower.sign() > 0) rows.push_back(lp::make_constraint(terms, Relation::GreaterEqual, q.lower, "quota lower"));
    rows.push_back(lp::make_constraint(terms, Relation::LessEqual, q.upper, "quota upper"));
  }
  auto fs = linear_polytope(inst, rows);
  fs.members[0].label = "quotas";
  return fs;
}

FeasibleSet ir_polytope(const Instance& inst, const Allocation& endowment) {
  if (endowment.n() != inst.n() || endowment.m() != inst.m()) throw InputError("endowment dimensions do not match");
  lp::Polytope poly = base_polytope(inst);
  for (int i = 0; i < inst.n(); ++i) {
    const auto& pref = inst.preferences[i];
    const auto contour = contour_sums(endowment.row(i), pref);
    LinearExpr terms;
    for (int k = 0; k < pref.num_classes(); ++k) {
      for (int o : pref[k]) terms.push_back({inst.var(i, o), Rational(1)});
      if (contour[k].is_zero()) continue;
      poly.add(lp::make_constraint(terms, Relation::GreaterEqual, contour[k],
                                   "ir " + inst.agent_ids[i] + " class " + std::to_string(k + 1)));
    }
  }
  return single(inst, std::move(poly), "ir");
}

FeasibleSet claimwise_polytope(const Instance& inst) {
  require_priorities(inst);
  lp::Polytope poly = base_polytope(inst);
  for (int o = 0; o < inst.m(); ++o) {
    const auto& prio = inst.priority(o);
    for (int i = 0; i < inst.n(); ++i) {
      const LinearExpr upper = contour_terms(inst, i, o, true);
      for (int j = 0; j < inst.n(); ++j) {
        if (!prio.prefers(i, j)) continue;
        LinearExpr terms = upper;
        terms.push_back({inst.var(j, o), Rational(-1)});
        poly.add(lp::make_constraint(terms, Relation::GreaterEqual, Rational(0),
                                     "claim " + inst.agent_ids[i] + ">" + inst.agent_ids[j] + " @" + inst.object_ids[o]));
      }
    }
  }
  return single(inst, std::move(poly), "claimwise");
}

FeasibleSet fractional_polytope(const Instance& inst) {
  require_priorities(inst);
  lp::Polytope poly = base_polytope(inst);
  for (int i = 0; i < inst.n(); ++i) {
    const Rational cap(inst.capacities[i]);
    for (int o = 0; o < inst.m(); ++o) {
      LinearExpr terms = contour_terms(inst, i, o, true);
      const auto& prio = inst.priority(o);
      for (int j = 0; j < inst.n(); ++j) {
        if (prio.weakly_prefers(j, i)) terms.push_back({inst.var(j, o), cap});
      }
      poly.add(lp::make_constraint(terms, Relation::GreaterEqual, cap, "fs " + pair_label(inst, i, o)));
    }
  }
  return single(inst, std::move(poly), "fractional");
}

bool is_deterministic_stable(const Allocation& p, const Instance& inst) {
  require_priorities(inst);
  for (int o = 0; o < inst.m(); ++o) {
    const auto& prio = inst.priority(o);
    const bool spare = p.column_sum(o) < inst.supplies[o];
    for (int i = 0; i < inst.n(); ++i) {
      if (!p(i, o).is_zero()) continue;
      Rational contour;
      for (const auto& t : contour_terms(inst, i, o, false)) contour += p.flat()[t.var];
      if (contour >= Rational(inst.capacities[i])) continue;
      if (spare) return false;
      for (int j = 0; j < inst.n(); ++j) {
        if (!p(j, o).is_zero() && prio.prefers(i, j)) return false;
      }
    }
  }
  return true;
}

void for_each_deterministic(const Instance& inst, long long budget, const std::function<bool(const Allocation&)>& visit) {
  const int n = inst.n(), m = inst.m();
  const auto supply = integer_supplies(inst);
  std::vector<int> col_need = supply; // remaining supply per column
  std::vector<int> row_left = inst.capacities;
  std::vector<char> cell(static_cast<size_t>(n) * m, 0);
  long long terminals = 0;
  bool stop = false;
  // cap_suffix[i]: capacity of agents i..n-1; need_total: unfilled supply.
  std::vector<int> cap_suffix(n + 1, 0);
  for (int i = n - 1; i >= 0; --i) cap_suffix[i] = cap_suffix[i + 1] + inst.capacities[i];
  int need_total = 0;
  for (int s : supply) need_total += s;
  // Cells in row-major order, 0 before 1, gives lexicographic output.
  std::function<void(int)> rec = [&](int pos) {
    if (stop) return;
    if (pos == n * m) {
      if (++terminals > budget) throw EnumerationBudgetExceeded("deterministic enumeration exceeded " + std::to_string(budget) + " allocations");
      Allocation p(n, m);
      for (int v = 0; v < n * m; ++v) p(v / m, v % m) = Rational(cell[v]);
      if (!visit(p)) stop = true;
      return;
    }
    const int i = pos / m, o = pos % m;
    const int agents_after = n - 1 - i;
    if (inst.complete && o == 0 && need_total > cap_suffix[i]) return;
    // Leave empty: the remaining agents must still be able to fill the column.
    if (!inst.complete || col_need[o] <= agents_after) rec(pos + 1);
    if (stop) return;
    if (col_need[o] > 0 && row_left[i] > 0) {
      cell[pos] = 1;
      --col_need[o];
      --row_left[i];
      --need_total;
      rec(pos + 1);
      ++need_total;
      ++col_need[o];
      ++row_left[i];
      cell[pos] = 0;
    } else if (++terminals > budget) {
      throw EnumerationBudgetExceeded("deterministic enumeration exceeded " + std::to_string(budget) + " allocations");
    }
  };
  rec(0);
}

std::vector<Allocation> enumerate_deterministic_stable(const Instance& inst, long long budget) {
  require_priorities(inst);
  std::vector<Allocation> out;
  for_each_deterministic(inst, budget, [&](const Allocation& p) {
    if (is_deterministic_stable(p, inst)) out.push_back(p);
    return true;
  });
  return out;
}

FeasibleSet expost_hull(const Instance& inst, const BuildOptions& options) {
  const auto stable = enumerate_deterministic_stable(inst, options.enumeration_budget);
  if (stable.empty()) throw EmptyFeasibleSet("no deterministic stable allocation exists");
  const int n = inst.n(), m = inst.m();
  const int k_count = static_cast<int>(stable.size());
  Member mem;
  mem.label = "expost hull of " + std::to_string(k_count) + " stable allocations";
  mem.poly.num_vars = k_count;
  LinearExpr sum;
  for (int k = 0; k < k_count; ++k) sum.push_back({k, Rational(1)});
  mem.poly.add(lp::make_constraint(sum, Relation::Equal, Rational(1), "convex weights"));
  mem.embedding.assign(static_cast<size_t>(n) * m, {});
  for (int k = 0; k < k_count; ++k) {
    for (int v = 0; v < n * m; ++v) {
      if (!stable[k].flat()[v].is_zero()) mem.embedding[v].push_back({k, stable[k].flat()[v]});
    }
  }
  FeasibleSet fs;
  fs.n = n;
  fs.m = m;
  fs.members.push_back(std::move(mem));
  return fs;
}

FeasibleSet exante_union(const Instance& inst, const BuildOptions& options) {
  require_priorities(inst);
  const int n = inst.n(), m = inst.m();
  int nontrivial = 0;
  for (int o = 0; o < m; ++o) nontrivial += n - static_cast<int>(inst.priority(o)[0].size());
  if (nontrivial > options.branch_budget) {
    throw BranchBudgetExceeded("ex-ante stability has " + std::to_string(nontrivial) +
                               " nontrivial agent-object pairs, budget is " + std::to_string(options.branch_budget));
  }
  // An atom is either "p(i,o) = 0" (kind 0) or "agent i fills her capacity
  // with objects weakly preferred to o" (kind 1). For each object we pick a
  // cutoff priority class c: agents below c get none of o, agents above c
  // are full at o. Ex-ante stability is exactly the union over all choices.
  using Atom = std::tuple<int, int, int>; // kind, agent, object
  using AtomSet = std::set<Atom>;
  const lp::Polytope base = base_polytope(inst);
  auto make_poly = [&](const AtomSet& atoms) {
    lp::Polytope poly = base;
    for (const auto& [kind, i, o] : atoms) {
      if (kind == 0) {
        poly.add(lp::make_constraint({{inst.var(i, o), Rational(1)}}, Relation::Equal, Rational(0),
                                     "zero " + pair_label(inst, i, o)));
      } else {
        poly.add(lp::make_constraint(contour_terms(inst, i, o, false), Relation::Equal,
                                     Rational(inst.capacities[i]), "full " + pair_label(inst, i, o)));
      }
    }
    return poly;
  };
  // "Full at o" implies full at every worse object and nothing of the strictly
  // worse ones; closing the atoms makes equal polytopes share one atom set.
  auto close = [&](AtomSet atoms) {
    std::vector<Atom> fulls;
    for (const auto& a : atoms) {
      if (std::get<0>(a) == 1) fulls.push_back(a);
    }
    for (const auto& [kind, i, o] : fulls) {
      const auto& pref = inst.preferences[i];
      for (int c = pref.class_of(o); c < pref.num_classes(); ++c) {
        for (int x : pref[c]) {
          atoms.insert({1, i, x});
          if (c > pref.class_of(o)) atoms.insert({0, i, x});
        }
      }
    }
    return atoms;
  };
  std::map<AtomSet, bool> memo;
  auto is_feasible = [&](const AtomSet& atoms) {
    auto it = memo.find(atoms);
    if (it != memo.end()) return it->second;
    const bool ok = feasible(make_poly(atoms));
    memo.emplace(atoms, ok);
    return ok;
  };
  std::vector<AtomSet> leaves;
  std::set<std::pair<int, AtomSet>> seen;
  std::function<void(int, const AtomSet&)> rec = [&](int o, const AtomSet& atoms) {
    if (!seen.insert({o, atoms}).second) return;
    if (o == m) {
      leaves.push_back(atoms);
      return;
    }
    const auto& prio = inst.priority(o);
    for (int c = 0; c < prio.num_classes(); ++c) {
      AtomSet next = atoms;
      for (int k = 0; k < prio.num_classes(); ++k) {
        for (int i : prio[k]) {
          if (k > c) next.insert({0, i, o});
          if (k < c) next.insert({1, i, o});
        }
      }
      next = close(std::move(next));
      if (next.size() != atoms.size() && !is_feasible(next)) continue;
      rec(o + 1, next);
    }
  };
  if (is_feasible({})) rec(0, {});
  std::sort(leaves.begin(), leaves.end());
  leaves.erase(std::unique(leaves.begin(), leaves.end()), leaves.end());
  // A leaf whose atoms include another leaf's atoms is a subset of it.
  std::vector<AtomSet> kept;
  std::vector<AtomSet> by_size = leaves;
  std::stable_sort(by_size.begin(), by_size.end(), [](const AtomSet& a, const AtomSet& b) { return a.size() < b.size(); });
  for (const auto& leaf : by_size) {
    bool covered = false;
    for (const auto& k : kept) {
      if (std::includes(leaf.begin(), leaf.end(), k.begin(), k.end())) {
        covered = true;
        break;
      }
    }
    if (!covered) kept.push_back(leaf);
  }
  std::sort(kept.begin(), kept.end());
  FeasibleSet fs;
  fs.n = n;
  fs.m = m;
  for (const auto& atoms : kept) {
    fs.members.push_back({make_poly(atoms), {}, "exante branch " + std::to_string(fs.members.size() + 1)});
  }
  if (fs.members.empty()) throw EmptyFeasibleSet("no ex-ante stable allocation exists");
  return fs;
}

FeasibleSet deterministic_only(const FeasibleSet& base, const Instance& inst, const BuildOptions& options) {
  FeasibleSet fs;
  fs.n = inst.n();
  fs.m = inst.m();
  for_each_deterministic(inst, options.enumeration_budget, [&](const Allocation& q) {
    if (!base.contains(q)) return true;
    lp::Polytope poly;
    poly.num_vars = fs.n * fs.m;
    for (int v = 0; v < poly.num_vars; ++v) {
      poly.add(lp::make_constraint({{v, Rational(1)}}, Relation::Equal, q.flat()[v], "fixed"));
    }
    fs.members.push_back({std::move(poly), {}, "deterministic " + std::to_string(fs.members.size() + 1)});
    return true;
  });
  if (fs.members.empty()) throw EmptyFeasibleSet("no deterministic allocation in the base set");
  return fs;
}

FeasibleSet build(const ConstraintSpec& spec, const Instance& inst, const BuildOptions& options) {
  inst.validate();
  FeasibleSet fs;
  switch (spec.kind) {
  case ConstraintSpec::Kind::Unconstrained:
    fs = single(inst, base_polytope(inst), "unconstrained");
    break;
  case ConstraintSpec::Kind::CustomLinear:
    fs = linear_polytope(inst, spec.linear);
    break;
  case ConstraintSpec::Kind::Quotas:
    fs = quota_polytope(inst, spec.quotas);
    break;
  case ConstraintSpec::Kind::IndividualRationality:
    fs = ir_polytope(inst, spec.endowment);
    break;
  case ConstraintSpec::Kind::Claimwise:
    fs = claimwise_polytope(inst);
    break;
  case ConstraintSpec::Kind::Fractional:
    fs = fractional_polytope(inst);
    break;
  case ConstraintSpec::Kind::ExPost:
    fs = expost_hull(inst, options);
    break;
  case ConstraintSpec::Kind::ExAnte:
    fs = exante_union(inst, options);
    break;
  case ConstraintSpec::Kind::DeterministicOnly: {
    const ConstraintSpec base_spec = spec.base ? *spec.base : ConstraintSpec{};
    fs = deterministic_only(build(base_spec, inst, options), inst, options);
    break;
  }
  }
  std::vector<Member> alive;
  for (auto& mem : fs.members) {
    if (feasible(mem.poly)) alive.push_back(std::move(mem));
  }
  if (alive.empty()) throw EmptyFeasibleSet("feasible set (" + kind_name(spec.kind) + ") is empty");
  fs.members = std::move(alive);
  return fs;
}

} // namespace vigil
