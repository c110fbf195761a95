#include "vigil/lp.hpp"

#include <algorithm>

#include "vigil/errors.hpp"

namespace vigil::lp {
namespace {

thread_local long long g_calls = 0;

using Column = std::vector<std::pair<int, Rational>>;

// Revised simplex with an explicit dense basis inverse. Columns are ordered
// structural, slack/surplus, artificial; Bland's rule on that order.
class Simplex {
public:
  Simplex(const Polytope& poly, const LinearExpr& objective) : n_(poly.num_vars) {
    rows_ = static_cast<int>(poly.constraints.size());
    cols_.assign(n_, {});
    b_.reserve(rows_);
    std::vector<Relation> rel(rows_);
    for (int r = 0; r < rows_; ++r) {
      const auto& c = poly.constraints[r];
      bool flip = c.rhs.sign() < 0 || (c.rhs.is_zero() && c.rel == Relation::GreaterEqual);
      Relation rr = c.rel;
      if (flip && rr != Relation::Equal) rr = rr == Relation::LessEqual ? Relation::GreaterEqual : Relation::LessEqual;
      rel[r] = rr;
      b_.push_back(flip ? -c.rhs : c.rhs);
      for (const auto& t : c.terms) {
        if (t.var < 0 || t.var >= n_) throw InputError("constraint variable out of range");
        cols_[t.var].emplace_back(r, flip ? -t.coef : t.coef);
      }
    }
    basis_.assign(rows_, -1);
    for (int r = 0; r < rows_; ++r) {
      if (rel[r] == Relation::Equal) continue;
      const int j = static_cast<int>(cols_.size());
      cols_.push_back({{r, Rational(rel[r] == Relation::LessEqual ? 1 : -1)}});
      if (rel[r] == Relation::LessEqual) basis_[r] = j;
    }
    first_art_ = static_cast<int>(cols_.size());
    for (int r = 0; r < rows_; ++r) {
      if (basis_[r] != -1) continue;
      basis_[r] = static_cast<int>(cols_.size());
      cols_.push_back({{r, Rational(1)}});
    }
    in_basis_.assign(cols_.size(), false);
    for (int j : basis_) in_basis_[j] = true;
    binv_.assign(rows_, std::vector<Rational>(rows_));
    for (int r = 0; r < rows_; ++r) binv_[r][r] = Rational(1);
    x_b_ = b_;
    objective_.assign(cols_.size(), Rational());
    for (const auto& t : objective) {
      if (t.var < 0 || t.var >= n_) throw InputError("objective variable out of range");
      objective_[t.var] += t.coef;
    }
  }

  LpResult run(const LpOptions& options) {
    LpResult res;
    if (first_art_ < static_cast<int>(cols_.size())) {
      cost_.assign(cols_.size(), Rational());
      for (size_t j = first_art_; j < cols_.size(); ++j) cost_[j] = Rational(-1);
      Rational value = current_value();
      iterate(value, nullptr);
      if (value.sign() < 0) {
        res.status = Status::Infeasible;
        return res;
      }
      drive_out_artificials();
    }
    cost_ = objective_;
    Rational value = current_value();
    const Status st = iterate(value, options.stop_above ? &*options.stop_above : nullptr);
    res.status = st;
    if (st == Status::Unbounded) return res;
    res.objective_value = value;
    res.point.assign(n_, Rational());
    for (int r = 0; r < rows_; ++r) {
      if (basis_[r] < n_) res.point[basis_[r]] = x_b_[r];
    }
    return res;
  }

private:
  Rational current_value() const {
    Rational v;
    for (int r = 0; r < rows_; ++r) {
      if (!cost_[basis_[r]].is_zero()) v += cost_[basis_[r]] * x_b_[r];
    }
    return v;
  }

  std::vector<Rational> column_image(int j) const {
    std::vector<Rational> alpha(rows_);
    for (const auto& [k, a] : cols_[j]) {
      for (int r = 0; r < rows_; ++r) {
        if (!binv_[r][k].is_zero()) alpha[r] += binv_[r][k] * a;
      }
    }
    return alpha;
  }

  Status iterate(Rational& value, const Rational* stop_above) {
    const int ncols = first_art_;
    std::vector<Rational> y(rows_);
    std::vector<int> y_nz;
    while (true) {
      if (stop_above && value > *stop_above) return Status::TargetReached;
      std::fill(y.begin(), y.end(), Rational());
      for (int r = 0; r < rows_; ++r) {
        const Rational& c = cost_[basis_[r]];
        if (c.is_zero()) continue;
        for (int k = 0; k < rows_; ++k) {
          if (!binv_[r][k].is_zero()) y[k] += c * binv_[r][k];
        }
      }
      y_nz.clear();
      for (int k = 0; k < rows_; ++k) {
        if (!y[k].is_zero()) y_nz.push_back(k);
      }
      int entering = -1;
      Rational reduced;
      for (int j = 0; j < ncols; ++j) {
        if (in_basis_[j]) continue;
        Rational d = cost_[j];
        if (!y_nz.empty()) {
          for (const auto& [k, a] : cols_[j]) {
            if (!y[k].is_zero()) d -= y[k] * a;
          }
        }
        if (d.sign() > 0) {
          entering = j;
          reduced = std::move(d);
          break;
        }
      }
      if (entering < 0) return Status::Optimal;
      const auto alpha = column_image(entering);
      int leave = -1;
      Rational best;
      for (int r = 0; r < rows_; ++r) {
        if (alpha[r].sign() <= 0) continue;
        Rational ratio = x_b_[r] / alpha[r];
        if (leave < 0 || ratio < best || (ratio == best && basis_[r] < basis_[leave])) {
          leave = r;
          best = std::move(ratio);
        }
      }
      if (leave < 0) return Status::Unbounded;
      if (!best.is_zero()) value += reduced * best;
      pivot(leave, entering, alpha);
    }
  }

  void pivot(int r, int entering, const std::vector<Rational>& alpha) {
    const Rational inv = Rational(1) / alpha[r];
    std::vector<int> nz;
    for (int k = 0; k < rows_; ++k) {
      if (binv_[r][k].is_zero()) continue;
      binv_[r][k] *= inv;
      nz.push_back(k);
    }
    x_b_[r] *= inv;
    for (int i = 0; i < rows_; ++i) {
      if (i == r || alpha[i].is_zero()) continue;
      const Rational& f = alpha[i];
      for (int k : nz) binv_[i][k] -= f * binv_[r][k];
      if (!x_b_[r].is_zero()) x_b_[i] -= f * x_b_[r];
    }
    in_basis_[basis_[r]] = false;
    in_basis_[entering] = true;
    basis_[r] = entering;
  }

  // Artificials still basic after a feasible phase 1 sit at zero. Swap each
  // for any non-artificial column with a nonzero entry in its row; rows where
  // none exists are redundant and keep their artificial at zero forever.
  void drive_out_artificials() {
    for (int r = 0; r < rows_; ++r) {
      if (basis_[r] < first_art_) continue;
      for (int j = 0; j < first_art_; ++j) {
        if (in_basis_[j]) continue;
        Rational entry;
        for (const auto& [k, a] : cols_[j]) {
          if (!binv_[r][k].is_zero()) entry += binv_[r][k] * a;
        }
        if (entry.is_zero()) continue;
        pivot(r, j, column_image(j));
        break;
      }
    }
  }

  int n_;
  int rows_;
  int first_art_ = 0;
  std::vector<Column> cols_;
  std::vector<Rational> b_;
  std::vector<int> basis_;
  std::vector<bool> in_basis_;
  std::vector<std::vector<Rational>> binv_;
  std::vector<Rational> x_b_;
  std::vector<Rational> cost_;
  std::vector<Rational> objective_;
};

} // namespace

LinearExpr canonical(LinearExpr terms) {
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
  LinearExpr out;
  for (auto& t : terms) {
    if (!out.empty() && out.back().var == t.var) {
      out.back().coef += t.coef;
    } else {
      out.push_back(std::move(t));
    }
  }
  out.erase(std::remove_if(out.begin(), out.end(), [](const Term& t) { return t.coef.is_zero(); }), out.end());
  return out;
}

LinearConstraint make_constraint(LinearExpr terms, Relation rel, Rational rhs, std::string label) {
  LinearConstraint c{canonical(std::move(terms)), rel, std::move(rhs), std::move(label)};
  if (c.terms.empty()) throw InputError("constraint without nonzero coefficients" + (c.label.empty() ? "" : ": " + c.label));
  return c;
}

namespace {

// A row whose terms all push the same way against a zero right-hand side
// (sum of c_v x_v <= 0 with every c_v > 0, or the mirror) forces its
// variables to zero.
bool forces_zero(const LinearConstraint& c, const std::vector<bool>& fixed) {
  if (c.rhs.sign() != 0) return false;
  int sign = 0;
  for (const auto& t : c.terms) {
    if (fixed[t.var]) continue;
    const int s = t.coef.sign();
    if (sign != 0 && s != sign) return false;
    sign = s;
  }
  if (sign == 0) return false;
  if (c.rel == Relation::Equal) return true;
  return sign > 0 ? c.rel == Relation::LessEqual : c.rel == Relation::GreaterEqual;
}

} // namespace

LpResult lp_max(const Polytope& poly, const LinearExpr& objective, const LpOptions& options) {
  ++g_calls;
  std::vector<bool> fixed(poly.num_vars, false), dropped(poly.constraints.size(), false);
  bool any = false;
  for (bool changed = true; changed;) {
    changed = false;
    for (size_t r = 0; r < poly.constraints.size(); ++r) {
      if (dropped[r] || !forces_zero(poly.constraints[r], fixed)) continue;
      dropped[r] = changed = any = true;
      for (const auto& t : poly.constraints[r].terms) fixed[t.var] = true;
    }
  }
  if (!any) {
    Simplex s(poly, objective);
    return s.run(options);
  }
  std::vector<int> remap(poly.num_vars, -1);
  Polytope reduced;
  for (int v = 0; v < poly.num_vars; ++v) {
    if (!fixed[v]) remap[v] = reduced.num_vars++;
  }
  auto shrink = [&](const LinearExpr& e) {
    LinearExpr out;
    for (const auto& t : e) {
      if (!fixed[t.var]) out.push_back({remap[t.var], t.coef});
    }
    return out;
  };
  for (size_t r = 0; r < poly.constraints.size(); ++r) {
    if (dropped[r]) continue;
    const auto& c = poly.constraints[r];
    LinearExpr terms = shrink(c.terms);
    if (terms.empty()) {
      const int s = -c.rhs.sign(); // sign of 0 - rhs
      const bool ok = c.rel == Relation::Equal ? s == 0 : c.rel == Relation::LessEqual ? s <= 0 : s >= 0;
      if (!ok) return {};
      continue;
    }
    reduced.constraints.push_back({std::move(terms), c.rel, c.rhs, c.label});
  }
  Simplex s(reduced, shrink(objective));
  LpResult r = s.run(options);
  if (r.status != Status::Unbounded && r.status != Status::Infeasible) {
    std::vector<Rational> full(poly.num_vars);
    for (int v = 0; v < poly.num_vars; ++v) {
      if (!fixed[v]) full[v] = std::move(r.point[remap[v]]);
    }
    r.point = std::move(full);
  }
  return r;
}

UnionResult union_max(const std::vector<Polytope>& polys, const LinearExpr& objective) {
  if (polys.empty()) throw InputError("union_max needs at least one polytope");
  UnionResult best;
  for (size_t k = 0; k < polys.size(); ++k) {
    LpResult r = lp_max(polys[k], objective);
    if (r.status == Status::Unbounded) return {std::move(r), static_cast<int>(k)};
    if (r.status != Status::Optimal) continue;
    if (best.member < 0 || r.objective_value > best.result.objective_value) {
      best.result = std::move(r);
      best.member = static_cast<int>(k);
    }
  }
  if (best.member < 0) best.result.status = Status::Infeasible;
  return best;
}

Rational evaluate(const LinearExpr& expr, const std::vector<Rational>& point) {
  Rational v;
  for (const auto& t : expr) v += t.coef * point.at(t.var);
  return v;
}

bool satisfies(const LinearConstraint& c, const std::vector<Rational>& point) {
  const Rational lhs = evaluate(c.terms, point);
  switch (c.rel) {
  case Relation::LessEqual:
    return lhs <= c.rhs;
  case Relation::GreaterEqual:
    return lhs >= c.rhs;
  case Relation::Equal:
    return lhs == c.rhs;
  }
  return false;
}

bool contains(const Polytope& poly, const std::vector<Rational>& point) {
  if (static_cast<int>(point.size()) != poly.num_vars) return false;
  for (const auto& x : point) {
    if (x.sign() < 0) return false;
  }
  return std::all_of(poly.constraints.begin(), poly.constraints.end(),
                     [&](const LinearConstraint& c) { return satisfies(c, point); });
}

long long call_count() { return g_calls; }

} // namespace vigil::lp
