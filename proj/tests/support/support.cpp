#include "support.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>

namespace testsupport {

using namespace vigil;

std::string fixture(const std::string& name) { return std::string(VIGIL_FIXTURE_DIR) + "/" + name; }

io::InstanceFile load_fixture(const std::string& name) { return io::load_instance(fixture(name)); }

Allocation load_fixture_allocation(const std::string& name, const Instance& inst) {
  return io::load_allocation(fixture(name), inst);
}

Allocation matrix(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::vector<Rational>> v;
  for (const auto& r : rows) {
    v.emplace_back();
    for (const auto& s : r) v.back().push_back(Rational::parse(s));
  }
  return Allocation(v);
}

std::vector<int> random_permutation(int k, Rng& rng) {
  std::vector<int> p(k);
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

WeakOrder random_strict_order(int k, Rng& rng) { return WeakOrder::strict(random_permutation(k, rng)); }

WeakOrder random_weak_order(int k, Rng& rng, double tie_prob) {
  const auto perm = random_permutation(k, rng);
  std::bernoulli_distribution merge(tie_prob);
  std::vector<std::vector<int>> classes{{perm[0]}};
  for (int x = 1; x < k; ++x) {
    if (merge(rng)) {
      classes.back().push_back(perm[x]);
    } else {
      classes.push_back({perm[x]});
    }
  }
  return WeakOrder(classes, k);
}

Instance random_strict_instance(int n, int m, Rng& rng, bool strict_priorities) {
  std::vector<WeakOrder> prefs, prio;
  for (int i = 0; i < n; ++i) prefs.push_back(random_strict_order(m, rng));
  if (!strict_priorities) return make_instance(prefs);
  for (int o = 0; o < m; ++o) prio.push_back(random_strict_order(n, rng));
  return make_instance(prefs, prio);
}

Instance random_weak_instance(int n, int m, Rng& rng) {
  std::vector<WeakOrder> prefs;
  for (int i = 0; i < n; ++i) prefs.push_back(random_weak_order(m, rng));
  return make_instance(prefs);
}

Allocation random_complete_point(int n, int m, int k, Rng& rng) {
  Allocation p(n, m);
  for (int round = 0; round < k; ++round) {
    const auto agents = random_permutation(n, rng);
    for (int o = 0; o < m; ++o) p(agents[o], o) += Rational(1, k);
  }
  return p;
}

std::vector<lp::LinearConstraint> random_rows_through(const Instance& inst, const Allocation& p0, int rows, Rng& rng) {
  std::uniform_int_distribution<int> coef(0, 3), pick(0, 2), slack_num(0, 2);
  std::vector<lp::LinearConstraint> out;
  while (static_cast<int>(out.size()) < rows) {
    lp::LinearExpr terms;
    Rational at_p0;
    for (int i = 0; i < inst.n(); ++i) {
      for (int o = 0; o < inst.m(); ++o) {
        if (pick(rng) != 0) continue;
        const int c = coef(rng);
        if (c == 0) continue;
        terms.push_back({inst.var(i, o), Rational(c)});
        at_p0 += Rational(c) * p0(i, o);
      }
    }
    if (terms.empty()) continue;
    out.push_back(lp::make_constraint(terms, lp::Relation::LessEqual, at_p0 + Rational(slack_num(rng), 4)));
  }
  return out;
}

std::vector<lp::LinearConstraint> symmetrize(const Instance& inst, std::vector<lp::LinearConstraint> rows, int a, int b) {
  const size_t original = rows.size();
  for (size_t r = 0; r < original; ++r) {
    lp::LinearExpr swapped;
    for (const auto& t : rows[r].terms) {
      int i = t.var / inst.m();
      const int o = t.var % inst.m();
      if (i == a) {
        i = b;
      } else if (i == b) {
        i = a;
      }
      swapped.push_back({inst.var(i, o), t.coef});
    }
    rows.push_back(lp::make_constraint(swapped, rows[r].rel, rows[r].rhs));
  }
  return rows;
}

Allocation gale_shapley(const Instance& inst) {
  const int n = inst.n(), m = inst.m();
  std::vector<int> next(n, 0), holder(m, -1), match(n, -1);
  std::vector<int> free_agents(n);
  std::iota(free_agents.rbegin(), free_agents.rend(), 0);
  while (!free_agents.empty()) {
    const int i = free_agents.back();
    if (next[i] == m) {
      free_agents.pop_back();
      continue;
    }
    const int o = inst.preferences[i][next[i]++][0];
    const int h = holder[o];
    if (h == -1) {
      holder[o] = i;
      match[i] = o;
      free_agents.pop_back();
    } else if (inst.priority(o).prefers(i, h)) {
      holder[o] = i;
      match[i] = o;
      match[h] = -1;
      free_agents.pop_back();
      free_agents.push_back(h);
    }
  }
  Allocation p(n, m);
  for (int i = 0; i < n; ++i) {
    if (match[i] >= 0) p(i, match[i]) = Rational(1);
  }
  return p;
}

Allocation classic_ps(const Instance& inst) {
  const int n = inst.n(), m = inst.m();
  Allocation p(n, m);
  std::vector<Rational> left(m, Rational(1)), room(n, Rational(1));
  while (true) {
    std::vector<int> target(n, -1), eaters(m, 0);
    for (int i = 0; i < n; ++i) {
      if (room[i].is_zero()) continue;
      for (const auto& cls : inst.preferences[i].classes()) {
        if (!left[cls[0]].is_zero()) {
          target[i] = cls[0];
          break;
        }
      }
      if (target[i] >= 0) ++eaters[target[i]];
    }
    std::optional<Rational> step;
    for (int i = 0; i < n; ++i) {
      if (target[i] >= 0 && (!step || room[i] < *step)) step = room[i];
    }
    if (!step) break;
    for (int o = 0; o < m; ++o) {
      if (eaters[o] > 0) *step = vigil::min(*step, left[o] / Rational(eaters[o]));
    }
    for (int i = 0; i < n; ++i) {
      if (target[i] < 0) continue;
      p(i, target[i]) += *step;
      room[i] -= *step;
      left[target[i]] -= *step;
    }
  }
  return p;
}

namespace {

// Solves the square system; false when singular.
bool solve_square(std::vector<std::vector<Rational>> a, std::vector<Rational> b, std::vector<Rational>& x) {
  const int d = static_cast<int>(b.size());
  for (int c = 0; c < d; ++c) {
    int piv = -1;
    for (int r = c; r < d; ++r) {
      if (!a[r][c].is_zero()) {
        piv = r;
        break;
      }
    }
    if (piv < 0) return false;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (int r = 0; r < d; ++r) {
      if (r == c || a[r][c].is_zero()) continue;
      const Rational f = a[r][c] / a[c][c];
      for (int k = c; k < d; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  x.assign(d, Rational());
  for (int r = 0; r < d; ++r) x[r] = b[r] / a[r][r];
  return true;
}

} // namespace

bool brute_force_max(const lp::Polytope& poly, const lp::LinearExpr& objective, Rational& best) {
  const int d = poly.num_vars;
  // Candidate tight rows: every constraint, then x_v = 0.
  std::vector<std::vector<Rational>> rows;
  std::vector<Rational> rhs;
  for (const auto& c : poly.constraints) {
    std::vector<Rational> r(d);
    for (const auto& t : c.terms) r[t.var] = t.coef;
    rows.push_back(r);
    rhs.push_back(c.rhs);
  }
  for (int v = 0; v < d; ++v) {
    std::vector<Rational> r(d);
    r[v] = Rational(1);
    rows.push_back(r);
    rhs.push_back(Rational());
  }
  const int k = static_cast<int>(rows.size());
  bool found = false;
  std::vector<int> pick;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(pick.size()) == d) {
      std::vector<std::vector<Rational>> a;
      std::vector<Rational> b;
      for (int r : pick) {
        a.push_back(rows[r]);
        b.push_back(rhs[r]);
      }
      std::vector<Rational> x;
      if (!solve_square(a, b, x)) return;
      for (const auto& v : x) {
        if (v.sign() < 0) return;
      }
      if (!lp::contains(poly, x)) return;
      const Rational val = lp::evaluate(objective, x);
      if (!found || val > best) best = val;
      found = true;
      return;
    }
    for (int r = start; r < k; ++r) {
      pick.push_back(r);
      rec(r + 1);
      pick.pop_back();
    }
  };
  rec(0);
  return found;
}

} // namespace testsupport
