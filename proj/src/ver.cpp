#include "vigil/ver.hpp"

#include <algorithm>
#include <numeric>

#include "vigil/errors.hpp"

namespace vigil {
namespace {

using lp::LinearExpr;
using lp::Relation;

std::vector<int> checked_order(std::vector<int> order, int n) {
  if (order.empty()) {
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
  }
  std::vector<int> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(sorted.size()) != n || sorted[i] != i) throw InputError("agent order is not a permutation");
  }
  return order;
}

// Class-sum expressions of every agent, lifted into each member's variables.
class Lifted {
public:
  Lifted(const Instance& inst, const FeasibleSet& x) : x_(x) {
    if (x.n != inst.n() || x.m != inst.m()) throw InputError("feasible set does not match the instance");
    if (x.members.empty()) throw EmptyFeasibleSet("feasible set has no members");
    exprs_.resize(x.members.size());
    for (size_t k = 0; k < x.members.size(); ++k) {
      exprs_[k].resize(inst.n());
      for (int i = 0; i < inst.n(); ++i) {
        const auto& pref = inst.preferences[i];
        for (int c = 0; c < pref.num_classes(); ++c) {
          LinearExpr e;
          for (int o : pref[c]) e.push_back({inst.var(i, o), Rational(1)});
          exprs_[k][i].push_back(x.members[k].lift(lp::canonical(std::move(e))));
        }
      }
    }
  }

  const LinearExpr& expr(size_t member, int agent, int cls) const { return exprs_[member][agent][cls]; }
  const Member& member(size_t k) const { return x_.members[k]; }
  size_t size() const { return x_.members.size(); }

private:
  const FeasibleSet& x_;
  std::vector<std::vector<std::vector<LinearExpr>>> exprs_;
};

struct Demand {
  int agent;
  int cls;
  Rational coef; // weight of the auxiliary variable
};

// Member polytope plus one auxiliary variable t (the last one) with
//   class sum - coef * t >= pi   for each demand,
//   class sum >= pi              for every other guaranteed class.
// Returns false when a guarantee is trivially violated (empty expression).
bool assemble(const Lifted& lifted, size_t k, const GuaranteeTable& pi, const std::vector<Demand>& demands,
              lp::Polytope& out) {
  out = lifted.member(k).poly;
  const int t = out.num_vars++;
  std::vector<std::vector<char>> demanded(pi.size());
  for (size_t i = 0; i < pi.size(); ++i) demanded[i].assign(pi[i].size(), 0);
  for (const auto& d : demands) {
    demanded[d.agent][d.cls] = 1;
    LinearExpr terms = lifted.expr(k, d.agent, d.cls);
    if (!d.coef.is_zero()) terms.push_back({t, -d.coef});
    if (terms.empty()) {
      if (pi[d.agent][d.cls].sign() > 0) return false;
      continue;
    }
    out.constraints.push_back({std::move(terms), Relation::GreaterEqual, pi[d.agent][d.cls], "demand"});
  }
  for (size_t i = 0; i < pi.size(); ++i) {
    for (size_t c = 0; c < pi[i].size(); ++c) {
      if (demanded[i][c] || pi[i][c].sign() == 0) continue;
      const auto& e = lifted.expr(k, static_cast<int>(i), static_cast<int>(c));
      if (e.empty()) return false;
      out.constraints.push_back({e, Relation::GreaterEqual, pi[i][c], "guarantee"});
    }
  }
  return true;
}

class Runner {
public:
  Runner(const Instance& inst, const FeasibleSet& x, const EatingRates& rates, std::vector<int> order)
      : inst_(inst), x_(x), lifted_(inst, x), rates_(rates), order_(checked_order(std::move(order), inst.n())) {
    rates_.validate(inst.n());
    pi_.resize(inst.n());
    for (int i = 0; i < inst.n(); ++i) pi_[i].assign(inst.preferences[i].num_classes(), Rational());
    alive_.assign(lifted_.size(), true);
  }

  VerResult run() {
    const long long calls_at_start = lp::call_count();
    const int bound = inst_.n() * inst_.m() + rates_.breakpoint_count();
    std::vector<int> pointer(inst_.n(), 0);
    std::vector<int> active = order_;
    std::optional<Allocation> last;
    Rational time;
    VerResult result;
    bool first_pass = true;
    while (!active.empty()) {
      std::vector<int> next_active, chosen;
      std::vector<Demand> strict_prefix;
      for (int i : active) {
        int found = -1;
        for (int c = pointer[i]; c < inst_.preferences[i].num_classes() && found < 0; ++c) {
          if (available(i, c, strict_prefix)) found = c;
        }
        if (std::none_of(alive_.begin(), alive_.end(), [](bool b) { return b; })) {
          if (first_pass) throw EmptyFeasibleSet("no member of the feasible set is nonempty");
          throw InternalError("all members became infeasible during eating");
        }
        if (found < 0) continue;
        pointer[i] = found;
        next_active.push_back(i);
        chosen.push_back(found);
        if (rates_.rate_at(i, time).sign() > 0) strict_prefix.push_back({i, found, Rational(1)});
      }
      first_pass = false;
      active = next_active;
      if (active.empty()) break;

      if (strict_prefix.empty()) {
        // Nobody active eats right now; jump to the next rate change.
        auto next = rates_.next_breakpoint(time);
        if (!next) break;
        time = *next;
        continue;
      }

      std::vector<Demand> demands;
      for (size_t a = 0; a < active.size(); ++a) {
        demands.push_back({active[a], chosen[a], rates_.rate_at(active[a], time)});
      }
      const auto segment_end = rates_.next_breakpoint(time);
      Rational best_delta;
      int best_member = -1;
      std::vector<Rational> best_point;
      for (size_t k = 0; k < lifted_.size(); ++k) {
        if (!alive_[k]) continue;
        lp::Polytope poly;
        if (!assemble(lifted_, k, pi_, demands, poly)) {
          alive_[k] = false;
          continue;
        }
        const int t = poly.num_vars - 1;
        if (segment_end) {
          poly.constraints.push_back({{{t, Rational(1)}}, Relation::LessEqual, *segment_end - time, "segment"});
        }
        auto r = lp::lp_max(poly, {{t, Rational(1)}});
        if (r.status == lp::Status::Infeasible) {
          alive_[k] = false;
          continue;
        }
        if (r.status == lp::Status::Unbounded) throw InternalError("eating LP is unbounded");
        if (best_member < 0 || r.objective_value > best_delta) {
          best_delta = r.objective_value;
          best_member = static_cast<int>(k);
          best_point = std::move(r.point);
        }
      }
      if (best_member < 0 || best_delta.sign() <= 0) throw InternalError("eating round made no progress");
      for (const auto& d : demands) pi_[d.agent][d.cls] += d.coef * best_delta;
      last = lifted_.member(best_member).project(best_point, inst_.n(), inst_.m());
      VerRound round;
      round.active = active;
      round.chosen_class = chosen;
      round.delta = best_delta;
      round.time = time;
      round.pi = pi_;
      round.lp_calls = lp::call_count() - calls_at_start;
      result.trace.rounds.push_back(std::move(round));
      time += best_delta;
      if (static_cast<int>(result.trace.rounds.size()) > bound) {
        throw InternalError("eating exceeded " + std::to_string(bound) + " rounds");
      }
    }
    if (!last) {
      FeasibleSet remaining;
      remaining.n = x_.n;
      remaining.m = x_.m;
      for (size_t k = 0; k < lifted_.size(); ++k) {
        if (alive_[k]) remaining.members.push_back(lifted_.member(k));
      }
      last = any_point(remaining);
    }
    result.allocation = *last;
    result.trace.lp_calls = lp::call_count() - calls_at_start;
    result.trace.members = static_cast<int>(lifted_.size());
    return result;
  }

private:
  // Is there a point meeting pi that strictly improves (agent, cls) and every
  // demand in prefix? Decided by maximizing a common slack epsilon.
  bool available(int agent, int cls, const std::vector<Demand>& prefix) {
    std::vector<Demand> demands = prefix;
    demands.push_back({agent, cls, Rational(1)});
    lp::LpOptions opts;
    opts.stop_above = Rational(0);
    for (size_t k = 0; k < lifted_.size(); ++k) {
      if (!alive_[k]) continue;
      lp::Polytope poly;
      if (!assemble(lifted_, k, pi_, demands, poly)) {
        alive_[k] = false;
        continue;
      }
      const int eps = poly.num_vars - 1;
      auto r = lp::lp_max(poly, {{eps, Rational(1)}}, opts);
      // epsilon = 0 is allowed, so infeasibility comes from pi alone and
      // stays forever since guarantees never decrease.
      if (r.status == lp::Status::Infeasible) {
        alive_[k] = false;
        continue;
      }
      if (r.status == lp::Status::Unbounded || r.objective_value.sign() > 0) return true;
    }
    return false;
  }

  const Instance& inst_;
  const FeasibleSet& x_;
  Lifted lifted_;
  EatingRates rates_;
  std::vector<int> order_;
  GuaranteeTable pi_;
  std::vector<bool> alive_;
};

} // namespace

EatingRates EatingRates::constant(int n, Rational rate) {
  EatingRates r;
  r.agents.assign(n, {{Rational(0), rate}});
  return r;
}

void EatingRates::validate(int n) const {
  if (static_cast<int>(agents.size()) != n) throw InputError("one eating rate function per agent required");
  for (const auto& segs : agents) {
    if (segs.empty() || !segs[0].start.is_zero()) throw InputError("eating rates must start at time 0");
    for (size_t s = 0; s < segs.size(); ++s) {
      if (segs[s].rate.sign() < 0) throw InputError("eating rates must be nonnegative");
      if (s > 0 && !(segs[s - 1].start < segs[s].start)) throw InputError("rate breakpoints must strictly increase");
    }
  }
}

Rational EatingRates::rate_at(int agent, const Rational& t) const {
  const auto& segs = agents[agent];
  Rational r = segs[0].rate;
  for (const auto& s : segs) {
    if (s.start <= t) r = s.rate;
  }
  return r;
}

std::optional<Rational> EatingRates::next_breakpoint(const Rational& t) const {
  std::optional<Rational> best;
  for (const auto& segs : agents) {
    for (const auto& s : segs) {
      if (s.start > t && (!best || s.start < *best)) best = s.start;
    }
  }
  return best;
}

int EatingRates::breakpoint_count() const {
  std::vector<Rational> all;
  for (const auto& segs : agents) {
    for (size_t s = 1; s < segs.size(); ++s) all.push_back(segs[s].start);
  }
  std::sort(all.begin(), all.end());
  return static_cast<int>(std::unique(all.begin(), all.end()) - all.begin());
}

VerResult ver(const Instance& inst, const FeasibleSet& x, std::vector<int> order) {
  return ver_with_rates(inst, x, EatingRates::constant(inst.n()), std::move(order));
}

VerResult ver_with_rates(const Instance& inst, const FeasibleSet& x, const EatingRates& rates, std::vector<int> order) {
  Runner runner(inst, x, rates, std::move(order));
  return runner.run();
}

Allocation vigilant_priority(const Instance& inst, const FeasibleSet& x, std::vector<int> sigma) {
  sigma = checked_order(std::move(sigma), inst.n());
  Lifted lifted(inst, x);
  GuaranteeTable pi(inst.n());
  for (int i = 0; i < inst.n(); ++i) pi[i].assign(inst.preferences[i].num_classes(), Rational());
  std::vector<bool> alive(lifted.size(), true);
  std::optional<Allocation> last;
  for (int i : sigma) {
    for (int c = 0; c < inst.preferences[i].num_classes(); ++c) {
      Rational best;
      int best_member = -1;
      std::vector<Rational> best_point;
      for (size_t k = 0; k < lifted.size(); ++k) {
        if (!alive[k]) continue;
        lp::Polytope poly;
        if (!assemble(lifted, k, pi, {}, poly)) {
          alive[k] = false;
          continue;
        }
        --poly.num_vars; // no auxiliary variable needed
        const auto& target = lifted.expr(k, i, c);
        auto r = lp::lp_max(poly, target);
        if (r.status == lp::Status::Infeasible) {
          alive[k] = false;
          continue;
        }
        if (r.status == lp::Status::Unbounded) throw InternalError("priority LP is unbounded");
        if (best_member < 0 || r.objective_value > best) {
          best = r.objective_value;
          best_member = static_cast<int>(k);
          best_point = std::move(r.point);
        }
      }
      if (best_member < 0) throw EmptyFeasibleSet("no member of the feasible set is nonempty");
      pi[i][c] = best;
      last = lifted.member(best_member).project(best_point, inst.n(), inst.m());
    }
  }
  return *last;
}

Allocation any_point(const FeasibleSet& x) {
  for (const auto& mem : x.members) {
    auto r = lp::lp_max(mem.poly, {});
    if (r.feasible()) return mem.project(r.point, x.n, x.m);
  }
  throw EmptyFeasibleSet("feasible set is empty");
}

} // namespace vigil
