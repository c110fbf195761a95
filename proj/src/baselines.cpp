#include "vigil/baselines.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include "vigil/errors.hpp"

namespace vigil {
namespace {

long long factorial_capped(int n, long long cap) {
  long long f = 1;
  for (int k = 2; k <= n; ++k) {
    f *= k;
    if (f > cap) return cap + 1;
  }
  return f;
}

std::vector<int> integer_supplies(const Instance& inst) {
  std::vector<int> s;
  for (int o = 0; o < inst.m(); ++o) {
    if (!inst.supplies[o].is_integer()) throw InputError("this rule needs integer supplies");
    s.push_back(static_cast<int>(inst.supplies[o].to_double()));
  }
  return s;
}

// Exact max-flow (Edmonds-Karp) on rational capacities.
class FlowNetwork {
public:
  explicit FlowNetwork(int nodes) : adj_(nodes) {}

  int add_edge(int u, int v, const Rational& cap) {
    adj_[u].push_back(static_cast<int>(edges_.size()));
    edges_.push_back({v, cap});
    adj_[v].push_back(static_cast<int>(edges_.size()));
    edges_.push_back({u, Rational()});
    return static_cast<int>(edges_.size()) - 2;
  }

  Rational max_flow(int s, int t) {
    Rational total;
    while (true) {
      std::vector<int> via(adj_.size(), -1);
      std::deque<int> queue{s};
      std::vector<char> seen(adj_.size(), 0);
      seen[s] = 1;
      while (!queue.empty() && !seen[t]) {
        const int u = queue.front();
        queue.pop_front();
        for (int e : adj_[u]) {
          const int v = edges_[e].to;
          if (seen[v] || edges_[e].cap.sign() <= 0) continue;
          seen[v] = 1;
          via[v] = e;
          queue.push_back(v);
        }
      }
      if (!seen[t]) return total;
      Rational push;
      bool first = true;
      for (int v = t; v != s; v = edges_[via[v] ^ 1].to) {
        if (first || edges_[via[v]].cap < push) push = edges_[via[v]].cap;
        first = false;
      }
      for (int v = t; v != s; v = edges_[via[v] ^ 1].to) {
        edges_[via[v]].cap -= push;
        edges_[via[v] ^ 1].cap += push;
      }
      total += push;
    }
  }

  Rational flow_on(int edge) const { return edges_[edge ^ 1].cap; }

private:
  struct Edge {
    int to;
    Rational cap;
  };
  std::vector<std::vector<int>> adj_;
  std::vector<Edge> edges_;
};

} // namespace

Allocation probabilistic_serial(const Instance& inst) {
  inst.validate();
  const int n = inst.n(), m = inst.m();
  if (m > 20) throw InputError("probabilistic serial supports at most 20 objects");
  Rational total_supply, total_cap;
  for (int o = 0; o < m; ++o) total_supply += inst.supplies[o];
  for (int i = 0; i < n; ++i) total_cap += Rational(inst.capacities[i]);
  for (int i = 0; i < n; ++i) {
    for (int o = 0; o < m; ++o) {
      if (inst.capacities[i] > 1 && inst.supplies[o] > Rational(1)) {
        throw InputError("probabilistic serial needs min(cap, supply) <= 1 for every pair");
      }
    }
  }
  if (inst.complete && total_supply > total_cap) throw EmptyFeasibleSet("supply exceeds total capacity");

  const unsigned full = (1u << m) - 1;
  std::vector<Rational> supply_of(1u << m);
  for (unsigned u = 1; u <= full; ++u) {
    const int o = __builtin_ctz(u);
    supply_of[u] = supply_of[u & (u - 1)] + inst.supplies[o];
  }
  std::vector<std::vector<unsigned>> mask(n);
  std::vector<std::vector<Rational>> eaten(n);
  for (int i = 0; i < n; ++i) {
    const auto& pref = inst.preferences[i];
    for (int c = 0; c < pref.num_classes(); ++c) {
      unsigned msk = 0;
      for (int o : pref[c]) msk |= 1u << o;
      mask[i].push_back(msk);
    }
    eaten[i].assign(pref.num_classes(), Rational());
  }
  auto demand = [&](unsigned u) {
    Rational d;
    for (int i = 0; i < n; ++i) {
      for (size_t c = 0; c < mask[i].size(); ++c) {
        if ((mask[i][c] & ~u) == 0) d += eaten[i][c];
      }
    }
    return d;
  };
  std::vector<Rational> taken(n);
  while (true) {
    std::vector<char> tight(full + 1, 0);
    for (unsigned u = 1; u <= full; ++u) tight[u] = demand(u) == supply_of[u];
    std::vector<int> eating(n, -1);
    bool any = false;
    for (int i = 0; i < n; ++i) {
      if (taken[i] >= Rational(inst.capacities[i])) continue;
      for (size_t c = 0; c < mask[i].size() && eating[i] < 0; ++c) {
        bool blocked = false;
        for (unsigned u = 1; u <= full && !blocked; ++u) {
          blocked = tight[u] && (mask[i][c] & ~u) == 0;
        }
        if (!blocked) eating[i] = static_cast<int>(c);
      }
      any = any || eating[i] >= 0;
    }
    if (!any) break;
    std::optional<Rational> delta;
    for (int i = 0; i < n; ++i) {
      if (eating[i] < 0) continue;
      Rational room = Rational(inst.capacities[i]) - taken[i];
      if (!delta || room < *delta) delta = room;
    }
    for (unsigned u = 1; u <= full; ++u) {
      int k = 0;
      for (int i = 0; i < n; ++i) {
        if (eating[i] >= 0 && (mask[i][eating[i]] & ~u) == 0) ++k;
      }
      if (k == 0) continue;
      Rational slack = (supply_of[u] - demand(u)) / Rational(k);
      if (slack < *delta) delta = slack;
    }
    for (int i = 0; i < n; ++i) {
      if (eating[i] < 0) continue;
      eaten[i][eating[i]] += *delta;
      taken[i] += *delta;
    }
  }

  // Split class totals over objects with a max-flow.
  Allocation p(n, m);
  std::vector<int> class_node;
  std::vector<std::pair<int, int>> node_owner;
  int nodes = 2 + m;
  for (int i = 0; i < n; ++i) {
    for (size_t c = 0; c < mask[i].size(); ++c) node_owner.push_back({i, static_cast<int>(c)});
  }
  nodes += static_cast<int>(node_owner.size());
  FlowNetwork net(nodes);
  const int source = 0, sink = 1;
  std::vector<std::vector<std::pair<int, int>>> arcs(node_owner.size()); // (edge, object)
  Rational want;
  for (size_t k = 0; k < node_owner.size(); ++k) {
    const auto [i, c] = node_owner[k];
    const int node = 2 + m + static_cast<int>(k);
    net.add_edge(source, node, eaten[i][c]);
    want += eaten[i][c];
    for (int o : inst.preferences[i][c]) arcs[k].push_back({net.add_edge(node, 2 + o, Rational(inst.n() + 1)), o});
  }
  for (int o = 0; o < m; ++o) net.add_edge(2 + o, sink, inst.supplies[o]);
  if (net.max_flow(source, sink) != want) throw InternalError("eaten amounts are not realizable");
  for (size_t k = 0; k < node_owner.size(); ++k) {
    for (const auto& [e, o] : arcs[k]) p(node_owner[k].first, o) += net.flow_on(e);
  }
  return p;
}

Allocation deferred_acceptance(const Instance& inst, std::vector<int> tie_break) {
  inst.validate();
  if (!inst.priorities) throw InputError("deferred acceptance needs priorities");
  if (!inst.has_strict_preferences()) throw InputError("deferred acceptance needs strict preferences");
  const int n = inst.n(), m = inst.m();
  const auto supply = integer_supplies(inst);
  if (tie_break.empty()) {
    tie_break.resize(n);
    std::iota(tie_break.begin(), tie_break.end(), 0);
  }
  std::vector<int> position(n, -1);
  for (int k = 0; k < static_cast<int>(tie_break.size()); ++k) {
    if (tie_break[k] < 0 || tie_break[k] >= n || position[tie_break[k]] != -1) throw InputError("tie-break is not a permutation");
    position[tie_break[k]] = k;
  }
  if (static_cast<int>(tie_break.size()) != n) throw InputError("tie-break is not a permutation");
  auto better = [&](int o, int a, int b) {
    const auto& prio = inst.priority(o);
    if (prio.class_of(a) != prio.class_of(b)) return prio.class_of(a) < prio.class_of(b);
    return position[a] < position[b];
  };
  std::vector<std::vector<int>> rank_list(n);
  for (int i = 0; i < n; ++i) {
    for (const auto& cls : inst.preferences[i].classes()) rank_list[i].push_back(cls[0]);
  }
  std::vector<int> next(n, 0), held(n, 0);
  std::vector<std::vector<int>> holders(m);
  std::deque<int> queue;
  for (int i = 0; i < n; ++i) queue.push_back(i);
  while (!queue.empty()) {
    const int i = queue.front();
    queue.pop_front();
    while (held[i] < inst.capacities[i] && next[i] < m) {
      const int o = rank_list[i][next[i]++];
      auto& h = holders[o];
      h.push_back(i);
      ++held[i];
      if (static_cast<int>(h.size()) <= supply[o]) continue;
      auto worst = std::max_element(h.begin(), h.end(), [&](int a, int b) { return better(o, a, b); });
      const int loser = *worst;
      h.erase(worst);
      --held[loser];
      if (loser != i) queue.push_back(loser);
    }
  }
  Allocation p(n, m);
  for (int o = 0; o < m; ++o) {
    for (int i : holders[o]) p(i, o) = Rational(1);
  }
  return p;
}

Allocation deferred_acceptance_uniform(const Instance& inst, long long budget) {
  const int n = inst.n();
  const long long count = factorial_capped(n, budget);
  if (count > budget) throw EnumerationBudgetExceeded("n! tie-breaking orders exceed the budget of " + std::to_string(budget));
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<long long> hits(static_cast<size_t>(n) * inst.m(), 0);
  do {
    const Allocation q = deferred_acceptance(inst, perm);
    for (size_t v = 0; v < hits.size(); ++v) hits[v] += q.flat()[v].is_zero() ? 0 : 1;
  } while (std::next_permutation(perm.begin(), perm.end()));
  Allocation p(n, inst.m());
  for (int i = 0; i < n; ++i) {
    for (int o = 0; o < inst.m(); ++o) p(i, o) = Rational(hits[static_cast<size_t>(i) * inst.m() + o], count);
  }
  return p;
}

Allocation serial_dictatorship(const Instance& inst, const std::vector<int>& order) {
  auto left = integer_supplies(inst);
  Allocation p(inst.n(), inst.m());
  for (int i : order) {
    int picks = inst.capacities[i];
    for (const auto& cls : inst.preferences[i].classes()) {
      for (int o : cls) {
        if (picks == 0) break;
        if (left[o] == 0) continue;
        --left[o];
        --picks;
        p(i, o) = Rational(1);
      }
    }
  }
  return p;
}

Allocation random_priority(const Instance& inst, long long budget) {
  inst.validate();
  const int n = inst.n();
  const long long count = factorial_capped(n, budget);
  if (count > budget) throw EnumerationBudgetExceeded("n! agent orders exceed the budget of " + std::to_string(budget));
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<long long> hits(static_cast<size_t>(n) * inst.m(), 0);
  do {
    const Allocation q = serial_dictatorship(inst, perm);
    for (size_t v = 0; v < hits.size(); ++v) hits[v] += q.flat()[v].is_zero() ? 0 : 1;
  } while (std::next_permutation(perm.begin(), perm.end()));
  Allocation p(n, inst.m());
  for (int i = 0; i < n; ++i) {
    for (int o = 0; o < inst.m(); ++o) p(i, o) = Rational(hits[static_cast<size_t>(i) * inst.m() + o], count);
  }
  return p;
}

} // namespace vigil
