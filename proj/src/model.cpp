#include "vigil/model.hpp"

#include <algorithm>

#include "vigil/errors.hpp"

namespace vigil {

WeakOrder::WeakOrder(std::vector<std::vector<int>> classes, int universe)
    : classes_(std::move(classes)), rank_(universe, -1) {
  for (size_t k = 0; k < classes_.size(); ++k) {
    if (classes_[k].empty()) throw InputError("weak order has an empty class");
    std::sort(classes_[k].begin(), classes_[k].end());
    for (int item : classes_[k]) {
      if (item < 0 || item >= universe) throw InputError("weak order item out of range");
      if (rank_[item] != -1) throw InputError("weak order lists an item twice");
      rank_[item] = static_cast<int>(k);
    }
  }
  if (std::count(rank_.begin(), rank_.end(), -1) > 0) {
    throw InputError("weak order does not rank every item");
  }
}

WeakOrder WeakOrder::strict(const std::vector<int>& order) {
  std::vector<std::vector<int>> classes;
  for (int item : order) classes.push_back({item});
  return WeakOrder(std::move(classes), static_cast<int>(order.size()));
}

WeakOrder WeakOrder::flat(int universe) {
  std::vector<int> all(universe);
  for (int i = 0; i < universe; ++i) all[i] = i;
  return WeakOrder({all}, universe);
}

void Instance::validate() const {
  const int n_ = n(), m_ = m();
  if (n_ == 0 || m_ == 0) throw InputError("instance needs at least one agent and one object");
  if (static_cast<int>(preferences.size()) != n_) throw InputError("one preference per agent required");
  for (const auto& pref : preferences) {
    if (pref.universe() != m_) throw InputError("preference does not rank all objects");
  }
  if (priorities) {
    if (static_cast<int>(priorities->size()) != m_) throw InputError("one priority per object required");
    for (const auto& prio : *priorities) {
      if (prio.universe() != n_) throw InputError("priority does not rank all agents");
    }
  }
  if (static_cast<int>(capacities.size()) != n_) throw InputError("one capacity per agent required");
  for (int c : capacities) {
    if (c < 1) throw InputError("capacities must be positive integers");
  }
  if (static_cast<int>(supplies.size()) != m_) throw InputError("one supply per object required");
  for (const auto& s : supplies) {
    if (s.sign() <= 0) throw InputError("supplies must be positive");
  }
}

bool Instance::has_strict_preferences() const {
  return std::all_of(preferences.begin(), preferences.end(), [](const WeakOrder& w) { return w.is_strict(); });
}

bool Instance::has_strict_priorities() const {
  return priorities &&
         std::all_of(priorities->begin(), priorities->end(), [](const WeakOrder& w) { return w.is_strict(); });
}

const WeakOrder& Instance::priority(int object) const {
  if (!priorities) throw InputError("instance has no priorities");
  return (*priorities)[object];
}

Instance make_instance(const std::vector<WeakOrder>& preferences, std::optional<std::vector<WeakOrder>> priorities) {
  Instance inst;
  const int n = static_cast<int>(preferences.size());
  const int m = n == 0 ? 0 : preferences[0].universe();
  for (int i = 0; i < n; ++i) inst.agent_ids.push_back(std::to_string(i + 1));
  for (int o = 0; o < m; ++o) {
    inst.object_ids.push_back(o < 26 ? std::string(1, static_cast<char>('a' + o)) : "o" + std::to_string(o + 1));
  }
  inst.preferences = preferences;
  inst.priorities = std::move(priorities);
  inst.capacities.assign(n, 1);
  inst.supplies.assign(m, Rational(1));
  inst.validate();
  return inst;
}

Allocation::Allocation(const std::vector<std::vector<Rational>>& rows)
    : n_(static_cast<int>(rows.size())), m_(rows.empty() ? 0 : static_cast<int>(rows[0].size())) {
  v_.reserve(static_cast<size_t>(n_) * m_);
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != m_) throw InputError("ragged allocation rows");
    v_.insert(v_.end(), r.begin(), r.end());
  }
}

std::vector<Rational> Allocation::row(int i) const {
  return {v_.begin() + static_cast<long>(i) * m_, v_.begin() + static_cast<long>(i + 1) * m_};
}

Rational Allocation::row_sum(int i) const {
  Rational s;
  for (int o = 0; o < m_; ++o) s += (*this)(i, o);
  return s;
}

Rational Allocation::column_sum(int o) const {
  Rational s;
  for (int i = 0; i < n_; ++i) s += (*this)(i, o);
  return s;
}

bool Allocation::is_deterministic() const {
  return std::all_of(v_.begin(), v_.end(), [](const Rational& x) { return x.is_integer(); });
}

std::string allocation_problem(const Allocation& p, const Instance& inst) {
  if (p.n() != inst.n() || p.m() != inst.m()) return "allocation dimensions do not match the instance";
  for (const auto& x : p.flat()) {
    if (x.sign() < 0) return "negative entry";
  }
  for (int o = 0; o < p.m(); ++o) {
    const Rational s = p.column_sum(o);
    if (s > inst.supplies[o]) return "column " + inst.object_ids[o] + " exceeds supply";
    if (inst.complete && s != inst.supplies[o]) return "column " + inst.object_ids[o] + " is not complete";
  }
  for (int i = 0; i < p.n(); ++i) {
    if (p.row_sum(i) > Rational(inst.capacities[i])) return "row " + inst.agent_ids[i] + " exceeds capacity";
  }
  return {};
}

std::vector<Rational> class_sums(const std::vector<Rational>& row, const WeakOrder& pref) {
  if (static_cast<int>(row.size()) != pref.universe()) throw InputError("allotment dimension mismatch");
  std::vector<Rational> sums(pref.num_classes());
  for (int k = 0; k < pref.num_classes(); ++k) {
    for (int o : pref[k]) sums[k] += row[o];
  }
  return sums;
}

std::vector<Rational> contour_sums(const std::vector<Rational>& row, const WeakOrder& pref) {
  auto sums = class_sums(row, pref);
  for (size_t k = 1; k < sums.size(); ++k) sums[k] += sums[k - 1];
  return sums;
}

SdResult sd_dominates(const std::vector<Rational>& x, const std::vector<Rational>& y, const WeakOrder& pref) {
  if (x.size() != y.size()) throw InputError("allotment dimension mismatch");
  const auto cx = contour_sums(x, pref);
  const auto cy = contour_sums(y, pref);
  bool strict = false;
  for (size_t k = 0; k < cx.size(); ++k) {
    if (cx[k] < cy[k]) return SdResult::Incomparable;
    if (cx[k] > cy[k]) strict = true;
  }
  return strict ? SdResult::Strict : SdResult::Weak;
}

DlResult dl_dominates(const std::vector<Rational>& x, const std::vector<Rational>& y, const WeakOrder& pref) {
  if (x.size() != y.size()) throw InputError("allotment dimension mismatch");
  const auto sx = class_sums(x, pref);
  const auto sy = class_sums(y, pref);
  for (size_t k = 0; k < sx.size(); ++k) {
    if (sx[k] > sy[k]) return DlResult::Strict;
    if (sx[k] < sy[k]) return DlResult::NotDominating;
  }
  return DlResult::Equivalent;
}

SignatureVector signature(const Allocation& p, const Instance& inst) {
  SignatureVector sig;
  for (int i = 0; i < p.n(); ++i) {
    const auto contour = contour_sums(p.row(i), inst.preferences[i]);
    for (size_t k = 0; k < contour.size(); ++k) {
      sig.entries.push_back({i, static_cast<int>(k) + 1, contour[k]});
      sig.sorted_values.push_back(contour[k]);
    }
  }
  std::sort(sig.sorted_values.begin(), sig.sorted_values.end());
  return sig;
}

int compare_leximin(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  const size_t len = std::min(a.size(), b.size());
  for (size_t k = 0; k < len; ++k) {
    if (a[k] < b[k]) return -1;
    if (a[k] > b[k]) return 1;
  }
  return 0;
}

} // namespace vigil
