#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vigil/rational.hpp"

namespace vigil {

// Ordered partition of {0..size-1} into indifference classes, best first.
class WeakOrder {
public:
  WeakOrder() = default;
  WeakOrder(std::vector<std::vector<int>> classes, int universe);

  static WeakOrder strict(const std::vector<int>& order);
  static WeakOrder flat(int universe);

  const std::vector<std::vector<int>>& classes() const { return classes_; }
  const std::vector<int>& operator[](int k) const { return classes_[k]; }
  int num_classes() const { return static_cast<int>(classes_.size()); }
  int universe() const { return static_cast<int>(rank_.size()); }
  int class_of(int item) const { return rank_[item]; }

  bool prefers(int a, int b) const { return rank_[a] < rank_[b]; }
  bool weakly_prefers(int a, int b) const { return rank_[a] <= rank_[b]; }
  bool indifferent(int a, int b) const { return rank_[a] == rank_[b]; }
  bool is_strict() const { return num_classes() == universe(); }

  friend bool operator==(const WeakOrder& a, const WeakOrder& b) { return a.classes_ == b.classes_; }

private:
  std::vector<std::vector<int>> classes_;
  std::vector<int> rank_;
};

struct Instance {
  std::vector<std::string> agent_ids;
  std::vector<std::string> object_ids;
  std::vector<WeakOrder> preferences;               // per agent, over objects
  std::optional<std::vector<WeakOrder>> priorities; // per object, over agents
  std::vector<int> capacities;
  std::vector<Rational> supplies;
  bool complete = true;

  int n() const { return static_cast<int>(agent_ids.size()); }
  int m() const { return static_cast<int>(object_ids.size()); }
  int var(int agent, int object) const { return agent * m() + object; }

  // Throws InputError when the invariants do not hold.
  void validate() const;
  bool has_strict_preferences() const;
  bool has_strict_priorities() const;
  const WeakOrder& priority(int object) const;
};

// Builds an instance with generated ids ("1".."n", "a".."z", then "o27"...),
// unit capacities and unit supplies.
Instance make_instance(const std::vector<WeakOrder>& preferences,
                       std::optional<std::vector<WeakOrder>> priorities = std::nullopt);

class Allocation {
public:
  Allocation() = default;
  Allocation(int n, int m) : n_(n), m_(m), v_(static_cast<size_t>(n) * m) {}
  Allocation(const std::vector<std::vector<Rational>>& rows);

  int n() const { return n_; }
  int m() const { return m_; }
  Rational& operator()(int i, int o) { return v_[static_cast<size_t>(i) * m_ + o]; }
  const Rational& operator()(int i, int o) const { return v_[static_cast<size_t>(i) * m_ + o]; }
  const std::vector<Rational>& flat() const { return v_; }
  std::vector<Rational> row(int i) const;

  Rational row_sum(int i) const;
  Rational column_sum(int o) const;
  bool is_deterministic() const;

  friend bool operator==(const Allocation& a, const Allocation& b) {
    return a.n_ == b.n_ && a.m_ == b.m_ && a.v_ == b.v_;
  }

private:
  int n_ = 0;
  int m_ = 0;
  std::vector<Rational> v_;
};

// Empty string if p is a valid allocation for inst, otherwise the first problem.
std::string allocation_problem(const Allocation& p, const Instance& inst);

// Sum of row entries over each indifference class, best class first.
std::vector<Rational> class_sums(const std::vector<Rational>& row, const WeakOrder& pref);
// Running prefix of class_sums.
std::vector<Rational> contour_sums(const std::vector<Rational>& row, const WeakOrder& pref);

enum class SdResult { Strict, Weak, Incomparable };
enum class DlResult { Strict, Equivalent, NotDominating };

SdResult sd_dominates(const std::vector<Rational>& x, const std::vector<Rational>& y, const WeakOrder& pref);
DlResult dl_dominates(const std::vector<Rational>& x, const std::vector<Rational>& y, const WeakOrder& pref);

struct SignatureEntry {
  int agent;
  int depth; // 1-based number of top classes summed
  Rational value;
};

struct SignatureVector {
  std::vector<SignatureEntry> entries;
  std::vector<Rational> sorted_values;
};

SignatureVector signature(const Allocation& p, const Instance& inst);

// Lexicographic comparison of sorted signature vectors of equal length.
int compare_leximin(const std::vector<Rational>& a, const std::vector<Rational>& b);

} // namespace vigil
