#pragma once

#include <random>
#include <string>
#include <vector>

#include "vigil/feasible.hpp"
#include "vigil/io.hpp"
#include "vigil/model.hpp"

namespace testsupport {

using vigil::Allocation;
using vigil::Instance;
using vigil::Rational;
using vigil::WeakOrder;

std::string fixture(const std::string& name);
vigil::io::InstanceFile load_fixture(const std::string& name);
Allocation load_fixture_allocation(const std::string& name, const Instance& inst);

Allocation matrix(const std::vector<std::vector<std::string>>& rows);

using Rng = std::mt19937_64;

std::vector<int> random_permutation(int k, Rng& rng);
WeakOrder random_strict_order(int k, Rng& rng);
// Random order with ties: each adjacent pair is merged with probability tie_prob.
WeakOrder random_weak_order(int k, Rng& rng, double tie_prob = 0.35);

Instance random_strict_instance(int n, int m, Rng& rng, bool strict_priorities);
Instance random_weak_instance(int n, int m, Rng& rng);

// Average of k random matchings that fill every object (requires n >= m).
Allocation random_complete_point(int n, int m, int k, Rng& rng);

// Random rows a.x <= a.p0 + slack with small nonnegative integer coefficients,
// so p0 stays feasible.
std::vector<vigil::lp::LinearConstraint> random_rows_through(const Instance& inst, const Allocation& p0, int rows, Rng& rng);

// Adds the image of every row under swapping agents a and b.
std::vector<vigil::lp::LinearConstraint> symmetrize(const Instance& inst, std::vector<vigil::lp::LinearConstraint> rows,
                                                    int a, int b);

// Textbook agent-proposing Gale-Shapley: strict preferences and priorities,
// unit capacities and supplies.
Allocation gale_shapley(const Instance& inst);

// Event-driven probabilistic serial for strict preferences, unit supplies
// and capacities.
Allocation classic_ps(const Instance& inst);

// Maximum of c.x over {x >= 0, rows} by enumerating every basis. Only for
// tiny bounded polytopes. Returns false when infeasible.
bool brute_force_max(const vigil::lp::Polytope& poly, const vigil::lp::LinearExpr& objective, Rational& best);

} // namespace testsupport
