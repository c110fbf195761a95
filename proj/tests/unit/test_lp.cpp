#include <doctest.h>

#include "support.hpp"
#include "vigil/errors.hpp"
#include "vigil/lp.hpp"

using namespace vigil;
using namespace vigil::lp;

namespace {

LinearConstraint row(std::vector<std::pair<int, Rational>> terms, Relation rel, Rational rhs) {
  LinearExpr e;
  for (auto& [v, c] : terms) e.push_back({v, c});
  return make_constraint(e, rel, rhs);
}

} // namespace

TEST_CASE("make_constraint merges, drops zeros and sorts") {
  const auto c = make_constraint({{2, Rational(1)}, {0, Rational(3)}, {2, Rational(-1)}, {1, Rational(2)}},
                                 Relation::LessEqual, Rational(1));
  REQUIRE(c.terms.size() == 2);
  CHECK(c.terms[0].var == 0);
  CHECK(c.terms[1].var == 1);
  CHECK_THROWS_AS(make_constraint({{0, Rational(1)}, {0, Rational(-1)}}, Relation::Equal, Rational(0)), InputError);
}

TEST_CASE("textbook maximum") {
  // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
  Polytope p{2, {}};
  p.add(row({{0, 1}}, Relation::LessEqual, 4));
  p.add(row({{1, 2}}, Relation::LessEqual, 12));
  p.add(row({{0, 3}, {1, 2}}, Relation::LessEqual, 18));
  const auto r = lp_max(p, {{0, Rational(3)}, {1, Rational(5)}});
  REQUIRE(r.status == Status::Optimal);
  CHECK(r.objective_value == Rational(36));
  CHECK(r.point[0] == Rational(2));
  CHECK(r.point[1] == Rational(6));
}

TEST_CASE("infeasible, unbounded and equality rows") {
  Polytope inf{2, {}};
  inf.add(row({{0, 1}, {1, 1}}, Relation::LessEqual, 1));
  inf.add(row({{0, 1}}, Relation::GreaterEqual, 2));
  CHECK(lp_max(inf, {{0, Rational(1)}}).status == Status::Infeasible);

  Polytope unb{2, {}};
  unb.add(row({{0, 1}, {1, -1}}, Relation::LessEqual, 1));
  CHECK(lp_max(unb, {{1, Rational(1)}}).status == Status::Unbounded);

  Polytope eq{3, {}};
  eq.add(row({{0, 1}, {1, 1}, {2, 1}}, Relation::Equal, 1));
  eq.add(row({{0, 1}, {1, -1}}, Relation::Equal, Rational(1, 3)));
  const auto r = lp_max(eq, {{1, Rational(1)}});
  REQUIRE(r.status == Status::Optimal);
  CHECK(r.objective_value == Rational(1, 3));
  CHECK(contains(eq, r.point));

  Polytope neg{1, {}};
  neg.add(row({{0, -1}}, Relation::LessEqual, -2));
  neg.add(row({{0, 1}}, Relation::LessEqual, 5));
  CHECK(lp_max(neg, {{0, Rational(-1)}}).objective_value == Rational(-2));
}

TEST_CASE("degenerate instance does not cycle") {
  // Beale's example, which cycles under the largest-coefficient rule.
  Polytope p{4, {}};
  p.add(row({{0, Rational(1, 4)}, {1, -60}, {2, Rational(-1, 25)}, {3, 9}}, Relation::LessEqual, 0));
  p.add(row({{0, Rational(1, 2)}, {1, -90}, {2, Rational(-1, 50)}, {3, 3}}, Relation::LessEqual, 0));
  p.add(row({{2, 1}}, Relation::LessEqual, 1));
  const auto r = lp_max(p, {{0, Rational(3, 4)}, {1, -150}, {2, Rational(1, 50)}, {3, -6}});
  REQUIRE(r.status == Status::Optimal);
  CHECK(r.objective_value == Rational(1, 20));
}

TEST_CASE("stop_above returns early with a feasible point") {
  Polytope p{2, {}};
  p.add(row({{0, 1}, {1, 1}}, Relation::LessEqual, 10));
  LpOptions opt;
  opt.stop_above = Rational(0);
  const auto r = lp_max(p, {{0, Rational(1)}, {1, Rational(1)}}, opt);
  CHECK(r.feasible());
  CHECK(r.objective_value > Rational(0));
  CHECK(contains(p, r.point));
}

TEST_CASE("union_max picks the best member and the lowest index on ties") {
  Polytope a{1, {}}, b{1, {}}, c{1, {}};
  a.add(row({{0, 1}}, Relation::LessEqual, 1));
  b.add(row({{0, 1}}, Relation::LessEqual, 3));
  c.add(row({{0, 1}}, Relation::LessEqual, 3));
  const auto u = union_max({a, b, c}, {{0, Rational(1)}});
  CHECK(u.member == 1);
  CHECK(u.result.objective_value == Rational(3));
}

TEST_CASE("call_count increments per solve") {
  Polytope p{1, {}};
  p.add(row({{0, 1}}, Relation::LessEqual, 1));
  const long long before = call_count();
  lp_max(p, {{0, Rational(1)}});
  lp_max(p, {{0, Rational(1)}});
  CHECK(call_count() - before == 2);
}

TEST_CASE("simplex agrees with vertex enumeration on random bounded programs") {
  testsupport::Rng rng(11);
  std::uniform_int_distribution<int> coef(-3, 4), dims(1, 3), rows(1, 4), rel(0, 5), rhs(-2, 6);
  int feasible = 0;
  for (int iter = 0; iter < 400; ++iter) {
    const int d = dims(rng);
    Polytope p{d, {}};
    for (int v = 0; v < d; ++v) p.add(row({{v, 1}}, Relation::LessEqual, Rational(5)));
    const int k = rows(rng);
    for (int r = 0; r < k; ++r) {
      LinearExpr e;
      for (int v = 0; v < d; ++v) e.push_back({v, Rational(coef(rng))});
      const int which = rel(rng);
      const Relation rr = which < 3 ? Relation::LessEqual : which < 5 ? Relation::GreaterEqual : Relation::Equal;
      e = canonical(e);
      if (e.empty()) continue;
      p.add(make_constraint(e, rr, Rational(rhs(rng))));
    }
    LinearExpr obj;
    for (int v = 0; v < d; ++v) obj.push_back({v, Rational(coef(rng), 2)});
    Rational best;
    const bool oracle = testsupport::brute_force_max(p, obj, best);
    const auto r = lp_max(p, obj);
    REQUIRE(r.status != Status::Unbounded);
    REQUIRE(r.feasible() == oracle);
    if (!oracle) continue;
    ++feasible;
    REQUIRE(r.objective_value == best);
    REQUIRE(contains(p, r.point));
    REQUIRE(evaluate(obj, r.point) == best);
  }
  CHECK(feasible > 100);
}

TEST_CASE("rows forcing zeros") {
  // x + y <= 0 pins both; then z - x >= 1 becomes z >= 1.
  Polytope p{3, {}};
  p.add(row({{0, 1}, {1, 2}}, Relation::LessEqual, 0));
  p.add(row({{2, 1}, {0, -1}}, Relation::GreaterEqual, 1));
  p.add(row({{2, 1}}, Relation::LessEqual, 3));
  const auto r = lp_max(p, {{0, Rational(5)}, {2, Rational(1)}});
  REQUIRE(r.status == Status::Optimal);
  CHECK(r.objective_value == Rational(3));
  REQUIRE(r.point.size() == 3);
  CHECK(contains(p, r.point));

  // Every variable pinned: only the constant rows remain.
  Polytope all{2, {}};
  all.add(row({{0, -1}, {1, -1}}, Relation::GreaterEqual, 0));
  const auto z = lp_max(all, {{0, Rational(1)}});
  REQUIRE(z.status == Status::Optimal);
  CHECK(z.point == std::vector<Rational>{Rational(0), Rational(0)});

  all.add(row({{0, 1}}, Relation::Equal, 1));
  CHECK(lp_max(all, {}).status == Status::Infeasible);
  // Mixed signs force nothing.
  Polytope mixed{2, {}};
  mixed.add(row({{0, 1}, {1, -1}}, Relation::Equal, 0));
  mixed.add(row({{0, 1}}, Relation::LessEqual, 2));
  CHECK(lp_max(mixed, {{1, Rational(1)}}).objective_value == Rational(2));
}
