#include <doctest.h>

#include "support.hpp"
#include "vigil/errors.hpp"
#include "vigil/ver.hpp"
#include "vigil/verify.hpp"

using namespace vigil;
using testsupport::matrix;

namespace {

Allocation recombine(const std::vector<LotteryTerm>& terms, int n, int m) {
  Allocation sum(n, m);
  for (const auto& t : terms) {
    for (int i = 0; i < n; ++i) {
      for (int o = 0; o < m; ++o) sum(i, o) += t.weight * t.outcome(i, o);
    }
  }
  return sum;
}

} // namespace

TEST_CASE("sd-efficiency finds a dominating allocation") {
  const auto file = testsupport::load_fixture("claimwise_proof_unconstrained.json");
  const auto& inst = file.instance;
  const auto x = build(file.constraints, inst);
  const auto identity = matrix({{"1", "0", "0"}, {"0", "1", "0"}, {"0", "0", "1"}});
  const auto r = is_constrained_sd_efficient(identity, x, inst);
  CHECK_FALSE(r.efficient);
  REQUIRE(r.dominated_by);
  CHECK(*r.dominated_by == matrix({{"0", "1", "0"}, {"1", "0", "0"}, {"0", "0", "1"}}));

  const auto cws = build(ConstraintSpec::of(ConstraintSpec::Kind::Claimwise), inst);
  CHECK(is_constrained_sd_efficient(identity, cws, inst).efficient);
}

TEST_CASE("dl-efficiency is stronger than sd-efficiency") {
  // Uniform is sd-efficient for these preferences but dl-dominated.
  const Instance inst = make_instance({WeakOrder::strict({0, 1, 2}), WeakOrder::strict({1, 2, 0}), WeakOrder::strict({2, 0, 1})});
  const auto x = build(ConstraintSpec{}, inst);
  const auto uniform = matrix({{"1/3", "1/3", "1/3"}, {"1/3", "1/3", "1/3"}, {"1/3", "1/3", "1/3"}});
  CHECK_FALSE(is_constrained_sd_efficient(uniform, x, inst).efficient);
  const auto top = matrix({{"1", "0", "0"}, {"0", "1", "0"}, {"0", "0", "1"}});
  CHECK(is_constrained_sd_efficient(top, x, inst).efficient);
  CHECK(is_constrained_dl_efficient(top, x, inst).efficient);
}

TEST_CASE("dl-efficiency on a two-point convex set") {
  // X = conv{p, q}: q is sd-incomparable to p for every agent yet
  // dl-dominated, since each agent's top-class share drops from 1/2 to 1/3.
  const Instance inst = make_instance({WeakOrder::strict({0, 1, 2}), WeakOrder::strict({1, 2, 0}), WeakOrder::strict({2, 0, 1})});
  const auto p = matrix({{"1/2", "0", "1/2"}, {"1/2", "1/2", "0"}, {"0", "1/2", "1/2"}});
  const auto q = matrix({{"1/3", "1/3", "1/3"}, {"1/3", "1/3", "1/3"}, {"1/3", "1/3", "1/3"}});
  FeasibleSet x;
  x.n = x.m = 3;
  Member hull;
  hull.poly.num_vars = 2;
  hull.poly.add(lp::make_constraint({{0, Rational(1)}, {1, Rational(1)}}, lp::Relation::Equal, Rational(1)));
  for (int v = 0; v < 9; ++v) hull.embedding.push_back(lp::canonical({{0, p.flat()[v]}, {1, q.flat()[v]}}));
  x.members.push_back(hull);
  CHECK(is_constrained_sd_efficient(q, x, inst).efficient);
  CHECK_FALSE(is_constrained_dl_efficient(q, x, inst).efficient);
  CHECK(is_constrained_dl_efficient(p, x, inst).efficient);
  CHECK(ver(inst, x).allocation == p);
}

TEST_CASE("leximin signature of the unconstrained set") {
  const Instance inst = make_instance({WeakOrder::strict({0, 1}), WeakOrder::strict({0, 1})});
  const auto sig = leximin_signature(build(ConstraintSpec{}, inst), inst);
  CHECK(sig.sorted_values == std::vector<Rational>{Rational(1, 2), Rational(1, 2), Rational(1), Rational(1)});
}

TEST_CASE("stability witnesses") {
  const auto file = testsupport::load_fixture("eas_expost.json");
  const auto& inst = file.instance;
  const auto p = testsupport::load_fixture_allocation("eas_expost.txt", inst);
  CHECK(check_stability(p, inst, StabilityNotion::ExPost).stable);
  CHECK(check_stability(p, inst, StabilityNotion::Fractional).stable);
  CHECK(check_stability(p, inst, StabilityNotion::Claimwise).stable);
  const auto ea = check_stability(p, inst, StabilityNotion::ExAnte);
  CHECK_FALSE(ea.stable);
  // Agent 1 outranks agent 5 at e, holds less of her upper contour there
  // than a full unit, while agent 5 gets some e.
  CHECK(ea.agent == 0);
  CHECK(ea.other == 4);
  CHECK(ea.object == 4);

  const auto cw = testsupport::load_fixture("claimwise_proof.json");
  const auto swapped = matrix({{"0", "1", "0"}, {"1", "0", "0"}, {"0", "0", "1"}});
  const auto c = check_stability(swapped, cw.instance, StabilityNotion::Claimwise);
  CHECK_FALSE(c.stable);
  CHECK(c.object >= 0);
  const auto f = check_stability(swapped, cw.instance, StabilityNotion::Fractional);
  CHECK_FALSE(f.stable);
  CHECK(f.other == -1);
}

TEST_CASE("notion names round trip") {
  for (auto s : {StabilityNotion::ExAnte, StabilityNotion::ExPost, StabilityNotion::Fractional, StabilityNotion::Claimwise}) {
    CHECK(parse_notion(notion_name(s)) == s);
  }
  CHECK_THROWS_AS(parse_notion("strong"), InputError);
}

TEST_CASE("equal treatment and weak envy") {
  const Instance flat = make_instance({WeakOrder::strict({0, 1}), WeakOrder::strict({0, 1})},
                                      std::vector<WeakOrder>{WeakOrder::flat(2), WeakOrder::flat(2)});
  const auto det = matrix({{"1", "0"}, {"0", "1"}});
  const auto half = matrix({{"1/2", "1/2"}, {"1/2", "1/2"}});
  CHECK_FALSE(check_equal_treatment(det, flat, TreatmentMode::Full).ok);
  CHECK_FALSE(check_equal_treatment(det, flat, TreatmentMode::Limited).ok);
  CHECK(check_equal_treatment(half, flat, TreatmentMode::Full).ok);
  const auto envy = check_weak_sd_envy(det, flat);
  CHECK_FALSE(envy.ok);
  CHECK(envy.first == 1);
  CHECK(envy.second == 0);
  CHECK(check_weak_sd_envy(half, flat).ok);

  // Different priorities: limited equal treatment no longer applies.
  const Instance ranked = make_instance({WeakOrder::strict({0, 1}), WeakOrder::strict({0, 1})},
                                        std::vector<WeakOrder>{WeakOrder::strict({0, 1}), WeakOrder::strict({0, 1})});
  CHECK(check_equal_treatment(det, ranked, TreatmentMode::Limited).ok);
  CHECK_FALSE(check_equal_treatment(det, ranked, TreatmentMode::Full).ok);
  CHECK(check_weak_sd_envy(det, ranked).ok);
}

TEST_CASE("Birkhoff decomposition of bistochastic matrices") {
  testsupport::Rng rng(17);
  for (int iter = 0; iter < 50; ++iter) {
    const int n = 2 + iter % 4;
    const Instance inst = testsupport::random_strict_instance(n, n, rng, false);
    const auto p = testsupport::random_complete_point(n, n, 1 + iter % 5, rng);
    const auto terms = bvn_decompose(p, inst);
    Rational total;
    for (const auto& t : terms) {
      REQUIRE(t.weight.sign() > 0);
      REQUIRE(t.outcome.is_deterministic());
      REQUIRE(allocation_problem(t.outcome, inst).empty());
      total += t.weight;
    }
    REQUIRE(total == Rational(1));
    REQUIRE(recombine(terms, n, n) == p);
    REQUIRE(static_cast<int>(terms.size()) <= (n - 1) * (n - 1) + 1);
  }
}

TEST_CASE("decomposition of rectangular and deterministic inputs") {
  testsupport::Rng rng(18);
  const Instance inst = testsupport::random_strict_instance(4, 2, rng, false);
  const auto p = testsupport::random_complete_point(4, 2, 3, rng);
  CHECK(recombine(bvn_decompose(p, inst), 4, 2) == p);

  const auto det = matrix({{"0", "1"}, {"1", "0"}, {"0", "0"}, {"0", "0"}});
  const auto single = bvn_decompose(det, inst);
  REQUIRE(single.size() == 1);
  CHECK(single[0].weight == Rational(1));
  CHECK(single[0].outcome == det);
}

TEST_CASE("restricted decomposition") {
  const auto file = testsupport::load_fixture("eas_expost.json");
  const auto& inst = file.instance;
  const auto p = testsupport::load_fixture_allocation("eas_expost.txt", inst);
  const auto pool = io::parse_allocation_list(io::json::parse(io::read_file(testsupport::fixture("eas_lottery.json"))), inst);
  const auto terms = bvn_decompose(p, inst, pool);
  REQUIRE(terms.size() == 4);
  for (size_t k = 0; k < 4; ++k) {
    CHECK(terms[k].weight == Rational(1, 4));
    CHECK(terms[k].outcome == pool[k]);
  }
  const std::vector<Allocation> too_few(pool.begin(), pool.begin() + 2);
  CHECK_THROWS_AS(bvn_decompose(p, inst, too_few), NotDecomposable);
}

TEST_CASE("two-sided efficiency") {
  const auto file = testsupport::load_fixture("claimwise_proof.json");
  const auto& inst = file.instance;
  // The priority-respecting identity cannot be improved for both sides at once.
  const auto identity = matrix({{"1", "0", "0"}, {"0", "1", "0"}, {"0", "0", "1"}});
  CHECK(check_two_sided_sd_efficiency(identity, inst).efficient);
  // Everybody on both sides prefers the diagonal to the anti-diagonal.
  const Instance aligned = make_instance({WeakOrder::strict({0, 1}), WeakOrder::strict({1, 0})},
                                         std::vector<WeakOrder>{WeakOrder::strict({0, 1}), WeakOrder::strict({1, 0})});
  const auto r = check_two_sided_sd_efficiency(matrix({{"1/2", "1/2"}, {"1/2", "1/2"}}), aligned);
  CHECK_FALSE(r.efficient);
  REQUIRE(r.dominated_by);
  CHECK(*r.dominated_by == matrix({{"1", "0"}, {"0", "1"}}));
}
