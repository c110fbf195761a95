#include <doctest.h>

#include "support.hpp"
#include "vigil/errors.hpp"
#include "vigil/model.hpp"

using namespace vigil;
using testsupport::matrix;

TEST_CASE("weak orders validate their partition") {
  const WeakOrder w({{2}, {0, 1}}, 3);
  CHECK(w.num_classes() == 2);
  CHECK(w.prefers(2, 0));
  CHECK(w.indifferent(0, 1));
  CHECK(w.weakly_prefers(1, 0));
  CHECK_FALSE(w.is_strict());
  CHECK(WeakOrder::strict({1, 0, 2}).is_strict());
  CHECK(WeakOrder::flat(4).num_classes() == 1);
  CHECK_THROWS_AS(WeakOrder({{0}, {0, 1}}, 2), InputError);
  CHECK_THROWS_AS(WeakOrder({{0}}, 2), InputError);
  CHECK_THROWS_AS(WeakOrder({{0}, {}, {1}}, 2), InputError);
  CHECK_THROWS_AS(WeakOrder({{0, 5}}, 2), InputError);
}

TEST_CASE("instances check dimensions") {
  Instance inst = make_instance({WeakOrder::strict({0, 1}), WeakOrder::strict({1, 0})});
  CHECK_NOTHROW(inst.validate());
  CHECK(inst.object_ids == std::vector<std::string>{"a", "b"});
  CHECK(inst.agent_ids == std::vector<std::string>{"1", "2"});
  inst.capacities[0] = 0;
  CHECK_THROWS_AS(inst.validate(), InputError);
  inst.capacities[0] = 1;
  inst.supplies[1] = Rational(-1);
  CHECK_THROWS_AS(inst.validate(), InputError);
}

TEST_CASE("allocation_problem reports the first violated invariant") {
  const Instance inst = make_instance({WeakOrder::strict({0, 1}), WeakOrder::strict({1, 0})});
  CHECK(allocation_problem(matrix({{"1/2", "1/2"}, {"1/2", "1/2"}}), inst).empty());
  CHECK_FALSE(allocation_problem(matrix({{"1", "1/2"}, {"0", "1/2"}}), inst).empty());
  CHECK_FALSE(allocation_problem(matrix({{"-1/2", "1/2"}, {"3/2", "1/2"}}), inst).empty());
  CHECK_FALSE(allocation_problem(matrix({{"1/2", "1/2"}}), inst).empty());
}

TEST_CASE("class and contour sums") {
  const WeakOrder w({{1, 2}, {0}}, 3);
  const std::vector<Rational> row{Rational(1, 4), Rational(1, 2), Rational(1, 4)};
  CHECK(class_sums(row, w) == std::vector<Rational>{Rational(3, 4), Rational(1, 4)});
  CHECK(contour_sums(row, w) == std::vector<Rational>{Rational(3, 4), Rational(1)});
}

TEST_CASE("stochastic and downward-lexicographic dominance") {
  const WeakOrder w = WeakOrder::strict({0, 1, 2});
  const std::vector<Rational> x{Rational(1, 2), Rational(1, 2), Rational(0)};
  const std::vector<Rational> y{Rational(1, 2), Rational(0), Rational(1, 2)};
  const std::vector<Rational> z{Rational(0), Rational(1), Rational(0)};
  CHECK(sd_dominates(x, y, w) == SdResult::Strict);
  CHECK(sd_dominates(y, x, w) == SdResult::Incomparable);
  CHECK(sd_dominates(x, x, w) == SdResult::Weak);
  CHECK(sd_dominates(z, y, w) == SdResult::Incomparable);
  CHECK(dl_dominates(y, z, w) == DlResult::Strict);
  CHECK(dl_dominates(x, x, w) == DlResult::Equivalent);
  CHECK(dl_dominates(z, x, w) == DlResult::NotDominating);
}

TEST_CASE("sd dominance implies dl dominance") {
  testsupport::Rng rng(3);
  for (int iter = 0; iter < 2000; ++iter) {
    const WeakOrder w = testsupport::random_weak_order(4, rng);
    const auto p = testsupport::random_complete_point(4, 4, 3, rng);
    const auto q = testsupport::random_complete_point(4, 4, 3, rng);
    const auto sd = sd_dominates(p.row(0), q.row(0), w);
    const auto dl = dl_dominates(p.row(0), q.row(0), w);
    if (sd == SdResult::Strict) REQUIRE(dl == DlResult::Strict);
    if (sd == SdResult::Weak) REQUIRE(dl != DlResult::NotDominating);
  }
}

TEST_CASE("signature lists contour sums and sorts them") {
  const Instance inst = make_instance({WeakOrder::strict({0, 1}), WeakOrder({{0, 1}}, 2)});
  const auto sig = signature(matrix({{"1/4", "3/4"}, {"3/4", "1/4"}}), inst);
  REQUIRE(sig.entries.size() == 3);
  CHECK(sig.sorted_values == std::vector<Rational>{Rational(1, 4), Rational(1), Rational(1)});
  CHECK(compare_leximin({Rational(1, 3), Rational(1)}, {Rational(1, 4), Rational(1)}) > 0);
  CHECK(compare_leximin({Rational(1, 3), Rational(1)}, {Rational(1, 3), Rational(1)}) == 0);
}
