#include <doctest.h>

#include <random>

#include "vigil/rational.hpp"

using vigil::Rational;

TEST_CASE("parse and print") {
  CHECK(Rational::parse("3/6").str() == "1/2");
  CHECK(Rational::parse("-4/8").str() == "-1/2");
  CHECK_THROWS(Rational::parse("4/-8"));
  CHECK(Rational::parse("7").str() == "7");
  CHECK(Rational::parse("0/5").str() == "0");
  CHECK(Rational::parse("123456789012345678901234567890/3").str() == "41152263004115226300411522630");
  CHECK_THROWS(Rational::parse("0.25"));
  CHECK_THROWS(Rational::parse("1e3"));
  CHECK_THROWS(Rational::parse("1/0"));
  CHECK_THROWS(Rational::parse(""));
  CHECK_THROWS(Rational::parse("1 /2"));
  CHECK_THROWS(Rational::parse("abc"));
}

TEST_CASE("ordering and helpers") {
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(-1, 2) < Rational(0));
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(vigil::abs(Rational(-3, 4)) == Rational(3, 4));
  CHECK(vigil::min(Rational(1, 5), Rational(1, 4)) == Rational(1, 5));
  CHECK(vigil::max(Rational(1, 5), Rational(1, 4)) == Rational(1, 4));
  CHECK(Rational(6, 3).is_integer());
  CHECK_FALSE(Rational(7, 3).is_integer());
  CHECK(Rational(-7, 3).sign() == -1);
}

TEST_CASE("overflow promotes to big values and demotes back") {
  const Rational big(std::int64_t{1} << 62);
  const Rational sq = big * big;
  CHECK_FALSE(sq.is_small());
  CHECK(sq.to_mpq() == mpq_class(mpz_class(1) << 124));
  const Rational back = sq / big;
  CHECK(back.is_small());
  CHECK(back == big);
  const Rational tiny(1, std::int64_t{1} << 62);
  CHECK((tiny * tiny * big * big) == Rational(1));
}

TEST_CASE("arithmetic agrees with GMP on random operands") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> op(0, 3), scale(0, 3);
  auto draw = [&] {
    // Mix small values with values near the int64 range.
    const int s = scale(rng);
    std::uniform_int_distribution<std::int64_t> num(s == 0 ? -50 : -(std::int64_t{1} << 40) * s,
                                                    s == 0 ? 50 : (std::int64_t{1} << 40) * s);
    std::uniform_int_distribution<std::int64_t> den(1, s == 0 ? 60 : (std::int64_t{1} << 31));
    return Rational(num(rng), den(rng));
  };
  for (int iter = 0; iter < 20000; ++iter) {
    Rational a = draw(), b = draw();
    mpq_class x = a.to_mpq(), y = b.to_mpq();
    Rational r;
    mpq_class q;
    switch (op(rng)) {
    case 0:
      r = a + b;
      q = x + y;
      break;
    case 1:
      r = a - b;
      q = x - y;
      break;
    case 2:
      r = a * b * a;
      q = x * y * x;
      break;
    default:
      if (b.is_zero()) continue;
      r = a / b;
      q = x / y;
      break;
    }
    REQUIRE(r.to_mpq() == q);
    REQUIRE((a < b) == (x < y));
    REQUIRE((a == b) == (x == y));
    REQUIRE(Rational::parse(r.str()) == r);
  }
}
