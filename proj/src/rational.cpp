#include "vigil/rational.hpp"

#include <climits>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace vigil {
namespace {

constexpr std::int64_t kMin = INT64_MIN;

bool mpz_fits_small(const mpz_class& z) {
  return mpz_fits_slong_p(z.get_mpz_t()) && z.get_si() != kMin;
}

std::uint64_t uabs(std::int64_t v) {
  return v < 0 ? static_cast<std::uint64_t>(-v) : static_cast<std::uint64_t>(v);
}

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(std::gcd(uabs(a), uabs(b)));
}

bool valid_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

} // namespace

Rational::Rational(std::int64_t value) : num_(value), den_(1) {
  if (value == kMin) assign_mpq(mpq_class(mpz_class(std::to_string(value))));
}

Rational::Rational(std::int64_t num, std::int64_t den) : num_(0), den_(1) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  if (num == kMin || den == kMin) {
    mpq_class q(mpz_class(std::to_string(num)), mpz_class(std::to_string(den)));
    q.canonicalize();
    assign_mpq(q);
    return;
  }
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = gcd64(num, den);
  num_ = num / g;
  den_ = den / g;
}

Rational::Rational(const mpq_class& value) : num_(0), den_(1) {
  mpq_class q(value);
  q.canonicalize();
  assign_mpq(q);
}

Rational::Rational(const Rational& other)
    : num_(other.num_), den_(other.den_),
      big_(other.big_ ? std::make_unique<mpq_class>(*other.big_) : nullptr) {}

Rational& Rational::operator=(const Rational& other) {
  if (this == &other) return *this;
  num_ = other.num_;
  den_ = other.den_;
  if (other.big_) {
    big_ = std::make_unique<mpq_class>(*other.big_);
  } else {
    big_.reset();
  }
  return *this;
}

void Rational::assign_mpq(const mpq_class& value) {
  if (mpz_fits_small(value.get_num()) && mpz_fits_small(value.get_den())) {
    num_ = value.get_num().get_si();
    den_ = value.get_den().get_si();
    big_.reset();
  } else {
    num_ = 0;
    den_ = 1;
    big_ = std::make_unique<mpq_class>(value);
  }
}

mpq_class Rational::to_mpq() const {
  if (big_) return *big_;
  mpq_class q;
  mpz_set_si(mpq_numref(q.get_mpq_t()), num_);
  mpz_set_si(mpq_denref(q.get_mpq_t()), den_);
  return q;
}

Rational Rational::parse(std::string_view text) {
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  const auto slash = body.find('/');
  std::string_view num_part = body.substr(0, slash);
  std::string_view den_part = slash == std::string_view::npos ? std::string_view("1") : body.substr(slash + 1);
  if (!valid_digits(num_part) || !valid_digits(den_part)) {
    throw std::invalid_argument("not an exact rational literal: '" + std::string(text) + "'");
  }
  mpz_class n{std::string(num_part)};
  mpz_class d{std::string(den_part)};
  if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  if (negative) n = -n;
  mpq_class q(n, d);
  q.canonicalize();
  return Rational(q);
}

std::string Rational::str() const {
  if (big_) return big_->get_str();
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

double Rational::to_double() const {
  if (big_) return big_->get_d();
  return static_cast<double>(num_) / static_cast<double>(den_);
}

int Rational::sign() const noexcept {
  if (big_) return sgn(*big_);
  return (num_ > 0) - (num_ < 0);
}

bool Rational::is_integer() const {
  if (big_) return big_->get_den() == 1;
  return den_ == 1;
}

Rational Rational::operator-() const {
  if (big_) return Rational(mpq_class(-*big_));
  Rational r;
  r.num_ = -num_;
  r.den_ = den_;
  return r;
}

Rational& Rational::operator+=(const Rational& rhs) {
  if (!big_ && !rhs.big_) {
    if (den_ == 1 && rhs.den_ == 1) {
      std::int64_t s;
      if (!__builtin_add_overflow(num_, rhs.num_, &s) && s != kMin) {
        num_ = s;
        return *this;
      }
    } else {
      const std::int64_t g = gcd64(den_, rhs.den_);
      const std::int64_t ad = den_ / g;
      const std::int64_t bd = rhs.den_ / g;
      std::int64_t t1, t2, s;
      if (!__builtin_mul_overflow(num_, bd, &t1) && !__builtin_mul_overflow(rhs.num_, ad, &t2) &&
          !__builtin_add_overflow(t1, t2, &s) && s != kMin) {
        if (s == 0) {
          num_ = 0;
          den_ = 1;
          return *this;
        }
        const std::int64_t g2 = gcd64(s, g);
        std::int64_t d;
        if (!__builtin_mul_overflow(ad, rhs.den_ / g2, &d)) {
          num_ = s / g2;
          den_ = d;
          return *this;
        }
      }
    }
  }
  assign_mpq(to_mpq() + rhs.to_mpq());
  return *this;
}

Rational& Rational::operator-=(const Rational& rhs) {
  if (!big_ && !rhs.big_) {
    // Negation is safe: small values never hold INT64_MIN.
    Rational neg;
    neg.num_ = -rhs.num_;
    neg.den_ = rhs.den_;
    return *this += neg;
  }
  assign_mpq(to_mpq() - rhs.to_mpq());
  return *this;
}

Rational& Rational::operator*=(const Rational& rhs) {
  if (!big_ && !rhs.big_) {
    if (num_ == 0) return *this;
    if (rhs.num_ == 0) {
      num_ = 0;
      den_ = 1;
      return *this;
    }
    const std::int64_t g1 = gcd64(num_, rhs.den_);
    const std::int64_t g2 = gcd64(rhs.num_, den_);
    std::int64_t n, d;
    if (!__builtin_mul_overflow(num_ / g1, rhs.num_ / g2, &n) && n != kMin &&
        !__builtin_mul_overflow(den_ / g2, rhs.den_ / g1, &d)) {
      num_ = n;
      den_ = d;
      return *this;
    }
  }
  assign_mpq(to_mpq() * rhs.to_mpq());
  return *this;
}

Rational& Rational::operator/=(const Rational& rhs) {
  if (rhs.is_zero()) throw std::domain_error("division by zero");
  if (!big_ && !rhs.big_) {
    Rational inv;
    inv.num_ = rhs.num_ < 0 ? -rhs.den_ : rhs.den_;
    inv.den_ = rhs.num_ < 0 ? -rhs.num_ : rhs.num_;
    return *this *= inv;
  }
  assign_mpq(to_mpq() / rhs.to_mpq());
  return *this;
}

bool operator==(const Rational& a, const Rational& b) {
  if (!a.big_ && !b.big_) return a.num_ == b.num_ && a.den_ == b.den_;
  if (a.big_ && b.big_) return *a.big_ == *b.big_;
  // Canonical forms never mix: a big value cannot equal a small one.
  return false;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  if (!a.big_ && !b.big_) {
    if (a.den_ == b.den_) return a.num_ <=> b.num_;
    const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
    const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
    return lhs <=> rhs;
  }
  const int c = cmp(a.to_mpq(), b.to_mpq());
  return c <=> 0;
}

std::ostream& operator<<(std::ostream& os, const Rational& value) { return os << value.str(); }

Rational abs(const Rational& value) { return value.sign() < 0 ? -value : value; }
Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

} // namespace vigil
