#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace vigil {

// Exact rational number.
//
// Values whose numerator and denominator fit in 63 bits are kept inline as a
// reduced int64 pair; anything larger lives in a heap-allocated mpq_class.
// Every operation is exact: an int64 overflow transparently promotes the
// computation to GMP, and GMP results that fit are demoted again.
class Rational {
public:
  Rational() noexcept : num_(0), den_(1) {}
  Rational(int value) noexcept : num_(value), den_(1) {}
  Rational(std::int64_t value);
  Rational(std::int64_t num, std::int64_t den);
  explicit Rational(const mpq_class& value);

  Rational(const Rational& other);
  Rational(Rational&& other) noexcept = default;
  Rational& operator=(const Rational& other);
  Rational& operator=(Rational&& other) noexcept = default;
  ~Rational() = default;

  // Accepts "n", "-n", "n/d". Decimal points, exponents and whitespace inside
  // the literal are rejected.
  static Rational parse(std::string_view text);

  std::string str() const;
  mpq_class to_mpq() const;
  double to_double() const;

  int sign() const noexcept;
  bool is_zero() const noexcept { return !big_ && num_ == 0; }
  bool is_integer() const;
  bool is_small() const noexcept { return !big_; }

  Rational operator-() const;
  Rational& operator+=(const Rational& rhs);
  Rational& operator-=(const Rational& rhs);
  Rational& operator*=(const Rational& rhs);
  Rational& operator/=(const Rational& rhs);

  friend Rational operator+(Rational lhs, const Rational& rhs) { return lhs += rhs; }
  friend Rational operator-(Rational lhs, const Rational& rhs) { return lhs -= rhs; }
  friend Rational operator*(Rational lhs, const Rational& rhs) { return lhs *= rhs; }
  friend Rational operator/(Rational lhs, const Rational& rhs) { return lhs /= rhs; }

  friend bool operator==(const Rational& a, const Rational& b);
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

private:
  void assign_mpq(const mpq_class& value);

  std::int64_t num_;
  std::int64_t den_;
  std::unique_ptr<mpq_class> big_;
};

std::ostream& operator<<(std::ostream& os, const Rational& value);

Rational abs(const Rational& value);
Rational min(const Rational& a, const Rational& b);
Rational max(const Rational& a, const Rational& b);

} // namespace vigil
