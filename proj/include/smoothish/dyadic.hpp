#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace smoothish {

enum class Round { Down, Up };

// Exact binary rational m * 2^e, kept canonical (m odd, or m == 0 with e == 0).
class Dyadic {
 public:
  Dyadic() = default;
  Dyadic(long v);  // NOLINT: implicit from integers is convenient in tables
  Dyadic(mpz_class m, int64_t e);

  static Dyadic fromDouble(double v);
  static Dyadic pow2(int64_t e);

  const mpz_class& mantissa() const { return m_; }
  int64_t exponent() const { return e_; }
  int sign() const { return sgn(m_); }
  bool isZero() const { return sgn(m_) == 0; }
  // |x| < 2^top() for nonzero x; bitlen(m) + e
  int64_t top() const;
  // mantissa length in bits
  int64_t bits() const;

  Dyadic operator-() const;
  Dyadic shifted(int64_t k) const;  // x * 2^k, exact
  Dyadic abs() const;

  friend Dyadic operator+(const Dyadic& a, const Dyadic& b);
  friend Dyadic operator-(const Dyadic& a, const Dyadic& b);
  friend Dyadic operator*(const Dyadic& a, const Dyadic& b);

  friend int cmp(const Dyadic& a, const Dyadic& b);
  friend bool operator==(const Dyadic& a, const Dyadic& b) { return a.e_ == b.e_ && a.m_ == b.m_; }
  friend bool operator!=(const Dyadic& a, const Dyadic& b) { return !(a == b); }
  friend bool operator<(const Dyadic& a, const Dyadic& b) { return cmp(a, b) < 0; }
  friend bool operator<=(const Dyadic& a, const Dyadic& b) { return cmp(a, b) <= 0; }
  friend bool operator>(const Dyadic& a, const Dyadic& b) { return cmp(a, b) > 0; }
  friend bool operator>=(const Dyadic& a, const Dyadic& b) { return cmp(a, b) >= 0; }

  // Round to at most prec mantissa bits in the given direction.
  Dyadic rounded(long prec, Round dir) const;
  static Dyadic add(const Dyadic& a, const Dyadic& b, long prec, Round dir);
  static Dyadic mul(const Dyadic& a, const Dyadic& b, long prec, Round dir);

  // floor / ceil of x to a multiple of 2^e
  Dyadic floorTo(int64_t e) const;
  Dyadic ceilTo(int64_t e) const;

  mpq_class toMpq() const;
  double toDouble() const;
  std::string str() const;  // "m*2^e", exact

 private:
  void canonicalize();

  mpz_class m_;
  int64_t e_ = 0;
};

}  // namespace smoothish
