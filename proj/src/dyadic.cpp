#include "smoothish/dyadic.hpp"

#include <cmath>
#include <limits>

namespace smoothish {

Dyadic::Dyadic(long v) : m_(v) { canonicalize(); }

Dyadic::Dyadic(mpz_class m, int64_t e) : m_(std::move(m)), e_(e) { canonicalize(); }

Dyadic Dyadic::fromDouble(double v) {
  int exp = 0;
  double frac = std::frexp(v, &exp);
  // 53-bit mantissa fits exactly after scaling
  auto scaled = static_cast<int64_t>(std::ldexp(frac, 53));
  mpz_class m;
  mpz_set_si(m.get_mpz_t(), scaled);
  return Dyadic(m, static_cast<int64_t>(exp) - 53);
}

Dyadic Dyadic::pow2(int64_t e) { return Dyadic(mpz_class(1), e); }

void Dyadic::canonicalize() {
  if (sgn(m_) == 0) {
    e_ = 0;
    return;
  }
  mp_bitcnt_t tz = mpz_scan1(m_.get_mpz_t(), 0);
  if (tz > 0) {
    mpz_tdiv_q_2exp(m_.get_mpz_t(), m_.get_mpz_t(), tz);
    e_ += static_cast<int64_t>(tz);
  }
}

int64_t Dyadic::bits() const {
  if (isZero()) return 0;
  return static_cast<int64_t>(mpz_sizeinbase(m_.get_mpz_t(), 2));
}

int64_t Dyadic::top() const { return bits() + e_; }

Dyadic Dyadic::operator-() const {
  Dyadic r = *this;
  mpz_neg(r.m_.get_mpz_t(), r.m_.get_mpz_t());
  return r;
}

Dyadic Dyadic::shifted(int64_t k) const {
  Dyadic r = *this;
  if (!r.isZero()) r.e_ += k;
  return r;
}

Dyadic Dyadic::abs() const { return sign() < 0 ? -*this : *this; }

Dyadic operator+(const Dyadic& a, const Dyadic& b) {
  if (a.isZero()) return b;
  if (b.isZero()) return a;
  mpz_class r;
  if (a.e_ <= b.e_) {
    mpz_mul_2exp(r.get_mpz_t(), b.m_.get_mpz_t(), static_cast<mp_bitcnt_t>(b.e_ - a.e_));
    r += a.m_;
    return Dyadic(std::move(r), a.e_);
  }
  mpz_mul_2exp(r.get_mpz_t(), a.m_.get_mpz_t(), static_cast<mp_bitcnt_t>(a.e_ - b.e_));
  r += b.m_;
  return Dyadic(std::move(r), b.e_);
}

Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }

Dyadic operator*(const Dyadic& a, const Dyadic& b) {
  if (a.isZero() || b.isZero()) return Dyadic();
  Dyadic r;
  mpz_mul(r.m_.get_mpz_t(), a.m_.get_mpz_t(), b.m_.get_mpz_t());
  r.e_ = a.e_ + b.e_;
  return r;  // product of odd mantissas is odd
}

int cmp(const Dyadic& a, const Dyadic& b) {
  int sa = a.sign(), sb = b.sign();
  if (sa != sb) return sa < sb ? -1 : 1;
  if (sa == 0) return 0;
  int64_t ta = a.top(), tb = b.top();
  if (ta != tb) return (ta < tb) == (sa > 0) ? -1 : 1;
  // same magnitude bracket: the exponent gap is bounded by the mantissa lengths
  mpz_class x = a.m_, y = b.m_;
  if (a.e_ > b.e_) {
    mpz_mul_2exp(x.get_mpz_t(), x.get_mpz_t(), static_cast<mp_bitcnt_t>(a.e_ - b.e_));
  } else if (b.e_ > a.e_) {
    mpz_mul_2exp(y.get_mpz_t(), y.get_mpz_t(), static_cast<mp_bitcnt_t>(b.e_ - a.e_));
  }
  int c = mpz_cmp(x.get_mpz_t(), y.get_mpz_t());
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

Dyadic Dyadic::rounded(long prec, Round dir) const {
  int64_t nb = bits();
  if (nb <= prec) return *this;
  auto shift = static_cast<mp_bitcnt_t>(nb - prec);
  mpz_class q;
  if (dir == Round::Down) {
    mpz_fdiv_q_2exp(q.get_mpz_t(), m_.get_mpz_t(), shift);
  } else {
    mpz_cdiv_q_2exp(q.get_mpz_t(), m_.get_mpz_t(), shift);
  }
  return Dyadic(std::move(q), e_ + static_cast<int64_t>(shift));
}

Dyadic Dyadic::add(const Dyadic& a, const Dyadic& b, long prec, Round dir) {
  if (a.isZero()) return b.rounded(prec, dir);
  if (b.isZero()) return a.rounded(prec, dir);
  const Dyadic& big = a.top() >= b.top() ? a : b;
  const Dyadic& small = a.top() >= b.top() ? b : a;
  // A far smaller addend only decides the rounding direction; replace it by a
  // sticky bit below every bit of big and below the rounding position.
  int64_t limit = std::min(big.e_, big.top() - prec - 2);
  if (small.top() < limit) {
    Dyadic sticky(mpz_class(small.sign()), limit - 1);
    return (big + sticky).rounded(prec, dir);
  }
  return (a + b).rounded(prec, dir);
}

Dyadic Dyadic::mul(const Dyadic& a, const Dyadic& b, long prec, Round dir) {
  return (a * b).rounded(prec, dir);
}

Dyadic Dyadic::floorTo(int64_t e) const {
  if (isZero() || e_ >= e) return *this;
  mpz_class q;
  mpz_fdiv_q_2exp(q.get_mpz_t(), m_.get_mpz_t(), static_cast<mp_bitcnt_t>(e - e_));
  return Dyadic(std::move(q), e);
}

Dyadic Dyadic::ceilTo(int64_t e) const {
  if (isZero() || e_ >= e) return *this;
  mpz_class q;
  mpz_cdiv_q_2exp(q.get_mpz_t(), m_.get_mpz_t(), static_cast<mp_bitcnt_t>(e - e_));
  return Dyadic(std::move(q), e);
}

mpq_class Dyadic::toMpq() const {
  mpq_class q(m_);
  if (e_ >= 0) {
    mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(e_));
  } else {
    mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(-e_));
  }
  return q;
}

double Dyadic::toDouble() const {
  if (isZero()) return 0.0;
  long exp = 0;
  double d = mpz_get_d_2exp(&exp, m_.get_mpz_t());
  int64_t total = exp + e_;
  if (total > std::numeric_limits<int>::max()) return d > 0 ? HUGE_VAL : -HUGE_VAL;
  if (total < std::numeric_limits<int>::min()) return 0.0;
  return std::ldexp(d, static_cast<int>(total));
}

std::string Dyadic::str() const { return m_.get_str() + "*2^" + std::to_string(e_); }

}  // namespace smoothish
