#pragma once
// Exact and fixed-point reference computations shared by the test suites.
// None of this goes through MPFR.

#include <gmpxx.h>

#include <random>

#include "smoothish/interval.hpp"

namespace oracle {

using smoothish::Dyadic;
using smoothish::Interval;

inline Dyadic randomDyadic(std::mt19937_64& rng, int mantBits = 40, int minExp = -30, int maxExp = 6) {
  std::uniform_int_distribution<int64_t> m(-(int64_t{1} << mantBits), int64_t{1} << mantBits);
  std::uniform_int_distribution<int> e(minExp, maxExp);
  return Dyadic(mpz_class(static_cast<long>(m(rng))), e(rng));
}

inline Interval randomInterval(std::mt19937_64& rng, int mantBits = 40, int minExp = -30, int maxExp = 6) {
  Dyadic a = randomDyadic(rng, mantBits, minExp, maxExp);
  std::uniform_int_distribution<int> kind(0, 3);
  if (kind(rng) == 0) return Interval(a);
  Dyadic b = randomDyadic(rng, mantBits, minExp, maxExp);
  return a <= b ? Interval(a, b) : Interval(b, a);
}

// A point of a bounded interval: an endpoint or a dyadic interior point.
inline mpq_class randomPoint(std::mt19937_64& rng, const Interval& iv) {
  std::uniform_int_distribution<int> k(0, 16);
  int j = k(rng);
  mpq_class lo = iv.lo().toMpq(), hi = iv.hi().toMpq();
  return lo + (hi - lo) * mpq_class(j, 16);
}

inline bool containsQ(const Interval& iv, const mpq_class& q) { return iv.contains(q); }

// Fixed-point arithmetic with scale 2^kBits and a rigorous error count.
constexpr long kBits = 320;

struct Enclosure {
  mpq_class lo, hi;
};

inline mpz_class toFixed(const mpq_class& x) {
  mpz_class n = x.get_num();
  mpz_mul_2exp(n.get_mpz_t(), n.get_mpz_t(), kBits);
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), n.get_mpz_t(), x.get_den_mpz_t());
  return q;
}

inline mpq_class fromFixed(const mpz_class& v) {
  mpz_class one(1);
  mpz_mul_2exp(one.get_mpz_t(), one.get_mpz_t(), kBits);
  mpq_class r(v, one);
  r.canonicalize();
  return r;
}

// sum_k sign(k) x^k / k! over the terms selected by `start` and `step`
// (exp: 0,1; sin: 1,2 alternating; cos: 0,2 alternating), for |x| <= 8.
inline Enclosure taylor(const mpq_class& x, int start, int step, bool alternate) {
  mpz_class xf = toFixed(x);  // exact when x has at most kBits fractional bits
  mpz_class term;
  mpz_mul_2exp(term.get_mpz_t(), mpz_class(1).get_mpz_t(), kBits);  // x^0/0! = 1
  mpz_class sum = 0;
  long errUlps = 0;
  long termErr = 0;  // ulps of error in `term`
  mpz_class ceilAbs;
  mpz_cdiv_q(ceilAbs.get_mpz_t(), mpz_class(abs(x.get_num())).get_mpz_t(), x.get_den_mpz_t());
  const long ax = ceilAbs.get_si();
  const int kTerms = 140;
  for (int k = 0; k <= kTerms; ++k) {
    if (k >= start && (k - start) % step == 0) {
      bool negative = alternate && ((k - start) / step) % 2 == 1;
      sum += negative ? mpz_class(-term) : term;
      errUlps += termErr;
    }
    // term <- term * x / (k + 1), truncated; each step adds < 1 ulp of error
    mpz_class t = term * xf;
    mpz_fdiv_q_2exp(t.get_mpz_t(), t.get_mpz_t(), kBits);
    mpz_fdiv_q_ui(t.get_mpz_t(), t.get_mpz_t(), static_cast<unsigned long>(k + 1));
    term = t;
    termErr = (termErr * ax + k) / (k + 1) + 2;
  }
  // remainder: |x|^(n+1)/(n+1)! with |x| <= 8 and n = 140 is far below one ulp
  mpq_class s = fromFixed(sum);
  mpq_class err = fromFixed(mpz_class(errUlps + 1));
  return {s - err, s + err};
}

inline Enclosure expQ(const mpq_class& x) { return taylor(x, 0, 1, false); }
inline Enclosure sinQ(const mpq_class& x) { return taylor(x, 1, 2, true); }
inline Enclosure cosQ(const mpq_class& x) { return taylor(x, 0, 2, true); }

inline bool encloses(const Interval& iv, const Enclosure& e) { return iv.contains(e.lo) && iv.contains(e.hi); }

}  // namespace oracle
