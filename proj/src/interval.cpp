#include "smoothish/interval.hpp"

#include <mpfr.h>

#include <algorithm>
#include <array>
#include <stdexcept>

#include "smoothish/errors.hpp"

namespace smoothish {

namespace {

// Extended endpoint: inf is -1 / +1 for -inf / +inf, 0 for a finite value.
struct Ext {
  int inf = 0;
  Dyadic v;
};

Ext loOf(const Interval& a) { return a.loFinite() ? Ext{0, a.lo()} : Ext{-1, {}}; }
Ext hiOf(const Interval& a) { return a.hiFinite() ? Ext{0, a.hi()} : Ext{1, {}}; }

int extSign(const Ext& x) { return x.inf != 0 ? x.inf : x.v.sign(); }

Interval fromExt(const Ext& lo, const Ext& hi) {
  std::optional<Dyadic> l, h;
  if (lo.inf == 0) l = lo.v;
  if (hi.inf == 0) h = hi.v;
  return Interval::fromBounds(l, h);
}

class Mpfr {
 public:
  explicit Mpfr(long prec) { mpfr_init2(x_, std::max<long>(prec, MPFR_PREC_MIN)); }
  explicit Mpfr(const Dyadic& d) {
    mpfr_init2(x_, std::max<long>(d.bits(), MPFR_PREC_MIN));
    mpfr_set_z_2exp(x_, d.mantissa().get_mpz_t(), d.exponent(), MPFR_RNDN);
  }
  Mpfr(const Mpfr&) = delete;
  Mpfr& operator=(const Mpfr&) = delete;
  ~Mpfr() { mpfr_clear(x_); }
  mpfr_ptr get() { return x_; }
  mpfr_srcptr get() const { return x_; }

 private:
  mpfr_t x_;
};

struct MpfrRange {
  MpfrRange() {
    mpfr_set_emax(mpfr_get_emax_max());
    mpfr_set_emin(mpfr_get_emin_min());
  }
};
const MpfrRange kRange;

Dyadic fromMpfr(mpfr_srcptr x) {
  if (mpfr_zero_p(x)) return Dyadic();
  mpz_class z;
  mpfr_exp_t e = mpfr_get_z_2exp(z.get_mpz_t(), x);
  return Dyadic(std::move(z), static_cast<int64_t>(e));
}

using UnaryFn = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t);

// Directed-rounded f(x); one extra ulp outward when MPFR reports inexactness.
// Returns an infinite Ext on overflow.
Ext kernel(UnaryFn f, const Dyadic& x, long prec, Round dir) {
  Mpfr in(x);
  Mpfr out(prec);
  int ternary = f(out.get(), in.get(), dir == Round::Down ? MPFR_RNDD : MPFR_RNDU);
  if (mpfr_inf_p(out.get())) return Ext{mpfr_sgn(out.get()) > 0 ? 1 : -1, {}};
  Dyadic r = fromMpfr(out.get());
  if (ternary != 0 && !mpfr_zero_p(out.get())) {
    Dyadic ulp = Dyadic::pow2(static_cast<int64_t>(mpfr_get_exp(out.get())) - prec);
    r = dir == Round::Down ? r - ulp : r + ulp;
  }
  return Ext{0, r.rounded(prec, dir)};
}

Dyadic recipBound(const Dyadic& x, long prec, Round dir) {
  Mpfr in(x);
  Mpfr out(prec);
  mpfr_ui_div(out.get(), 1, in.get(), dir == Round::Down ? MPFR_RNDD : MPFR_RNDU);
  return fromMpfr(out.get());
}

// Product of extended endpoints; the caller has excluded 0 * inf.
Ext extMul(const Ext& a, const Ext& b, long prec, Round dir) {
  if (a.inf != 0 || b.inf != 0) {
    int s = extSign(a) * extSign(b);
    if (s == 0) return Ext{0, Dyadic()};
    return Ext{s, {}};
  }
  return Ext{0, Dyadic::mul(a.v, b.v, prec, dir)};
}

bool extLess(const Ext& a, const Ext& b) {
  if (a.inf != b.inf) return a.inf < b.inf;
  if (a.inf != 0) return false;
  return a.v < b.v;
}

Ext extAdd(const Ext& a, const Ext& b, long prec, Round dir) {
  if (a.inf != 0) return a;
  if (b.inf != 0) return b;
  return Ext{0, Dyadic::add(a.v, b.v, prec, dir)};
}

}  // namespace

Interval::Interval(const Dyadic& lo, const Dyadic& hi) : lo_(lo), hi_(hi) {
  if (hi < lo) throw std::invalid_argument("interval with lo > hi: " + lo.str() + " " + hi.str());
}

Interval Interval::bottom() {
  Interval r;
  r.loInf_ = r.hiInf_ = true;
  return r;
}

Interval Interval::fromBounds(std::optional<Dyadic> lo, std::optional<Dyadic> hi) {
  Interval r;
  r.loInf_ = !lo.has_value();
  r.hiInf_ = !hi.has_value();
  if (lo) r.lo_ = *lo;
  if (hi) r.hi_ = *hi;
  if (lo && hi && *hi < *lo) throw std::invalid_argument("interval with lo > hi");
  return r;
}

bool Interval::contains(const Dyadic& x) const {
  return (loInf_ || lo_ <= x) && (hiInf_ || x <= hi_);
}

bool Interval::contains(const mpq_class& x) const {
  return (loInf_ || lo_.toMpq() <= x) && (hiInf_ || x <= hi_.toMpq());
}

bool Interval::containsZero() const { return contains(Dyadic()); }

bool Interval::subsetOf(const Interval& o) const {
  bool loOk = o.loInf_ || (!loInf_ && o.lo_ <= lo_);
  bool hiOk = o.hiInf_ || (!hiInf_ && hi_ <= o.hi_);
  return loOk && hiOk;
}

bool Interval::intersects(const Interval& o) const {
  bool a = loInf_ || o.hiInf_ || lo_ <= o.hi_;
  bool b = o.loInf_ || hiInf_ || o.lo_ <= hi_;
  return a && b;
}

std::optional<Dyadic> Interval::width() const {
  if (!bounded()) return std::nullopt;
  return hi_ - lo_;
}

Dyadic Interval::midpoint() const { return (lo_ + hi_).shifted(-1); }

bool operator==(const Interval& a, const Interval& b) {
  if (a.loInf_ != b.loInf_ || a.hiInf_ != b.hiInf_) return false;
  return (a.loInf_ || a.lo_ == b.lo_) && (a.hiInf_ || a.hi_ == b.hi_);
}

std::string Interval::str() const {
  return "[" + (loInf_ ? std::string("-inf") : lo_.str()) + ", " +
         (hiInf_ ? std::string("inf") : hi_.str()) + "]";
}

Interval ivAdd(const Interval& a, const Interval& b, long prec) {
  if (a.isZero()) return b.bounded() ? Interval(b.lo().rounded(prec, Round::Down), b.hi().rounded(prec, Round::Up)) : b;
  if (b.isZero()) return ivAdd(b, a, prec);
  return fromExt(extAdd(loOf(a), loOf(b), prec, Round::Down), extAdd(hiOf(a), hiOf(b), prec, Round::Up));
}

Interval ivNeg(const Interval& a) {
  std::optional<Dyadic> lo, hi;
  if (a.hiFinite()) lo = -a.hi();
  if (a.loFinite()) hi = -a.lo();
  return Interval::fromBounds(lo, hi);
}

Interval ivSub(const Interval& a, const Interval& b, long prec) { return ivAdd(a, ivNeg(b), prec); }

Interval ivMul(const Interval& a, const Interval& b, long prec) {
  if (a.isZero() || b.isZero()) {
    // 0 * unbounded is bottom under containment semantics
    return a.bounded() && b.bounded() ? Interval() : Interval::bottom();
  }
  std::array<Ext, 2> ea{loOf(a), hiOf(a)}, eb{loOf(b), hiOf(b)};
  for (const auto& x : ea) {
    for (const auto& y : eb) {
      if ((x.inf != 0 && extSign(y) == 0) || (y.inf != 0 && extSign(x) == 0)) return Interval::bottom();
    }
  }
  if (a.bounded() && b.bounded()) {
    const Dyadic &al = a.lo(), &ah = a.hi(), &bl = b.lo(), &bh = b.hi();
    if (al.sign() >= 0 && bl.sign() >= 0) {
      return Interval(Dyadic::mul(al, bl, prec, Round::Down), Dyadic::mul(ah, bh, prec, Round::Up));
    }
    if (ah.sign() <= 0 && bh.sign() <= 0) {
      return Interval(Dyadic::mul(ah, bh, prec, Round::Down), Dyadic::mul(al, bl, prec, Round::Up));
    }
    if (al.sign() >= 0 && bh.sign() <= 0) {
      return Interval(Dyadic::mul(ah, bl, prec, Round::Down), Dyadic::mul(al, bh, prec, Round::Up));
    }
    if (ah.sign() <= 0 && bl.sign() >= 0) {
      return Interval(Dyadic::mul(al, bh, prec, Round::Down), Dyadic::mul(ah, bl, prec, Round::Up));
    }
  }
  Ext lo{1, {}}, hi{-1, {}};
  for (const auto& x : ea) {
    for (const auto& y : eb) {
      Ext d = extMul(x, y, prec, Round::Down);
      Ext u = extMul(x, y, prec, Round::Up);
      if (extLess(d, lo)) lo = d;
      if (extLess(hi, u)) hi = u;
    }
  }
  return fromExt(lo, hi);
}

Interval ivScale(const Interval& a, const Dyadic& c, long prec) { return ivMul(a, Interval(c), prec); }

Interval ivShift(const Interval& a, int64_t k) {
  std::optional<Dyadic> lo, hi;
  if (a.loFinite()) lo = a.lo().shifted(k);
  if (a.hiFinite()) hi = a.hi().shifted(k);
  return Interval::fromBounds(lo, hi);
}

Interval ivSquare(const Interval& a, long prec) {
  if (a.loFinite() && a.lo().sign() >= 0) {
    std::optional<Dyadic> hi;
    if (a.hiFinite()) hi = Dyadic::mul(a.hi(), a.hi(), prec, Round::Up);
    return Interval::fromBounds(Dyadic::mul(a.lo(), a.lo(), prec, Round::Down), hi);
  }
  if (a.hiFinite() && a.hi().sign() <= 0) {
    std::optional<Dyadic> hi;
    if (a.loFinite()) hi = Dyadic::mul(a.lo(), a.lo(), prec, Round::Up);
    return Interval::fromBounds(Dyadic::mul(a.hi(), a.hi(), prec, Round::Down), hi);
  }
  if (!a.bounded()) return Interval::fromBounds(Dyadic(), std::nullopt);
  Dyadic m = std::max(a.lo().abs(), a.hi().abs());
  return Interval(Dyadic(), Dyadic::mul(m, m, prec, Round::Up));
}

Interval ivRecip(const Interval& a, long prec) {
  if (a.containsZero()) return Interval::bottom();
  // 1/x is decreasing on each side of 0: image is [1/hi, 1/lo]
  Dyadic lo = a.hiFinite() ? recipBound(a.hi(), prec, Round::Down) : Dyadic();
  Dyadic hi = a.loFinite() ? recipBound(a.lo(), prec, Round::Up) : Dyadic();
  return Interval(lo, hi);
}

Interval ivSqrt(const Interval& a, long prec) {
  if (a.hiFinite() && a.hi().sign() < 0) return Interval::bottom();
  Ext lo{0, Dyadic()};
  if (a.loFinite() && a.lo().sign() > 0) lo = kernel(mpfr_sqrt, a.lo(), prec, Round::Down);
  if (lo.inf == 0 && lo.v.sign() < 0) lo.v = Dyadic();
  Ext hi = a.hiFinite() ? kernel(mpfr_sqrt, a.hi(), prec, Round::Up) : Ext{1, {}};
  return fromExt(lo, hi);
}

Interval ivExp(const Interval& a, long prec) {
  Ext lo{0, Dyadic()};
  if (a.loFinite()) lo = kernel(mpfr_exp, a.lo(), prec, Round::Down);
  if (lo.inf == 0 && lo.v.sign() < 0) lo.v = Dyadic();
  Ext hi = a.hiFinite() ? kernel(mpfr_exp, a.hi(), prec, Round::Up) : Ext{1, {}};
  return fromExt(lo, hi);
}

Interval ivPi(long prec) {
  Mpfr lo(prec), hi(prec);
  mpfr_const_pi(lo.get(), MPFR_RNDD);
  mpfr_const_pi(hi.get(), MPFR_RNDU);
  return Interval(fromMpfr(lo.get()), fromMpfr(hi.get()));
}

namespace {

// Offsets (in units of pi/2) of the maxima and minima of sin / cos within one period.
Interval trig(const Interval& a, long prec, bool isCos) {
  const Interval unit(Dyadic(-1), Dyadic(1));
  if (!a.bounded()) return unit;
  if (a.hi() - a.lo() >= Dyadic(7)) return unit;
  UnaryFn f = isCos ? mpfr_cos : mpfr_sin;
  Ext l1 = kernel(f, a.lo(), prec, Round::Down), l2 = kernel(f, a.hi(), prec, Round::Down);
  Ext h1 = kernel(f, a.lo(), prec, Round::Up), h2 = kernel(f, a.hi(), prec, Round::Up);
  Dyadic lo = std::min(l1.v, l2.v), hi = std::max(h1.v, h2.v);

  Interval pi = ivPi(prec + 32);
  Interval twoPi = ivShift(pi, 1);
  // candidate period indices around the interval
  long work = std::max<long>(64, std::max(a.lo().top(), a.hi().top()) + 64);
  Mpfr x(work), tp(work);
  mpfr_const_pi(tp.get(), MPFR_RNDN);
  mpfr_mul_2ui(tp.get(), tp.get(), 1, MPFR_RNDN);
  Mpfr lo0(a.lo()), hi0(a.hi());
  mpz_class k0, k1;
  mpfr_div(x.get(), lo0.get(), tp.get(), MPFR_RNDN);
  mpfr_get_z(k0.get_mpz_t(), x.get(), MPFR_RNDD);
  mpfr_div(x.get(), hi0.get(), tp.get(), MPFR_RNDN);
  mpfr_get_z(k1.get_mpz_t(), x.get(), MPFR_RNDU);
  k0 -= 1;
  k1 += 1;
  const int maxOff = isCos ? 0 : 1;  // cos peaks at 0, sin at pi/2 (units of pi/2)
  const int minOff = isCos ? 2 : 3;
  for (mpz_class k = k0; k <= k1; ++k) {
    Interval base = ivMul(twoPi, Interval(Dyadic(k, 0)), prec + 32);
    Interval peak = ivAdd(base, ivMul(ivShift(pi, -1), Interval(Dyadic(maxOff)), prec + 32), prec + 32);
    Interval trough = ivAdd(base, ivMul(ivShift(pi, -1), Interval(Dyadic(minOff)), prec + 32), prec + 32);
    if (peak.intersects(a)) hi = Dyadic(1);
    if (trough.intersects(a)) lo = Dyadic(-1);
  }
  lo = std::max(lo, Dyadic(-1));
  hi = std::min(hi, Dyadic(1));
  return Interval(lo, hi);
}

}  // namespace

Interval ivSin(const Interval& a, long prec) { return trig(a, prec, false); }
Interval ivCos(const Interval& a, long prec) { return trig(a, prec, true); }

Interval ivRational(const mpq_class& q, long prec) {
  const mpz_class& num = q.get_num();
  const mpz_class& den = q.get_den();
  if (mpz_popcount(den.get_mpz_t()) == 1) {
    Dyadic d(num, -static_cast<int64_t>(mpz_sizeinbase(den.get_mpz_t(), 2) - 1));
    if (d.bits() <= prec) return Interval(d);
    return Interval(d.rounded(prec, Round::Down), d.rounded(prec, Round::Up));
  }
  if (sgn(num) == 0) return Interval();
  auto s = static_cast<int64_t>(prec + 2 + mpz_sizeinbase(den.get_mpz_t(), 2)) -
           static_cast<int64_t>(mpz_sizeinbase(num.get_mpz_t(), 2));
  mpz_class scaled = num;
  if (s >= 0) {
    mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), static_cast<mp_bitcnt_t>(s));
  }
  mpz_class lo, hi;
  if (s >= 0) {
    mpz_fdiv_q(lo.get_mpz_t(), scaled.get_mpz_t(), den.get_mpz_t());
    mpz_cdiv_q(hi.get_mpz_t(), scaled.get_mpz_t(), den.get_mpz_t());
  } else {
    mpz_class d2 = den;
    mpz_mul_2exp(d2.get_mpz_t(), d2.get_mpz_t(), static_cast<mp_bitcnt_t>(-s));
    mpz_fdiv_q(lo.get_mpz_t(), num.get_mpz_t(), d2.get_mpz_t());
    mpz_cdiv_q(hi.get_mpz_t(), num.get_mpz_t(), d2.get_mpz_t());
  }
  return Interval(Dyadic(lo, -s).rounded(prec, Round::Down), Dyadic(hi, -s).rounded(prec, Round::Up));
}

Interval ivMax(const Interval& a, const Interval& b) {
  std::optional<Dyadic> lo, hi;
  if (a.loFinite() || b.loFinite()) {
    if (!a.loFinite()) lo = b.lo();
    else if (!b.loFinite()) lo = a.lo();
    else lo = std::max(a.lo(), b.lo());
  }
  if (a.hiFinite() && b.hiFinite()) hi = std::max(a.hi(), b.hi());
  return Interval::fromBounds(lo, hi);
}

Interval ivMin(const Interval& a, const Interval& b) { return ivNeg(ivMax(ivNeg(a), ivNeg(b))); }

Interval ivHull(const Interval& a, const Interval& b) {
  std::optional<Dyadic> lo, hi;
  if (a.loFinite() && b.loFinite()) lo = std::min(a.lo(), b.lo());
  if (a.hiFinite() && b.hiFinite()) hi = std::max(a.hi(), b.hi());
  return Interval::fromBounds(lo, hi);
}

Interval ivMeet(const Interval& a, const Interval& b) {
  if (!a.intersects(b)) throw SoundnessViolation("meet of disjoint intervals " + a.str() + " and " + b.str());
  std::optional<Dyadic> lo, hi;
  if (a.loFinite() || b.loFinite()) {
    if (!a.loFinite()) lo = b.lo();
    else if (!b.loFinite()) lo = a.lo();
    else lo = std::max(a.lo(), b.lo());
  }
  if (a.hiFinite() || b.hiFinite()) {
    if (!a.hiFinite()) hi = b.hi();
    else if (!b.hiFinite()) hi = a.hi();
    else hi = std::min(a.hi(), b.hi());
  }
  return Interval::fromBounds(lo, hi);
}

Trichotomy ivCompare(const Interval& a, const Interval& b) {
  if (a.hiFinite() && b.loFinite() && a.hi() < b.lo()) return Trichotomy::Less;
  if (a.loFinite() && b.hiFinite() && a.lo() > b.hi()) return Trichotomy::Greater;
  return Trichotomy::Unknown;
}

namespace {

std::string decimal(const mpz_class& scaled, int digits) {
  mpz_class mag = abs(scaled);
  std::string s = mag.get_str();
  if (static_cast<int>(s.size()) <= digits) s.insert(0, static_cast<size_t>(digits) + 1 - s.size(), '0');
  s.insert(s.size() - static_cast<size_t>(digits), ".");
  if (digits == 0) s.pop_back();
  return (sgn(scaled) < 0 ? "-" : "") + s;
}

}  // namespace

std::string formatDecimal(const Interval& a, int digits) {
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  std::string lo = "-inf", hi = "inf";
  if (a.loFinite()) {
    mpq_class q = a.lo().toMpq() * scale;
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    lo = decimal(f, digits);
  }
  if (a.hiFinite()) {
    mpq_class q = a.hi().toMpq() * scale;
    mpz_class c;
    mpz_cdiv_q(c.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    hi = decimal(c, digits);
  }
  return "[" + lo + ", " + hi + "]";
}

}  // namespace smoothish
