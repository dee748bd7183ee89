#pragma once

#include <optional>
#include <string>
#include <vector>

#include "smoothish/dyadic.hpp"

namespace smoothish {

// Closed interval with dyadic or infinite endpoints. The whole line is bottom.
class Interval {
 public:
  Interval() = default;  // [0, 0]
  Interval(const Dyadic& lo, const Dyadic& hi);
  explicit Interval(const Dyadic& point) : lo_(point), hi_(point) {}

  static Interval bottom();
  static Interval fromBounds(std::optional<Dyadic> lo, std::optional<Dyadic> hi);

  bool loFinite() const { return !loInf_; }
  bool hiFinite() const { return !hiInf_; }
  bool bounded() const { return !loInf_ && !hiInf_; }
  bool isBottom() const { return loInf_ && hiInf_; }
  const Dyadic& lo() const { return lo_; }  // meaningful only when finite
  const Dyadic& hi() const { return hi_; }

  bool isPoint() const { return bounded() && lo_ == hi_; }
  bool isZero() const { return isPoint() && lo_.isZero(); }
  bool contains(const Dyadic& x) const;
  bool contains(const mpq_class& x) const;
  bool containsZero() const;
  bool subsetOf(const Interval& o) const;
  bool intersects(const Interval& o) const;
  std::optional<Dyadic> width() const;
  Dyadic midpoint() const;  // requires bounded()

  friend bool operator==(const Interval& a, const Interval& b);
  std::string str() const;  // exact endpoints, for diagnostics

 private:
  Dyadic lo_, hi_;
  bool loInf_ = false, hiInf_ = false;
};

using IntervalBox = std::vector<Interval>;

enum class Trichotomy { Less, Greater, Unknown };

Interval ivAdd(const Interval& a, const Interval& b, long prec);
Interval ivSub(const Interval& a, const Interval& b, long prec);
Interval ivNeg(const Interval& a);
Interval ivMul(const Interval& a, const Interval& b, long prec);
Interval ivScale(const Interval& a, const Dyadic& c, long prec);
Interval ivShift(const Interval& a, int64_t k);  // a * 2^k, exact
Interval ivSquare(const Interval& a, long prec);
Interval ivRecip(const Interval& a, long prec);
Interval ivSqrt(const Interval& a, long prec);
Interval ivExp(const Interval& a, long prec);
Interval ivSin(const Interval& a, long prec);
Interval ivCos(const Interval& a, long prec);
Interval ivPi(long prec);
Interval ivRational(const mpq_class& q, long prec);

Interval ivMax(const Interval& a, const Interval& b);
Interval ivMin(const Interval& a, const Interval& b);
Interval ivHull(const Interval& a, const Interval& b);
Interval ivMeet(const Interval& a, const Interval& b);
Trichotomy ivCompare(const Interval& a, const Interval& b);

// Decimal rendering with `digits` fractional digits, rounded outward.
std::string formatDecimal(const Interval& a, int digits);

}  // namespace smoothish
