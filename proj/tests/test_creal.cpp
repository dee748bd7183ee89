#include <chrono>
#include <thread>

#include "doctest.h"
#include "smoothish/creal.hpp"
#include "smoothish/errors.hpp"

using namespace smoothish;

namespace {

// x^2 for x = sqrt 2, straight from the interval kernels
RawApprox sqrt2Squared() {
  return [](int n, const CancelToken&) {
    long prec = refineSchedule(n).bits;
    Interval s = ivSqrt(Interval(Dyadic(2)), prec);
    return ivMul(s, s, prec);
  };
}

}  // namespace

TEST_CASE("refinement schedule") {
  CHECK(refineSchedule(0).bits == 30);
  CHECK(refineSchedule(3).bits == 90);
  CHECK(refineSchedule(5).subdivLog2 == 5);
  CHECK(refineSchedule(50).subdivLog2 == 20);
  CHECK(refineSchedule(50, 8).subdivLog2 == 8);
}

TEST_CASE("approximations shrink monotonically") {
  // a raw sequence that wobbles: alternately wide and narrow around 1/3
  CReal x([](int n, const CancelToken&) {
    long prec = n % 2 == 0 ? 8 + n : 40 + n;
    return ivRational(mpq_class(1, 3), prec);
  });
  Interval prev = Interval::bottom();
  for (int n = 0; n < 20; ++n) {
    Interval a = x.approx(n);
    CHECK(a.subsetOf(prev));
    CHECK(a.contains(mpq_class(1, 3)));
    prev = a;
  }
}

TEST_CASE("(sqrt 2)^2 refines around 2") {
  CReal x(sqrt2Squared());
  EvalResult r = evalToEps(x, mpq_class("1/1000000000000"), 60);
  CHECK(r.converged);
  for (const auto& iv : r.trace) CHECK(iv.contains(Dyadic(2)));
  CHECK(r.steps == static_cast<int>(r.trace.size()));
}

TEST_CASE("nonconvergence keeps the tightest enclosure") {
  CReal x([](int, const CancelToken&) { return Interval(Dyadic(0), Dyadic(1)); });
  EvalResult r = evalToEps(x, mpq_class(1, 10), 12);
  CHECK_FALSE(r.converged);
  CHECK_FALSE(r.timedOut);
  CHECK(r.steps == 13);
  CHECK(r.value == Interval(Dyadic(0), Dyadic(1)));
  CHECK(evalToEps(x, mpq_class(2), 12).converged);
}

TEST_CASE("wall-clock limit") {
  CReal x([](int, const CancelToken& c) {
    for (;;) {
      c.check();
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    return Interval();
  });
  CancelToken cancel(0.05);
  EvalResult r = evalToEps(x, mpq_class(1, 10), 60, cancel);
  CHECK(r.timedOut);
  CHECK_FALSE(r.converged);
  CHECK(r.value.isBottom());
}

TEST_CASE("evaluation context follows the schedule") {
  Config cfg;
  cfg.subdivisionCap = 6;
  EvalContext c = EvalContext::at(9, cfg);
  CHECK(c.prec == 210);
  CHECK(c.subdiv == 6);
  CHECK(c.n == 9);
}
