#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <vector>

#include <gmpxx.h>

#include "smoothish/context.hpp"
#include "smoothish/interval.hpp"

namespace smoothish {

struct Schedule {
  long bits;
  int subdivLog2;
};

// bits = 30 + 20 n, subdivisions = 2^min(n, cap)
Schedule refineSchedule(int n, int cap = 20);

using RawApprox = std::function<Interval(int n, const CancelToken& cancel)>;

// Refinement-indexed shrinking enclosures of one real.
class CReal {
 public:
  explicit CReal(RawApprox raw);
  // Meet of raw(0..n); memoized, so repeated queries are cheap.
  Interval approx(int n, const CancelToken& cancel = {}) const;

 private:
  struct State {
    std::mutex mu;
    RawApprox raw;
    std::vector<Interval> prefix;
  };
  std::shared_ptr<State> state_;
};

CReal monotonize(RawApprox raw);

struct EvalResult {
  bool converged = false;
  bool timedOut = false;
  Interval value = Interval::bottom();  // tightest enclosure reached
  int steps = 0;                          // refinement indices evaluated
  std::vector<Interval> trace;            // approx(0..steps-1)
};

using StepObserver = std::function<void(int n, const Interval& approx)>;

EvalResult evalToEps(const CReal& x, const mpq_class& eps, int budget, const CancelToken& cancel = {},
                     const StepObserver& observe = nullptr);

}  // namespace smoothish
