#include "smoothish/creal.hpp"

#include <algorithm>

#include "smoothish/errors.hpp"

namespace smoothish {

CancelToken::CancelToken(double seconds) {
  if (seconds > 0) {
    deadline_ = std::chrono::steady_clock::now() +
                std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(seconds));
  }
}

bool CancelToken::expired() const { return deadline_ && std::chrono::steady_clock::now() >= *deadline_; }

void CancelToken::check() const {
  if (expired()) throw Timeout();
}

EvalContext EvalContext::at(int n, const Config& cfg, const CancelToken* cancel) {
  Schedule s = refineSchedule(n, cfg.subdivisionCap);
  EvalContext c;
  c.n = n;
  c.prec = s.bits;
  c.subdiv = s.subdivLog2;
  c.cfg = cfg;
  c.cancel = cancel;
  return c;
}

void EvalContext::check() const {
  if (cancel != nullptr) cancel->check();
}

Schedule refineSchedule(int n, int cap) { return Schedule{30 + 20L * n, std::min(n, cap)}; }

CReal::CReal(RawApprox raw) : state_(std::make_shared<State>()) { state_->raw = std::move(raw); }

Interval CReal::approx(int n, const CancelToken& cancel) const {
  std::lock_guard<std::mutex> lock(state_->mu);
  auto& prefix = state_->prefix;
  while (static_cast<int>(prefix.size()) <= n) {
    int i = static_cast<int>(prefix.size());
    Interval next = state_->raw(i, cancel);
    prefix.push_back(prefix.empty() ? next : ivMeet(prefix.back(), next));
  }
  return prefix[static_cast<size_t>(n)];
}

CReal monotonize(RawApprox raw) { return CReal(std::move(raw)); }

namespace {

bool narrowEnough(const Interval& iv, const mpq_class& eps) {
  auto w = iv.width();
  return w && w->toMpq() <= eps;
}

}  // namespace

EvalResult evalToEps(const CReal& x, const mpq_class& eps, int budget, const CancelToken& cancel,
                     const StepObserver& observe) {
  EvalResult r;
  for (int n = 0; n <= budget; ++n) {
    if (cancel.expired()) {
      r.timedOut = true;
      break;
    }
    try {
      r.value = x.approx(n, cancel);
    } catch (const Timeout&) {
      r.timedOut = true;
      break;
    }
    r.trace.push_back(r.value);
    if (observe) observe(n, r.value);
    r.steps = n + 1;
    if (narrowEnough(r.value, eps)) {
      r.converged = true;
      break;
    }
  }
  return r;
}

}  // namespace smoothish
