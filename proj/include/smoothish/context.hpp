#pragma once

#include <chrono>
#include <optional>

namespace smoothish {

struct Config {
  bool newton = true;
  int budget = 60;             // refinement steps
  double timeoutSeconds = 120;
  int subdivisionCap = 20;     // log2 of the largest subdivision count
  int bnbMaxNodes = 2048;      // branch-and-bound survivors kept per level
  int windowCap = 40;          // cutRoot search window is [-2^w, 2^w], w <= cap
};

class CancelToken {
 public:
  CancelToken() = default;
  explicit CancelToken(double seconds);
  bool expired() const;
  void check() const;  // throws Timeout

 private:
  std::optional<std::chrono::steady_clock::time_point> deadline_;
};

// Knobs for one refinement step, all derived from the refinement index.
struct EvalContext {
  int n = 0;
  long prec = 30;
  int subdiv = 0;  // log2 of the subdivision count
  Config cfg;
  const CancelToken* cancel = nullptr;

  static EvalContext at(int n, const Config& cfg = {}, const CancelToken* cancel = nullptr);
  void check() const;
};

}  // namespace smoothish
