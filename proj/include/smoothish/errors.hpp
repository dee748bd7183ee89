#pragma once

#include <stdexcept>
#include <string>

namespace smoothish {

// Disjoint refinements: some operation returned an unsound enclosure.
class SoundnessViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Raised from inside long refinement steps when the wall-clock budget is spent.
class Timeout : public std::runtime_error {
 public:
  Timeout() : std::runtime_error("wall-clock limit reached") {}
};

}  // namespace smoothish
