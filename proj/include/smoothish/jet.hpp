#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "smoothish/interval.hpp"

namespace smoothish {

using Coeffs = std::vector<Interval>;
using CoordJet = std::shared_ptr<const Coeffs>;

// A box of hyper-dual numbers: k nilpotent generators e_0..e_{k-1} with
// e_i^2 = 0, and per coordinate 2^k interval coefficients indexed by the
// generator subset (bitmask). Coefficient 0 is the base point; the full-mask
// coefficient of f(x + v_1 e_0 + ... + v_k e_{k-1}) is f^(k)(x; v_1..v_k).
class Jet {
 public:
  explicit Jet(int order = 0) : k_(order) {}

  int order() const { return k_; }
  uint32_t width() const { return 1u << k_; }
  size_t dims() const { return coords_.size(); }

  const Coeffs& coord(size_t i) const { return *coords_[i]; }
  const CoordJet& shared(size_t i) const { return coords_[i]; }
  const Interval& at(size_t i, uint32_t mask) const { return (*coords_[i])[mask]; }

  void push(CoordJet c) { coords_.push_back(std::move(c)); }
  void push(Coeffs c) { coords_.push_back(std::make_shared<const Coeffs>(std::move(c))); }
  void pushConstant(const Interval& v);
  void append(const Jet& other, size_t from, size_t count);

  Jet prefix(size_t n) const { return slice(0, n); }
  Jet slice(size_t from, size_t count) const;
  IntervalBox base() const;

  // Coefficients without / with the top generator, as jets of order k-1.
  Jet lowerHalf() const;
  Jet upperHalf() const;

  static Jet point(const IntervalBox& box);
  static Jet constant(const IntervalBox& box, int order);

 private:
  int k_;
  std::vector<CoordJet> coords_;
};

Coeffs zeroCoeffs(int order);
Coeffs bottomCoeffs(int order);

// Set partitions of each generator subset, for Faa di Bruno expansion:
// table[mask] lists partitions, each a list of block masks.
using PartitionTable = std::vector<std::vector<std::vector<uint32_t>>>;
const PartitionTable& partitions(int order);

}  // namespace smoothish
