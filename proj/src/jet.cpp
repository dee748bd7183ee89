#include "smoothish/jet.hpp"

#include <map>
#include <mutex>

namespace smoothish {

void Jet::pushConstant(const Interval& v) {
  Coeffs c(width());
  c[0] = v;
  push(std::move(c));
}

void Jet::append(const Jet& other, size_t from, size_t count) {
  for (size_t i = 0; i < count; ++i) coords_.push_back(other.coords_[from + i]);
}

Jet Jet::slice(size_t from, size_t count) const {
  Jet r(k_);
  r.coords_.assign(coords_.begin() + static_cast<long>(from), coords_.begin() + static_cast<long>(from + count));
  return r;
}

IntervalBox Jet::base() const {
  IntervalBox b;
  b.reserve(coords_.size());
  for (const auto& c : coords_) b.push_back((*c)[0]);
  return b;
}

Jet Jet::lowerHalf() const {
  Jet r(k_ - 1);
  uint32_t half = width() / 2;
  for (const auto& c : coords_) r.push(Coeffs(c->begin(), c->begin() + half));
  return r;
}

Jet Jet::upperHalf() const {
  Jet r(k_ - 1);
  uint32_t half = width() / 2;
  for (const auto& c : coords_) r.push(Coeffs(c->begin() + half, c->end()));
  return r;
}

Jet Jet::point(const IntervalBox& box) { return constant(box, 0); }

Jet Jet::constant(const IntervalBox& box, int order) {
  Jet r(order);
  for (const auto& v : box) r.pushConstant(v);
  return r;
}

Coeffs zeroCoeffs(int order) { return Coeffs(1u << order); }

Coeffs bottomCoeffs(int order) { return Coeffs(1u << order, Interval::bottom()); }

namespace {

// Partitions of `mask`: choose the block holding the lowest element, recurse.
void enumerate(uint32_t mask, std::vector<uint32_t>& current, std::vector<std::vector<uint32_t>>& out) {
  if (mask == 0) {
    out.push_back(current);
    return;
  }
  uint32_t low = mask & (~mask + 1);
  uint32_t rest = mask ^ low;
  // every subset of rest, joined with low, is a candidate first block
  for (uint32_t sub = rest;; sub = (sub - 1) & rest) {
    current.push_back(sub | low);
    enumerate(rest ^ sub, current, out);
    current.pop_back();
    if (sub == 0) break;
  }
}

}  // namespace

const PartitionTable& partitions(int order) {
  static std::mutex mu;
  static std::map<int, PartitionTable> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  PartitionTable table(1u << order);
  for (uint32_t mask = 1; mask < (1u << order); ++mask) {
    std::vector<uint32_t> current;
    enumerate(mask, current, table[mask]);
  }
  return cache.emplace(order, std::move(table)).first->second;
}

}  // namespace smoothish
