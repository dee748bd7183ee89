#pragma once

#include <utility>

#include "smoothish/hoprims.hpp"

namespace smoothish {

// deriv f at (gamma, x) = f'((gamma, x); (0, 1)), for f on R^(g+1).
TowerP deriv(TowerP f, size_t g);

// Partial derivatives of f on R^(g+2) in its last two coordinates, each with
// the other frozen.
std::pair<TowerP, TowerP> gradient2(TowerP f, size_t g);

// circle c r as a positive-inside field on R^(g+2): r^2 - |x - c|^2, with
// center and radius given as towers on R^g.
TowerP circleField(TowerP cx, TowerP cy, TowerP r, size_t g);

}  // namespace smoothish
