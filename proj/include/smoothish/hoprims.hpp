#pragma once

#include <functional>

#include "smoothish/tower.hpp"

namespace smoothish {

// A second-order primitive: for every context size g, maps a tower on
// R^(g+1) (the bound variable is the last coordinate) to a tower on R^g.
using TowerXform = std::function<TowerP(TowerP f, size_t g)>;

TowerP integral01(TowerP f, size_t g);
TowerP cutRoot(TowerP f, size_t g);
TowerP firstRoot(TowerP f, size_t g);
TowerP max01(TowerP f, size_t g);
TowerP argmax01(TowerP f, size_t g);

TowerXform integral01Xform();
TowerXform cutRootXform();
TowerXform firstRootXform();
TowerXform max01Xform();
TowerXform argmax01Xform();

// One interval Newton contraction of `window` for f(gamma, .), never losing a
// root; returns the window unchanged when the slope encloses 0.
Interval newtonAccelerate(const Tower& f, const Interval& window, const IntervalBox& gamma, const EvalContext& c);

// -(dh/dgamma . dgamma) / (dh/dy) at y = root(gamma): the implicit-function
// derivative tail R^(2g) ~> R of a root of h, as a tower.
TowerP iftTail(TowerP h, TowerP root, size_t g);

}  // namespace smoothish
