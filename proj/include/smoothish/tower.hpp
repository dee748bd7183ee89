#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "smoothish/context.hpp"
#include "smoothish/jet.hpp"

namespace smoothish {

class Tower;
using TowerP = std::shared_ptr<const Tower>;

// A smoothish map R^dom ~> R^cod together with its derivative tower.
//
// Evaluation is on jets, which carries all derivative orders at once. A node
// either overrides eval() directly, or supplies valueMap() and derivative()
// and inherits the foldDer unrolling
//     T(Y + e Z) = T(Y) + e T'(Y, Z)
// on the top generator. Inputs may carry extra trailing coordinates; a tower
// only reads the first dom() of them, which makes weakening free.
class Tower : public std::enable_shared_from_this<Tower> {
 public:
  using Support = std::vector<size_t>;  // sorted input indices

  Tower(size_t dom, size_t cod);
  Tower(const Tower&) = delete;
  Tower& operator=(const Tower&) = delete;
  virtual ~Tower() = default;

  size_t dom() const { return dom_; }
  size_t cod() const { return cod_; }

  virtual Jet eval(const Jet& x, const EvalContext& c) const;
  // The tail R^(2 dom) ~> R^cod; (x, v) is the derivative at x in direction v.
  virtual TowerP derivative() const;
  // True for nodes whose evaluation is trivially cheap (constants, projections).
  virtual bool cheap() const { return false; }

  IntervalBox value(const IntervalBox& x, const EvalContext& c) const;
  TowerP self() const { return shared_from_this(); }

  // Inputs each output may depend on; every input unless a node knows better.
  const std::vector<Support>& supports() const { return supports_; }
  Support reads() const;

 protected:
  virtual IntervalBox valueMap(const IntervalBox& x, const EvalContext& c) const;
  void setSupports(std::vector<Support> s) { supports_ = std::move(s); }

 private:
  size_t dom_, cod_;
  std::vector<Support> supports_;
};

using ValueFn = std::function<IntervalBox(const IntervalBox&, const EvalContext&)>;
using LinearRows = std::vector<std::vector<std::pair<size_t, Dyadic>>>;

TowerP constTower(std::vector<Dyadic> c, size_t dom);
TowerP constTower(const Dyadic& c, size_t dom);
TowerP piTower(size_t dom);
TowerP coordTower(size_t i, size_t dom);
TowerP linearTower(size_t dom, LinearRows rows);
TowerP identityTower(size_t n);
TowerP projectionTower(size_t dom, size_t from, size_t count);
TowerP foldDer(size_t dom, size_t cod, ValueFn f0, std::function<TowerP()> fprime);
TowerP compose(TowerP g, TowerP f);
TowerP pairTower(std::vector<TowerP> parts);
TowerP pairTower(TowerP a, TowerP b);
TowerP derivOp(TowerP f);
// f with a small evaluation cache, for subterms referenced more than once.
TowerP share(TowerP f);
TowerP weaken(TowerP f, size_t k);
// f viewed on exactly n >= f->dom() inputs
TowerP widen(TowerP f, size_t n);

// Primitive towers R^2 ~> R and R ~> R.
TowerP addTower();
TowerP subTower();
TowerP mulTower();
TowerP divTower();
TowerP maxTower();
TowerP minTower();
TowerP reluTower();
TowerP negTower();
TowerP recipTower();
TowerP sqrtTower();
TowerP sinTower();
TowerP cosTower();
TowerP expTower();
TowerP squareTower();
TowerP powTower(unsigned n);

// The same elementary functions built with foldDer from their textbook
// derivative couplings. Used to cross-check the jet implementations.
namespace folded {
TowerP sin();
TowerP cos();
TowerP exp();
TowerP mul();
}  // namespace folded

// Scalar combinators; operands of different dimensions are auto-weakened.
TowerP add(TowerP a, TowerP b);
TowerP sub(TowerP a, TowerP b);
TowerP mul(TowerP a, TowerP b);
TowerP div(TowerP a, TowerP b);
TowerP neg(TowerP a);
TowerP maxOf(TowerP a, TowerP b);
TowerP minOf(TowerP a, TowerP b);
TowerP scale(const Dyadic& c, TowerP a);
TowerP applyUnary(TowerP prim, TowerP a);

// f^(k)(x; v_1..v_k) read off a k-generator jet.
IntervalBox derivK(const Tower& f, const IntervalBox& x, const std::vector<IntervalBox>& dirs, const EvalContext& c);
// The same through k-fold derivative() unrolling with packed perturbations.
TowerP unrollDerivative(TowerP f, int k);
IntervalBox packPerturbations(const IntervalBox& x, const std::vector<IntervalBox>& dirs);

}  // namespace smoothish
