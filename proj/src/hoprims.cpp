#include "smoothish/hoprims.hpp"

#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace smoothish {

namespace {

int signOf(const Interval& v) {
  Trichotomy t = ivCompare(v, Interval());
  if (t == Trichotomy::Greater) return 1;
  if (t == Trichotomy::Less) return -1;
  return 0;
}

IntervalBox extend(const IntervalBox& gamma, size_t g, const Interval& y) {
  IntervalBox box(gamma.begin(), gamma.begin() + static_cast<long>(g));
  box.push_back(y);
  return box;
}

Interval at(const Tower& f, const IntervalBox& gamma, size_t g, const Interval& y, const EvalContext& c) {
  return f.value(extend(gamma, g, y), c)[0];
}

// The same over a prebuilt point jet of gamma. Reusing one jet keeps the
// context coordinates pointer-identical across probes, so shared subterms
// that ignore y are evaluated once.
Interval at(const Tower& f, const Jet& gamma, const Interval& y, const EvalContext& c) {
  Jet j = gamma;
  j.pushConstant(y);
  return f.eval(j, c).at(0, 0);
}

Jet contextJet(const IntervalBox& gamma, size_t g) {
  return Jet::point(IntervalBox(gamma.begin(), gamma.begin() + static_cast<long>(g)));
}

// f and its partial derivative in the last coordinate, over (gamma, y).
Interval slope(const Tower& f, const IntervalBox& gamma, size_t g, const Interval& y, const EvalContext& c) {
  Jet j(1);
  for (size_t i = 0; i < g; ++i) j.pushConstant(gamma[i]);
  j.push(Coeffs{y, Interval(Dyadic(1))});
  return f.eval(j, c).at(0, 1);
}

void appendKey(std::string& key, const Interval& v) {
  key += v.loFinite() ? v.lo().mantissa().get_str(16) + "p" + std::to_string(v.lo().exponent()) : "-i";
  key += ',';
  key += v.hiFinite() ? v.hi().mantissa().get_str(16) + "p" + std::to_string(v.hi().exponent()) : "i";
  key += ';';
}

std::string memoKey(const IntervalBox& gamma, size_t g, const EvalContext& c) {
  std::string key = std::to_string(c.n) + ":" + std::to_string(c.prec) + ":";
  for (size_t i = 0; i < g; ++i) appendKey(key, gamma[i]);
  return key;
}

template <class V>
class Memo {
 public:
  std::optional<V> find(const std::string& k) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = map_.find(k);
    if (it == map_.end()) return std::nullopt;
    return it->second;
  }
  void put(const std::string& k, const V& v) const {
    std::lock_guard<std::mutex> lock(mu_);
    if (map_.size() > 200000) map_.clear();
    map_.emplace(k, v);
  }

 private:
  mutable std::mutex mu_;
  mutable std::unordered_map<std::string, V> map_;
};

Interval contract(const Tower& f, Interval window, const IntervalBox& gamma, const EvalContext& c) {
  for (int i = 0; i < 8 && window.bounded() && !window.isPoint(); ++i) {
    Interval next = newtonAccelerate(f, window, gamma, c);
    Dyadic before = *window.width();
    window = next;
    // stop once a step fails to halve the window
    if (*window.width() > before.shifted(-1)) break;
  }
  return window;
}

// Context inputs a body on R^(g+1) reads, dropping the bound variable.
std::vector<Tower::Support> contextSupport(const Tower& f, size_t g) {
  Tower::Support r;
  for (size_t i : f.supports()[0]) {
    if (i < g) r.push_back(i);
  }
  return {r};
}

class Integral01 final : public Tower {
 public:
  Integral01(TowerP f, size_t g) : Tower(g, 1), f_(std::move(f)) { setSupports(contextSupport(*f_, g)); }
  // Per cell of width w around m: w f(m) + f_yy(cell) w^3 / 24, which falls
  // back to w f(cell) where the curvature is unbounded.
  Jet eval(const Jet& x, const EvalContext& c) const override {
    size_t g = dom();
    const int s = c.subdiv;
    const uint64_t cells = uint64_t{1} << s;
    const uint32_t width = x.width();
    const Jet ctx = x.prefix(g);
    Jet ctx2(x.order() + 2);
    for (size_t i = 0; i < g; ++i) {
      Coeffs cf(x.coord(i));
      cf.resize(4 * width);
      ctx2.push(std::move(cf));
    }
    const Interval curv = ivShift(ivRecip(Interval(Dyadic(24)), c.prec), -3 * s);
    const uint32_t both = 3 * width;
    Coeffs acc(width);
    for (uint64_t j = 0; j < cells; ++j) {
      if ((j & 255u) == 0) c.check();
      Dyadic a(mpz_class(static_cast<unsigned long>(j)), -s);
      Dyadic b(mpz_class(static_cast<unsigned long>(j + 1)), -s);
      Dyadic mid(mpz_class(static_cast<unsigned long>(2 * j + 1)), -s - 1);
      Jet p = ctx;
      p.pushConstant(Interval(mid));
      Jet fm = f_->eval(p, c);
      Jet q = ctx2;
      Coeffs y(4 * width);
      y[0] = Interval(a, b);
      y[width] = y[2 * width] = Interval(Dyadic(1));
      q.push(std::move(y));
      Jet fyy = f_->eval(q, c);
      std::optional<Jet> coarse;
      for (uint32_t m = 0; m < width; ++m) {
        Interval term = ivAdd(ivShift(fm.at(0, m), -s), ivMul(fyy.at(0, m | both), curv, c.prec), c.prec);
        if (!term.bounded()) {
          if (!coarse) {
            Jet cell = ctx;
            cell.pushConstant(Interval(a, b));
            coarse = f_->eval(cell, c);
          }
          term = ivShift(coarse->at(0, m), -s);
        }
        acc[m] = ivAdd(acc[m], term, c.prec);
      }
    }
    Jet r(x.order());
    r.push(std::move(acc));
    return r;
  }

 private:
  TowerP f_;
};

enum class RootKind { Cut, First };

class RootCore {
 public:
  RootCore(TowerP f, size_t g, RootKind kind) : f_(std::move(f)), g_(g), kind_(kind) {}

  const TowerP& f() const { return f_; }

  Interval solve(const IntervalBox& gamma, const EvalContext& c) const {
    std::string key = memoKey(gamma, g_, c) + (c.cfg.newton ? "N" : "B");
    if (auto hit = memo_.find(key)) return *hit;
    Interval r = kind_ == RootKind::First ? solveFirst(gamma, c) : solveCut(gamma, c);
    memo_.put(key, r);
    return r;
  }

 private:
  Interval solveFirst(const IntervalBox& gamma, const EvalContext& c) const {
    const Interval unit(Dyadic(0), Dyadic(1));
    const Jet pre = contextJet(gamma, g_);
    int s0 = signOf(at(*f_, pre, Interval(), c));
    if (s0 == 0) return unit;
    const int depthCap = c.subdiv + 12;
    Dyadic lo(0), hi(1);
    bool prefix = true;
    // left-to-right bisection; returns true once a provably flipped cell is found
    std::function<bool(const Dyadic&, int)> visit = [&](const Dyadic& a, int depth) -> bool {
      c.check();
      Dyadic b = a + Dyadic::pow2(-depth);
      int sg = signOf(at(*f_, pre, Interval(a, b), c));
      if (sg == s0) {
        if (prefix && a == lo) lo = b;
        return false;
      }
      if (sg == -s0) {
        hi = a;
        return true;
      }
      if (depth >= depthCap) {
        prefix = false;
        return false;
      }
      if (visit(a, depth + 1)) return true;
      return visit(a + Dyadic::pow2(-depth - 1), depth + 1);
    };
    visit(Dyadic(0), 0);
    Interval bracket(lo, hi);
    if (c.cfg.newton && !bracket.isPoint()) bracket = contract(*f_, bracket, gamma, c);
    return bracket;
  }

  Interval solveCut(const IntervalBox& gamma, const EvalContext& c) const {
    const int w = std::min(c.n + 1, c.cfg.windowCap);
    Dyadic a = -Dyadic::pow2(w), b = Dyadic::pow2(w);
    const Jet pre = contextJet(gamma, g_);
    auto sgn = [&](const Dyadic& x) { return signOf(at(*f_, pre, Interval(x), c)); };
    bool haveLo = sgn(a) > 0, haveHi = sgn(b) < 0;
    if (!haveLo || !haveHi) {
      return Interval::fromBounds(haveLo ? std::optional<Dyadic>(a) : std::nullopt,
                                  haveHi ? std::optional<Dyadic>(b) : std::nullopt);
    }
    const int steps = w + 12 + 2 * c.n;
    for (int i = 0; i < steps; ++i) {
      c.check();
      Dyadic m = (a + b).shifted(-1);
      int sm = sgn(m);
      if (sm > 0) {
        a = m;
      } else if (sm < 0) {
        b = m;
      } else {
        Dyadic m1 = (a + m).shifted(-1), m2 = (m + b).shifted(-1);
        bool moved = false;
        if (sgn(m1) > 0) a = m1, moved = true;
        if (sgn(m2) < 0) b = m2, moved = true;
        if (!moved) break;
      }
    }
    Interval bracket(a, b);
    if (c.cfg.newton) bracket = contract(*f_, bracket, gamma, c);
    return bracket;
  }

  TowerP f_;
  size_t g_;
  RootKind kind_;
  Memo<Interval> memo_;
};

class RootNode final : public Tower {
 public:
  RootNode(std::shared_ptr<const RootCore> core, size_t g) : Tower(g, 1), core_(std::move(core)) {
    setSupports(contextSupport(*core_->f(), g));
  }
  // Built on demand: the tail refers back to this node, never the reverse.
  TowerP derivative() const override { return iftTail(core_->f(), self(), dom()); }

 protected:
  IntervalBox valueMap(const IntervalBox& x, const EvalContext& c) const override { return {core_->solve(x, c)}; }

 private:
  std::shared_ptr<const RootCore> core_;
};

struct BnbResult {
  Interval max;
  Interval argmax;
};

class BnbCore {
 public:
  BnbCore(TowerP f, size_t g) : f_(std::move(f)), g_(g) {}

  const TowerP& f() const { return f_; }
  size_t contextDims() const { return g_; }

  BnbResult solve(const IntervalBox& gamma, const EvalContext& c) const {
    std::string key = memoKey(gamma, g_, c);
    if (auto hit = memo_.find(key)) return *hit;
    BnbResult r = run(gamma, c);
    memo_.put(key, r);
    return r;
  }

 private:
  struct Cell {
    Dyadic a;
    int depth;
    Interval v;
  };

  BnbResult run(const IntervalBox& gamma, const EvalContext& c) const {
    std::optional<Dyadic> lower;
    const Jet pre = contextJet(gamma, g_);
    auto raise = [&](const Interval& v) {
      if (v.loFinite() && (!lower || v.lo() > *lower)) lower = v.lo();
    };
    for (long p : {0L, 1L}) raise(at(*f_, pre, Interval(Dyadic(p)), c));
    const int depthCap = c.subdiv + 4;
    std::vector<Cell> cells{{Dyadic(0), 0, Interval()}};
    IntervalBox ctx(gamma.begin(), gamma.begin() + static_cast<long>(g_));
    const Jet pre1 = Jet::constant(ctx, 1);
    for (int depth = 0;; ++depth) {
      for (auto& cell : cells) {
        c.check();
        Dyadic mid = cell.a + Dyadic::pow2(-cell.depth - 1);
        Interval box(cell.a, cell.a + Dyadic::pow2(-cell.depth));
        cell.v = at(*f_, pre, box, c);
        Interval fm = at(*f_, pre, Interval(mid), c);
        raise(fm);
        // mean-value form: tight near a critical point, where the slope is small
        Jet j = pre1;
        j.push(Coeffs{box, Interval(Dyadic(1))});
        Interval fy = f_->eval(j, c).at(0, 1);
        if (fm.bounded() && fy.bounded()) {
          Interval mv = ivAdd(fm, ivMul(fy, ivSub(box, Interval(mid), c.prec), c.prec), c.prec);
          cell.v = ivMeet(cell.v, mv);
        }
        raise(cell.v);
      }
      std::vector<Cell> kept;
      for (auto& cell : cells) {
        // strict dominance only: ties never prune
        if (lower && ivCompare(cell.v, Interval(*lower)) == Trichotomy::Less) continue;
        kept.push_back(std::move(cell));
      }
      cells = std::move(kept);
      if (depth >= depthCap || 2 * cells.size() > static_cast<size_t>(c.cfg.bnbMaxNodes)) break;
      std::vector<Cell> next;
      next.reserve(2 * cells.size());
      for (const auto& cell : cells) {
        next.push_back({cell.a, cell.depth + 1, Interval()});
        next.push_back({cell.a + Dyadic::pow2(-cell.depth - 1), cell.depth + 1, Interval()});
      }
      cells = std::move(next);
    }
    std::optional<Dyadic> upper;
    bool unbounded = false;
    Dyadic aLo = cells.front().a, aHi = cells.front().a;
    for (const auto& cell : cells) {
      if (!cell.v.hiFinite()) {
        unbounded = true;
      } else if (!upper || cell.v.hi() > *upper) {
        upper = cell.v.hi();
      }
      aLo = std::min(aLo, cell.a);
      aHi = std::max(aHi, cell.a + Dyadic::pow2(-cell.depth));
    }
    BnbResult r{Interval::fromBounds(lower, unbounded ? std::nullopt : upper), Interval(aLo, aHi)};
    if (r.max.bounded() && r.max.hi() < r.max.lo()) throw std::logic_error("branch and bound: empty enclosure");
    if (aLo.sign() > 0 && aHi < Dyadic(1)) r.argmax = contractCritical(gamma, r.argmax, c);
    return r;
  }

  // Every maximizer inside (0, 1) is a critical point, so interval Newton on
  // the slope f_y narrows the argmax box without losing any of them.
  Interval contractCritical(const IntervalBox& gamma, Interval box, const EvalContext& c) const {
    IntervalBox ctx(gamma.begin(), gamma.begin() + static_cast<long>(g_));
    const Jet pre1 = Jet::constant(ctx, 1), pre2 = Jet::constant(ctx, 2);
    const Interval one(Dyadic(1));
    for (int step = 0; step < 8; ++step) {
      c.check();
      Dyadic m = box.midpoint();
      Jet j1 = pre1;
      j1.push(Coeffs{Interval(m), one});
      Interval fy = f_->eval(j1, c).at(0, 1);
      Jet j2 = pre2;
      j2.push(Coeffs{box, one, one, Interval()});
      Interval fyy = f_->eval(j2, c).at(0, 3);
      if (!fy.bounded() || !fyy.bounded() || fyy.containsZero()) break;
      Interval n = ivSub(Interval(m), ivMul(fy, ivRecip(fyy, c.prec), c.prec), c.prec);
      if (!n.intersects(box)) break;
      Interval next = ivMeet(box, n);
      bool halved = next.width()->toMpq() * 2 <= box.width()->toMpq();
      box = next;
      if (!halved || box.isPoint()) break;
    }
    return box;
  }

  TowerP f_;
  size_t g_;
  Memo<BnbResult> memo_;
};

class ArgmaxNode;

// Derivative of argmax01, decided at the base point: 0 when the slope in the
// bound variable has a provable sign over the argmax box (boundary maximum),
// the second-order implicit-function formula when the argmax is interior,
// bottom otherwise.
class ArgmaxTail final : public Tower {
 public:
  ArgmaxTail(std::shared_ptr<const BnbCore> core, TowerP argmax)
      : Tower(2 * core->contextDims(), 1), core_(std::move(core)), argmax_(std::move(argmax)) {}

  Jet eval(const Jet& x, const EvalContext& c) const override {
    size_t g = core_->contextDims();
    IntervalBox gamma = x.prefix(g).base();
    Interval y = core_->solve(gamma, c).argmax;
    const Tower& f = *core_->f();
    Jet r(x.order());
    Interval fy = slope(f, gamma, g, y, c);
    if (signOf(fy) != 0) {
      r.push(zeroCoeffs(x.order()));
      return r;
    }
    if (y.lo().sign() > 0 && y.hi() < Dyadic(1)) {
      TowerP fyTower = compose(derivOp(widen(core_->f(), g + 1)),
                               pairTower(identityTower(g + 1), constTower(unitDirection(g + 1), g + 1)));
      return iftTail(fyTower, argmax_, g)->eval(x, c);
    }
    r.push(bottomCoeffs(x.order()));
    return r;
  }

 private:
  static std::vector<Dyadic> unitDirection(size_t n) {
    std::vector<Dyadic> v(n);
    v.back() = Dyadic(1);
    return v;
  }
  std::shared_ptr<const BnbCore> core_;
  TowerP argmax_;
};

class ArgmaxNode final : public Tower {
 public:
  ArgmaxNode(std::shared_ptr<const BnbCore> core, size_t g) : Tower(g, 1), core_(std::move(core)) {
    setSupports(contextSupport(*core_->f(), g));
  }
  TowerP derivative() const override { return std::make_shared<ArgmaxTail>(core_, self()); }

 protected:
  IntervalBox valueMap(const IntervalBox& x, const EvalContext& c) const override {
    return {core_->solve(x, c).argmax};
  }

 private:
  std::shared_ptr<const BnbCore> core_;
};

class Max01Node final : public Tower {
 public:
  Max01Node(std::shared_ptr<const BnbCore> core, size_t g) : Tower(g, 1), core_(std::move(core)) {
    setSupports(contextSupport(*core_->f(), g));
  }
  // (f o <id, argmax01 f>)'
  TowerP derivative() const override {
    size_t g = dom();
    TowerP argmax = std::make_shared<ArgmaxNode>(core_, g);
    return derivOp(compose(widen(core_->f(), g + 1), pairTower(identityTower(g), argmax)));
  }

 protected:
  IntervalBox valueMap(const IntervalBox& x, const EvalContext& c) const override { return {core_->solve(x, c).max}; }

 private:
  std::shared_ptr<const BnbCore> core_;
};

void checkArity(const TowerP& f, size_t g, const char* who) {
  if (f->cod() != 1 || f->dom() > g + 1) {
    throw std::invalid_argument(std::string(who) + ": argument must be a scalar tower on at most g+1 inputs");
  }
}

}  // namespace

TowerP iftTail(TowerP h, TowerP root, size_t g) {
  TowerP t = derivOp(widen(std::move(h), g + 1));
  size_t n = 2 * g;
  TowerP gamma = projectionTower(n, 0, g);
  TowerP dgamma = projectionTower(n, g, g);
  TowerP zero = constTower(Dyadic(0), n);
  TowerP one = constTower(Dyadic(1), n);
  TowerP zeros = constTower(std::vector<Dyadic>(g), n);
  TowerP num = compose(t, pairTower({gamma, root, dgamma, zero}));
  TowerP den = compose(t, pairTower({gamma, root, zeros, one}));
  return neg(div(num, den));
}

Interval newtonAccelerate(const Tower& f, const Interval& window, const IntervalBox& gamma, const EvalContext& c) {
  size_t g = f.dom() - 1;
  if (!window.bounded() || window.isPoint()) return window;
  Interval d = slope(f, gamma, g, window, c);
  if (d.containsZero()) return window;
  Dyadic m = window.midpoint();
  Interval fm = at(f, gamma, g, Interval(m), c);
  Interval step = ivMul(fm, ivRecip(d, c.prec), c.prec);
  Interval candidate = ivSub(Interval(m), step, c.prec);
  if (!candidate.intersects(window)) return window;
  return ivMeet(window, candidate);
}

TowerP integral01(TowerP f, size_t g) {
  checkArity(f, g, "integral01");
  return std::make_shared<Integral01>(std::move(f), g);
}

TowerP cutRoot(TowerP f, size_t g) {
  checkArity(f, g, "cutRoot");
  return std::make_shared<RootNode>(std::make_shared<RootCore>(widen(f, g + 1), g, RootKind::Cut), g);
}

TowerP firstRoot(TowerP f, size_t g) {
  checkArity(f, g, "firstRoot");
  return std::make_shared<RootNode>(std::make_shared<RootCore>(widen(f, g + 1), g, RootKind::First), g);
}

TowerP max01(TowerP f, size_t g) {
  checkArity(f, g, "max01");
  return std::make_shared<Max01Node>(std::make_shared<BnbCore>(widen(f, g + 1), g), g);
}

TowerP argmax01(TowerP f, size_t g) {
  checkArity(f, g, "argmax01");
  return std::make_shared<ArgmaxNode>(std::make_shared<BnbCore>(widen(f, g + 1), g), g);
}

TowerXform integral01Xform() { return [](TowerP f, size_t g) { return integral01(std::move(f), g); }; }
TowerXform cutRootXform() { return [](TowerP f, size_t g) { return cutRoot(std::move(f), g); }; }
TowerXform firstRootXform() { return [](TowerP f, size_t g) { return firstRoot(std::move(f), g); }; }
TowerXform max01Xform() { return [](TowerP f, size_t g) { return max01(std::move(f), g); }; }
TowerXform argmax01Xform() { return [](TowerP f, size_t g) { return argmax01(std::move(f), g); }; }

}  // namespace smoothish
