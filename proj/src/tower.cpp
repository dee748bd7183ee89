#include "smoothish/tower.hpp"

#include <algorithm>
#include <iterator>
#include <list>
#include <numeric>
#include <mutex>
#include <stdexcept>
#include <string>

namespace smoothish {

namespace {

Jet combineHalves(const Jet& low, const Jet& high) {
  Jet r(low.order() + 1);
  for (size_t i = 0; i < low.dims(); ++i) {
    Coeffs c(low.coord(i));
    c.insert(c.end(), high.coord(i).begin(), high.coord(i).end());
    r.push(std::move(c));
  }
  return r;
}

void requireDims(const Jet& x, size_t dom, const char* who) {
  if (x.dims() < dom) {
    throw std::logic_error(std::string(who) + ": jet has " + std::to_string(x.dims()) + " coordinates, need " +
                           std::to_string(dom));
  }
}

Tower::Support merge(const Tower::Support& a, const Tower::Support& b) {
  Tower::Support r;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
  return r;
}

}  // namespace

Tower::Tower(size_t dom, size_t cod) : dom_(dom), cod_(cod) {
  Support all(dom);
  std::iota(all.begin(), all.end(), size_t{0});
  supports_.assign(cod, all);
}

Tower::Support Tower::reads() const {
  Support r;
  for (const auto& s : supports_) r = merge(r, s);
  return r;
}

Jet Tower::eval(const Jet& x, const EvalContext& c) const {
  requireDims(x, dom(), "foldDer");
  Jet in = x.prefix(dom());
  if (in.order() == 0) return Jet::point(valueMap(in.base(), c));
  Jet low = in.lowerHalf();
  Jet high = in.upperHalf();
  Jet lowRes = eval(low, c);
  Jet packed = low;
  packed.append(high, 0, dom());
  Jet highRes = derivative()->eval(packed, c);
  return combineHalves(lowRes, highRes);
}

TowerP Tower::derivative() const { return derivOp(self()); }

IntervalBox Tower::value(const IntervalBox& x, const EvalContext& c) const { return eval(Jet::point(x), c).base(); }

IntervalBox Tower::valueMap(const IntervalBox& x, const EvalContext& c) const { return eval(Jet::point(x), c).base(); }

namespace {

class Const final : public Tower {
 public:
  Const(std::vector<Dyadic> vals, size_t dom) : Tower(dom, vals.size()), vals_(std::move(vals)) {
    setSupports(std::vector<Support>(cod()));
  }
  Jet eval(const Jet& x, const EvalContext&) const override {
    Jet r(x.order());
    for (const auto& v : vals_) r.pushConstant(Interval(v));
    return r;
  }
  bool cheap() const override { return true; }

 private:
  std::vector<Dyadic> vals_;
};

class Pi final : public Tower {
 public:
  explicit Pi(size_t dom) : Tower(dom, 1) { setSupports({Support{}}); }
  Jet eval(const Jet& x, const EvalContext& c) const override {
    Jet r(x.order());
    r.pushConstant(ivPi(c.prec));
    return r;
  }
  bool cheap() const override { return true; }
};

class Linear final : public Tower {
 public:
  Linear(size_t dom, LinearRows rows) : Tower(dom, rows.size()), rows_(std::move(rows)) {
    for (const auto& row : rows_) {
      for (const auto& [col, coef] : row) {
        if (col >= dom) throw std::invalid_argument("linear map column out of range");
      }
    }
    std::vector<Support> sup;
    for (const auto& row : rows_) {
      Support s;
      for (const auto& entry : row) s.push_back(entry.first);
      std::sort(s.begin(), s.end());
      s.erase(std::unique(s.begin(), s.end()), s.end());
      sup.push_back(std::move(s));
    }
    setSupports(std::move(sup));
  }
  Jet eval(const Jet& x, const EvalContext& c) const override {
    requireDims(x, dom(), "linear");
    Jet r(x.order());
    for (const auto& row : rows_) {
      if (row.size() == 1 && row[0].second == Dyadic(1)) {
        r.push(x.shared(row[0].first));
        continue;
      }
      Coeffs out(x.width());
      for (uint32_t s = 0; s < x.width(); ++s) {
        Interval acc;
        for (const auto& [col, coef] : row) {
          const Interval& v = x.at(col, s);
          Interval term = coef == Dyadic(1) ? v : coef == Dyadic(-1) ? ivNeg(v) : ivScale(v, coef, c.prec);
          acc = ivAdd(acc, term, c.prec);
        }
        out[s] = acc;
      }
      r.push(std::move(out));
    }
    return r;
  }
  bool cheap() const override { return true; }

 private:
  LinearRows rows_;
};

class FoldDer final : public Tower {
 public:
  FoldDer(size_t dom, size_t cod, ValueFn f0, std::function<TowerP()> fprime)
      : Tower(dom, cod), f0_(std::move(f0)), fprime_(std::move(fprime)) {}
  TowerP derivative() const override { return fprime_(); }

 protected:
  IntervalBox valueMap(const IntervalBox& x, const EvalContext& c) const override { return f0_(x, c); }

 private:
  ValueFn f0_;
  std::function<TowerP()> fprime_;
};

// Caches the last few evaluations, keyed by the identity of the input
// coordinates this tower reads. Subterms referenced from several places of a
// term, or constant across the cells of an integral or search, then run once.
class Share final : public Tower {
 public:
  explicit Share(TowerP f) : Tower(f->dom(), f->cod()), f_(std::move(f)) {
    setSupports(f_->supports());
    reads_ = reads();
  }

  Jet eval(const Jet& x, const EvalContext& c) const override {
    {
      std::lock_guard<std::mutex> lock(mu_);
      for (auto it = entries_.begin(); it != entries_.end(); ++it) {
        if (matches(*it, x, c)) {
          entries_.splice(entries_.begin(), entries_, it);
          return entries_.front().out;
        }
      }
    }
    Jet out = f_->eval(x, c);
    std::lock_guard<std::mutex> lock(mu_);
    entries_.push_front(Entry{x.prefix(dom()), c.n, c.prec, c.subdiv, c.cfg, out});
    if (entries_.size() > kSlots) entries_.pop_back();
    return out;
  }
  TowerP derivative() const override { return f_->derivative(); }
  bool cheap() const override { return f_->cheap(); }

 private:
  static constexpr size_t kSlots = 4;
  struct Entry {
    Jet in;
    int n;
    long prec;
    int subdiv;
    Config cfg;
    Jet out;
  };

  bool matches(const Entry& e, const Jet& x, const EvalContext& c) const {
    if (e.in.order() != x.order() || e.n != c.n || e.prec != c.prec || e.subdiv != c.subdiv) return false;
    if (e.cfg.newton != c.cfg.newton || e.cfg.subdivisionCap != c.cfg.subdivisionCap ||
        e.cfg.bnbMaxNodes != c.cfg.bnbMaxNodes || e.cfg.windowCap != c.cfg.windowCap) {
      return false;
    }
    for (size_t i : reads_) {
      if (e.in.shared(i) != x.shared(i)) return false;
    }
    return true;
  }

  TowerP f_;
  Support reads_;
  mutable std::mutex mu_;
  mutable std::list<Entry> entries_;
};

class Compose final : public Tower {
 public:
  Compose(TowerP g, TowerP f) : Tower(f->dom(), g->cod()), g_(std::move(g)), f_(std::move(f)) {
    if (g_->dom() > f_->cod()) throw std::invalid_argument("compose: codomain/domain mismatch");
    std::vector<Support> sup;
    for (const auto& s : g_->supports()) {
      Support r;
      for (size_t j : s) r = merge(r, f_->supports()[j]);
      sup.push_back(std::move(r));
    }
    setSupports(std::move(sup));
  }
  Jet eval(const Jet& x, const EvalContext& c) const override { return g_->eval(f_->eval(x, c), c); }
  bool cheap() const override { return g_->cheap() && f_->cheap(); }

 private:
  TowerP g_, f_;
};

size_t maxDom(const std::vector<TowerP>& parts) {
  size_t d = 0;
  for (const auto& p : parts) d = std::max(d, p->dom());
  return d;
}

size_t sumCod(const std::vector<TowerP>& parts) {
  size_t d = 0;
  for (const auto& p : parts) d += p->cod();
  return d;
}

class Pair final : public Tower {
 public:
  explicit Pair(std::vector<TowerP> parts) : Tower(maxDom(parts), sumCod(parts)), parts_(std::move(parts)) {
    std::vector<Support> sup;
    for (const auto& p : parts_) sup.insert(sup.end(), p->supports().begin(), p->supports().end());
    setSupports(std::move(sup));
  }
  Jet eval(const Jet& x, const EvalContext& c) const override {
    Jet r(x.order());
    for (const auto& p : parts_) {
      Jet v = p->eval(x, c);
      r.append(v, 0, v.dims());
    }
    return r;
  }
  bool cheap() const override {
    for (const auto& p : parts_) {
      if (!p->cheap()) return false;
    }
    return true;
  }

 private:
  std::vector<TowerP> parts_;
};

// derivOp: f'(x, v) obtained by adjoining a fresh top generator carrying v.
class Tangent final : public Tower {
 public:
  explicit Tangent(TowerP f) : Tower(2 * f->dom(), f->cod()), f_(std::move(f)) {}
  Jet eval(const Jet& x, const EvalContext& c) const override {
    requireDims(x, dom(), "derivOp");
    size_t n = f_->dom();
    Jet w(x.order() + 1);
    for (size_t i = 0; i < n; ++i) {
      Coeffs cf(x.coord(i));
      cf.insert(cf.end(), x.coord(n + i).begin(), x.coord(n + i).end());
      w.push(std::move(cf));
    }
    return f_->eval(w, c).upperHalf();
  }

 private:
  TowerP f_;
};

Coeffs subsetProduct(const Coeffs& a, const Coeffs& b, long prec) {
  Coeffs out(a.size());
  for (uint32_t s = 0; s < a.size(); ++s) {
    Interval acc;
    for (uint32_t t = s;; t = (t - 1) & s) {
      acc = ivAdd(acc, ivMul(a[t], b[s ^ t], prec), prec);
      if (t == 0) break;
    }
    out[s] = acc;
  }
  return out;
}

class Mul final : public Tower {
 public:
  Mul() : Tower(2, 1) {}
  Jet eval(const Jet& x, const EvalContext& c) const override {
    requireDims(x, 2, "mul");
    Jet r(x.order());
    r.push(subsetProduct(x.coord(0), x.coord(1), c.prec));
    return r;
  }
};

// Clarke max/min: decided comparisons select a branch, ties hull first
// derivatives and give bottom beyond.
class MaxMin final : public Tower {
 public:
  explicit MaxMin(bool isMax) : Tower(2, 1), isMax_(isMax) {}
  Jet eval(const Jet& x, const EvalContext&) const override {
    requireDims(x, 2, "max");
    const Coeffs& a = x.coord(0);
    const Coeffs& b = x.coord(1);
    Trichotomy t = ivCompare(a[0], b[0]);
    Jet r(x.order());
    if (t != Trichotomy::Unknown) {
      bool pickA = (t == Trichotomy::Greater) == isMax_;
      r.push(x.shared(pickA ? 0 : 1));
      return r;
    }
    Coeffs out(a.size());
    out[0] = isMax_ ? ivMax(a[0], b[0]) : ivMin(a[0], b[0]);
    for (uint32_t s = 1; s < a.size(); ++s) {
      if ((s & (s - 1)) == 0) {
        out[s] = ivHull(a[s], b[s]);
      } else {
        out[s] = independent(a, b, s) ? Interval() : Interval::bottom();
      }
    }
    r.push(std::move(out));
    return r;
  }

 private:
  // Neither input moves with any generator in s, so neither does the output.
  static bool independent(const Coeffs& a, const Coeffs& b, uint32_t s) {
    for (uint32_t t = s; t != 0; t = (t - 1) & s) {
      if (!a[t].isZero() || !b[t].isZero()) return false;
    }
    return true;
  }
  bool isMax_;
};

enum class Elem { Recip, Sqrt, Sin, Cos, Exp, Pow };

Interval ivPowInt(const Interval& x, unsigned n, long prec) {
  if (n == 0) return Interval(Dyadic(1));
  if (n == 1) return x;
  if (n % 2 == 0) return ivSquare(ivPowInt(x, n / 2, prec), prec);
  return ivMul(x, ivPowInt(x, n - 1, prec), prec);
}

// f^(j)(x) for j = 0..k
std::vector<Interval> derivativeSequence(Elem kind, unsigned power, const Interval& x, int k, long prec) {
  std::vector<Interval> d(static_cast<size_t>(k) + 1);
  switch (kind) {
    case Elem::Exp: {
      Interval e = ivExp(x, prec);
      for (auto& v : d) v = e;
      break;
    }
    case Elem::Sin:
    case Elem::Cos: {
      Interval s = ivSin(x, prec), co = ivCos(x, prec);
      // sin, cos, -sin, -cos, ... ; cos starts one step later
      Interval cycle[4] = {s, co, ivNeg(s), ivNeg(co)};
      int shift = kind == Elem::Cos ? 1 : 0;
      for (int j = 0; j <= k; ++j) d[static_cast<size_t>(j)] = cycle[(j + shift) % 4];
      break;
    }
    case Elem::Sqrt: {
      d[0] = ivSqrt(x, prec);
      if (k == 0) break;
      Interval r = ivRecip(x, prec);
      Dyadic coef(1);
      Interval cur = d[0];
      for (int j = 1; j <= k; ++j) {
        // c_j = c_{j-1} (1/2 - (j-1))
        coef = coef * (Dyadic(1).shifted(-1) - Dyadic(j - 1));
        cur = ivMul(cur, r, prec);
        d[static_cast<size_t>(j)] = ivScale(cur, coef, prec);
      }
      break;
    }
    case Elem::Recip: {
      Interval r = ivRecip(x, prec);
      Interval cur = r;
      Dyadic coef(1);
      d[0] = r;
      for (int j = 1; j <= k; ++j) {
        coef = coef * Dyadic(-j);
        cur = ivMul(cur, r, prec);
        d[static_cast<size_t>(j)] = ivScale(cur, coef, prec);
      }
      break;
    }
    case Elem::Pow: {
      Dyadic coef(1);
      for (int j = 0; j <= k; ++j) {
        if (static_cast<unsigned>(j) > power) {
          d[static_cast<size_t>(j)] = Interval();
          continue;
        }
        if (j > 0) coef = coef * Dyadic(static_cast<long>(power) - j + 1);
        Interval p = ivPowInt(x, power - static_cast<unsigned>(j), prec);
        d[static_cast<size_t>(j)] = coef == Dyadic(1) ? p : ivScale(p, coef, prec);
      }
      break;
    }
  }
  return d;
}

// Univariate elementary function on jets via Faa di Bruno over set partitions:
//   f(x)_S = sum over partitions P of S of f^(|P|)(x_0) * prod_{B in P} x_B
class Elementary final : public Tower {
 public:
  Elementary(Elem kind, unsigned power = 0) : Tower(1, 1), kind_(kind), power_(power) {}
  Jet eval(const Jet& x, const EvalContext& c) const override {
    requireDims(x, 1, "elementary");
    const Coeffs& in = x.coord(0);
    int k = x.order();
    std::vector<Interval> d = derivativeSequence(kind_, power_, in[0], k, c.prec);
    Coeffs out(in.size());
    out[0] = d[0];
    if (k > 0) {
      const PartitionTable& table = partitions(k);
      for (uint32_t s = 1; s < in.size(); ++s) {
        Interval acc;
        for (const auto& part : table[s]) {
          bool zero = false;
          for (uint32_t block : part) zero = zero || in[block].isZero();
          if (zero) continue;  // the input does not move along this partition
          Interval term = d[part.size()];
          for (uint32_t block : part) term = ivMul(term, in[block], c.prec);
          acc = ivAdd(acc, term, c.prec);
        }
        out[s] = acc;
      }
    }
    Jet r(k);
    r.push(std::move(out));
    return r;
  }

 private:
  Elem kind_;
  unsigned power_;
};

TowerP fst2() {
  static const TowerP t = coordTower(0, 2);
  return t;
}

TowerP snd2() {
  static const TowerP t = coordTower(1, 2);
  return t;
}

}  // namespace

TowerP constTower(std::vector<Dyadic> c, size_t dom) { return std::make_shared<Const>(std::move(c), dom); }
TowerP constTower(const Dyadic& c, size_t dom) { return constTower(std::vector<Dyadic>{c}, dom); }
TowerP piTower(size_t dom) { return std::make_shared<Pi>(dom); }

TowerP coordTower(size_t i, size_t dom) {
  if (i >= dom) throw std::invalid_argument("coordinate index out of range");
  return linearTower(dom, LinearRows{{{i, Dyadic(1)}}});
}

TowerP linearTower(size_t dom, LinearRows rows) { return std::make_shared<Linear>(dom, std::move(rows)); }

TowerP identityTower(size_t n) { return projectionTower(n, 0, n); }

TowerP projectionTower(size_t dom, size_t from, size_t count) {
  LinearRows rows;
  for (size_t i = 0; i < count; ++i) rows.push_back({{from + i, Dyadic(1)}});
  return linearTower(dom, std::move(rows));
}

TowerP foldDer(size_t dom, size_t cod, ValueFn f0, std::function<TowerP()> fprime) {
  return std::make_shared<FoldDer>(dom, cod, std::move(f0), std::move(fprime));
}

TowerP compose(TowerP g, TowerP f) { return std::make_shared<Compose>(std::move(g), std::move(f)); }

TowerP pairTower(std::vector<TowerP> parts) { return std::make_shared<Pair>(std::move(parts)); }
TowerP pairTower(TowerP a, TowerP b) { return pairTower(std::vector<TowerP>{std::move(a), std::move(b)}); }

TowerP share(TowerP f) {
  if (f->cheap()) return f;
  return std::make_shared<Share>(std::move(f));
}

TowerP derivOp(TowerP f) { return std::make_shared<Tangent>(std::move(f)); }

TowerP weaken(TowerP f, size_t k) {
  size_t d = f->dom();
  return compose(std::move(f), projectionTower(d + k, 0, d));
}

TowerP widen(TowerP f, size_t n) {
  if (f->dom() == n) return f;
  if (f->dom() > n) throw std::invalid_argument("widen: tower already has more inputs");
  return weaken(std::move(f), n - f->dom());
}

TowerP addTower() {
  static const TowerP t = linearTower(2, LinearRows{{{0, Dyadic(1)}, {1, Dyadic(1)}}});
  return t;
}

TowerP subTower() {
  static const TowerP t = linearTower(2, LinearRows{{{0, Dyadic(1)}, {1, Dyadic(-1)}}});
  return t;
}

TowerP negTower() {
  static const TowerP t = linearTower(1, LinearRows{{{0, Dyadic(-1)}}});
  return t;
}

TowerP mulTower() {
  static const TowerP t = std::make_shared<Mul>();
  return t;
}

TowerP recipTower() {
  static const TowerP t = std::make_shared<Elementary>(Elem::Recip);
  return t;
}

TowerP divTower() {
  static const TowerP t = compose(mulTower(), pairTower(fst2(), compose(recipTower(), snd2())));
  return t;
}

TowerP maxTower() {
  static const TowerP t = std::make_shared<MaxMin>(true);
  return t;
}

TowerP minTower() {
  static const TowerP t = std::make_shared<MaxMin>(false);
  return t;
}

TowerP reluTower() {
  static const TowerP t = compose(maxTower(), pairTower(constTower(Dyadic(0), 1), identityTower(1)));
  return t;
}

TowerP sqrtTower() {
  static const TowerP t = std::make_shared<Elementary>(Elem::Sqrt);
  return t;
}

TowerP sinTower() {
  static const TowerP t = std::make_shared<Elementary>(Elem::Sin);
  return t;
}

TowerP cosTower() {
  static const TowerP t = std::make_shared<Elementary>(Elem::Cos);
  return t;
}

TowerP expTower() {
  static const TowerP t = std::make_shared<Elementary>(Elem::Exp);
  return t;
}

TowerP squareTower() {
  static const TowerP t = std::make_shared<Elementary>(Elem::Pow, 2);
  return t;
}

TowerP powTower(unsigned n) {
  if (n == 2) return squareTower();
  return std::make_shared<Elementary>(Elem::Pow, n);
}

namespace folded {

TowerP mul() {
  static const TowerP t = foldDer(
      2, 1,
      [](const IntervalBox& x, const EvalContext& c) { return IntervalBox{ivMul(x[0], x[1], c.prec)}; },
      [] {
        // (x, y, dx, dy) |-> x dy + y dx
        auto x = coordTower(0, 4), y = coordTower(1, 4), dx = coordTower(2, 4), dy = coordTower(3, 4);
        return compose(addTower(), pairTower(compose(folded::mul(), pairTower(x, dy)),
                                             compose(folded::mul(), pairTower(y, dx))));
      });
  return t;
}

TowerP sin() {
  static const TowerP t = foldDer(
      1, 1, [](const IntervalBox& x, const EvalContext& c) { return IntervalBox{ivSin(x[0], c.prec)}; },
      [] { return compose(folded::mul(), pairTower(compose(folded::cos(), fst2()), snd2())); });
  return t;
}

TowerP cos() {
  static const TowerP t = foldDer(
      1, 1, [](const IntervalBox& x, const EvalContext& c) { return IntervalBox{ivCos(x[0], c.prec)}; },
      [] {
        return compose(negTower(), compose(folded::mul(), pairTower(compose(folded::sin(), fst2()), snd2())));
      });
  return t;
}

TowerP exp() {
  static const TowerP t = foldDer(
      1, 1, [](const IntervalBox& x, const EvalContext& c) { return IntervalBox{ivExp(x[0], c.prec)}; },
      [] { return compose(folded::mul(), pairTower(compose(folded::exp(), fst2()), snd2())); });
  return t;
}

}  // namespace folded

TowerP add(TowerP a, TowerP b) { return compose(addTower(), pairTower(std::move(a), std::move(b))); }
TowerP sub(TowerP a, TowerP b) { return compose(subTower(), pairTower(std::move(a), std::move(b))); }
TowerP mul(TowerP a, TowerP b) { return compose(mulTower(), pairTower(std::move(a), std::move(b))); }
TowerP div(TowerP a, TowerP b) { return compose(divTower(), pairTower(std::move(a), std::move(b))); }
TowerP neg(TowerP a) { return compose(negTower(), std::move(a)); }
TowerP maxOf(TowerP a, TowerP b) { return compose(maxTower(), pairTower(std::move(a), std::move(b))); }
TowerP minOf(TowerP a, TowerP b) { return compose(minTower(), pairTower(std::move(a), std::move(b))); }

TowerP scale(const Dyadic& c, TowerP a) {
  return compose(linearTower(1, LinearRows{{{0, c}}}), std::move(a));
}

TowerP applyUnary(TowerP prim, TowerP a) { return compose(std::move(prim), std::move(a)); }

IntervalBox derivK(const Tower& f, const IntervalBox& x, const std::vector<IntervalBox>& dirs, const EvalContext& c) {
  int k = static_cast<int>(dirs.size());
  Jet j(k);
  for (size_t i = 0; i < x.size(); ++i) {
    Coeffs cf(1u << k);
    cf[0] = x[i];
    for (int g = 0; g < k; ++g) cf[1u << g] = dirs[static_cast<size_t>(g)][i];
    j.push(std::move(cf));
  }
  Jet out = f.eval(j, c);
  IntervalBox r;
  for (size_t i = 0; i < out.dims(); ++i) r.push_back(out.at(i, (1u << k) - 1));
  return r;
}

TowerP unrollDerivative(TowerP f, int k) {
  for (int i = 0; i < k; ++i) f = f->derivative();
  return f;
}

IntervalBox packPerturbations(const IntervalBox& x, const std::vector<IntervalBox>& dirs) {
  if (dirs.empty()) return x;
  IntervalBox head = x;
  head.insert(head.end(), dirs[0].begin(), dirs[0].end());
  std::vector<IntervalBox> rest;
  for (size_t j = 1; j < dirs.size(); ++j) {
    IntervalBox v = dirs[j];
    v.resize(2 * x.size());  // (v_j, 0)
    rest.push_back(std::move(v));
  }
  return packPerturbations(head, rest);
}

}  // namespace smoothish
