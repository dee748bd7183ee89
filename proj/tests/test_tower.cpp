#include <cmath>
#include <functional>
#include <random>
#include <string>

#include "doctest.h"
#include "smoothish/tower.hpp"

using namespace smoothish;

namespace {

const EvalContext ctx = EvalContext::at(4);

Interval iv(double v) { return Interval(Dyadic::fromDouble(v)); }

// Polynomials with rational coefficients, lowest degree first.
using Poly = std::vector<mpq_class>;

Poly polyMul(const Poly& a, const Poly& b) {
  Poly r(a.size() + b.size() - 1, mpq_class(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

Poly polyCompose(const Poly& q, const Poly& p) {
  Poly r{q.back()};
  for (size_t i = q.size() - 1; i-- > 0;) {
    r = polyMul(r, p);
    r[0] += q[i];
  }
  return r;
}

Poly polyDeriv(const Poly& p) {
  if (p.size() == 1) return {mpq_class(0)};
  Poly r;
  for (size_t i = 1; i < p.size(); ++i) r.push_back(p[i] * static_cast<long>(i));
  return r;
}

mpq_class polyEval(const Poly& p, const mpq_class& x) {
  mpq_class r = 0;
  for (size_t i = p.size(); i-- > 0;) r = r * x + p[i];
  return r;
}

// Horner form over the first coordinate of R^dom.
TowerP polyTower(const Poly& p, size_t dom = 1) {
  auto lit = [dom](const mpq_class& c) { return constTower(Dyadic(c.get_num(), 0), dom); };
  TowerP x = coordTower(0, dom);
  TowerP t = lit(p.back());
  for (size_t i = p.size() - 1; i-- > 0;) t = add(mul(t, x), lit(p[i]));
  return t;
}

Poly randomPoly(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> deg(1, 3), coef(-4, 4);
  Poly p;
  int d = deg(rng);
  for (int i = 0; i <= d; ++i) p.push_back(coef(rng));
  if (p.back() == 0) p.back() = 1;
  return p;
}

Interval kth(const Tower& f, const Interval& x, int k) {
  std::vector<IntervalBox> dirs(static_cast<size_t>(k), IntervalBox{iv(1)});
  return derivK(f, {x}, dirs, ctx)[0];
}

double mid(const Interval& a) { return a.midpoint().toDouble(); }
double width(const Interval& a) { return a.width()->toDouble(); }

struct Smooth {
  std::string name;
  TowerP tower;
  std::function<double(double)> f;
  double lo, hi;
};

std::vector<Smooth> smoothCases() {
  TowerP x = coordTower(0, 1);
  return {
      {"sin", sinTower(), [](double v) { return std::sin(v); }, -4, 4},
      {"cos", cosTower(), [](double v) { return std::cos(v); }, -4, 4},
      {"exp", expTower(), [](double v) { return std::exp(v); }, -3, 3},
      {"sqrt", sqrtTower(), [](double v) { return std::sqrt(v); }, 0.1, 4},
      {"recip", recipTower(), [](double v) { return 1 / v; }, 0.2, 3},
      {"square", squareTower(), [](double v) { return v * v; }, -3, 3},
      {"cube", powTower(3), [](double v) { return v * v * v; }, -2, 2},
      {"relu off zero", reluTower(), [](double v) { return v > 0 ? v : 0; }, 0.05, 2},
      {"sin(exp x) * sqrt x", mul(applyUnary(sinTower(), applyUnary(expTower(), x)), applyUnary(sqrtTower(), x)),
       [](double v) { return std::sin(std::exp(v)) * std::sqrt(v); }, 0.1, 1.5},
      {"x / (1 + x^2)", div(x, add(constTower(Dyadic(1), 1), applyUnary(squareTower(), x))),
       [](double v) { return v / (1 + v * v); }, -3, 3},
      {"cos(x)^2 + sin(x)^2", add(applyUnary(squareTower(), applyUnary(cosTower(), x)),
                                  applyUnary(squareTower(), applyUnary(sinTower(), x))),
       [](double v) { return std::cos(v) * std::cos(v) + std::sin(v) * std::sin(v); }, -3, 3},
      {"max(x^2, 2 - x) off ties", maxOf(applyUnary(squareTower(), x), sub(constTower(Dyadic(2), 1), x)),
       [](double v) { return std::max(v * v, 2 - v); }, 1.2, 3},
  };
}

}  // namespace

TEST_CASE("polynomial compositions match the symbolic chain rule to order 4") {
  std::mt19937_64 rng(100);
  int violations = 0, checks = 0;
  for (int pair = 0; pair < 12; ++pair) {
    Poly p = randomPoly(rng), q = randomPoly(rng);
    TowerP t = compose(polyTower(q), polyTower(p));
    Poly qp = polyCompose(q, p);
    for (int i = 0; i < 20; ++i) {
      mpq_class x(static_cast<long>(rng() % 257) - 128, 64);
      x.canonicalize();
      Poly d = qp;
      for (int k = 0; k <= 4; ++k) {
        Interval got = kth(*t, Interval(Dyadic(mpz_class(x * 64), -6)), k);
        ++checks;
        if (!got.contains(polyEval(d, x))) ++violations;
        d = polyDeriv(d);
      }
    }
  }
  CHECK(checks == 12 * 20 * 5);
  CHECK(violations == 0);
}

TEST_CASE("powers compose like products") {
  std::mt19937_64 rng(101);
  for (int pair = 0; pair < 10; ++pair) {
    Poly p = randomPoly(rng);
    for (unsigned n : {2u, 3u, 5u}) {
      TowerP t = compose(powTower(n), polyTower(p));
      Poly pn{1};
      for (unsigned j = 0; j < n; ++j) pn = polyMul(pn, p);
      for (int i = 0; i < 20; ++i) {
        mpq_class x(static_cast<long>(rng() % 129) - 64, 32);
        x.canonicalize();
        Poly d = pn;
        for (int k = 0; k <= 4; ++k) {
          CHECK(kth(*t, Interval(Dyadic(mpz_class(x * 32), -5)), k).contains(polyEval(d, x)));
          d = polyDeriv(d);
        }
      }
    }
  }
}

TEST_CASE("first derivatives agree with central differences") {
  std::mt19937_64 rng(102);
  for (const auto& c : smoothCases()) {
    INFO(c.name);
    std::uniform_real_distribution<double> pick(c.lo, c.hi);
    int bad = 0;
    for (int i = 0; i < 100; ++i) {
      double x = pick(rng);
      const double h = 1e-5;
      double fd = (c.f(x + h) - c.f(x - h)) / (2 * h);
      Interval d = kth(*c.tower, iv(x), 1);
      if (!d.bounded() || std::abs(mid(d) - fd) > 1e-6 + width(d)) ++bad;
      Interval v = kth(*c.tower, iv(x), 0);
      if (std::abs(mid(v) - c.f(x)) > 1e-12 * (1 + std::abs(c.f(x))) + width(v)) ++bad;
    }
    CHECK(bad == 0);
  }
}

TEST_CASE("higher derivatives are symmetric and multilinear") {
  // f(x, y) = sin(x) exp(y) + x^2 y
  TowerP x = coordTower(0, 2), y = coordTower(1, 2);
  TowerP f = add(mul(applyUnary(sinTower(), x), applyUnary(expTower(), y)), mul(applyUnary(squareTower(), x), y));
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> pick(-2, 2);
  for (int i = 0; i < 50; ++i) {
    IntervalBox at{iv(pick(rng)), iv(pick(rng))};
    IntervalBox u{iv(pick(rng)), iv(pick(rng))}, v{iv(pick(rng)), iv(pick(rng))};
    IntervalBox u2{ivScale(u[0], Dyadic(2), 200), ivScale(u[1], Dyadic(2), 200)};
    IntervalBox uv{ivAdd(u[0], v[0], 200), ivAdd(u[1], v[1], 200)};
    Interval duv = derivK(*f, at, {u, v}, ctx)[0];
    Interval dvu = derivK(*f, at, {v, u}, ctx)[0];
    CHECK(duv.intersects(dvu));
    CHECK(derivK(*f, at, {u2, v}, ctx)[0].intersects(ivScale(duv, Dyadic(2), 200)));
    // additivity in the first direction
    Interval sum = ivAdd(derivK(*f, at, {u, v}, ctx)[0], derivK(*f, at, {v, v}, ctx)[0], 200);
    CHECK(derivK(*f, at, {uv, v}, ctx)[0].intersects(sum));
  }
}

TEST_CASE("category laws") {
  TowerP x = coordTower(0, 2), y = coordTower(1, 2);
  TowerP f = pairTower(mul(x, y), applyUnary(sinTower(), x));  // R^2 -> R^2
  TowerP g = add(applyUnary(expTower(), coordTower(0, 2)), coordTower(1, 2));  // R^2 -> R
  TowerP h = applyUnary(cosTower(), coordTower(0, 1));
  IntervalBox at{iv(0.3), iv(-1.2)};
  std::vector<IntervalBox> dirs{{iv(1), iv(0.5)}, {iv(-0.25), iv(2)}};
  auto same = [&](const TowerP& a, const TowerP& b) {
    for (size_t k = 0; k <= 2; ++k) {
      std::vector<IntervalBox> d(dirs.begin(), dirs.begin() + static_cast<long>(k));
      IntervalBox ra = derivK(*a, at, d, ctx), rb = derivK(*b, at, d, ctx);
      REQUIRE(ra.size() == rb.size());
      for (size_t i = 0; i < ra.size(); ++i) CHECK(ra[i].intersects(rb[i]));
    }
  };
  same(compose(identityTower(2), f), f);
  same(compose(f, identityTower(2)), f);
  same(compose(h, compose(g, f)), compose(compose(h, g), f));
  same(compose(projectionTower(2, 0, 1), f), mul(x, y));
  same(compose(projectionTower(2, 1, 1), f), applyUnary(sinTower(), x));
  same(share(compose(g, f)), compose(g, f));
  // weakening ignores the extra input
  same(weaken(applyUnary(sinTower(), coordTower(0, 1)), 1), applyUnary(sinTower(), x));
}

TEST_CASE("nonsmooth primitives give Clarke hulls") {
  TowerP x = coordTower(0, 1);
  TowerP zero = constTower(Dyadic(0), 1);
  CHECK(kth(*reluTower(), iv(0), 1) == Interval(Dyadic(0), Dyadic(1)));
  CHECK(kth(*reluTower(), iv(0.5), 1) == Interval(Dyadic(1)));
  CHECK(kth(*reluTower(), iv(-0.5), 1) == Interval(Dyadic(0)));
  CHECK(kth(*maxOf(x, neg(x)), iv(0), 1) == Interval(Dyadic(-1), Dyadic(1)));
  // max(x, 0) + min(0, x) = x: the hull still contains the true slope
  TowerP ident = add(maxOf(x, zero), minOf(zero, x));
  CHECK(kth(*ident, iv(0), 1).contains(Dyadic(1)));
  CHECK(kth(*ident, iv(0.25), 1) == Interval(Dyadic(1)));
  // second derivative at the kink carries no information
  CHECK(kth(*reluTower(), iv(0), 2).isBottom());
  CHECK(kth(*reluTower(), iv(1), 2) == Interval(Dyadic(0)));
  // a tie of two equal branches keeps the common slope
  CHECK(kth(*maxOf(x, x), iv(0.5), 1) == Interval(Dyadic(1)));
}

TEST_CASE("jet evaluation agrees with the foldDer definitions") {
  std::mt19937_64 rng(104);
  std::uniform_real_distribution<double> pick(-3, 3);
  std::vector<std::pair<TowerP, TowerP>> routes = {
      {sinTower(), folded::sin()}, {cosTower(), folded::cos()}, {expTower(), folded::exp()}};
  for (int i = 0; i < 30; ++i) {
    Interval x = iv(pick(rng));
    for (auto& [jet, fold] : routes) {
      for (int k = 0; k <= 3; ++k) CHECK(kth(*jet, x, k).intersects(kth(*fold, x, k)));
    }
    IntervalBox xy{x, iv(pick(rng))};
    std::vector<IntervalBox> dirs{{iv(1), iv(0.5)}, {iv(0.25), iv(-1)}};
    CHECK(derivK(*mulTower(), xy, dirs, ctx)[0].intersects(derivK(*folded::mul(), xy, dirs, ctx)[0]));
  }
}

TEST_CASE("derivative unrolling matches packed perturbations") {
  TowerP x = coordTower(0, 2), y = coordTower(1, 2);
  TowerP f = mul(applyUnary(sinTower(), x), applyUnary(expTower(), mul(x, y)));
  IntervalBox at{iv(0.7), iv(-0.4)};
  std::vector<IntervalBox> dirs{{iv(1), iv(0)}, {iv(0.5), iv(2)}, {iv(-1), iv(1)}};
  for (int k = 1; k <= 3; ++k) {
    std::vector<IntervalBox> d(dirs.begin(), dirs.begin() + k);
    Interval viaJet = derivK(*f, at, d, ctx)[0];
    TowerP unrolled = unrollDerivative(f, k);
    CHECK(unrolled->dom() == (size_t{2} << k));
    Interval viaUnroll = unrolled->value(packPerturbations(at, d), ctx)[0];
    CHECK(viaJet.intersects(viaUnroll));
  }
}

TEST_CASE("constants, pi and linear maps") {
  CHECK(kth(*constTower(Dyadic(3), 1), iv(2), 0) == Interval(Dyadic(3)));
  CHECK(kth(*constTower(Dyadic(3), 1), iv(2), 1) == Interval(Dyadic(0)));
  Interval pi = piTower(0)->value({}, ctx)[0];
  CHECK(pi.contains(Dyadic::fromDouble(3.141592653589793)) == false);  // double pi is below the true value
  CHECK(pi.subsetOf(Interval(Dyadic::fromDouble(3.14159265358979), Dyadic::fromDouble(3.1415926535898))));
  TowerP lin = linearTower(2, LinearRows{{{0, Dyadic(2)}, {1, Dyadic(-3)}}});
  CHECK(derivK(*lin, {iv(1), iv(1)}, {{iv(1), iv(1)}}, ctx)[0] == Interval(Dyadic(-1)));
  CHECK(derivK(*lin, {iv(1), iv(1)}, {{iv(1), iv(1)}, {iv(1), iv(1)}}, ctx)[0] == Interval(Dyadic(0)));
}
