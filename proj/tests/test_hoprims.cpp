#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "doctest.h"
#include "smoothish/creal.hpp"
#include "smoothish/hoprims.hpp"

using namespace smoothish;

namespace {

Interval iv(double v) { return Interval(Dyadic::fromDouble(v)); }
TowerP lit(double v, size_t dom) { return constTower(Dyadic::fromDouble(v), dom); }

// k-th derivative in the first coordinate of a tower on R^1, refined until width <= eps.
EvalResult refine(const TowerP& f, double at, int k, double eps, Config cfg = {}) {
  CReal x([=](int n, const CancelToken& ct) {
    EvalContext c = EvalContext::at(n, cfg, &ct);
    std::vector<IntervalBox> dirs(static_cast<size_t>(k), IntervalBox{iv(1)});
    return derivK(*f, {iv(at)}, dirs, c)[0];
  });
  CancelToken cancel(cfg.timeoutSeconds);
  return evalToEps(x, mpq_class(eps), cfg.budget, cancel);
}

bool near(const EvalResult& r, double want, double slack = 1e-12) {
  return r.converged && r.value.lo().toDouble() <= want + slack && want - slack <= r.value.hi().toDouble();
}

// coordinates (gamma, y)
TowerP gam() { return coordTower(0, 2); }
TowerP yv() { return coordTower(1, 2); }
TowerP sq(TowerP t) { return applyUnary(squareTower(), std::move(t)); }

// y (1 - y) - (y - gamma)^2, maximized at y = (1 + 2 gamma) / 4
TowerP shifted() { return sub(mul(yv(), sub(lit(1, 2), yv())), sq(sub(yv(), gam()))); }

}  // namespace

TEST_CASE("cutRoot follows the implicit function and its derivative") {
  TowerP h = sub(add(sq(gam()), lit(2, 2)), applyUnary(expTower(), yv()));
  TowerP root = cutRoot(h, 1);
  for (double g : {-1.5, -0.25, 0.0, 0.5, 2.0}) {
    INFO("gamma = " << g);
    CHECK(near(refine(root, g, 0, 1e-9), std::log(g * g + 2)));
    CHECK(near(refine(root, g, 1, 1e-7), 2 * g / (g * g + 2)));
  }
  CHECK(near(refine(root, 0.5, 2, 1e-4), (2 * (2.25) - 4 * 0.25) / (2.25 * 2.25), 1e-9));
}

TEST_CASE("newton acceleration changes cost, not the answer") {
  TowerP h = sub(add(sq(gam()), lit(2, 2)), applyUnary(expTower(), yv()));
  TowerP root = cutRoot(h, 1);
  Config on, off;
  off.newton = false;
  EvalResult a = refine(root, 0.7, 0, 1e-10, on);
  EvalResult b = refine(root, 0.7, 0, 1e-10, off);
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  CHECK(a.value.intersects(b.value));
  CHECK(a.steps <= b.steps);
}

TEST_CASE("firstRoot finds the first crossing and differentiates it") {
  // 1 - gamma^2 - (t - 1)^2 first vanishes at t = 1 - sqrt(1 - gamma^2)
  TowerP h = sub(sub(lit(1, 2), sq(gam())), sq(sub(yv(), lit(1, 2))));
  TowerP t = firstRoot(h, 1);
  const double y = -0.75, s = std::sqrt(1 - y * y);
  CHECK(near(refine(t, y, 0, 1e-8), 1 - s));
  CHECK(near(refine(t, y, 1, 1e-6), y / s));
  CHECK(near(refine(t, y, 2, 1e-2), 1 / (s * s * s), 1e-9));
}

TEST_CASE("argmax and max of a shifted parabola") {
  TowerP f = shifted();
  for (double c : {0.0, 0.1, 0.3}) {
    INFO("c = " << c);
    double xs = (1 + 2 * c) / 4;
    CHECK(near(refine(argmax01(f, 1), c, 0, 1e-6), xs));
    CHECK(near(refine(argmax01(f, 1), c, 1, 1e-3), 0.5));
    CHECK(near(refine(max01(f, 1), c, 0, 1e-8), xs * (1 - xs) - (xs - c) * (xs - c)));
    // envelope: d/dc max = 2 (x* - c)
    CHECK(near(refine(max01(f, 1), c, 1, 1e-4), 2 * (xs - c)));
  }
}

TEST_CASE("branch and bound encloses the sampled maximum") {
  std::mt19937_64 rng(200);
  std::uniform_real_distribution<double> amp(-2, 2), freq(1, 12);
  for (int trial = 0; trial < 20; ++trial) {
    double a = amp(rng), b = freq(rng), c = amp(rng), d = freq(rng);
    TowerP x = coordTower(0, 1);
    TowerP f = add(scale(Dyadic::fromDouble(a), applyUnary(sinTower(), scale(Dyadic::fromDouble(b), x))),
                   scale(Dyadic::fromDouble(c), applyUnary(cosTower(), scale(Dyadic::fromDouble(d), x))));
    double best = -1e300;
    const int samples = 20000;
    for (int i = 0; i <= samples; ++i) {
      double t = static_cast<double>(i) / samples;
      best = std::max(best, a * std::sin(b * t) + c * std::cos(d * t));
    }
    double lipschitz = std::abs(a * b) + std::abs(c * d);
    TowerP m = max01(f, 0);
    for (int n : {0, 2, 5}) {
      Interval e = m->value({}, EvalContext::at(n))[0];
      INFO("trial " << trial << " n " << n);
      CHECK(e.hi().toDouble() >= best - 1e-12);
      CHECK(e.lo().toDouble() <= best + lipschitz / samples);
    }
  }
}

TEST_CASE("integral01 is linear and exact on polynomials") {
  TowerP x = coordTower(0, 1);
  EvalContext c = EvalContext::at(12);
  Interval third = integral01(sq(x), 0)->value({}, c)[0];
  CHECK(third.contains(mpq_class(1, 3)));
  CHECK(third.width()->toDouble() < 1e-3);
  TowerP f = applyUnary(sinTower(), x), g = applyUnary(expTower(), x);
  Interval lhs = integral01(add(scale(Dyadic(3), f), g), 0)->value({}, c)[0];
  Interval rhs = ivAdd(ivScale(integral01(f, 0)->value({}, c)[0], Dyadic(3), 200),
                       integral01(g, 0)->value({}, c)[0], 200);
  CHECK(lhs.intersects(rhs));
  double want = 3 * (1 - std::cos(1.0)) + std::exp(1.0) - 1;
  CHECK(lhs.lo().toDouble() <= want + 1e-12);
  CHECK(want - 1e-12 <= lhs.hi().toDouble());
  // differentiating under the integral: d/dg int_0^1 (g x)^2 dx = 2 g / 3
  TowerP p = sq(mul(gam(), yv()));
  CHECK(near(refine(integral01(p, 1), 1.5, 1, 1e-4), 1.0, 1e-12));
  // enclosures shrink as the refinement index grows
  Interval prev = Interval::bottom();
  for (int n = 0; n < 10; ++n) {
    Interval e = integral01(g, 0)->value({}, EvalContext::at(n))[0];
    CHECK(e.lo().toDouble() <= std::exp(1.0) - 1 + 1e-12);
    CHECK(std::exp(1.0) - 1 - 1e-12 <= e.hi().toDouble());
    if (prev.bounded()) CHECK(e.width()->toDouble() <= prev.width()->toDouble());
    prev = e;
  }
}

TEST_CASE("implicit-function derivatives on closed-form roots") {
  struct Family {
    const char* name;
    TowerP h;
    double (*root)(double);
    double (*slope)(double);
  };
  std::vector<Family> family = {
      {"g^2 - y", sub(sq(gam()), yv()), [](double g) { return g * g; }, [](double g) { return 2 * g; }},
      {"exp g - 3 y", sub(applyUnary(expTower(), gam()), scale(Dyadic(3), yv())),
       [](double g) { return std::exp(g) / 3; }, [](double g) { return std::exp(g) / 3; }},
  };
  for (const auto& f : family) {
    for (double g : {-0.6, 0.1, 0.5, 0.9}) {
      INFO(f.name << " at " << g);
      CHECK(near(refine(cutRoot(f.h, 1), g, 0, 1e-8), f.root(g)));
      CHECK(near(refine(cutRoot(f.h, 1), g, 1, 1e-6), f.slope(g)));
    }
  }
  // firstRoot on [0, 1]: g - sin y first vanishes at asin g
  TowerP t = firstRoot(sub(gam(), applyUnary(sinTower(), yv())), 1);
  for (double g : {0.1, 0.5, 0.8}) {
    CHECK(near(refine(t, g, 0, 1e-8), std::asin(g)));
    CHECK(near(refine(t, g, 1, 1e-6), 1 / std::sqrt(1 - g * g)));
  }
}

TEST_CASE("argmax follows a translated peak") {
  // -(y - g)^2 peaks at y = g
  TowerP f = neg(sq(sub(yv(), gam())));
  for (double g : {0.2, 0.5, 0.7}) {
    CHECK(near(refine(argmax01(f, 1), g, 0, 1e-6), g));
    CHECK(near(refine(argmax01(f, 1), g, 1, 1e-3), 1));
  }
  // a boundary maximum does not move
  CHECK(near(refine(argmax01(f, 1), 1.5, 1, 1e-3), 0));
}
