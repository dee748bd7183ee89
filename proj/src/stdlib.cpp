#include "smoothish/stdlib.hpp"

namespace smoothish {

namespace {

TowerP direction(size_t n, size_t hot) {
  std::vector<Dyadic> v(n);
  v[hot] = Dyadic(1);
  return constTower(std::move(v), n);
}

TowerP partial(TowerP f, size_t n, size_t coord) {
  return compose(derivOp(widen(std::move(f), n)), pairTower(identityTower(n), direction(n, coord)));
}

}  // namespace

TowerP deriv(TowerP f, size_t g) { return partial(std::move(f), g + 1, g); }

std::pair<TowerP, TowerP> gradient2(TowerP f, size_t g) {
  return {partial(f, g + 2, g), partial(f, g + 2, g + 1)};
}

TowerP circleField(TowerP cx, TowerP cy, TowerP r, size_t g) {
  TowerP x = coordTower(g, g + 2), y = coordTower(g + 1, g + 2);
  TowerP dx = compose(squareTower(), sub(x, std::move(cx)));
  TowerP dy = compose(squareTower(), sub(y, std::move(cy)));
  return sub(sub(compose(squareTower(), std::move(r)), dx), dy);
}

}  // namespace smoothish
