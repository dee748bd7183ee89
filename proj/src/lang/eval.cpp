#include "smoothish/lang/eval.hpp"

#include <optional>
#include <stdexcept>

#include "smoothish/hoprims.hpp"
#include "smoothish/stdlib.hpp"

namespace smoothish::lang {

ValueP Value::real(TowerP t) {
  auto v = std::make_shared<Value>();
  v->kind = Kind::Real;
  v->tower = std::move(t);
  return v;
}

ValueP Value::tuple(std::vector<ValueP> parts) {
  auto v = std::make_shared<Value>();
  v->kind = Kind::Tuple;
  v->parts = std::move(parts);
  return v;
}

ValueP Value::unit() {
  static const ValueP u = [] {
    auto v = std::make_shared<Value>();
    v->kind = Kind::Unit;
    return v;
  }();
  return u;
}

ValueP Value::boolean(bool b) {
  auto v = std::make_shared<Value>();
  v->kind = Kind::Bool;
  v->truth = b;
  return v;
}

ValueP Value::fun(std::function<ValueP(size_t, const ValueP&)> fn, bool user) {
  auto v = std::make_shared<Value>();
  v->kind = Kind::Fun;
  v->fn = std::move(fn);
  v->userClosure = user;
  return v;
}

ValueP apply(const ValueP& f, const ValueP& arg, size_t g) {
  if (f->kind != Value::Kind::Fun) throw std::logic_error("applying a non-function value");
  return f->fn(g, arg);
}

bool isGroundValue(const ValueP& v) {
  if (v->kind == Value::Kind::Real) return true;
  if (v->kind != Value::Kind::Tuple) return false;
  for (const auto& p : v->parts) {
    if (!isGroundValue(p)) return false;
  }
  return true;
}

std::vector<TowerP> flatten(const ValueP& v) {
  if (v->kind == Value::Kind::Real) return {v->tower};
  std::vector<TowerP> out;
  for (const auto& p : v->parts) {
    auto sub = flatten(p);
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

Env Env::extend(const std::string& name, ValueP v) const {
  Env e;
  e.head_ = std::make_shared<const Node>(Node{name, std::move(v), head_});
  return e;
}

ValueP Env::lookup(const std::string& name) const {
  for (const Node* n = head_.get(); n; n = n->next.get()) {
    if (n->name == name) return n->value;
  }
  return nullptr;
}

TowerP literalTower(const mpq_class& q) {
  const mpz_class& den = q.get_den();
  size_t shift = mpz_scan1(den.get_mpz_t(), 0);
  if (mpz_sizeinbase(den.get_mpz_t(), 2) == shift + 1) {
    return constTower(Dyadic(q.get_num(), -static_cast<long>(shift)), 0);
  }
  return div(constTower(Dyadic(q.get_num(), 0), 0), constTower(Dyadic(den, 0), 0));
}

namespace {

// Ground values get an evaluation cache, since substitution may reference
// them many times.
ValueP shared(const ValueP& v) {
  switch (v->kind) {
    case Value::Kind::Real:
      return v->tower->cheap() ? v : Value::real(share(v->tower));
    case Value::Kind::Tuple: {
      std::vector<ValueP> parts;
      for (const auto& p : v->parts) parts.push_back(shared(p));
      return Value::tuple(std::move(parts));
    }
    default:
      return v;
  }
}

const TowerP& realOf(const ValueP& v) {
  if (v->kind != Value::Kind::Real) throw std::logic_error("expected a real value");
  return v->tower;
}

ValueP unary(TowerP prim) {
  return Value::fun([prim](size_t, const ValueP& x) { return Value::real(applyUnary(prim, realOf(x))); });
}

ValueP binary(TowerP (*op)(TowerP, TowerP)) {
  return Value::fun([op](size_t, const ValueP& x) {
    return Value::fun([op, x](size_t, const ValueP& y) { return Value::real(op(realOf(x), realOf(y))); });
  });
}

// The body of a real function at context size g + 1, its argument being the
// last coordinate.
TowerP bound(const ValueP& f, size_t g) {
  ValueP body = apply(f, Value::real(coordTower(g, g + 1)), g + 1);
  return widen(realOf(body), g + 1);
}

ValueP secondOrder(TowerP (*prim)(TowerP, size_t)) {
  return Value::fun([prim](size_t g, const ValueP& f) { return Value::real(share(prim(bound(f, g), g))); });
}

ValueP derivValue() {
  return Value::fun([](size_t, const ValueP& f) {
    return Value::fun([f](size_t g, const ValueP& x) {
      TowerP d = deriv(bound(f, g), g);
      return Value::real(compose(d, pairTower(identityTower(g), realOf(x))));
    });
  });
}

ValueP arith(char op, const ValueP& a, const ValueP& b) {
  if (a->kind == Value::Kind::Tuple) {
    std::vector<ValueP> parts;
    for (size_t i = 0; i < a->parts.size(); ++i) parts.push_back(arith(op, a->parts[i], b->parts[i]));
    return Value::tuple(std::move(parts));
  }
  const TowerP& x = realOf(a);
  const TowerP& y = realOf(b);
  switch (op) {
    case '+':
      return Value::real(add(x, y));
    case '-':
      return Value::real(sub(x, y));
    case '*':
      return Value::real(mul(x, y));
    default:
      return Value::real(div(x, y));
  }
}

ValueP negate(const ValueP& a) {
  if (a->kind == Value::Kind::Tuple) {
    std::vector<ValueP> parts;
    for (const auto& p : a->parts) parts.push_back(negate(p));
    return Value::tuple(std::move(parts));
  }
  return Value::real(neg(realOf(a)));
}

// Literals, their negations and quotients, such as -3/4.
std::optional<mpq_class> literalValue(const ExprP& e) {
  switch (e->kind) {
    case Expr::Kind::Num:
      return e->num;
    case Expr::Kind::Neg:
      if (auto a = literalValue(e->kids[0])) return mpq_class(-*a);
      return std::nullopt;
    case Expr::Kind::Bin:
      if (e->op == '/') {
        auto a = literalValue(e->kids[0]);
        auto b = literalValue(e->kids[1]);
        if (a && b && *b != 0) return mpq_class(*a / *b);
      }
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

}  // namespace

std::map<std::string, ValueP> primitiveValues() {
  std::map<std::string, ValueP> p;
  p["deriv"] = derivValue();
  p["integral01"] = secondOrder(&integral01);
  p["cutRoot"] = secondOrder(&cutRoot);
  p["firstRoot"] = secondOrder(&firstRoot);
  p["max01"] = secondOrder(&max01);
  p["argmax01"] = secondOrder(&argmax01);
  p["max"] = binary(&maxOf);
  p["min"] = binary(&minOf);
  p["relu"] = unary(reluTower());
  p["sqrt"] = unary(sqrtTower());
  p["sin"] = unary(sinTower());
  p["cos"] = unary(cosTower());
  p["exp"] = unary(expTower());
  p["pi"] = Value::real(piTower(0));
  p["tt"] = Value::boolean(true);
  p["ff"] = Value::boolean(false);
  return p;
}

std::string primitivePrelude() {
  return "deriv : (R -> R) -> R -> R\n"
         "integral01 : (R -> R) -> R\n"
         "cutRoot : (R -> R) -> R\n"
         "firstRoot : (R -> R) -> R\n"
         "max01 : (R -> R) -> R\n"
         "argmax01 : (R -> R) -> R\n"
         "max : R -> R -> R\n"
         "min : R -> R -> R\n"
         "relu : R -> R\n"
         "sqrt : R -> R\n"
         "sin : R -> R\n"
         "cos : R -> R\n"
         "exp : R -> R\n"
         "pi : R\n"
         "tt : Bool\n"
         "ff : Bool\n";
}

ValueP evaluate(const ExprP& e, const Env& env, size_t g) {
  switch (e->kind) {
    case Expr::Kind::Var: {
      ValueP v = env.lookup(e->name);
      if (!v) throw std::logic_error("unbound name at evaluation: " + e->name);
      return v;
    }
    case Expr::Kind::Num:
      return Value::real(literalTower(e->num));
    case Expr::Kind::Lam: {
      ExprP lam = e;
      return Value::fun(
          [lam, env](size_t g2, const ValueP& arg) { return evaluate(lam->kids[0], env.extend(lam->name, shared(arg)), g2); },
          true);
    }
    case Expr::Kind::App:
      return apply(evaluate(e->kids[0], env, g), evaluate(e->kids[1], env, g), g);
    case Expr::Kind::Let:
      return evaluate(e->kids[1], env.extend(e->name, shared(evaluate(e->kids[0], env, g))), g);
    case Expr::Kind::Tuple: {
      std::vector<ValueP> parts;
      for (const auto& k : e->kids) parts.push_back(evaluate(k, env, g));
      return Value::tuple(std::move(parts));
    }
    case Expr::Kind::Unit:
      return Value::unit();
    case Expr::Kind::Proj: {
      ValueP t = evaluate(e->kids[0], env, g);
      if (t->kind != Value::Kind::Tuple || e->index >= t->parts.size()) throw std::logic_error("bad projection");
      return t->parts[e->index];
    }
    case Expr::Kind::Bin: {
      if (auto q = literalValue(e)) return Value::real(literalTower(*q));
      return arith(e->op, evaluate(e->kids[0], env, g), evaluate(e->kids[1], env, g));
    }
    case Expr::Kind::Neg: {
      if (auto q = literalValue(e)) return Value::real(literalTower(*q));
      return negate(evaluate(e->kids[0], env, g));
    }
    case Expr::Kind::Pow: {
      ValueP x = evaluate(e->kids[0], env, g);
      if (e->index == 0) return Value::real(constTower(Dyadic(1), 0));
      if (e->index == 1) return x;
      return Value::real(applyUnary(powTower(e->index), realOf(x)));
    }
  }
  throw std::logic_error("unsupported expression");
}

}  // namespace smoothish::lang
