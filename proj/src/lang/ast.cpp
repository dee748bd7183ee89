#include "smoothish/lang/ast.hpp"

#include <map>

namespace smoothish::lang {

LangError::LangError(Kind kind, SourcePos pos, const std::string& msg, std::vector<std::string> expected)
    : std::runtime_error(std::to_string(pos.line) + ":" + std::to_string(pos.col) + ": " + msg),
      kind_(kind),
      pos_(pos),
      message_(msg),
      expected_(std::move(expected)) {}

TypeP Type::real() {
  static const TypeP t = std::make_shared<Type>(Type{Kind::Real, {}, ""});
  return t;
}

TypeP Type::unit() {
  static const TypeP t = std::make_shared<Type>(Type{Kind::Unit, {}, ""});
  return t;
}

TypeP Type::boolean() {
  static const TypeP t = std::make_shared<Type>(Type{Kind::Bool, {}, ""});
  return t;
}

TypeP Type::prod(std::vector<TypeP> parts) { return std::make_shared<Type>(Type{Kind::Prod, std::move(parts), ""}); }

TypeP Type::arrow(TypeP from, TypeP to) {
  return std::make_shared<Type>(Type{Kind::Arrow, {std::move(from), std::move(to)}, ""});
}

TypeP Type::named(std::string name, std::vector<TypeP> args) {
  return std::make_shared<Type>(Type{Kind::Named, std::move(args), std::move(name)});
}

bool typeEqual(const TypeP& a, const TypeP& b) {
  if (a->kind != b->kind || a->args.size() != b->args.size() || a->name != b->name) return false;
  for (size_t i = 0; i < a->args.size(); ++i) {
    if (!typeEqual(a->args[i], b->args[i])) return false;
  }
  return true;
}

bool isGround(const TypeP& t) {
  if (t->kind == Type::Kind::Real) return true;
  if (t->kind != Type::Kind::Prod) return false;
  for (const auto& p : t->args) {
    if (!isGround(p)) return false;
  }
  return true;
}

size_t groundDims(const TypeP& t) {
  if (t->kind == Type::Kind::Real) return 1;
  size_t n = 0;
  for (const auto& p : t->args) n += groundDims(p);
  return n;
}

std::string showType(const TypeP& t) {
  switch (t->kind) {
    case Type::Kind::Real:
      return "R";
    case Type::Kind::Unit:
      return "unit";
    case Type::Kind::Bool:
      return "Bool";
    case Type::Kind::Prod: {
      bool allReal = true;
      for (const auto& p : t->args) allReal = allReal && p->kind == Type::Kind::Real;
      if (allReal) return "R^" + std::to_string(t->args.size());
      std::string s = "(";
      for (size_t i = 0; i < t->args.size(); ++i) s += (i ? " * " : "") + showType(t->args[i]);
      return s + ")";
    }
    case Type::Kind::Arrow:
      return "(" + showType(t->args[0]) + " -> " + showType(t->args[1]) + ")";
    case Type::Kind::Named: {
      if (t->args.empty()) return t->name;
      std::string s = "(" + t->name;
      for (const auto& a : t->args) s += " " + showType(a);
      return s + ")";
    }
  }
  return "?";
}

namespace {

ExprP make(Expr::Kind k, SourcePos pos) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->pos = pos;
  return e;
}

}  // namespace

ExprP mkVar(std::string name, SourcePos pos) {
  auto e = make(Expr::Kind::Var, pos);
  e->name = std::move(name);
  return e;
}

ExprP mkNum(const mpq_class& v, std::string text, SourcePos pos) {
  auto e = make(Expr::Kind::Num, pos);
  e->num = v;
  e->text = std::move(text);
  return e;
}

ExprP mkLam(std::string param, TypeP annot, ExprP body, SourcePos pos) {
  auto e = make(Expr::Kind::Lam, pos);
  e->name = std::move(param);
  e->annot = std::move(annot);
  e->kids = {std::move(body)};
  return e;
}

ExprP mkApp(ExprP f, ExprP a, SourcePos pos) {
  auto e = make(Expr::Kind::App, pos);
  e->kids = {std::move(f), std::move(a)};
  return e;
}

ExprP mkLet(std::string name, TypeP annot, ExprP bound, ExprP body, SourcePos pos) {
  auto e = make(Expr::Kind::Let, pos);
  e->name = std::move(name);
  e->annot = std::move(annot);
  e->kids = {std::move(bound), std::move(body)};
  return e;
}

ExprP mkTuple(std::vector<ExprP> parts, SourcePos pos) {
  auto e = make(Expr::Kind::Tuple, pos);
  e->kids = std::move(parts);
  return e;
}

ExprP mkUnit(SourcePos pos) { return make(Expr::Kind::Unit, pos); }

ExprP mkProj(ExprP inner, unsigned i, SourcePos pos) {
  auto e = make(Expr::Kind::Proj, pos);
  e->kids = {std::move(inner)};
  e->index = i;
  return e;
}

ExprP mkBin(char op, ExprP a, ExprP b, SourcePos pos) {
  auto e = make(Expr::Kind::Bin, pos);
  e->op = op;
  e->kids = {std::move(a), std::move(b)};
  return e;
}

ExprP mkNeg(ExprP inner, SourcePos pos) {
  auto e = make(Expr::Kind::Neg, pos);
  e->kids = {std::move(inner)};
  return e;
}

ExprP mkPow(ExprP inner, unsigned n, SourcePos pos) {
  auto e = make(Expr::Kind::Pow, pos);
  e->kids = {std::move(inner)};
  e->index = n;
  return e;
}

namespace {

using Renaming = std::map<std::string, std::string>;

bool alpha(const ExprP& a, const ExprP& b, const Renaming& ab, const Renaming& ba, int& fresh) {
  if (a->kind != b->kind || a->kids.size() != b->kids.size()) return false;
  switch (a->kind) {
    case Expr::Kind::Var: {
      auto ia = ab.find(a->name);
      auto ib = ba.find(b->name);
      if (ia == ab.end() && ib == ba.end()) return a->name == b->name;
      return ia != ab.end() && ib != ba.end() && ia->second == ib->second;
    }
    case Expr::Kind::Num:
      return a->num == b->num;
    case Expr::Kind::Unit:
      return true;
    case Expr::Kind::Proj:
    case Expr::Kind::Pow:
      if (a->index != b->index) return false;
      break;
    case Expr::Kind::Bin:
      if (a->op != b->op) return false;
      break;
    case Expr::Kind::Lam:
    case Expr::Kind::Let: {
      if ((a->annot == nullptr) != (b->annot == nullptr)) return false;
      if (a->annot && !typeEqual(a->annot, b->annot)) return false;
      size_t bodyIdx = a->kind == Expr::Kind::Lam ? 0 : 1;
      if (a->kind == Expr::Kind::Let && !alpha(a->kids[0], b->kids[0], ab, ba, fresh)) return false;
      Renaming ab2 = ab, ba2 = ba;
      std::string tag = "#" + std::to_string(fresh++);
      ab2[a->name] = tag;
      ba2[b->name] = tag;
      return alpha(a->kids[bodyIdx], b->kids[bodyIdx], ab2, ba2, fresh);
    }
    default:
      break;
  }
  for (size_t i = 0; i < a->kids.size(); ++i) {
    if (!alpha(a->kids[i], b->kids[i], ab, ba, fresh)) return false;
  }
  return true;
}

}  // namespace

bool alphaEqual(const ExprP& a, const ExprP& b) {
  int fresh = 0;
  return alpha(a, b, {}, {}, fresh);
}

}  // namespace smoothish::lang
