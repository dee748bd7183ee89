#include "smoothish/lang/check.hpp"

#include <set>

namespace smoothish::lang {

namespace {

bool isMeta(const TypeP& t) { return t->kind == Type::Kind::Named && !t->name.empty() && t->name[0] == '?'; }

class Checker {
 public:
  Checker(const TypeEnv& env, std::set<std::string> rigid) : env_(env), rigid_(std::move(rigid)) {}

  TypeP fresh() {
    metas_.push_back(nullptr);
    return Type::named("?" + std::to_string(metas_.size() - 1), {});
  }

  // Rejects unknown type names and wrong alias arities.
  void validate(const TypeP& t, SourcePos pos) const {
    if (t->kind == Type::Kind::Named && !isMeta(t)) {
      if (rigid_.count(t->name) != 0) {
        if (!t->args.empty()) throw LangError(LangError::Kind::Type, pos, "type variable '" + t->name + "' takes no arguments");
      } else {
        auto it = env_.aliases.find(t->name);
        if (it == env_.aliases.end()) throw LangError(LangError::Kind::Type, pos, "unknown type '" + t->name + "'");
        if (it->second.params.size() != t->args.size()) {
          throw LangError(LangError::Kind::Type, pos,
                          "type '" + t->name + "' expects " + std::to_string(it->second.params.size()) + " argument(s)");
        }
      }
    }
    for (const auto& a : t->args) validate(a, pos);
  }

  // Follows meta bindings and expands an alias at the head.
  TypeP head(TypeP t) const {
    while (true) {
      if (isMeta(t)) {
        const TypeP& b = metas_[std::stoul(t->name.substr(1))];
        if (!b) return t;
        t = b;
        continue;
      }
      if (t->kind == Type::Kind::Named && rigid_.count(t->name) == 0) {
        auto it = env_.aliases.find(t->name);
        if (it != env_.aliases.end()) {
          std::map<std::string, TypeP> sub;
          for (size_t i = 0; i < it->second.params.size(); ++i) sub[it->second.params[i]] = t->args[i];
          t = substitute(it->second.body, sub);
          continue;
        }
      }
      return t;
    }
  }

  TypeP zonk(const TypeP& t) const {
    TypeP h = head(t);
    if (h->args.empty()) return h;
    std::vector<TypeP> args;
    for (const auto& a : h->args) args.push_back(zonk(a));
    return std::make_shared<Type>(Type{h->kind, std::move(args), h->name});
  }

  bool hasMeta(const TypeP& t) const {
    TypeP z = zonk(t);
    if (isMeta(z)) return true;
    for (const auto& a : z->args) {
      if (hasMeta(a)) return true;
    }
    return false;
  }

  std::string show(const TypeP& t) const {
    TypeP z = zonk(t);
    return isMeta(z) ? "_" : showType(z);
  }

  void unify(const TypeP& expected, const TypeP& found, SourcePos pos) {
    if (!unifies(expected, found)) {
      throw LangError(LangError::Kind::Type, pos, "type mismatch: expected " + show(expected) + ", found " + show(found));
    }
  }

  TypeP instantiate(const Scheme& s) {
    if (s.params.empty()) return s.type;
    std::map<std::string, TypeP> sub;
    for (const auto& p : s.params) sub[p] = fresh();
    return substitute(s.type, sub);
  }

  void bind(const std::string& name, TypeP t) { locals_.emplace_back(name, std::move(t)); }
  void unbind() { locals_.pop_back(); }

  TypeP infer(const ExprP& e) {
    switch (e->kind) {
      case Expr::Kind::Var: {
        for (auto it = locals_.rbegin(); it != locals_.rend(); ++it) {
          if (it->first == e->name) return it->second;
        }
        auto g = env_.globals.find(e->name);
        if (g == env_.globals.end()) throw LangError(LangError::Kind::Type, e->pos, "unbound name '" + e->name + "'");
        return instantiate(g->second);
      }
      case Expr::Kind::Num:
        return Type::real();
      case Expr::Kind::Unit:
        return Type::unit();
      case Expr::Kind::Lam: {
        if (!e->annot) {
          throw LangError(LangError::Kind::Type, e->pos,
                          "cannot infer the type of parameter '" + e->name + "'; annotate it");
        }
        validate(e->annot, e->pos);
        bind(e->name, e->annot);
        TypeP body = infer(e->kids[0]);
        unbind();
        return Type::arrow(e->annot, body);
      }
      case Expr::Kind::App: {
        TypeP f = head(infer(e->kids[0]));
        if (f->kind == Type::Kind::Arrow) {
          check(e->kids[1], f->args[0]);
          return f->args[1];
        }
        if (isMeta(f)) {
          TypeP r = fresh();
          unify(f, Type::arrow(infer(e->kids[1]), r), e->pos);
          return r;
        }
        throw LangError(LangError::Kind::Type, e->kids[0]->pos, "applying a value of non-function type " + show(f));
      }
      case Expr::Kind::Let: {
        TypeP t = letBound(e);
        bind(e->name, t);
        TypeP body = infer(e->kids[1]);
        unbind();
        return body;
      }
      case Expr::Kind::Tuple: {
        std::vector<TypeP> parts;
        for (const auto& k : e->kids) parts.push_back(infer(k));
        return Type::prod(parts);
      }
      case Expr::Kind::Proj: {
        TypeP t = head(infer(e->kids[0]));
        if (t->kind != Type::Kind::Prod) {
          throw LangError(LangError::Kind::Type, e->pos, "projection from non-tuple type " + show(t));
        }
        if (e->index >= t->args.size()) {
          throw LangError(LangError::Kind::Type, e->pos,
                          "index " + std::to_string(e->index) + " out of range for " + show(t));
        }
        return t->args[e->index];
      }
      case Expr::Kind::Bin: {
        if (e->op == '*' || e->op == '/') {
          check(e->kids[0], Type::real());
          check(e->kids[1], Type::real());
          return Type::real();
        }
        TypeP t = infer(e->kids[0]);
        check(e->kids[1], t);
        numeric(t, e->pos);
        return t;
      }
      case Expr::Kind::Neg: {
        TypeP t = infer(e->kids[0]);
        numeric(t, e->pos);
        return t;
      }
      case Expr::Kind::Pow:
        check(e->kids[0], Type::real());
        return Type::real();
    }
    throw LangError(LangError::Kind::Type, e->pos, "unsupported expression");
  }

  void check(const ExprP& e, const TypeP& expected) {
    TypeP h = head(expected);
    switch (e->kind) {
      case Expr::Kind::Lam: {
        if (h->kind == Type::Kind::Arrow) {
          if (e->annot) {
            validate(e->annot, e->pos);
            unify(h->args[0], e->annot, e->pos);
          }
          bind(e->name, h->args[0]);
          check(e->kids[0], h->args[1]);
          unbind();
          return;
        }
        if (!e->annot) {
          throw LangError(LangError::Kind::Type, e->pos,
                          "cannot infer the type of parameter '" + e->name + "'; annotate it");
        }
        break;
      }
      case Expr::Kind::Let: {
        TypeP t = letBound(e);
        bind(e->name, t);
        check(e->kids[1], expected);
        unbind();
        return;
      }
      case Expr::Kind::Tuple:
        if (h->kind == Type::Kind::Prod && h->args.size() == e->kids.size()) {
          for (size_t i = 0; i < e->kids.size(); ++i) check(e->kids[i], h->args[i]);
          return;
        }
        break;
      case Expr::Kind::Bin:
        if (e->op == '+' || e->op == '-') {
          check(e->kids[0], expected);
          check(e->kids[1], expected);
          numeric(expected, e->pos);
          return;
        }
        break;
      case Expr::Kind::Neg:
        check(e->kids[0], expected);
        numeric(expected, e->pos);
        return;
      default:
        break;
    }
    unify(expected, infer(e), e->pos);
  }

 private:
  TypeP letBound(const ExprP& e) {
    if (e->annot) {
      validate(e->annot, e->pos);
      check(e->kids[0], e->annot);
      return e->annot;
    }
    return infer(e->kids[0]);
  }

  // + and - work on reals and componentwise on tuples of them.
  void numeric(const TypeP& t, SourcePos pos) {
    TypeP h = head(t);
    if (isMeta(h)) {
      unify(h, Type::real(), pos);
      return;
    }
    if (h->kind == Type::Kind::Real) return;
    if (h->kind == Type::Kind::Prod) {
      for (const auto& a : h->args) numeric(a, pos);
      return;
    }
    throw LangError(LangError::Kind::Type, pos, "arithmetic on non-numeric type " + show(h));
  }

  static TypeP substitute(const TypeP& t, const std::map<std::string, TypeP>& sub) {
    if (t->kind == Type::Kind::Named && t->args.empty()) {
      auto it = sub.find(t->name);
      if (it != sub.end()) return it->second;
    }
    if (t->args.empty()) return t;
    std::vector<TypeP> args;
    for (const auto& a : t->args) args.push_back(substitute(a, sub));
    return std::make_shared<Type>(Type{t->kind, std::move(args), t->name});
  }

  bool occurs(const std::string& meta, const TypeP& t) const {
    TypeP h = head(t);
    if (isMeta(h)) return h->name == meta;
    for (const auto& a : h->args) {
      if (occurs(meta, a)) return true;
    }
    return false;
  }

  bool unifies(const TypeP& a0, const TypeP& b0) {
    TypeP a = head(a0), b = head(b0);
    if (isMeta(a) && isMeta(b) && a->name == b->name) return true;
    if (isMeta(a) || isMeta(b)) {
      const TypeP& m = isMeta(a) ? a : b;
      const TypeP& other = isMeta(a) ? b : a;
      if (occurs(m->name, other)) return false;
      metas_[std::stoul(m->name.substr(1))] = other;
      return true;
    }
    if (a->kind != b->kind || a->args.size() != b->args.size()) return false;
    if (a->kind == Type::Kind::Named && a->name != b->name) return false;
    for (size_t i = 0; i < a->args.size(); ++i) {
      if (!unifies(a->args[i], b->args[i])) return false;
    }
    return true;
  }

  const TypeEnv& env_;
  std::set<std::string> rigid_;
  std::vector<TypeP> metas_;
  std::vector<std::pair<std::string, TypeP>> locals_;
};

}  // namespace

TypeP expandAliases(const TypeEnv& env, const TypeP& t) {
  Checker c(env, {});
  return c.zonk(t);
}

void checkDecl(TypeEnv& env, const Decl& d) {
  std::set<std::string> params(d.typeParams.begin(), d.typeParams.end());
  Checker c(env, params);
  switch (d.kind) {
    case Decl::Kind::TypeAlias:
      c.validate(d.type, d.pos);
      env.aliases[d.name] = Alias{d.typeParams, d.type};
      return;
    case Decl::Kind::Signature: {
      c.validate(d.type, d.pos);
      auto g = env.globals.find(d.name);
      if (g == env.globals.end()) {
        env.signatures[d.name] = d.type;
        return;
      }
      Checker gc(env, std::set<std::string>(g->second.params.begin(), g->second.params.end()));
      if (!typeEqual(gc.zonk(g->second.type), c.zonk(d.type))) {
        throw LangError(LangError::Kind::Type, d.pos,
                        "signature of '" + d.name + "' disagrees with its definition of type " + showType(gc.zonk(g->second.type)));
      }
      return;
    }
    case Decl::Kind::Let:
      break;
  }
  std::vector<TypeP> binderTypes;
  for (const auto& b : d.binders) {
    if (b.type) c.validate(b.type, d.pos);
    binderTypes.push_back(b.type ? b.type : c.fresh());
    c.bind(b.name, binderTypes.back());
  }
  TypeP result;
  if (d.type) {
    c.validate(d.type, d.pos);
    c.check(d.body, d.type);
    result = d.type;
  } else {
    result = c.infer(d.body);
  }
  TypeP full = result;
  for (auto it = binderTypes.rbegin(); it != binderTypes.rend(); ++it) full = Type::arrow(*it, full);
  if (c.hasMeta(full)) throw LangError(LangError::Kind::Type, d.pos, "cannot infer the type of '" + d.name + "'; annotate it");
  full = c.zonk(full);
  auto sig = env.signatures.find(d.name);
  if (sig != env.signatures.end()) {
    if (!typeEqual(full, c.zonk(sig->second))) {
      throw LangError(LangError::Kind::Type, d.pos, "definition of '" + d.name + "' disagrees with its signature");
    }
    env.signatures.erase(sig);
  }
  env.globals[d.name] = Scheme{d.typeParams, full};
}

TypeP checkExpr(const TypeEnv& env, const ExprP& e) {
  Checker c(env, {});
  TypeP t = c.infer(e);
  if (c.hasMeta(t)) throw LangError(LangError::Kind::Type, e->pos, "cannot infer the type of the expression");
  return c.zonk(t);
}

}  // namespace smoothish::lang
