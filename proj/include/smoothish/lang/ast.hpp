#pragma once

#include <gmpxx.h>

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace smoothish::lang {

struct SourcePos {
  int line = 1;
  int col = 1;
};

class LangError : public std::runtime_error {
 public:
  enum class Kind { Parse, Type };
  LangError(Kind kind, SourcePos pos, const std::string& msg, std::vector<std::string> expected = {});
  Kind kind() const { return kind_; }
  SourcePos pos() const { return pos_; }
  const std::vector<std::string>& expected() const { return expected_; }
  const std::string& message() const { return message_; }

 private:
  Kind kind_;
  SourcePos pos_;
  std::string message_;
  std::vector<std::string> expected_;
};

struct Type;
using TypeP = std::shared_ptr<const Type>;

struct Type {
  enum class Kind { Real, Unit, Bool, Prod, Arrow, Named };
  Kind kind;
  std::vector<TypeP> args;  // Prod components, Arrow {from, to}, Named arguments
  std::string name;         // Named: alias or type parameter

  static TypeP real();
  static TypeP unit();
  static TypeP boolean();
  static TypeP prod(std::vector<TypeP> parts);
  static TypeP arrow(TypeP from, TypeP to);
  static TypeP named(std::string name, std::vector<TypeP> args);
};

bool typeEqual(const TypeP& a, const TypeP& b);
// Only reals and tuples of reals: values that are towers.
bool isGround(const TypeP& t);
size_t groundDims(const TypeP& t);
std::string showType(const TypeP& t);

struct Expr;
using ExprP = std::shared_ptr<Expr>;

struct Expr {
  enum class Kind { Var, Num, Lam, App, Let, Tuple, Unit, Proj, Bin, Neg, Pow };
  Kind kind;
  SourcePos pos;
  std::string name;            // Var, Lam/Let binder
  mpq_class num;               // Num
  std::string text;            // Num spelling
  TypeP annot;                 // Lam/Let binder annotation (optional)
  std::vector<ExprP> kids;     // App {f, a}; Let {bound, body}; Tuple; Proj/Neg/Pow {e}; Bin {a, b}; Lam {body}
  char op = 0;                 // Bin: + - * /
  unsigned index = 0;          // Proj index, Pow exponent
};

ExprP mkVar(std::string name, SourcePos pos = {});
ExprP mkNum(const mpq_class& v, std::string text, SourcePos pos = {});
ExprP mkLam(std::string param, TypeP annot, ExprP body, SourcePos pos = {});
ExprP mkApp(ExprP f, ExprP a, SourcePos pos = {});
ExprP mkLet(std::string name, TypeP annot, ExprP bound, ExprP body, SourcePos pos = {});
ExprP mkTuple(std::vector<ExprP> parts, SourcePos pos = {});
ExprP mkUnit(SourcePos pos = {});
ExprP mkProj(ExprP e, unsigned i, SourcePos pos = {});
ExprP mkBin(char op, ExprP a, ExprP b, SourcePos pos = {});
ExprP mkNeg(ExprP e, SourcePos pos = {});
ExprP mkPow(ExprP e, unsigned n, SourcePos pos = {});

struct Binder {
  std::string name;
  TypeP type;  // null when unannotated
};

struct Decl {
  enum class Kind { Let, TypeAlias, Signature };
  Kind kind;
  SourcePos pos;
  std::string name;
  std::vector<std::string> typeParams;
  std::vector<Binder> binders;  // Let
  TypeP type;                   // Let result annotation, alias body, or signature
  ExprP body;                   // Let
};

// Alpha-equivalence of expressions (binder names may differ).
bool alphaEqual(const ExprP& a, const ExprP& b);

}  // namespace smoothish::lang
