#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "smoothish/lang/ast.hpp"
#include "smoothish/tower.hpp"

namespace smoothish::lang {

struct Value;
using ValueP = std::shared_ptr<const Value>;

// Semantic values of the surface language over a context of g real
// coordinates. Reals are towers on (at most) R^g; functions take the context
// size at which they are applied, so values built in a smaller context can be
// used unchanged in a larger one.
struct Value {
  enum class Kind { Real, Tuple, Unit, Bool, Fun };
  Kind kind;
  TowerP tower;                 // Real
  std::vector<ValueP> parts;    // Tuple
  bool truth = false;           // Bool
  std::function<ValueP(size_t g, const ValueP& arg)> fn;  // Fun
  bool userClosure = false;     // Fun defined by a lambda in the source

  static ValueP real(TowerP t);
  static ValueP tuple(std::vector<ValueP> parts);
  static ValueP unit();
  static ValueP boolean(bool b);
  static ValueP fun(std::function<ValueP(size_t, const ValueP&)> fn, bool user = false);
};

ValueP apply(const ValueP& f, const ValueP& arg, size_t g);
// Reals and tuples of reals.
bool isGroundValue(const ValueP& v);
std::vector<TowerP> flatten(const ValueP& v);

// Name -> value, persistent so closures can capture a snapshot cheaply.
class Env {
 public:
  Env() = default;
  Env extend(const std::string& name, ValueP v) const;
  ValueP lookup(const std::string& name) const;  // null when unbound

 private:
  struct Node {
    std::string name;
    ValueP value;
    std::shared_ptr<const Node> next;
  };
  std::shared_ptr<const Node> head_;
};

// Built-in primitives.
std::map<std::string, ValueP> primitiveValues();
std::string primitivePrelude();  // their type signatures, in surface syntax

ValueP evaluate(const ExprP& e, const Env& env, size_t g);
// A literal as a tower on R^0: exact when dyadic, otherwise a quotient.
TowerP literalTower(const mpq_class& q);

}  // namespace smoothish::lang
