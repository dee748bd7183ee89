#pragma once

#include <map>
#include <string>
#include <vector>

#include "smoothish/lang/ast.hpp"

namespace smoothish::lang {

struct Scheme {
  std::vector<std::string> params;  // quantified type variables
  TypeP type;
};

struct Alias {
  std::vector<std::string> params;
  TypeP body;
};

// Type-level environment of a session. Top-level definitions may be
// polymorphic in their declared type parameters; uses instantiate them.
struct TypeEnv {
  std::map<std::string, Alias> aliases;
  std::map<std::string, Scheme> globals;
  std::map<std::string, TypeP> signatures;  // declared ahead of their definition
};

// Checks a declaration and records it in env. Throws LangError on failure.
void checkDecl(TypeEnv& env, const Decl& d);
// The type of a closed expression.
TypeP checkExpr(const TypeEnv& env, const ExprP& e);
// Aliases fully expanded.
TypeP expandAliases(const TypeEnv& env, const TypeP& t);

}  // namespace smoothish::lang
