#pragma once

#include <string>
#include <variant>
#include <vector>

#include "smoothish/lang/ast.hpp"

namespace smoothish::lang {

// A source file: declarations, each starting in column 1. Continuation lines
// must be indented.
std::vector<Decl> parseProgram(const std::string& src);

// One REPL/batch line: a declaration or an expression to evaluate.
using Line = std::variant<Decl, ExprP>;
Line parseLine(const std::string& src);

ExprP parseExpr(const std::string& src);
TypeP parseType(const std::string& src);

// Parse a decimal literal such as "0.6", "1e-2", "3" or "3/4" exactly.
mpq_class parseRational(const std::string& text);

std::string pretty(const ExprP& e);
std::string pretty(const Decl& d);

}  // namespace smoothish::lang
