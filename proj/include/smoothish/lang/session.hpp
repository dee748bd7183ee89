#pragma once

#include <string>

#include <gmpxx.h>

#include "smoothish/context.hpp"
#include "smoothish/creal.hpp"
#include "smoothish/lang/check.hpp"
#include "smoothish/lang/eval.hpp"
#include "smoothish/lang/parser.hpp"

namespace smoothish::lang {

enum class QueryStatus { Converged, NonConvergence, Error };

struct QueryOutcome {
  QueryStatus status = QueryStatus::Error;
  std::string text;  // what a REPL prints for this query
  EvalResult result;
};

// Decimal places used to print an answer at tolerance eps.
int printDigits(const mpq_class& eps);

// Named definitions plus evaluation settings.
class Session {
 public:
  explicit Session(Config cfg = {}, bool withPrelude = true);

  Config& config() { return cfg_; }
  const mpq_class& eps() const { return eps_; }
  void setEps(const mpq_class& eps) { eps_ = eps; }

  // Both throw LangError; a failing declaration leaves earlier ones bound.
  void loadSource(const std::string& src);
  void loadFile(const std::string& path);
  void define(const Decl& d);

  // Type checks and elaborates a closed real-valued expression to a tower on R^0.
  TowerP elaborate(const ExprP& e) const;
  QueryOutcome query(const std::string& expr, const mpq_class& eps) const;
  QueryOutcome query(const ExprP& expr, const mpq_class& eps) const;
  // Called after every refinement step of a query.
  void setObserver(StepObserver observe) { observe_ = std::move(observe); }

  // One REPL input: an optional "eps=E>" prefix, then a command, declaration
  // or query. Returns the text to print.
  std::string handleLine(const std::string& line);
  bool quitRequested() const { return quit_; }
  std::string prompt() const;

 private:
  Config cfg_;
  mpq_class eps_{1, 1000};
  std::string epsText_ = "1e-3";
  TypeEnv types_;
  Env values_;
  bool quit_ = false;
  StepObserver observe_;
};

std::string describe(const LangError& e);
// The embedded standard library source.
const std::string& preludeSource();

}  // namespace smoothish::lang
