#include "smoothish/lang/session.hpp"

#include <fstream>
#include <sstream>

#include "prelude_source.hpp"
#include "smoothish/errors.hpp"

namespace smoothish::lang {

int printDigits(const mpq_class& eps) {
  // m = ceil(-log10 eps): the least m with 10^-m <= eps
  int m = 0;
  mpq_class p(1);
  while (p > eps) {
    p /= 10;
    ++m;
  }
  while (p * 10 <= eps) {
    p *= 10;
    --m;
  }
  return std::max(1, m + 1);
}

std::string describe(const LangError& e) {
  std::string kind = e.kind() == LangError::Kind::Parse ? "parse error" : "type error";
  return kind + " at line " + std::to_string(e.pos().line) + ", column " + std::to_string(e.pos().col) + ": " + e.message();
}

const std::string& preludeSource() {
  static const std::string src = kPreludeSource;
  return src;
}

Session::Session(Config cfg, bool withPrelude) : cfg_(cfg) {
  for (const auto& [name, v] : primitiveValues()) values_ = values_.extend(name, v);
  for (const auto& d : parseProgram(primitivePrelude())) types_.globals[d.name] = Scheme{{}, d.type};
  if (withPrelude) loadSource(preludeSource());
}

void Session::define(const Decl& d) {
  checkDecl(types_, d);
  if (d.kind != Decl::Kind::Let) return;
  ExprP body = d.body;
  for (auto it = d.binders.rbegin(); it != d.binders.rend(); ++it) body = mkLam(it->name, it->type, body, d.pos);
  values_ = values_.extend(d.name, evaluate(body, values_, 0));
}

void Session::loadSource(const std::string& src) {
  for (const auto& d : parseProgram(src)) define(d);
}

void Session::loadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  loadSource(ss.str());
}

TowerP Session::elaborate(const ExprP& e) const {
  TypeP t = checkExpr(types_, e);
  if (t->kind != Type::Kind::Real) {
    throw LangError(LangError::Kind::Type, e->pos, "queries must have type R, found " + showType(t));
  }
  ValueP v = evaluate(e, values_, 0);
  return v->tower;
}

QueryOutcome Session::query(const std::string& expr, const mpq_class& eps) const {
  try {
    return query(parseExpr(expr), eps);
  } catch (const LangError& e) {
    QueryOutcome out;
    out.text = describe(e);
    return out;
  }
}

QueryOutcome Session::query(const ExprP& expr, const mpq_class& eps) const {
  QueryOutcome out;
  TowerP tower;
  try {
    tower = elaborate(expr);
  } catch (const LangError& e) {
    out.text = describe(e);
    return out;
  }
  Config cfg = cfg_;
  CancelToken cancel(cfg.timeoutSeconds);
  CReal x([tower, cfg](int n, const CancelToken& ct) {
    EvalContext c = EvalContext::at(n, cfg, &ct);
    return tower->value({}, c)[0];
  });
  out.result = evalToEps(x, eps, cfg.budget, cancel, observe_);
  out.text = formatDecimal(out.result.value, printDigits(eps));
  if (out.result.converged) {
    out.status = QueryStatus::Converged;
  } else {
    out.status = QueryStatus::NonConvergence;
    int last = out.result.steps - 1;
    out.text += "\nNonConvergence: ";
    out.text += out.result.timedOut ? "wall-clock limit reached" : "refinement budget exhausted";
    out.text += " after " + std::to_string(out.result.steps) + " refinement(s)";
    if (last >= 0) out.text += "; tightest enclosure above";
  }
  return out;
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::string Session::prompt() const { return "eps=" + epsText_ + "> "; }

std::string Session::handleLine(const std::string& raw) {
  std::string line = trim(raw);
  mpq_class eps = eps_;
  if (line.rfind("eps=", 0) == 0) {
    size_t gt = line.find('>');
    if (gt == std::string::npos) return "error: expected 'eps=<value>>'";
    std::string text = trim(line.substr(4, gt - 4));
    try {
      eps = parseRational(text);
    } catch (const std::exception&) {
      return "error: bad tolerance '" + text + "'";
    }
    if (eps <= 0) return "error: tolerance must be positive";
    line = trim(line.substr(gt + 1));
    if (line.empty()) {
      eps_ = eps;
      epsText_ = text;
      return "";
    }
  }
  if (line.empty()) return "";
  if (line[0] == ':') {
    std::istringstream in(line.substr(1));
    std::string cmd, arg, value;
    in >> cmd >> arg >> value;
    try {
      if (cmd == "quit" || cmd == "q") {
        quit_ = true;
        return "";
      }
      if (cmd == "load") {
        loadFile(trim(line.substr(5)));
        return "loaded " + trim(line.substr(5));
      }
      if (cmd == "set") {
        if (arg == "newton" && (value == "on" || value == "off")) {
          cfg_.newton = value == "on";
        } else if (arg == "budget" && !value.empty()) {
          cfg_.budget = std::stoi(value);
        } else if (arg == "timeout" && !value.empty()) {
          cfg_.timeoutSeconds = std::stod(value);
        } else {
          return "usage: :set newton on|off | :set budget <n> | :set timeout <seconds>";
        }
        return "";
      }
    } catch (const LangError& e) {
      return describe(e);
    } catch (const std::exception& e) {
      return std::string("error: ") + e.what();
    }
    return "unknown command ':" + cmd + "'";
  }
  try {
    Line parsed = parseLine(line);
    if (auto* d = std::get_if<Decl>(&parsed)) {
      define(*d);
      return "";
    }
    return query(std::get<ExprP>(parsed), eps).text;
  } catch (const LangError& e) {
    return describe(e);
  }
}

}  // namespace smoothish::lang
