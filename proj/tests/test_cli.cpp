#include <array>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"
#include "smoothish/lang/session.hpp"

using namespace smoothish;
using namespace smoothish::lang;

namespace {

struct Run {
  int code;
  std::string out;
};

// Runs the command-line tool with the given arguments, capturing stdout.
Run runTool(const std::string& args, const std::string& input = "") {
  std::string cmd = std::string(SMOOTHISH_BIN) + " " + args + " 2>/dev/null";
  if (!input.empty()) cmd = "printf '" + input + "' | " + cmd;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  std::array<char, 4096> buf{};
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  int status = pclose(p);
  return {WEXITSTATUS(status), out};
}

std::string quoted(const std::string& s) { return "'" + s + "'"; }

ExprP randomExpr(std::mt19937_64& rng, int depth, std::vector<std::string>& scope) {
  SourcePos at;
  int pick = depth <= 0 ? static_cast<int>(rng() % 2) : static_cast<int>(rng() % 9);
  switch (pick) {
    case 0: {
      long v = static_cast<long>(rng() % 50);
      return mkNum(mpq_class(v), std::to_string(v), at);
    }
    case 1:
      if (scope.empty()) return mkNum(mpq_class(1, 4), "1/4", at);
      return mkVar(scope[rng() % scope.size()], at);
    case 2: {
      std::string x = "v" + std::to_string(rng() % 4);
      scope.push_back(x);
      ExprP body = randomExpr(rng, depth - 1, scope);
      scope.pop_back();
      return mkLam(x, Type::real(), body, at);
    }
    case 3:
      return mkApp(randomExpr(rng, depth - 1, scope), randomExpr(rng, depth - 1, scope), at);
    case 4: {
      const char ops[] = {'+', '-', '*', '/'};
      return mkBin(ops[rng() % 4], randomExpr(rng, depth - 1, scope), randomExpr(rng, depth - 1, scope), at);
    }
    case 5:
      return mkNeg(randomExpr(rng, depth - 1, scope), at);
    case 6:
      return mkPow(randomExpr(rng, depth - 1, scope), 2 + static_cast<unsigned>(rng() % 3), at);
    case 7:
      return mkProj(mkTuple({randomExpr(rng, depth - 1, scope), randomExpr(rng, depth - 1, scope)}, at),
                    static_cast<unsigned>(rng() % 2), at);
    default: {
      std::string x = "w" + std::to_string(rng() % 3);
      ExprP bound = randomExpr(rng, depth - 1, scope);
      scope.push_back(x);
      ExprP body = randomExpr(rng, depth - 1, scope);
      scope.pop_back();
      return mkLet(x, Type::real(), bound, body, at);
    }
  }
}

}  // namespace

TEST_CASE("the standard library parses and round-trips through the printer") {
  std::vector<Decl> decls = parseProgram(preludeSource());
  CHECK(decls.size() > 40);
  int lets = 0;
  for (const auto& d : decls) {
    if (d.kind != Decl::Kind::Let) continue;
    ++lets;
    std::vector<Decl> again = parseProgram(pretty(d));
    REQUIRE(again.size() == 1);
    INFO(pretty(d));
    CHECK(again[0].name == d.name);
    CHECK(alphaEqual(again[0].body, d.body));
  }
  CHECK(lets > 30);
}

TEST_CASE("printed expressions parse back to alpha-equivalent terms") {
  std::mt19937_64 rng(300);
  for (int i = 0; i < 2000; ++i) {
    std::vector<std::string> scope{"x"};
    ExprP e = randomExpr(rng, 5, scope);
    INFO(pretty(e));
    CHECK(alphaEqual(parseExpr(pretty(e)), e));
  }
  CHECK(alphaEqual(parseExpr("\\a : R => a + 1"), parseExpr("λ b : ℝ ⇒ b + 1")));
  CHECK_FALSE(alphaEqual(parseExpr("\\a : R => a"), parseExpr("\\a : R => b")));
}

TEST_CASE("unicode and ascii spellings agree") {
  CHECK(alphaEqual(parseExpr("λ x : ℝ × ℝ ⇒ x[0]² − x[1]"), parseExpr("\\x : R * R => x[0]^2 - x[1]")));
  CHECK(showType(parseType("ℝ → ℝ²")) == showType(parseType("R -> R^2")));
  CHECK(parseRational("1e-2") == mpq_class(1, 100));
  CHECK(parseRational("0.6") == mpq_class(3, 5));
  CHECK(parseRational("3/4") == mpq_class(3, 4));
}

TEST_CASE("errors report their position") {
  auto parseAt = [](const std::string& src) {
    try {
      parseExpr(src);
    } catch (const LangError& e) {
      CHECK(e.kind() == LangError::Kind::Parse);
      return e.pos();
    }
    FAIL("expected a parse error in " << src);
    return SourcePos{};
  };
  SourcePos p = parseAt("1 + (2 *");
  CHECK(p.line == 1);
  CHECK(p.col == 9);
  p = parseAt("\\x : => x");
  CHECK(p.col == 6);
  p = parseAt("let y : R = 1");
  CHECK(p.col == 14);
  Session s;
  auto typeAt = [&](const std::string& src) {
    try {
      s.elaborate(parseExpr(src));
    } catch (const LangError& e) {
      CHECK(e.kind() == LangError::Kind::Type);
      return e.pos();
    }
    FAIL("expected a type error in " << src);
    return SourcePos{};
  };
  CHECK(typeAt("sin (1, 2)").col == 5);
  CHECK(typeAt("1 + nope").col == 5);
  CHECK(describe(LangError(LangError::Kind::Type, {3, 7}, "boom")) == "type error at line 3, column 7: boom");
}

TEST_CASE("sessions handle declarations, settings and queries") {
  Session s;
  CHECK(s.prompt() == "eps=1e-3> ");
  CHECK(s.handleLine("let sq (x : R) : R = x * x") == "");
  CHECK(s.handleLine("sq 3") == "[9.0000, 9.0000]");
  // a prefixed query uses its own tolerance; a bare prefix changes the default
  CHECK(s.handleLine("eps=1e-1> sq 1.5") == "[2.25, 2.25]");
  CHECK(s.prompt() == "eps=1e-3> ");
  CHECK(s.handleLine("eps=1e-1>") == "");
  CHECK(s.prompt() == "eps=1e-1> ");
  CHECK(s.handleLine("eps=2> deriv relu 0") == "[0.0, 1.0]");
  CHECK(s.handleLine(":set budget 5") == "");
  CHECK(s.handleLine(":set budget").rfind("usage", 0) == 0);
  std::string nc = s.handleLine("eps=1e-1> deriv relu 0");
  CHECK(nc.rfind("[0.00, 1.00]\nNonConvergence: refinement budget exhausted after 6 refinement(s)", 0) == 0);
  CHECK(s.handleLine("sq").find("type error") == 0);
  CHECK(s.handleLine("let bad : R = sq sq").find("type error") == 0);
  CHECK(s.handleLine("sq 2") == "[4.00, 4.00]");
  CHECK_FALSE(s.quitRequested());
  s.handleLine(":quit");
  CHECK(s.quitRequested());
}

TEST_CASE("polymorphic library functions instantiate per use") {
  Session s;
  CHECK(s.query("total_mass (dirac (1, 2))", mpq_class(1, 1000)).status == QueryStatus::Converged);
  QueryOutcome two = s.query("total_mass (dirac 0.5) + total_mass (bernoulli 0.2)", mpq_class(1, 1000));
  CHECK(two.status == QueryStatus::Converged);
  CHECK(two.result.value.contains(Dyadic(2)));
  CHECK(s.query("sup (point (1, 2)) (\\p : R^2 => p[1])", mpq_class(1, 1000)).text == "[2.0000, 2.0000]");
}

TEST_CASE("the command-line tool reports through exit codes") {
  Run ok = runTool("--eps 1e-12 --eval " + quoted("(sqrt 2)^2"));
  CHECK(ok.code == 0);
  CHECK(ok.out == "[1.9999999999999, 2.0000000000001]\n");
  Run nc = runTool("--eps 1e-1 --eval " + quoted("deriv relu 0"));
  CHECK(nc.code == 2);
  CHECK(nc.out.rfind("[0.00, 1.00]\nNonConvergence", 0) == 0);
  CHECK(runTool("--eval " + quoted("\\x =>")).code == 1);
  CHECK(runTool("--eval " + quoted("sin sin")).code == 1);
  CHECK(runTool("--no-prelude --eval " + quoted("mean uniform")).code == 1);
  Run repl = runTool("", "let f (x : R) : R = 3 * x\\nf 2\\neps=1e-1> f 0.5\\n:quit\\nf 1\\n");
  CHECK(repl.code == 0);
  CHECK(repl.out == "[6.0000, 6.0000]\n[1.50, 1.50]\n");
}

TEST_CASE("loading files") {
  std::string path = std::string(SMOOTHISH_TMP) + "/cli_load.sm";
  {
    std::ofstream f(path);
    f << "-- helpers\nlet twice (f : R -> R) (x : R) : R =\n  f (f x)\n";
  }
  Run r = runTool("--load " + path + " --eval " + quoted("twice (\\y : R => y + 1) 1"));
  CHECK(r.code == 0);
  CHECK(r.out == "[3.0000, 3.0000]\n");
  {
    std::ofstream f(path);
    f << "let broken : R =\n  (1 +\n";
  }
  CHECK(runTool("--load " + path + " --eval 1").code == 1);
}

TEST_CASE("answers are deterministic") {
  std::string q = "--eps 1e-6 --eval " + quoted("deriv (\\c : R => max01 (\\x : R => x * (1 - x) - (x - c)^2)) 0.1");
  Run a = runTool(q), b = runTool(q);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
}
