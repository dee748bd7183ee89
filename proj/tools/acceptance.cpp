// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance               run every criterion
//   acceptance --only 3      run one criterion
//   acceptance --transcript  print the raw answers only (used for criterion 13)
#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "smoothish/lang/session.hpp"

using namespace smoothish;
using namespace smoothish::lang;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

Session& session() {
  static Session s;
  return s;
}

mpq_class q(const char* text) { return parseRational(text); }

struct Answer {
  QueryOutcome out;
  double seconds;
};

std::ostringstream transcript;

Answer ask(const std::string& expr, const mpq_class& eps) {
  auto start = std::chrono::steady_clock::now();
  QueryOutcome out = session().query(expr, eps);
  double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  transcript << expr << " @ " << eps.get_str() << "\n" << out.text << "\n";
  return {out, t};
}

bool narrow(const Answer& a, const mpq_class& eps) {
  return a.out.status == QueryStatus::Converged && a.out.result.value.bounded() &&
         a.out.result.value.width()->toMpq() <= eps;
}

bool meets(const Answer& a, const char* lo, const char* hi) {
  Interval target = ivHull(ivRational(q(lo), 200), ivRational(q(hi), 200));
  return a.out.result.value.intersects(target);
}

std::string show(const Answer& a) {
  std::string text = a.out.text.substr(0, a.out.text.find('\n'));
  std::ostringstream s;
  s.precision(3);
  s << text << " in " << a.seconds << "s";
  return s.str();
}

Verdict relu() {
  Verdict v;
  Answer a = ask("deriv (\\c : R => integral01 (\\x : R => relu (x - c))) 0.6", q("1e-2"));
  v.require(narrow(a, q("1e-2")), "width");
  v.require(a.out.result.value.contains(q("-2/5")), "contains -0.4");
  v.require(meets(a, "-0.407", "-0.398"), "intersects [-0.407, -0.398]");
  v.require(a.seconds <= 30, "runtime");
  v.detail = show(a) + (v.detail.empty() ? "" : " (" + v.detail + ")");
  return v;
}

Verdict clarke() {
  Verdict v;
  const Interval unit(Dyadic(0), Dyadic(1));
  Answer loose = ask("deriv relu 0", q("2"));
  v.require(loose.out.status == QueryStatus::Converged && loose.out.result.value == unit, "eps=2 gives [0,1]");
  Answer tight = ask("deriv relu 0", q("1e-1"));
  v.require(tight.out.status == QueryStatus::NonConvergence, "eps=1e-1 reports NonConvergence");
  v.require(tight.out.result.value == unit, "tightest enclosure [0,1]");
  v.detail = show(loose) + " / " + show(tight);
  return v;
}

Verdict sqrtSquared() {
  Verdict v;
  Answer a = ask("(sqrt 2)^2", q("1e-12"));
  for (const auto& step : a.out.result.trace) v.require(step.contains(Dyadic(2)), "every step contains 2");
  v.require(narrow(a, q("1e-12")), "width 1e-12");
  v.require(a.seconds <= 5, "runtime");
  v.detail = show(a);
  return v;
}

Verdict rayValue() {
  Verdict v;
  Answer a = ask("raytrace (circle (1, -3/4) 1) (1, 1) (1, 0)", q("1e-5"));
  v.require(narrow(a, q("1e-5")), "width");
  v.require(meets(a, "2.587289", "2.587299"), "intersects [2.587289, 2.587299]");
  v.require(a.seconds <= 120, "runtime");
  v.detail = show(a) + (v.detail.empty() ? "" : " (" + v.detail + ")");
  return v;
}

Verdict rayDerivative() {
  Verdict v;
  Answer a = ask("deriv (\\y : R => raytrace (circle (0, y) 1) (1, 1) (1, 0)) (-3/4)", q("1e-3"));
  v.require(narrow(a, q("1e-3")), "width");
  v.require(meets(a, "1.3477", "1.3484"), "intersects [1.3477, 1.3484]");
  v.require(a.seconds <= 300, "runtime");
  v.detail = show(a) + (v.detail.empty() ? "" : " (" + v.detail + ")");
  return v;
}

Verdict brightness() {
  Verdict v;
  Answer a = ask("deriv brightness (1/2)", q("1e-3"));
  v.require(narrow(a, q("1e-3")), "width");
  v.require(meets(a, "-0.4476", "-0.4469"), "intersects [-0.4476, -0.4469]");
  v.detail = show(a) + (v.detail.empty() ? "" : " (" + v.detail + ")");
  return v;
}

Verdict measures() {
  Verdict v;
  Answer m = ask("der mean uniform change", q("1e-3"));
  v.require(narrow(m, q("1e-3")) && m.out.result.value.contains(q("1/12")), "mean: contains 1/12");
  Answer s = ask("der variance uniform change", q("1e-2"));
  v.require(narrow(s, q("1e-2")) && s.out.result.value.contains(Dyadic(0)), "variance: contains 0");
  v.detail = show(m) + " / " + show(s);
  return v;
}

// lo <= sqrt 2 - 1 <= hi, decided exactly.
bool containsSqrt2Minus1(const Interval& iv) {
  if (!iv.bounded()) return false;
  mpq_class lo = iv.lo().toMpq() + 1, hi = iv.hi().toMpq() + 1;
  return (lo <= 0 || lo * lo <= 2) && hi >= 0 && hi * hi >= 2;
}

Verdict hausdorff() {
  Verdict v;
  Answer d = ask("hausdorffDist R2Dist lShape (quarterCircle 0)", q("1e-3"));
  v.require(narrow(d, q("1e-3")), "value width");
  v.require(containsSqrt2Minus1(d.out.result.value), "value contains sqrt 2 - 1");
  Answer dd = ask("deriv (\\y : R => hausdorffDist R2Dist lShape (quarterCircle y)) 0", q("1e-1"));
  v.require(narrow(dd, q("1e-1")), "derivative width");
  v.require(meets(dd, "-0.752", "-0.664"), "derivative intersects [-0.752, -0.664]");
  v.require(d.seconds + dd.seconds <= 600, "runtime");
  v.detail = show(d) + " / " + show(dd);
  return v;
}

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& cmd) {
  Run r{-1, ""};
  FILE* p = popen((cmd + " 2>&1").c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::function<Verdict()> suite(const std::string& binary, const std::string& cases) {
  return [binary, cases] {
    Verdict v;
    Run r = run(std::string(SMOOTHISH_TEST_DIR) + "/" + binary + " --no-version --test-case='" + cases + "'");
    std::string summary;
    std::istringstream lines(r.out);
    for (std::string line; std::getline(lines, line);) {
      if (line.find("assertions:") != std::string::npos) summary = line.substr(line.find("assertions:"));
    }
    transcript << binary << " " << cases << "\n" << summary << "\n";
    v.require(r.code == 0, "suite failed");
    v.detail = binary + ": " + (summary.empty() ? "no summary" : summary);
    return v;
  };
}

Verdict determinism(const std::string& self) {
  Verdict v;
  Run a = run(self + " --transcript");
  Run b = run(self + " --transcript");
  v.require(a.code == 0 && b.code == 0, "transcript runs");
  v.require(!a.out.empty() && a.out == b.out, "byte-identical");
  v.detail = std::to_string(a.out.size()) + " bytes, two runs " + (a.out == b.out ? "identical" : "differ");
  return v;
}

struct Criterion {
  int id;
  const char* title;
  std::function<Verdict()> check;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  int only = 0;
  bool transcriptOnly = false;
  app.add_option("--only", only, "Run a single criterion");
  app.add_flag("--transcript", transcriptOnly, "Print answers of criteria 1-12 without timings");
  CLI11_PARSE(app, argc, argv);

  std::vector<Criterion> all = {
      {1, "relu integral derivative", relu},
      {2, "Clarke hull of relu at 0", clarke},
      {3, "(sqrt 2)^2 to 1e-12", sqrtSquared},
      {4, "ray tracer value", rayValue},
      {5, "ray tracer derivative", rayDerivative},
      {6, "line-light brightness derivative", brightness},
      {7, "measure derivatives", measures},
      {8, "Hausdorff distance and derivative", hausdorff},
      {9, "interval soundness", suite("test_exactnum", "interval arithmetic soundness*")},
      {10, "Faa di Bruno", suite("test_tower", "polynomial compositions*")},
      {11, "finite differences", suite("test_tower", "first derivatives agree*")},
      {12, "implicit-function derivatives",
       suite("test_hoprims", "cutRoot follows*,firstRoot finds*,implicit-function*,argmax follows*")},
      {13, "determinism", [&] { return determinism(argv[0]); }},
  };

  if (transcriptOnly) {
    for (auto& c : all) {
      if (c.id != 13) c.check();
    }
    std::cout << transcript.str();
    return 0;
  }

  int failed = 0;
  for (auto& c : all) {
    if (only && c.id != only) continue;
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = e.what();
    }
    if (!v.pass) ++failed;
    std::cout << (v.pass ? "PASS" : "FAIL") << " " << c.id << " " << c.title << ": " << v.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
