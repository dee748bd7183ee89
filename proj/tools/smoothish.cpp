// Command-line front end: batch evaluation with --eval, otherwise a REPL.
#include <unistd.h>

#include <chrono>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "smoothish/lang/session.hpp"

using namespace smoothish;
using namespace smoothish::lang;

int main(int argc, char** argv) {
  CLI::App app{"Exact-real differentiable programming REPL"};
  std::string eps = "1e-3";
  Config cfg;
  std::string newton = "on";
  std::vector<std::string> loads;
  std::string query;
  bool noPrelude = false;
  bool trace = false;
  app.add_option("--eps", eps, "Target width of the answer interval");
  app.add_option("--budget", cfg.budget, "Maximum number of refinement steps");
  app.add_option("--timeout", cfg.timeoutSeconds, "Wall-clock limit per query, in seconds");
  app.add_option("--newton", newton, "Interval Newton acceleration for root finding")
      ->check(CLI::IsMember({"on", "off"}));
  app.add_option("--load", loads, "Source file with definitions (repeatable)");
  app.add_option("--eval", query, "Evaluate one expression and exit");
  app.add_flag("--no-prelude", noPrelude, "Start without the standard library");
  app.add_flag("--trace", trace, "Print every refinement step to stderr");
  CLI11_PARSE(app, argc, argv);
  cfg.newton = newton == "on";

  mpq_class epsValue;
  try {
    epsValue = parseRational(eps);
  } catch (const std::exception&) {
    std::cerr << "error: bad --eps value '" << eps << "'\n";
    return 1;
  }
  if (epsValue <= 0) {
    std::cerr << "error: --eps must be positive\n";
    return 1;
  }

  std::unique_ptr<Session> session;
  std::string where = "prelude";
  try {
    session = std::make_unique<Session>(cfg, !noPrelude);
    session->setEps(epsValue);
    if (trace) {
      auto start = std::chrono::steady_clock::now();
      session->setObserver([start](int n, const Interval& v) {
        double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cerr << "step " << n << " " << formatDecimal(v, 8) << " " << t << "s\n";
      });
    }
    for (const auto& path : loads) {
      where = path;
      session->loadFile(path);
    }
  } catch (const LangError& e) {
    std::cerr << where << ": " << describe(e) << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  if (!query.empty()) {
    QueryOutcome out = session->query(query, epsValue);
    std::cout << out.text << "\n";
    switch (out.status) {
      case QueryStatus::Converged:
        return 0;
      case QueryStatus::NonConvergence:
        return 2;
      case QueryStatus::Error:
        return 1;
    }
  }

  const bool interactive = isatty(STDIN_FILENO) != 0;
  std::string line;
  session->handleLine("eps=" + eps + ">");
  while (!session->quitRequested()) {
    if (interactive) std::cout << session->prompt() << std::flush;
    if (!std::getline(std::cin, line)) break;
    std::string out = session->handleLine(line);
    if (!out.empty()) std::cout << out << "\n";
  }
  return 0;
}
