// Command-line front end: reduce, srewrite, check and graph.
#include <CLI11.hpp>
#include <iostream>
#include <sstream>

#include "smc/ltl.hpp"
#include "smc/model_graph.hpp"
#include "smc/parser.hpp"

using namespace smc;

namespace {

struct Options {
  std::string file, module, term, strategy, formula;
  std::vector<std::string> opaque;
  bool unbiased = false, depthFirst = false, pruneFailed = false;
  size_t stateLimit = 5000000;
  std::string format = "dot";
};

ModelConfig modelConfig(const Options& o) {
  ModelConfig c;
  c.opaque.insert(o.opaque.begin(), o.opaque.end());
  c.biased = !o.unbiased;
  c.stateCeiling = o.stateLimit;
  return c;
}

std::string result(const Module& m, const Term& t) {
  return "result " + sortName(*m.sig, t.sort()) + ": " + toString(t);
}

int cmdReduce(const Options& o) {
  SpecFile f = loadFile(o.file);
  auto m = f.module(o.module);
  std::cout << result(*m, parseTerm(o.term, *m, true)) << "\n";
  return 0;
}

int cmdSRewrite(const Options& o) {
  SpecFile f = loadFile(o.file);
  auto m = f.module(o.module);
  Term t = parseTerm(o.term, *m, true);
  StratPtr a = parseStrategyExpr(o.strategy, *m);
  EngineOptions eo;
  eo.searchCeiling = o.stateLimit;
  Engine e(*m, eo);
  std::vector<Term> sols = e.srewrite(t, a, o.depthFirst);
  if (sols.empty()) {
    std::cout << "No solution.\n";
    return 0;
  }
  for (size_t i = 0; i < sols.size(); ++i)
    std::cout << "Solution " << i + 1 << "\n" << result(*m, sols[i]) << "\n\n";
  std::cout << "No more solutions.\n";
  return 0;
}

int cmdCheck(const Options& o) {
  SpecFile f = loadFile(o.file);
  auto m = f.module(o.module);
  Term t = parseTerm(o.term, *m, true);
  FormulaPtr phi = parseFormula(o.formula, *m);
  std::unique_ptr<KripkeStructure> g;
  if (o.strategy.empty())
    g = std::make_unique<RewriteGraph>(*m, t, o.stateLimit);
  else
    g = std::make_unique<ModelGraph>(*m, t, parseStrategyExpr(o.strategy, *m), modelConfig(o));
  CheckResult r = modelCheck(*g, phi);
  if (r.holds) {
    std::cout << "The property is satisfied (" << r.states << " system states)\n";
    return 0;
  }
  Validation v = validateCounterexample(*r.counterexample, phi, *g);
  if (!v.ok) {
    std::cerr << "error: invalid counterexample at step " << v.index << " (" << v.failed
              << "): " << v.message << "\n";
    return 2;
  }
  std::cout << "The property is not satisfied (" << r.states << " system states)\n"
            << toString(*r.counterexample) << "\n";
  return 1;
}

int cmdGraph(const Options& o) {
  SpecFile f = loadFile(o.file);
  auto m = f.module(o.module);
  Term t = parseTerm(o.term, *m, true);
  std::unique_ptr<KripkeStructure> g;
  if (o.strategy.empty())
    g = std::make_unique<RewriteGraph>(*m, t, o.stateLimit);
  else
    g = std::make_unique<ModelGraph>(*m, t, parseStrategyExpr(o.strategy, *m), modelConfig(o));
  g->expandAll();
  std::vector<bool> keep;
  if (o.pruneFailed) keep = pruneFailed(*g);
  const std::vector<bool>* k = o.pruneFailed ? &keep : nullptr;
  std::vector<Term> props;
  if (!o.formula.empty()) props = atomsOf(parseFormula(o.formula, *m));
  std::cout << (o.format == "json" ? toJson(*g, props, k) : toDot(*g, k));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strategy-aware rewriting and LTL model checking"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* c) {
    c->add_option("file", o.file, "specification file")->required();
    c->add_option("--module", o.module, "module name (default: the last one)");
    c->add_option("--state-limit", o.stateLimit, "bound on explored states");
  };
  auto* red = app.add_subcommand("reduce", "normal form of a term");
  common(red);
  red->add_option("term", o.term)->required();

  auto* srw = app.add_subcommand("srewrite", "solutions of a strategy");
  common(srw);
  srw->add_option("term", o.term)->required();
  srw->add_option("strategy", o.strategy)->required();
  srw->add_flag("--depth-first", o.depthFirst, "depth-first search order");

  auto model = [&](CLI::App* c) {
    c->add_option("--opaque", o.opaque, "strategies run as atomic steps")->delimiter(',');
    c->add_flag("--unbiased", o.unbiased, "explore every matchrew interleaving");
  };
  auto* chk = app.add_subcommand("check", "LTL model checking under a strategy");
  common(chk);
  chk->add_option("term", o.term)->required();
  chk->add_option("formula", o.formula)->required();
  chk->add_option("strategy", o.strategy, "strategy (omit for the uncontrolled system)");
  model(chk);

  auto* gr = app.add_subcommand("graph", "export the strategy-controlled model");
  common(gr);
  gr->add_option("term", o.term)->required();
  gr->add_option("strategy", o.strategy, "strategy (omit for the uncontrolled system)");
  gr->add_option("--format", o.format, "dot or json")->check(CLI::IsMember({"dot", "json"}));
  gr->add_option("--props", o.formula, "formula whose propositions label JSON states");
  gr->add_flag("--prune-failed", o.pruneFailed, "drop states that only lead to dead ends");
  model(gr);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    if (*red) return cmdReduce(o);
    if (*srw) return cmdSRewrite(o);
    if (*chk) return cmdCheck(o);
    if (*gr) return cmdGraph(o);
  } catch (const Error& e) {
    std::cerr << "error: " << errorKindName(e.kind()) << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
