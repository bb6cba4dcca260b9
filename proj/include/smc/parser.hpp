// Reader for .rwspec files: modules, terms, strategy expressions, formulae.
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "smc/formula.hpp"
#include "smc/module.hpp"
#include "smc/strategy.hpp"

namespace smc {

struct Token {
  enum Kind { Ident, Int, Qid, Punct, End };
  Kind kind = End;
  std::string text;
  int line = 0;
  int col = 0;
};

std::vector<Token> tokenize(const std::string& text);

// Untyped syntax trees produced before name resolution.

struct RawTerm {
  Token tok;
  std::vector<RawTerm> args;
  bool applied = false;
};

struct RawFrag {
  CondFrag::Kind kind = CondFrag::Equal;
  RawTerm lhs, rhs;
  std::string sortName;
};

struct RawStrat {
  StratKind kind = StratKind::Idle;
  Token tok;
  std::string name;
  bool all = false, top = false;
  bool applied = false;  // name(args)
  bool bracketed = false;  // name[...] or name{...}
  std::vector<std::pair<std::string, RawTerm>> rho;
  std::vector<RawStrat> subs;
  PatternMode mode = PatternMode::Top;
  std::optional<RawTerm> pattern;
  std::vector<RawFrag> cond;
  std::vector<RawTerm> vars;
  std::vector<RawTerm> args;
};

struct RawOp {
  std::vector<std::string> names;
  std::vector<std::string> args;
  std::string result;
  bool assoc = false, comm = false, ctor = false, frozen = false;
  std::optional<RawTerm> identity;
  int line = 0;
};

struct RawModule {
  std::string kind;  // mod, smod, fmod
  std::string name;
  int line = 0;
  std::vector<std::string> imports;
  std::vector<std::string> sorts;
  std::vector<std::pair<std::string, std::string>> subsorts;
  std::vector<RawOp> ops;
  std::vector<std::pair<std::string, std::string>> vars;
  struct Eq {
    RawTerm lhs, rhs;
    std::vector<RawFrag> cond;
    bool owise = false;
  };
  std::vector<Eq> eqs;
  struct Rl {
    std::string label;
    RawTerm lhs, rhs;
    std::vector<RawFrag> cond;
  };
  std::vector<Rl> rules;
  struct SDecl {
    std::vector<std::string> names;
    std::vector<std::string> params;
    std::string subject;
    int line = 0;
  };
  std::vector<SDecl> stratDecls;
  struct SDef {
    Token name;
    std::vector<RawTerm> args;
    RawStrat body;
    std::vector<RawFrag> cond;
  };
  std::vector<SDef> stratDefs;
};

struct SpecFile {
  std::vector<RawModule> raw;
  std::map<std::string, std::shared_ptr<Module>> modules;
  std::string defaultModule;  // last module in the file

  std::shared_ptr<Module> module(const std::string& name = "") const;
};

SpecFile parseFile(const std::string& text);
SpecFile loadFile(const std::string& path);

/// Builds the flattened module `name` from the raw modules of a file.
std::shared_ptr<Module> flatten(const std::string& name,
                                const std::vector<RawModule>& modules);

/// Parses and resolves a term. With `reduced` the result is in normal form.
Term parseTerm(const std::string& text, const Module& m, bool reduced = false);
/// Parses a strategy expression (surface form, not desugared).
StratPtr parseStrategyExpr(const std::string& text, const Module& m);
/// Parses, reduces and converts an LTL formula.
FormulaPtr parseFormula(const std::string& text, const Module& m);
/// The formula as a term of sort Formula, before reduction.
Term parseFormulaTerm(const std::string& text, const Module& m);

}  // namespace smc
