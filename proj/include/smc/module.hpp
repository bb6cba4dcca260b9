#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "smc/match.hpp"
#include "smc/strategy.hpp"
#include "smc/term.hpp"

namespace smc {

struct Equation {
  Term lhs, rhs;
  Condition cond;
  bool owise = false;
};

struct Rule {
  std::string label;  // empty for unlabeled rules
  Term lhs, rhs;
  Condition cond;
};

struct StratDecl {
  std::string name;
  std::vector<SortId> params;
  SortId subject = kNoSort;
};

struct StratDef {
  std::string name;
  std::vector<Term> lhs;
  StratPtr body;  // desugared
  Condition cond;
};

/// A flattened module: the prelude, all imported declarations and its own.
class Module {
 public:
  Module();

  std::string name;
  std::shared_ptr<Signature> sig;
  std::vector<Equation> equations;
  std::vector<Rule> rules;
  std::vector<StratDecl> stratDecls;
  std::vector<StratDef> stratDefs;
  std::unordered_map<std::string, Term> vars;
  std::vector<std::string> included;  // flattened import closure, in order

  size_t reduceLimit = 1000000;

  /// Rebuilds the equation index; call after adding equations.
  void finalize();

  const std::vector<size_t>& equationsFor(const OpSymbol* f) const;
  bool hasRuleLabel(const std::string& label) const;
  const StratDecl* findStrategy(const std::string& name, size_t arity) const;
  bool hasStrategyNamed(const std::string& name) const;

  const Signature& signature() const { return *sig; }
  const Matcher& matcher() const { return matcher_; }

  /// Memo table for reduce. Cleared when it grows too large.
  mutable std::unordered_map<Term, Term, TermHash> reduceCache;

 private:
  Matcher matcher_;
  std::unordered_map<const OpSymbol*, std::vector<size_t>> eqIndex_;
};

}  // namespace smc
