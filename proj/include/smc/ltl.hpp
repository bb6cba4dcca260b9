// LTL to Büchi translation, nested depth-first emptiness check and
// counterexample handling.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "smc/formula.hpp"
#include "smc/model_graph.hpp"

namespace smc {

/// Negation normal form over True, False, literals, /\, \/, O, U and R.
FormulaPtr toNNF(const FormulaPtr& f);
/// NNF of the negation of f.
FormulaPtr negateAndNormalize(const FormulaPtr& f);

struct Literal {
  size_t atom;
  bool positive;
};

/// A transition is taken when the labels of the model state being entered
/// satisfy its guard; initial transitions read the first model state.
struct BuchiAutomaton {
  struct Trans {
    size_t to;
    std::vector<Literal> guard;  // conjunction
  };
  std::vector<Term> atoms;
  std::vector<Trans> initial;
  std::vector<std::vector<Trans>> trans;
  std::vector<bool> accepting;
  size_t size() const { return trans.size(); }
};

/// Tableau construction for a formula in negation normal form. The atom
/// order defaults to first occurrence; a given order must cover every atom.
BuchiAutomaton toBuchi(const FormulaPtr& nnf, std::vector<Term> atoms = {});

bool guardHolds(const std::vector<Literal>& guard, uint64_t labels);

/// Truth of f on many lassos of the same shape at once. atomBits[j][a] has
/// bit k set when atom a holds at position j of lasso k; bit k of the result
/// tells whether lasso k satisfies f.
std::vector<uint64_t> evalLTLOnLassos(
    const FormulaPtr& f, const std::vector<Term>& atoms, size_t prefixLen,
    size_t cycleLen, const std::vector<std::vector<std::vector<uint64_t>>>& atomBits,
    size_t count);

/// Label sets are bitmasks over `atoms`.
bool evalLTLOnLasso(const FormulaPtr& f, const std::vector<Term>& atoms,
                    const std::vector<uint64_t>& prefix,
                    const std::vector<uint64_t>& cycle);
/// Büchi acceptance of ultimately periodic words, split into the states
/// reached after a prefix and the states from which a cycle word can be
/// repeated forever through accepting states. Masks are over b.atoms.
class LassoAcceptor {
 public:
  using Set = std::vector<uint64_t>;
  explicit LassoAcceptor(const BuchiAutomaton& b);
  Set afterPrefix(const std::vector<uint64_t>& prefix) const;
  Set step(const Set& from, uint64_t letter) const;
  Set initialSet() const;
  Set goodForCycle(const std::vector<uint64_t>& cycle) const;
  static bool intersects(const Set& a, const Set& b);

 private:
  const std::vector<BuchiAutomaton::Trans>& out(size_t q) const;
  const BuchiAutomaton& b_;
  size_t start_;  // index of the state before the first letter
  size_t words_;
};

bool acceptsLasso(const BuchiAutomaton& b, const std::vector<uint64_t>& prefix,
                  const std::vector<uint64_t>& cycle);

struct CeStep {
  size_t id;
  Term term;
  std::string label;  // of the edge leaving this state
};

struct Counterexample {
  std::vector<CeStep> prefix;
  std::vector<CeStep> cycle;  // nonempty; its last edge returns to cycle[0]
};

/// `counterexample(prefix, cycle)` with `{term, label}` elements. The step
/// into a stuttering duplicate is omitted, so `solution` only shows in the
/// cycle.
std::string toString(const Counterexample& ce);

struct CheckResult {
  bool holds = false;
  std::optional<Counterexample> counterexample;
  size_t states = 0;  // model states explored
};

/// Searches the product of g with b for an accepting lasso.
CheckResult emptinessCheck(KripkeStructure& g, const BuchiAutomaton& b);

/// Checks phi on the model of alpha from t.
CheckResult modelCheck(const Module& m, const Term& t, const FormulaPtr& phi,
                       const StratPtr& alpha, const ModelConfig& cfg = {});
/// Same on an already built model.
CheckResult modelCheck(KripkeStructure& g, const FormulaPtr& phi);

struct Validation {
  bool ok = true;
  char failed = 0;   // 'a' rewrite step, 'b' graph edge, 'c' formula
  size_t index = 0;  // first failing step, counted along prefix then cycle
  std::string message;
};

/// Independent check of a lasso: rule-labeled steps are one-step rewrites by
/// that rule, consecutive states are joined by graph edges, and the formula
/// is false on the lasso.
Validation validateCounterexample(const Counterexample& ce, const FormulaPtr& phi,
                                  KripkeStructure& g);

}  // namespace smc
