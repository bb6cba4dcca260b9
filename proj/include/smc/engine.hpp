// Small-step execution of strategy expressions.
#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "smc/module.hpp"
#include "smc/rewrite.hpp"
#include "smc/strategy.hpp"

namespace smc {

// ------------------------------------------------------------------ stacks

struct StackNode;
using Stack = std::shared_ptr<const StackNode>;  // nullptr is the empty stack

/// One pending item: a strategy or a substitution frame.
struct StackNode {
  StratPtr strat;        // null for frames
  Substitution frame;
  Stack next;
  size_t hash = 0;
  size_t depth = 0;
  bool isFrame() const { return !strat; }
};

Stack push(StratPtr s, Stack rest);
Stack pushFrame(Substitution theta, Stack rest);
bool stackEqual(const Stack& a, const Stack& b);
inline size_t stackHash(const Stack& s) { return s ? s->hash : 0x51ed27; }
/// The innermost substitution frame of the stack, identity if none.
const Substitution& vctx(const Stack& s);

// ------------------------------------------------------------------ states

enum class QKind { Term, Subterm, Rewc };

struct QNode;
using QPtr = std::shared_ptr<const QNode>;

struct QNode {
  QKind kind = QKind::Term;
  /// Term: the subject. Subterm: the shell, with the matchrew variables as
  /// placeholders. Rewc: the term being rewritten by the rule.
  Term term;
  Stack stack;

  // Subterm
  std::vector<Term> vars;
  std::vector<QPtr> parts;

  // Rewc
  size_t rule = 0;
  StratPtr app;                // the rule application strategy
  Substitution theta;          // environment of app
  std::shared_ptr<const InstRule> inst;  // determined by rule, app and theta
  Substitution sigma;          // bindings accumulated from the condition
  size_t frag = 0;             // condition fragment being solved by inner
  size_t stratIndex = 0;       // substrategy used for that fragment
  Context ctx;
  QPtr inner;

  size_t hash = 0;
};

QPtr termState(Term t, Stack s);
QPtr subtermState(std::vector<Term> vars, std::vector<QPtr> parts, Term shell,
                  Stack s);
bool stateEqual(const QPtr& a, const QPtr& b);

struct QHash {
  size_t operator()(const QPtr& q) const { return q->hash; }
};
struct QEq {
  bool operator()(const QPtr& a, const QPtr& b) const { return stateEqual(a, b); }
};
template <class V>
using QMap = std::unordered_map<QPtr, V, QHash, QEq>;

/// Stable textual rendering of a state, injective up to state equality.
std::string canonicalKey(const QPtr& q);
inline bool isSolution(const QPtr& q) {
  return q->kind == QKind::Term && !q->stack;
}

// ------------------------------------------------------------------ engine

struct EngineOptions {
  std::set<std::string> opaque;
  bool biased = false;
  /// Bound on the states of each auxiliary search (conditionals, Sol,
  /// opaque calls, rewriting conditions).
  size_t searchCeiling = 2000000;
};

struct Transition {
  QPtr target;
  std::string label;  // rule label, unlabeled or opaque(name)
};

struct SRewriteStats {
  size_t states = 0;
  size_t rewrites = 0;
};

class Engine {
 public:
  explicit Engine(const Module& m, EngineOptions opts = {});

  const Module& module() const { return m_; }
  const EngineOptions& options() const { return opts_; }

  /// t @ alpha with t reduced and alpha desugared.
  QPtr initial(const Term& t, const StratPtr& alpha) const;

  /// Term projection, in normal form.
  Term cterm(const QPtr& q);

  std::vector<QPtr> controlSteps(const QPtr& q);
  std::vector<Transition> systemSteps(const QPtr& q);
  /// The => relation: control closure followed by one system step.
  std::vector<Transition> successors(const QPtr& q);
  /// Control steps alone reach an empty-stack term state.
  bool solutionReachable(const QPtr& q);

  /// Applies the deterministic bookkeeping steps that have no alternative
  /// (popping frames and idle, reassembling finished matchrews).
  QPtr compact(const QPtr& q);

  /// Solutions of alpha from t, in breadth-first (or depth-first) order.
  std::vector<Term> srewrite(const Term& t, const StratPtr& alpha,
                             bool depthFirst = false, size_t limit = 0,
                             SRewriteStats* stats = nullptr);

  size_t rewriteCount() const { return rewrites_; }

 private:
  void controlTerm(const QPtr& q, std::vector<QPtr>& out);
  void systemTerm(const QPtr& q, std::vector<Transition>& out);
  void ruleApp(const QPtr& q, const StratPtr& a, std::vector<QPtr>* ctrl,
               std::vector<Transition>* sys);
  void rewcFinish(const QPtr& q, std::vector<QPtr>* ctrl,
                  std::vector<Transition>* sys);
  QPtr withInner(const QPtr& q, QPtr inner) const;
  QPtr withPart(const QPtr& q, size_t i, QPtr part) const;
  std::vector<size_t> activeParts(const QPtr& q) const;
  bool elseHolds(const Term& t, const StratPtr& a, const Substitution& theta);
  std::vector<Term> opaqueResults(const Term& t, const StratPtr& call,
                                  const Substitution& theta);
  bool isOpaqueCall(const QPtr& q) const;
  std::vector<Substitution> callMatches(const StratDef& d,
                                        const std::vector<Term>& args);
  Term inst(const Term& t, const Substitution& theta) const;
  std::shared_ptr<const InstRule> instRule(size_t rule, const StratPtr& app,
                                           const Substitution& theta);

  const Module& m_;
  EngineOptions opts_;
  size_t rewrites_ = 0;

  struct ElseKey {
    Term t;
    StratPtr a;
    Substitution theta;
    bool operator==(const ElseKey& o) const {
      return t == o.t && theta == o.theta && stratEqual(a, o.a);
    }
  };
  struct ElseHash {
    size_t operator()(const ElseKey& k) const {
      return hashCombine(hashCombine(k.t.hash(), k.a->hash), k.theta.hash());
    }
  };
  std::unordered_map<ElseKey, bool, ElseHash> elseMemo_;
  std::unordered_map<ElseKey, std::vector<Term>, ElseHash> opaqueMemo_;
  QMap<bool> solMemo_;
  QMap<Term> ctermMemo_;
};

std::string toString(const Stack& s);
std::string toString(const QPtr& q);

}  // namespace smc
