// Kripke structures explored on the fly: the strategy-controlled model and the
// plain rewrite graph.
#pragma once

#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "smc/engine.hpp"

namespace smc {

struct ModelConfig {
  std::set<std::string> opaque;
  bool biased = true;
  size_t stateCeiling = 5000000;
  size_t searchCeiling = 2000000;
};

struct Edge {
  size_t to;
  std::string label;
};

/// Decides `t |= p` by reduction, caching per (term, proposition).
class PropEvaluator {
 public:
  explicit PropEvaluator(const Module& m) : m_(m) {}
  bool holds(const Term& state, const Term& prop);

 private:
  struct KeyHash {
    size_t operator()(const std::pair<Term, Term>& k) const {
      return hashCombine(k.first.hash(), k.second.hash());
    }
  };
  const Module& m_;
  std::unordered_map<std::pair<Term, Term>, bool, KeyHash> cache_;
};

class KripkeStructure {
 public:
  explicit KripkeStructure(const Module& m) : m_(m), props_(m) {}
  virtual ~KripkeStructure() = default;

  const Module& module() const { return m_; }
  virtual size_t initialState() const = 0;
  /// Successors of a state, computed once.
  virtual const std::vector<Edge>& expand(size_t id) = 0;
  virtual size_t stateCount() const = 0;
  virtual Term stateTerm(size_t id) = 0;
  virtual int stutterFlag(size_t) const { return 0; }

  bool holds(size_t id, const Term& prop) { return props_.holds(stateTerm(id), prop); }
  std::vector<Term> label(size_t id, const std::vector<Term>& props);
  /// Expands every reachable state.
  void expandAll();

 protected:
  const Module& m_;
  PropEvaluator props_;
};

/// States are execution states paired with a stutter flag; flag-1 copies
/// are the stuttering duplicates of continuable solution states.
class ModelGraph : public KripkeStructure {
 public:
  ModelGraph(const Module& m, const Term& t, const StratPtr& alpha,
             ModelConfig cfg = {});

  size_t initialState() const override { return 0; }
  const std::vector<Edge>& expand(size_t id) override;
  size_t stateCount() const override { return states_.size(); }
  Term stateTerm(size_t id) override;
  int stutterFlag(size_t id) const override { return states_[id].flag; }

  const QPtr& execState(size_t id) const { return states_[id].q; }
  /// Id of an already interned state, if any.
  std::optional<size_t> find(const QPtr& q, int flag) const;
  Engine& engine() { return engine_; }
  const ModelConfig& config() const { return cfg_; }

 private:
  struct State {
    QPtr q;
    int flag = 0;
    bool expanded = false;
    std::vector<Edge> succ;
  };
  size_t intern(const QPtr& q, int flag);

  ModelConfig cfg_;
  Engine engine_;
  std::vector<State> states_;
  QMap<size_t> seen_[2];
};

/// Uncontrolled system: one-step rewrites, with a self-loop labeled
/// `deadlock` on terms without successors.
class RewriteGraph : public KripkeStructure {
 public:
  RewriteGraph(const Module& m, const Term& t, size_t stateCeiling = 5000000);

  size_t initialState() const override { return 0; }
  const std::vector<Edge>& expand(size_t id) override;
  size_t stateCount() const override { return terms_.size(); }
  Term stateTerm(size_t id) override { return terms_[id]; }

 private:
  size_t intern(const Term& t);

  size_t ceiling_;
  std::vector<Term> terms_;
  std::vector<std::optional<std::vector<Edge>>> succ_;
  std::unordered_map<Term, size_t, TermHash> seen_;
};

/// States that reach some cycle (solution self-loops included); the rest only
/// lead to dead ends. Expands the whole graph.
std::vector<bool> pruneFailed(KripkeStructure& g);

/// Renders the explored part of the graph, restricted to `keep` when given.
std::string toDot(KripkeStructure& g, const std::vector<bool>* keep = nullptr);
std::string toJson(KripkeStructure& g, const std::vector<Term>& props,
                   const std::vector<bool>* keep = nullptr);

}  // namespace smc
