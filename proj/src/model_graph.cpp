#include "smc/model_graph.hpp"

#include <deque>
#include <sstream>

#include "json.hpp"

namespace smc {

bool PropEvaluator::holds(const Term& state, const Term& prop) {
  auto key = std::make_pair(state, prop);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  const Signature& sig = *m_.sig;
  if (!sig.satisfiesOp)
    fail(ErrorKind::UndefinedProposition, "no satisfaction operator |= is declared");
  Term r = reduce(m_, sig.makeApp(sig.satisfiesOp, {state, prop}));
  bool v;
  if (r.isApp() && r.sym() == sig.trueOp)
    v = true;
  else if (r.isApp() && r.sym() == sig.falseOp)
    v = false;
  else
    fail(ErrorKind::UndefinedProposition,
         "proposition " + toString(prop) + " does not evaluate to a boolean in " +
             toString(state) + " (got " + toString(r) + ")");
  cache_.emplace(std::move(key), v);
  return v;
}

std::vector<Term> KripkeStructure::label(size_t id, const std::vector<Term>& props) {
  std::vector<Term> out;
  for (const Term& p : props)
    if (holds(id, p)) out.push_back(p);
  return out;
}

void KripkeStructure::expandAll() {
  for (size_t i = 0; i < stateCount(); ++i) expand(i);
}

// ------------------------------------------------------------------ model

static EngineOptions engineOptions(const ModelConfig& c) {
  EngineOptions o;
  o.opaque = c.opaque;
  o.biased = c.biased;
  o.searchCeiling = c.searchCeiling;
  return o;
}

ModelGraph::ModelGraph(const Module& m, const Term& t, const StratPtr& alpha,
                       ModelConfig cfg)
    : KripkeStructure(m), cfg_(std::move(cfg)), engine_(m, engineOptions(cfg_)) {
  intern(engine_.initial(t, alpha), 0);
}

size_t ModelGraph::intern(const QPtr& q, int flag) {
  auto [it, fresh] = seen_[flag].emplace(q, states_.size());
  if (fresh) {
    if (states_.size() >= cfg_.stateCeiling)
      fail(ErrorKind::StateSpaceCeiling,
           "model exceeded " + std::to_string(cfg_.stateCeiling) + " states");
    states_.push_back({q, flag, false, {}});
  }
  return it->second;
}

std::optional<size_t> ModelGraph::find(const QPtr& q, int flag) const {
  auto it = seen_[flag].find(q);
  if (it == seen_[flag].end()) return std::nullopt;
  return it->second;
}

Term ModelGraph::stateTerm(size_t id) { return engine_.cterm(states_[id].q); }

const std::vector<Edge>& ModelGraph::expand(size_t id) {
  if (states_[id].expanded) return states_[id].succ;
  std::vector<Edge> succ;
  QPtr q = states_[id].q;
  if (states_[id].flag == 1) {
    succ.push_back({id, "solution"});
  } else {
    for (Transition& tr : engine_.successors(q)) {
      size_t to = intern(tr.target, 0);
      succ.push_back({to, std::move(tr.label)});
    }
    if (engine_.solutionReachable(q)) {
      if (succ.empty())
        succ.push_back({id, "solution"});
      else
        succ.push_back({intern(q, 1), "solution"});
    }
  }
  states_[id].succ = std::move(succ);
  states_[id].expanded = true;
  return states_[id].succ;
}

// ------------------------------------------------------------------ plain

RewriteGraph::RewriteGraph(const Module& m, const Term& t, size_t stateCeiling)
    : KripkeStructure(m), ceiling_(stateCeiling) {
  intern(reduce(m, t));
}

size_t RewriteGraph::intern(const Term& t) {
  auto [it, fresh] = seen_.emplace(t, terms_.size());
  if (fresh) {
    if (terms_.size() >= ceiling_)
      fail(ErrorKind::StateSpaceCeiling,
           "rewrite graph exceeded " + std::to_string(ceiling_) + " states");
    terms_.push_back(t);
    succ_.emplace_back();
  }
  return it->second;
}

const std::vector<Edge>& RewriteGraph::expand(size_t id) {
  if (succ_[id]) return *succ_[id];
  std::vector<Edge> succ;
  for (Step& s : oneStepRewrites(m_, terms_[id])) {
    size_t to = intern(s.term);
    bool dup = false;
    for (const Edge& e : succ) dup = dup || (e.to == to && e.label == s.label);
    if (!dup) succ.push_back({to, s.label});
  }
  if (succ.empty()) succ.push_back({id, "deadlock"});
  succ_[id] = std::move(succ);
  return *succ_[id];
}

// ------------------------------------------------------------------ pruning

std::vector<bool> pruneFailed(KripkeStructure& g) {
  g.expandAll();
  const size_t n = g.stateCount();
  constexpr size_t kUnset = static_cast<size_t>(-1);
  std::vector<size_t> index(n, kUnset), low(n, 0), comp(n, kUnset);
  std::vector<bool> onStack(n, false), alive(n, false);
  std::vector<size_t> stack;
  std::vector<bool> compAlive;
  size_t counter = 0;

  struct Frame {
    size_t v;
    size_t next;
  };
  for (size_t root = 0; root < n; ++root) {
    if (index[root] != kUnset) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    onStack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      const auto& succ = g.expand(f.v);
      if (f.next < succ.size()) {
        size_t w = succ[f.next++].to;
        if (index[w] == kUnset) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          onStack[w] = true;
          call.push_back({w, 0});
        } else if (onStack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      size_t v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] != index[v]) continue;
      // v roots a component; every component it points to is already final
      size_t c = compAlive.size();
      std::vector<size_t> members;
      size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        onStack[w] = false;
        comp[w] = c;
        members.push_back(w);
      } while (w != v);
      bool live = members.size() > 1;
      for (size_t x : members)
        for (const Edge& e : g.expand(x))
          if (e.to == x || (comp[e.to] != c && compAlive[comp[e.to]])) live = true;
      compAlive.push_back(live);
    }
  }
  for (size_t v = 0; v < n; ++v) alive[v] = compAlive[comp[v]];
  return alive;
}

// ------------------------------------------------------------------ export

static std::string dotEscape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string toDot(KripkeStructure& g, const std::vector<bool>* keep) {
  g.expandAll();
  auto in = [&](size_t i) { return !keep || (i < keep->size() && (*keep)[i]); };
  std::ostringstream os;
  os << "digraph model {\n";
  for (size_t i = 0; i < g.stateCount(); ++i) {
    if (!in(i)) continue;
    os << "  n" << i << " [label=\"" << dotEscape(toString(g.stateTerm(i))) << "\"";
    if (g.stutterFlag(i) == 1) os << ", style=dashed";
    if (i == g.initialState()) os << ", penwidth=2";
    os << "];\n";
  }
  for (size_t i = 0; i < g.stateCount(); ++i) {
    if (!in(i)) continue;
    for (const Edge& e : g.expand(i))
      if (in(e.to))
        os << "  n" << i << " -> n" << e.to << " [label=\"" << dotEscape(e.label)
           << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

std::string toJson(KripkeStructure& g, const std::vector<Term>& props,
                   const std::vector<bool>* keep) {
  g.expandAll();
  auto in = [&](size_t i) { return !keep || (i < keep->size() && (*keep)[i]); };
  nlohmann::json states = nlohmann::json::array();
  nlohmann::json edges = nlohmann::json::array();
  for (size_t i = 0; i < g.stateCount(); ++i) {
    if (!in(i)) continue;
    nlohmann::json labels = nlohmann::json::array();
    for (const Term& p : g.label(i, props)) labels.push_back(toString(p));
    states.push_back({{"id", i},
                      {"term", toString(g.stateTerm(i))},
                      {"flag", g.stutterFlag(i)},
                      {"labels", labels}});
  }
  for (size_t i = 0; i < g.stateCount(); ++i) {
    if (!in(i)) continue;
    for (const Edge& e : g.expand(i))
      if (in(e.to)) edges.push_back({{"from", i}, {"to", e.to}, {"label", e.label}});
  }
  nlohmann::json out;
  out["states"] = states;
  out["edges"] = edges;
  out["initial"] = in(g.initialState()) ? nlohmann::json(g.initialState()) : nlohmann::json();
  return out.dump(2) + "\n";
}

}  // namespace smc
