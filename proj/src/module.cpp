#include "smc/module.hpp"

namespace smc {

Module::Module() : sig(std::make_shared<Signature>()), matcher_(*sig) {}

void Module::finalize() {
  eqIndex_.clear();
  for (int pass = 0; pass < 2; ++pass)
    for (size_t i = 0; i < equations.size(); ++i) {
      const Equation& e = equations[i];
      if (e.owise != (pass == 1) || !e.lhs.isApp()) continue;
      eqIndex_[e.lhs.sym()].push_back(i);
    }
  reduceCache.clear();
}

const std::vector<size_t>& Module::equationsFor(const OpSymbol* f) const {
  static const std::vector<size_t> kNone;
  auto it = eqIndex_.find(f);
  return it == eqIndex_.end() ? kNone : it->second;
}

bool Module::hasRuleLabel(const std::string& label) const {
  for (const Rule& r : rules)
    if (r.label == label) return true;
  return false;
}

const StratDecl* Module::findStrategy(const std::string& name,
                                      size_t arity) const {
  for (const StratDecl& d : stratDecls)
    if (d.name == name && d.params.size() == arity) return &d;
  return nullptr;
}

bool Module::hasStrategyNamed(const std::string& name) const {
  for (const StratDecl& d : stratDecls)
    if (d.name == name) return true;
  return false;
}

}  // namespace smc
