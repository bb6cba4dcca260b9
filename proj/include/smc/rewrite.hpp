// Equational reduction, conditions and one-step rule application.
#pragma once

#include <string>
#include <vector>

#include "smc/module.hpp"

namespace smc {

/// Normal form of t under the equations and builtins of m. Throws
/// NonTermination when the step budget is exhausted.
Term reduce(const Module& m, const Term& t);

/// All extensions of sigma satisfying the fragments [from, end). Stops early
/// at rewriting fragments, see advanceCondition.
std::vector<Substitution> checkEqCondition(const Module& m, const Condition& c,
                                           const Substitution& sigma);

struct CondProgress {
  Substitution sigma;
  size_t next;  // index of the next rewriting fragment or c.size()
};
/// Solves the equational fragments starting at `from` until the next
/// rewriting fragment.
std::vector<CondProgress> advanceCondition(const Module& m, const Condition& c,
                                           size_t from,
                                           const Substitution& sigma);

/// Matches with a condition. The condition may not contain rewriting
/// fragments.
std::vector<MatchResult> matchWithCondition(const Module& m, const Term& p,
                                            const Term& t, const Condition& c,
                                            MatchMode mode, bool ext);

/// A rule with some of its variables fixed.
struct InstRule {
  size_t index = 0;
  std::string label;
  Term lhs, rhs;
  Condition cond;
  bool viable = true;  // false when rho gives a variable an ill-sorted value
};
InstRule instantiateRule(const Module& m, size_t ruleIndex,
                         const std::vector<std::pair<std::string, Term>>& rho);

/// A partial or finished application of a rule.
struct PendingRewrite {
  Substitution sigma;
  Context context;
  size_t nextFrag = 0;   // first unsolved rewriting fragment
  bool complete = false;
  Term result;           // valid when complete
};

std::vector<PendingRewrite> ruleMatches(const Module& m, const Term& t,
                                        const InstRule& r, bool topOnly);

/// Finishes a rule once all its fragments are solved.
Term completeRewrite(const Module& m, const InstRule& r,
                     const Substitution& sigma, const Context& ctx);

struct Step {
  Term term;
  std::string label;
};

/// Every one-step rewrite of t by any rule, rewriting fragments solved by an
/// unrestricted search.
std::vector<Step> oneStepRewrites(const Module& m, const Term& t);

/// Naive one-step oracle: tries the rules with the given label at every
/// explicit position without extension matching. An empty label selects the
/// unlabeled rules.
std::vector<Term> naiveOneStep(const Module& m, const Term& t,
                               const std::string& label);

std::string ruleLabelOrUnlabeled(const std::string& label);

}  // namespace smc
