#pragma once

#include <functional>
#include <vector>

#include "smc/term.hpp"

namespace smc {

enum class MatchMode { Top, Anywhere };

struct MatchResult {
  Substitution subst;
  Context context;
};

/// Matching modulo the equational attributes of the signature.
///
/// Patterns may be non-linear. Subjects are expected to be ground. Results are
/// deduplicated and reported in discovery order.
class Matcher {
 public:
  explicit Matcher(const Signature& sig) : sig_(sig) {}

  /// All matches of p against t at the root. With ext, a pattern headed by an
  /// associative symbol may also match a proper segment of the subject.
  std::vector<MatchResult> matchTop(const Term& p, const Term& t,
                                    bool ext) const;
  /// Matches at every position of t (with extension at associative nodes).
  std::vector<MatchResult> matchAnywhere(const Term& p, const Term& t) const;
  std::vector<MatchResult> match(const Term& p, const Term& t, MatchMode mode,
                                 bool ext) const;

  /// Plain matching without extension: only substitutions.
  std::vector<Substitution> matchSubst(const Term& p, const Term& t) const;
  bool matches(const Term& p, const Term& t) const;

 private:
  const Signature& sig_;
};

/// Every subterm position of t, including proper segments of associative
/// argument lists and proper sub-multisets of AC argument lists. Used as an
/// independent enumeration by checking code.
std::vector<Context> explicitPositions(const Signature& sig, const Term& t);

}  // namespace smc
