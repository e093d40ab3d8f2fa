#pragma once

#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "mcbv/term_store.hpp"

namespace mcbv {

/// Rewrite rules used to bring conflict constraints into the arithmetic
/// fragment. upper_l(u) is u[w:l], lower_h(u) is u[h:0].
enum class Rule {
  SltToSle,           // u1 <s u2  ~>  not(u2 <=s u1)
  UltToUle,           // u1 <u u2  ~>  not(u2 <=u u1)
  SleToUle,           // u1 <=s u2 ~>  u1 + 2^(w-1) <=u u2 + 2^(w-1)
  EqToUle,            // u1 = u2   ~>  u1 - u2 <=u 0
  ExtractSplit,       // u[h:l]    ~>  upper_l(lower_h(u))
  LowerOfUpper,       // lower_h(upper_l(u)) ~> upper_l(lower_(h+l)(u))
  UpperOfConcatHigh,  // upper_l(u1.u2) ~> upper_(l-|u2|)(u1)   if |u2| <= l
  UpperOfConcatLow,   // upper_l(u1.u2) ~> u1 . upper_l(u2)     otherwise
  LowerOfConcatLow,   // lower_h(u1.u2) ~> lower_h(u2)          if h <= |u2|
  LowerOfConcatHigh,  // lower_h(u1.u2) ~> lower_(h-|u2|)(u1) . u2 otherwise
  PowerOfTwoMul,      // 2^n * u  ~>  lower_(w-n)(u) . 0_n
  LowerOfAdd,         // lower_h(u1 + u2) ~> lower_h(u1) + lower_h(u2)
  LowerOfMul,         // lower_h(u1 * u2) ~> lower_h(u1) * lower_h(u2)
  LowerOfNeg,         // lower_h(-u) ~> -lower_h(u)
  BvNotToNeg,         // ~u ~> -(u + 1)
  SignExtendToConcat, // sext_k u ~> (0_k . (u + 2^(w-1))) - (0_k . 2^(w-1))
  ConcatSplit,        // u1.u2 ~> (u1 . 0) + (0 . u2)
};

inline constexpr Rule kAllRules[] = {
    Rule::SltToSle,          Rule::UltToUle,         Rule::SleToUle,          Rule::EqToUle,
    Rule::ExtractSplit,      Rule::LowerOfUpper,     Rule::UpperOfConcatHigh, Rule::UpperOfConcatLow,
    Rule::LowerOfConcatLow,  Rule::LowerOfConcatHigh, Rule::PowerOfTwoMul,    Rule::LowerOfAdd,
    Rule::LowerOfMul,        Rule::LowerOfNeg,       Rule::BvNotToNeg,        Rule::SignExtendToConcat,
    Rule::ConcatSplit,
};

const char *rule_name(Rule r);

/// Applies `rule` once at the root of `t`, ignoring the priority and side
/// conditions that the normalizer uses to decide *when* to fire it (the
/// rewrite itself is an equivalence regardless). Returns nullopt when the
/// root does not have the rule's shape.
std::optional<TermId> rewrite_once(TermStore &store, TermId t, Rule rule);

struct RewriteTrace {
  TermId original;
  TermId result;
  /// Rules that fired while computing `result`, in order of first use.
  /// Subterms served from the memo table contribute nothing.
  std::vector<Rule> rules;
};

/// Normal form for conflict constraints:
///  - comparisons become (possibly negated) <=u atoms,
///  - extracts are pushed through concatenations and ring operations so that
///    only upper extracts of composite terms and lower extracts of variables
///    remain,
///  - +, unary - and * are kept as polynomials with monomials in a fixed order
///    and coefficients folded modulo 2^w,
///  - with respect to a conflict variable y, concatenations mixing evaluable
///    and unevaluable parts are split into sums.
class Normalizer {
public:
  explicit Normalizer(TermStore &store) : store_(store) {}

  /// y-independent part of the normal form.
  TermId canonical(TermId t);
  /// Full normal form with respect to conflict variable y.
  TermId normalize(TermId t, TermId y);
  RewriteTrace trace(TermId t, TermId y);

  /// Polynomial helpers on canonical terms, exposed for the explainers.
  TermId add(const std::vector<TermId> &terms);
  TermId neg(TermId t);
  TermId sub(TermId a, TermId b) { return add({a, neg(b)}); }
  TermId mul(const std::vector<TermId> &terms);
  TermId lower(TermId t, unsigned h);
  TermId upper(TermId t, unsigned l);
  TermId concat(const std::vector<TermId> &parts);

private:
  using Monomial = std::vector<TermId>;
  using Poly = std::map<Monomial, BvValue>;

  TermId canon_bool(TermId t);
  TermId canon_bv(TermId t);
  TermId split(TermId t, TermId y);

  Poly to_poly(TermId t);
  TermId from_poly(const Poly &p, unsigned width);
  TermId emit_monomial(const Monomial &m, const BvValue &coef, unsigned width);
  static void add_into(Poly &acc, const Monomial &m, const BvValue &c);
  Poly mul_poly(const Poly &a, const Poly &b, unsigned width, bool &ok);
  TermId product(const Monomial &m, unsigned width);

  void fired(Rule r);

  TermStore &store_;
  std::unordered_map<TermId, TermId, TermIdHash> canon_;
  std::map<std::pair<TermId, TermId>, TermId> split_;
  std::vector<Rule> *log_ = nullptr;
};

/// Proves original == result (or original <=> result for atoms): by
/// exhaustive enumeration when the free variables total at most 12 bits,
/// otherwise by a bitblasted validity query.
bool check_equiv(TermStore &store, const RewriteTrace &trace);

} // namespace mcbv
