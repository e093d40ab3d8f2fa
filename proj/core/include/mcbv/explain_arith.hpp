#pragma once

#include <set>
#include <vector>

#include "mcbv/explain_eq.hpp"
#include "mcbv/normalizer.hpp"
#include "mcbv/term_store.hpp"

namespace mcbv {

/// One layer of the term t above the conflict variable, outermost first.
struct ArithStep {
  enum class Op {
    UpperExtract, // t = s[|s|:k]
    AddE,         // t = s + e
    Negate,       // t = -s
    UpTrim,       // t = 0_k . s
    DownTrim,     // t = s . 0_k
  };
  Op op;
  unsigned k = 0;
  /// Summands of e for AddE.
  std::vector<TermId> e;
};

/// t decomposed down to its base y[base_width:0].
struct TermChain {
  TermId term;
  std::vector<ArithStep> steps;
  unsigned base_width = 0;
};

/// Parses t (normalized, containing y exactly once) into a chain.
/// Returns false if t is outside the grammar.
bool parse_chain(const TermStore &store, TermId t, TermId y, TermChain &out);

/// Wrap-around interval [lower; upper) of forbidden values, guarded by a
/// cube of literals that are true in the model.
struct ForbiddenInterval {
  enum class Kind { Proper, Empty, Full };
  Kind kind = Kind::Proper;
  unsigned width = 0;
  TermId lower, upper;
  std::vector<TermId> condition;
  /// A literal of `condition` stating that the bounds differ; it is implied
  /// by any membership literal in this interval, so it can be left out of
  /// a clause that contains one. kNone if there is no such literal.
  TermId bound_condition;
  /// Index of the originating constraint, or -1 for intervals introduced
  /// while covering a hole.
  int origin = -1;
};

/// Shape of a normalized constraint with respect to y.
enum class AtomShape {
  BothSides,  // e1 + t <=u e2 + t
  RightOnly,  // e1 <=u e2 + t
  LeftOnly,   // e1 + t <=u e2
  Evaluable,  // e1 <=u e2
};

struct TableEntry {
  AtomShape shape;
  /// Row number 1..6 of the case analysis; 0 for evaluable constraints.
  int row = 0;
  bool positive = true;
  TermId e1, e2;
  TermChain chain;
  ForbiddenInterval interval;
};

/// Forbidden interval for the unevaluable side of a normalized constraint.
/// Throws ExplainerUnavailable when the constraint has no matching shape.
TableEntry interval_of(TermStore &store, Normalizer &nz, TermId lit, TermId y, const Assignment &m);

/// True iff every (normalized) constraint has one of the shapes above with
/// a t that parses as a chain.
bool applies_arith(const TermStore &store, const std::vector<TermId> &core, TermId y);

/// Literal t in [l; u), i.e. t - l <u u - l. Full intervals yield no literal
/// (kNone).
TermId membership(TermStore &store, Normalizer &nz, TermId t, const ForbiddenInterval &i);

/// Pushes an interval for chain.term down to the base y[w:0]. The result
/// carries the accumulated condition; Empty and Full results have width 1.
ForbiddenInterval project(TermStore &store, Normalizer &nz, const TermChain &chain, ForbiddenInterval i,
                          const Assignment &m);

/// Same, for a single step above some subterm (used to check each rule).
ForbiddenInterval project_step(TermStore &store, Normalizer &nz, const ArithStep &step, unsigned inner_width,
                               ForbiddenInterval i, const Assignment &m);

struct Layer {
  unsigned width;
  std::vector<ForbiddenInterval> intervals;
};

struct CoverResult {
  /// Conditions and linking constraints; all true in the model.
  std::vector<TermId> constraints;
  /// Origins of the intervals that took part.
  std::set<int> used;
};

/// Covering sequence for a single layer whose union is the full domain:
/// starts from the longest interval and repeatedly takes the one reaching
/// furthest. Returns the sequence; `linking` receives u_i in I_(i+1).
std::vector<ForbiddenInterval> cover_single(TermStore &store, Normalizer &nz, const std::vector<ForbiddenInterval> &s,
                                            const Assignment &m, std::vector<TermId> *linking);

/// Coverage across layers of decreasing width; holes left by a layer are
/// handed down to narrower layers. Throws ExplainerUnavailable if the
/// intervals do not exclude every value.
CoverResult cover_multi(TermStore &store, Normalizer &nz, std::vector<Layer> layers, const Assignment &m);

struct ArithExplanation {
  std::vector<TermId> premises;
  std::vector<TermId> literals;
  bool full_interval = false;
  std::vector<TableEntry> entries;
  std::vector<ForbiddenInterval> projected;
};

/// Explanation for a core of constraints unit in y. The core is given
/// unnormalized; the premises of the result are original constraints.
ArithExplanation explain_arith(TermStore &store, Normalizer &nz, const std::vector<TermId> &core, TermId y,
                               const Assignment &m);

} // namespace mcbv
