#pragma once

#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mcbv/term_store.hpp"

namespace mcbv {

/// Raised by a specialized explainer that cannot handle a core; the caller
/// falls back to a more general explainer.
class ExplainerUnavailable : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// True iff every constraint is an equality or disequality between terms
/// built from evaluable terms, extracts of y and concatenations.
bool applies_eq(const TermStore &store, const std::vector<TermId> &core, TermId y);

/// Result of coarsest-base slicing. Each side of each atom is a slice of a
/// variable (y or an assigned one) or an extract of an opaque evaluable term.
struct SlicedSets {
  /// Equalities; trivial ones (same slice on both sides) are dropped.
  std::vector<std::pair<TermId, TermId>> eqs;
  /// One clause (disjunction of disequalities) per original disequality.
  std::vector<std::vector<std::pair<TermId, TermId>>> diss;
};

/// Splits every variable occurring in `core` at all cut points induced by
/// the core, so that the sides of every atom align on slice boundaries.
/// Precondition: applies_eq(core, y).
SlicedSets slice(TermStore &store, const std::vector<TermId> &core, TermId y);

/// Union-find over slices and evaluable terms, keeping an evaluable
/// representative in every component that contains one.
class EGraph {
public:
  EGraph(const TermStore &store, TermId y, const Assignment &m) : store_(store), y_(y), m_(m) {}

  TermId rep(TermId t) const;
  bool evaluable(TermId t) const { return store_.is_evaluable(t, y_); }
  BvValue value(TermId t) const;
  /// Preferred representative among two roots: evaluable first, then the
  /// smaller term, then the lower slice.
  TermId select(TermId a, TermId b) const;
  void merge(TermId a, TermId b, TermId new_rep);
  /// Every component containing an evaluable term has an evaluable
  /// representative, and all evaluable members share its value.
  bool check_invariants() const;

private:
  const TermStore &store_;
  TermId y_;
  const Assignment &m_;
  mutable std::unordered_map<TermId, TermId, TermIdHash> parent_;
  std::vector<TermId> members_;
};

enum class EqOutcome { EGraphConflict, DisequalityTypeI, DisequalityTypeII };

struct EqExplanation {
  EqOutcome outcome;
  /// Core constraints the interpolant depends on (the equalities alone for
  /// an E-graph conflict, the whole core otherwise).
  std::vector<TermId> premises;
  /// Interpolant disjunction; the learned clause is (not core) or these.
  std::vector<TermId> literals;
  SlicedSets sliced;
};

/// Builds the E-graph for the sliced equalities. On a conflict between two
/// evaluable representatives returns their equality (false in m).
std::optional<TermId> e_graph(TermStore &store, const SlicedSets &sliced, EGraph &g);

/// Disequality analysis over the sliced disjunctions. Throws
/// ExplainerUnavailable when there is nothing to analyze.
EqExplanation dis_conflict(TermStore &store, const SlicedSets &sliced, const EGraph &g);

/// Full equality-fragment explanation of `core`, unit in y, under m.
EqExplanation explain_eq(TermStore &store, const std::vector<TermId> &core, TermId y, const Assignment &m);

} // namespace mcbv
