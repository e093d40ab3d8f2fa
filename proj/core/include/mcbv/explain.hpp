#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcbv/bitblast.hpp"
#include "mcbv/normalizer.hpp"
#include "mcbv/term_store.hpp"

namespace mcbv {

/// Closed: the core mentions no variable besides y, so it is infeasible on
/// its own and its negation is the lemma.
enum class Explainer { Eq, Arith, Closed, Bitblast };

const char *explainer_name(Explainer e);

/// A learned clause that fails one of the interpolant conditions, or a
/// rewrite that changed semantics. Only raised when debug checks are on.
class InvalidLearnedClause : public std::logic_error {
public:
  explicit InvalidLearnedClause(const std::string &what) : std::logic_error(what) {}
};

struct ExplainConfig {
  bool use_eq = true;
  bool use_arith = true;
  bool debug_check = false;
  BbOptions bb;
};

struct ExplainStats {
  std::size_t eq = 0;
  std::size_t arith = 0;
  std::size_t closed = 0;
  std::size_t bitblast = 0;
  /// Cores routed to a dedicated explainer that declined them.
  std::size_t fallbacks = 0;
  std::size_t checked = 0;
  BbStats bb;
};

struct Explanation {
  Explainer by;
  /// Disjunction: negated premises followed by the interpolant literals.
  /// Every literal is false under the model.
  std::vector<TermId> clause;
};

/// Conflict clause for `core` (constraints unit in y, jointly infeasible
/// for y under m). Tries the equality explainer on the core as given, then
/// the arithmetic explainer on its normal form, then the closed case, then
/// bitblasting.
Explanation explain_conflict(TermStore &store, Normalizer &nz, const std::vector<TermId> &core, TermId y,
                             const Assignment &m, const ExplainConfig &cfg, ExplainStats &stats);

} // namespace mcbv
