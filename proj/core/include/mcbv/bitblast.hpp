#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "mcbv/sat_solver.hpp"
#include "mcbv/term_store.hpp"

namespace mcbv {

/// Tseitin encoder from terms to CNF in a sat::Solver. Gates over constant
/// inputs are folded and structurally identical gates are shared.
class Blaster {
public:
  Blaster(const TermStore &store, sat::Solver &solver);

  sat::Lit bool_lit(TermId t);
  const std::vector<sat::Lit> &bits(TermId t);
  /// Bits of a variable; allocated on first use.
  const std::vector<sat::Lit> &var_bits(TermId var) { return bits(var); }
  bool has_var(TermId var) const { return var_bits_.count(var) != 0; }
  sat::Lit true_lit() const { return true_; }
  sat::Lit false_lit() const { return ~true_; }
  /// Asserts `t` (a Boolean term).
  void assert_true(TermId t);

  sat::Lit mk_and(sat::Lit a, sat::Lit b);
  sat::Lit mk_or(sat::Lit a, sat::Lit b) { return ~mk_and(~a, ~b); }
  sat::Lit mk_xor(sat::Lit a, sat::Lit b);
  sat::Lit mk_ite(sat::Lit c, sat::Lit t, sat::Lit e);

private:
  bool is_const(sat::Lit l) const { return l == true_ || l == ~true_; }
  std::vector<sat::Lit> add(const std::vector<sat::Lit> &a, const std::vector<sat::Lit> &b);
  std::vector<sat::Lit> negate(const std::vector<sat::Lit> &a);
  std::vector<sat::Lit> mul(const std::vector<sat::Lit> &a, const std::vector<sat::Lit> &b);
  sat::Lit compare(const std::vector<sat::Lit> &a, const std::vector<sat::Lit> &b, bool strict, bool is_signed);
  std::vector<sat::Lit> compute_bits(TermId t);
  sat::Lit compute_bool(TermId t);

  const TermStore &store_;
  sat::Solver &solver_;
  sat::Lit true_;
  std::unordered_map<TermId, std::vector<sat::Lit>, TermIdHash> bv_cache_;
  std::unordered_map<TermId, sat::Lit, TermIdHash> bool_cache_;
  std::unordered_map<TermId, bool, TermIdHash> var_bits_;
  std::map<std::tuple<int, int, int, int>, sat::Lit> gates_;
};

struct BbOptions {
  /// Deletion-based core shrinking attempts.
  unsigned minimize_budget = 16;
  /// If set, the CNF of the explanation query is written here in DIMACS.
  std::ostream *dimacs = nullptr;
};

struct BbStats {
  std::size_t calls = 0;
  std::size_t core_bits = 0;
  std::size_t total_bits = 0;
};

/// Interpolant literals for a conflict core whose conflict variable is `y`:
/// one literal (x[i+1:i] != b) per model bit in the SAT assumption core.
/// The explanation clause is (not core) or (the returned disjunction).
std::vector<TermId> explain_bb(TermStore &store, const std::vector<TermId> &core, TermId y,
                               const Assignment &m, const BbOptions &opts = {}, BbStats *stats = nullptr);

/// True iff the disjunction of `clause` holds under every assignment.
bool is_valid_clause(const TermStore &store, const std::vector<TermId> &clause);
/// True iff the conjunction of `formulas` has a model.
bool is_satisfiable(const TermStore &store, const std::vector<TermId> &formulas);

struct InterpolantCheck {
  bool implied = false;
  bool scoped = false;
  bool falsified = false;
  bool ok() const { return implied && scoped && falsified; }
  std::string describe() const;
};

/// Checks that `interpolant` (a disjunction) is implied by the conjunction
/// of `core`, mentions only assigned variables other than `y`, and is false
/// under `m`.
InterpolantCheck check_interpolant(const TermStore &store, const std::vector<TermId> &core,
                                   const std::vector<TermId> &interpolant, TermId y, const Assignment &m);

} // namespace mcbv
