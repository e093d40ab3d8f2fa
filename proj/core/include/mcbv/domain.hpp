#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mcbv/bdd.hpp"
#include "mcbv/term_store.hpp"

namespace mcbv {

class NotInConflict : public std::runtime_error {
public:
  NotInConflict() : std::runtime_error("feasible set is not empty") {}
};

enum class UpdateKind { NowEmpty, NowSingleton, StillMany };

struct UpdateResult {
  UpdateKind kind;
  /// Valid for NowSingleton.
  BvValue value;
};

/// Minimal set of constraints, each unit in `var`, with no common solution.
struct ConflictCore {
  TermId var;
  std::vector<TermId> constraints;
};

struct DomainStats {
  std::size_t units_asserted = 0;
  std::size_t cores_extracted = 0;
  std::size_t consistency_checks = 0;
  std::map<std::size_t, std::size_t> core_sizes;
};

/// Feasible sets of all variables, with level-based undo.
class DomainManager {
public:
  DomainManager(const TermStore &store, BddManager &mgr, std::size_t node_budget = 100000);

  /// Intersects y's feasible set with the values allowed by `c`.
  UpdateResult assert_unit(TermId c, TermId y, const Assignment &m);
  /// QuickXplain over y's justifications. Throws NotInConflict when the set
  /// is not empty.
  ConflictCore conflict_core(TermId y, const Assignment &m);
  /// Minimal subset of `constraints` (all unit in y) whose intersection is
  /// empty. Earlier constraints are preferred. Throws NotInConflict if the
  /// whole list is satisfiable.
  std::vector<TermId> quickxplain(TermId y, const std::vector<TermId> &constraints, const Assignment &m);

  BddRef root(TermId y) const;
  const std::vector<TermId> &justifications(TermId y) const;
  StatusResult status(TermId y);
  std::size_t node_count(TermId y);
  BvValue pick(TermId y, const std::optional<BvValue> &hint) const;
  BddRef compile(TermId c, TermId y, const Assignment &m);

  void push_level() { ++level_; }
  /// Restores every feasible set to its state at `level`.
  void backtrack(unsigned level);
  unsigned level() const { return level_; }

  /// Garbage-collects BDD nodes once the live count passes a threshold.
  void maybe_collect();

  const DomainStats &stats() const { return stats_; }
  BddManager &bdds() { return mgr_; }

private:
  struct Domain {
    BddRef root = BddManager::True;
    std::vector<TermId> justifications;
  };
  struct Undo {
    unsigned level;
    std::size_t var;
    BddRef root;
    std::size_t just_size;
  };

  Domain &domain(TermId y);
  bool consistent(TermId y, const std::vector<TermId> &set, const Assignment &m);
  std::vector<TermId> qx(TermId y, BddRef base, bool delta_nonempty, const std::vector<TermId> &c,
                         const Assignment &m);

  const TermStore &store_;
  BddManager &mgr_;
  UnitCompiler compiler_;
  std::size_t budget_;
  std::vector<Domain> domains_;
  std::vector<Undo> undo_;
  unsigned level_ = 0;
  std::size_t gc_threshold_ = 200000;
  DomainStats stats_;
};

} // namespace mcbv
