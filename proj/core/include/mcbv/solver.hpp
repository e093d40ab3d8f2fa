#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mcbv/bdd.hpp"
#include "mcbv/domain.hpp"
#include "mcbv/explain.hpp"
#include "mcbv/normalizer.hpp"
#include "mcbv/term_store.hpp"

namespace mcbv {

struct SolverConfig {
  bool use_eq = true;
  bool use_arith = true;
  /// Assign singleton feasible sets without a decision.
  bool propagation = true;
  /// Wall-clock limit in seconds; 0 means none.
  double timeout = 0;
  /// Tie-break among equally ranked decision variables; 0 keeps
  /// declaration order.
  std::uint64_t seed = 0;
  /// Validate every learned clause and rewrite; abort on a violation.
  bool debug_check = false;
  std::size_t bdd_budget = 200000;
  /// Conflicts before giving up; negative means unlimited.
  std::int64_t conflict_budget = -1;
  std::size_t max_learned = 10000;
  /// If set, every bitblasted explanation query is appended here.
  std::ostream *dimacs = nullptr;
};

/// The five configurations compared in the ablation study.
std::optional<SolverConfig> variant_config(const std::string &name);

struct SolverStats {
  std::uint64_t decisions = 0;
  std::uint64_t bool_decisions = 0;
  std::uint64_t propagations = 0;
  std::uint64_t bool_propagations = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t theory_conflicts = 0;
  std::uint64_t learned = 0;
  std::uint64_t semantic_splits = 0;
  std::uint64_t restarts = 0;
  ExplainStats explain;
};

enum class Verdict { Sat, Unsat, Unknown };

const char *verdict_name(Verdict v);

struct SolveResult {
  Verdict verdict = Verdict::Unknown;
  /// Full model for Sat, checked against every assertion.
  Assignment model;
  /// Why the answer is unknown.
  std::string reason;
};

/// Model-constructing search over bitvector variables and Boolean structure.
/// Assertions are clausified over theory atoms; bitvector variables get
/// values from their feasible sets; conflicts in a feasible set are
/// explained by an interpolant clause.
class McSat {
public:
  explicit McSat(TermStore &store, SolverConfig cfg = {});

  SolveResult solve(const std::vector<TermId> &assertions);
  /// May be called from another thread; polled once per propagation round.
  void cancel() { cancel_.store(true); }

  const SolverStats &stats() const { return stats_; }
  DomainManager &domains() { return dm_; }

private:
  static constexpr int kUndef = -1;
  static constexpr int kDecision = -1;
  static constexpr int kEvaluated = -2;

  struct VarInfo {
    TermId var;
    bool assigned = false;
    int level = -1;
    int pos = -1;
    std::optional<BvValue> hint;
    std::vector<int> atoms;
  };
  struct AtomInfo {
    TermId atom;
    /// False for Tseitin auxiliaries, which never evaluate.
    bool theory = false;
    std::vector<int> vars;
    std::vector<int> clauses;
    int unassigned = 0;
    int eval = kUndef;
    int value = kUndef;
    int level = -1;
    int pos = -1;
    int reason = kDecision;
  };
  struct Ref {
    int atom;
    bool positive;
  };
  struct Clause {
    std::vector<TermId> lits;
    std::vector<Ref> refs;
    bool learnt = false;
    bool removed = false;
    double activity = 0;
  };
  struct Entry {
    bool is_var;
    int id;
  };
  /// Where a defined atom got its value: the earlier of its Boolean
  /// assignment and the assignment that made it evaluable.
  struct Why {
    int level;
    int pos;
    int reason;
  };
  enum class Outcome { Ok, Conflict, Stop };

  int var_id(TermId v) const { return var_ids_.at(v); }
  int atom_id(TermId atom);
  Ref ref_of(TermId lit);
  int atom_value(int a) const;
  int lit_value(Ref r) const;
  Why why(int a) const;
  int level() const { return static_cast<int>(level_start_.size()); }

  /// Adds a clause at the current state; returns its index or -1 when it
  /// is a tautology.
  int add_clause(std::vector<TermId> lits, bool learnt);
  TermId encode(TermId t);
  void assert_top(TermId t, bool positive);
  Outcome check_clause(int ci, std::vector<TermId> &conflict);

  void new_level();
  void assign_atom(int a, bool value, int reason);
  void assign_var(int v, const BvValue &value);
  void backtrack(int lvl);

  Outcome propagate(std::vector<TermId> &conflict);
  Outcome theory_conflict(int v, std::vector<TermId> &conflict);
  /// Learns from a false clause. False when the empty clause was derived.
  bool analyze(std::vector<TermId> conflict);
  /// False when every variable is assigned and every clause satisfied.
  bool decide();
  bool should_stop();
  void reduce_db();
  void bump(int ci);
  void check_progress(const std::vector<TermId> &learned);
  SolveResult finish(Verdict v, const std::vector<TermId> &assertions);

  TermStore &s_;
  SolverConfig cfg_;
  Normalizer nz_;
  BddManager bdds_;
  DomainManager dm_;
  Assignment m_;
  std::mt19937_64 rng_;

  std::vector<VarInfo> vars_;
  std::unordered_map<TermId, int, TermIdHash> var_ids_;
  std::vector<AtomInfo> atoms_;
  std::unordered_map<TermId, int, TermIdHash> atom_ids_;
  std::unordered_map<TermId, TermId, TermIdHash> encoded_;
  std::vector<Clause> clauses_;
  std::size_t live_learned_ = 0;
  std::vector<Entry> trail_;
  std::vector<std::size_t> level_start_;
  std::vector<int> bool_queue_;
  std::vector<int> theory_queue_;
  std::vector<int> value_queue_;
  double clause_inc_ = 1.0;
  std::unordered_set<std::size_t> progress_;

  std::atomic<bool> cancel_{false};
  std::chrono::steady_clock::time_point deadline_;
  bool has_deadline_ = false;
  std::string stop_reason_;
  SolverStats stats_;
};

} // namespace mcbv
