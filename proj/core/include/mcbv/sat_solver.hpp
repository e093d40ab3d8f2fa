#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace mcbv::sat {

using Var = int;

struct Lit {
  int x = -2;
  constexpr Lit() = default;
  constexpr Lit(Var v, bool negated) : x(2 * v + (negated ? 1 : 0)) {}
  constexpr Var var() const { return x >> 1; }
  constexpr bool sign() const { return x & 1; }
  constexpr Lit operator~() const {
    Lit l;
    l.x = x ^ 1;
    return l;
  }
  friend constexpr bool operator==(Lit a, Lit b) { return a.x == b.x; }
  friend constexpr bool operator!=(Lit a, Lit b) { return a.x != b.x; }
  friend constexpr bool operator<(Lit a, Lit b) { return a.x < b.x; }
};

enum class LBool : std::uint8_t { False = 0, True = 1, Undef = 2 };

enum class Result { Sat, Unsat, Unknown };

struct SolverStats {
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t restarts = 0;
};

/// CDCL solver: two watched literals, first-UIP learning, VSIDS, phase
/// saving, Luby restarts, and solving under assumptions.
class Solver {
public:
  Var new_var();
  int num_vars() const { return static_cast<int>(assigns_.size()); }
  std::size_t num_clauses() const { return num_original_; }

  /// Returns false if the clause set became trivially unsatisfiable.
  bool add_clause(std::vector<Lit> lits);

  /// `conflict_budget` < 0 means unlimited.
  Result solve(const std::vector<Lit> &assumptions = {}, std::int64_t conflict_budget = -1);

  /// Model value after Sat.
  bool model_value(Var v) const { return model_[v] == LBool::True; }
  bool model_value(Lit l) const { return model_value(l.var()) != l.sign(); }
  /// After Unsat under assumptions: the assumptions responsible.
  const std::vector<Lit> &core() const { return core_; }

  const SolverStats &stats() const { return stats_; }
  void write_dimacs(std::ostream &out) const;

private:
  struct Clause {
    std::vector<Lit> lits;
    bool learnt = false;
    bool removed = false;
    double activity = 0;
  };
  struct Watcher {
    int cref;
    Lit blocker;
  };
  static constexpr int kNoReason = -1;

  LBool value(Lit l) const {
    LBool v = assigns_[l.var()];
    if (v == LBool::Undef)
      return v;
    return (v == LBool::True) != l.sign() ? LBool::True : LBool::False;
  }
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }

  void attach(int cref);
  void enqueue(Lit p, int reason);
  int propagate();
  void analyze(int confl, std::vector<Lit> &learnt, int &bt_level);
  void analyze_final(Lit p);
  void cancel_until(int level);
  Lit pick_branch();
  void bump_var(Var v);
  void bump_clause(Clause &c);
  void reduce_db();
  Result search(std::int64_t nof_conflicts, const std::vector<Lit> &assumptions);

  void heap_insert(Var v);
  void heap_up(int i);
  void heap_down(int i);
  Var heap_pop();
  bool heap_less(Var a, Var b) const { return activity_[a] > activity_[b]; }

  std::vector<Clause> clauses_;
  std::vector<int> learnts_;
  std::vector<std::vector<Watcher>> watches_;
  std::vector<LBool> assigns_;
  std::vector<LBool> model_;
  std::vector<int> level_;
  std::vector<int> reason_;
  std::vector<char> polarity_;
  std::vector<char> seen_;
  std::vector<double> activity_;
  std::vector<int> heap_;
  std::vector<int> heap_index_;
  std::vector<Lit> trail_;
  std::vector<int> trail_lim_;
  std::vector<Lit> core_;
  std::vector<Lit> units_;
  std::size_t qhead_ = 0;
  std::size_t num_original_ = 0;
  double var_inc_ = 1.0;
  double clause_inc_ = 1.0;
  double max_learnts_ = 0;
  bool ok_ = true;
  std::int64_t budget_ = -1;
  std::int64_t budget_used_ = 0;
  SolverStats stats_;
};

} // namespace mcbv::sat
