#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "mcbv/bv_value.hpp"
#include "mcbv/term_store.hpp"

namespace mcbv {

using BddRef = std::uint32_t;

class BddBudgetExceeded : public std::runtime_error {
public:
  BddBudgetExceeded() : std::runtime_error("BDD node budget exceeded") {}
};

class EmptySet : public std::runtime_error {
public:
  EmptySet() : std::runtime_error("pick from an empty set") {}
};

class NotUnit : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class SetStatus { Empty, Singleton, Many };

struct StatusResult {
  SetStatus status;
  /// Valid when status == Singleton.
  BvValue value;
};

/// ROBDD kernel. Node variables are bit positions of one bitvector, with bit
/// 0 tested at the root. Nodes are hash-consed, so equal sets have equal refs.
class BddManager {
public:
  static constexpr BddRef False = 0;
  static constexpr BddRef True = 1;

  BddManager();

  BddRef bit(unsigned i);
  BddRef mk(unsigned var, BddRef lo, BddRef hi);

  BddRef bdd_not(BddRef a);
  BddRef bdd_and(BddRef a, BddRef b);
  BddRef bdd_or(BddRef a, BddRef b);
  BddRef bdd_xor(BddRef a, BddRef b);
  BddRef ite(BddRef f, BddRef g, BddRef h);

  /// The set {v}.
  BddRef singleton(const BvValue &v);
  bool contains(BddRef a, const BvValue &v) const;
  StatusResult status(BddRef a, unsigned width);
  /// Member of the set. Returns `hint` when it is a member; otherwise walks
  /// from the root preferring the branch that agrees with the hint (or 0).
  BvValue pick(BddRef a, unsigned width, const std::optional<BvValue> &hint = std::nullopt) const;
  /// Saturating count of members.
  std::uint64_t count(BddRef a, unsigned width);
  /// Internal nodes reachable from `a`.
  std::size_t node_count(BddRef a);
  /// Members, for small widths.
  std::vector<BvValue> enumerate(BddRef a, unsigned width) const;

  std::string to_dot(BddRef a, const std::string &name = "bdd") const;

  /// Limit on nodes created from now on; 0 disables the limit.
  void set_budget(std::size_t nodes) {
    budget_ = nodes;
    created_ = 0;
  }
  std::size_t live_nodes() const { return nodes_.size() - free_.size(); }
  /// Frees everything not reachable from `roots`. Invalidates all other refs.
  void collect(const std::vector<BddRef> &roots);

  unsigned var_of(BddRef a) const { return nodes_[a].var; }
  BddRef lo(BddRef a) const { return nodes_[a].lo; }
  BddRef hi(BddRef a) const { return nodes_[a].hi; }
  bool is_terminal(BddRef a) const { return a <= True; }

private:
  struct Node {
    unsigned var;
    BddRef lo, hi;
  };
  struct TripleHash {
    std::size_t operator()(const std::tuple<unsigned, BddRef, BddRef> &k) const;
  };

  static constexpr unsigned kTerminalVar = 0xffffffffu;

  std::vector<Node> nodes_;
  std::vector<BddRef> free_;
  std::vector<bool> is_free_ = {false, false};
  std::unordered_map<std::tuple<unsigned, BddRef, BddRef>, BddRef, TripleHash> unique_;
  std::unordered_map<std::tuple<unsigned, BddRef, BddRef>, BddRef, TripleHash> ite_cache_;
  std::unordered_map<BddRef, std::size_t> size_cache_;
  std::size_t budget_ = 0;
  std::size_t created_ = 0;
};

/// Compiles constraints that are unit in one variable into BDDs over that
/// variable's bits, by bit-level symbolic evaluation.
class UnitCompiler {
public:
  explicit UnitCompiler(BddManager &mgr) : mgr_(mgr) {}

  /// Set of values v with `c` true under m extended by y := v. Throws
  /// NotUnit if another variable of `c` is unassigned, BddBudgetExceeded if
  /// the manager's budget runs out.
  BddRef compile(const TermStore &store, TermId c, TermId y, const Assignment &m);

  void clear_cache() { cache_.clear(); }
  std::size_t cache_hits() const { return hits_; }

private:
  struct Key {
    TermId c, y;
    std::vector<BvValue> values;
    bool operator==(const Key &) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key &k) const;
  };

  BddManager &mgr_;
  std::unordered_map<Key, BddRef, KeyHash> cache_;
  std::size_t hits_ = 0;
};

} // namespace mcbv
