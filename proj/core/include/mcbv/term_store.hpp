#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "mcbv/bv_value.hpp"

namespace mcbv {

class SortError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Handle into a TermStore. Structurally equal terms share one handle.
struct TermId {
  static constexpr std::uint32_t kNone = 0xffffffffu;
  std::uint32_t index = kNone;

  constexpr TermId() = default;
  constexpr explicit TermId(std::uint32_t i) : index(i) {}
  constexpr bool valid() const { return index != kNone; }
  friend constexpr auto operator<=>(TermId, TermId) = default;
};

struct TermIdHash {
  std::size_t operator()(TermId t) const { return std::hash<std::uint32_t>{}(t.index); }
};

enum class Kind : std::uint8_t {
  Variable,
  Constant,
  Concat, ///< n-ary, first argument holds the most significant bits
  Extract, ///< bits [hi:lo), lo included, hi excluded
  Add,     ///< n-ary
  Neg,
  Mul, ///< n-ary
  BvNot,
  SignExtend,
  Ule,
  Ult,
  Sle,
  Slt,
  Eq,
  Not,
  And,
  Or,
};

const char *kind_name(Kind k);
bool is_atom_kind(Kind k);
bool is_bool_kind(Kind k);

struct TermNode {
  Kind kind;
  /// Bitvector width; 0 for Boolean terms.
  unsigned width = 0;
  /// Extract: hi; SignExtend: extension width.
  unsigned p0 = 0;
  /// Extract: lo.
  unsigned p1 = 0;
  /// Variable: variable index; Constant: constant-table index.
  std::uint32_t payload = 0;
  /// Tree size, saturating.
  std::uint32_t size = 1;
  std::vector<TermId> args;
  /// Sorted list of the variables occurring in the term.
  std::vector<TermId> free_vars;
};

/// Hash-consed store for QF_BV terms and atoms.
///
/// All constructors validate sorts and throw SortError on ill-sorted input.
/// Eq operands are stored in canonical (TermId) order, so `a = b` and
/// `b = a` are the same term.
class TermStore {
public:
  TermStore() = default;
  TermStore(const TermStore &) = delete;
  TermStore &operator=(const TermStore &) = delete;

  TermId mk_var(const std::string &name, unsigned width);
  TermId mk_const(const BvValue &value);
  TermId mk_const(unsigned width, std::uint64_t bits) { return mk_const(BvValue(width, bits)); }
  TermId mk_term(Kind kind, std::vector<TermId> args, unsigned p0 = 0, unsigned p1 = 0);

  TermId mk_extract(TermId t, unsigned hi, unsigned lo);
  TermId mk_concat(TermId hi, TermId lo) { return mk_term(Kind::Concat, {hi, lo}); }
  TermId mk_add(TermId a, TermId b) { return mk_term(Kind::Add, {a, b}); }
  TermId mk_sub(TermId a, TermId b) { return mk_add(a, mk_neg(b)); }
  TermId mk_neg(TermId a) { return mk_term(Kind::Neg, {a}); }
  TermId mk_mul(TermId a, TermId b) { return mk_term(Kind::Mul, {a, b}); }
  TermId mk_bvnot(TermId a) { return mk_term(Kind::BvNot, {a}); }
  TermId mk_sign_extend(TermId a, unsigned k) { return mk_term(Kind::SignExtend, {a}, k); }
  TermId mk_zero_extend(TermId a, unsigned k);
  TermId mk_eq(TermId a, TermId b) { return mk_term(Kind::Eq, {a, b}); }
  TermId mk_ule(TermId a, TermId b) { return mk_term(Kind::Ule, {a, b}); }
  TermId mk_ult(TermId a, TermId b) { return mk_term(Kind::Ult, {a, b}); }
  TermId mk_sle(TermId a, TermId b) { return mk_term(Kind::Sle, {a, b}); }
  TermId mk_slt(TermId a, TermId b) { return mk_term(Kind::Slt, {a, b}); }
  /// Negation with double-negation elimination.
  TermId mk_not(TermId a);
  TermId mk_and(std::vector<TermId> args) { return mk_term(Kind::And, std::move(args)); }
  TermId mk_or(std::vector<TermId> args) { return mk_term(Kind::Or, std::move(args)); }
  /// Ground atom that is always true (`#b1 = #b1`).
  TermId mk_true();
  TermId mk_false() { return mk_not(mk_true()); }

  const TermNode &node(TermId t) const { return nodes_.at(t.index); }
  Kind kind(TermId t) const { return node(t).kind; }
  unsigned width(TermId t) const { return node(t).width; }
  const std::vector<TermId> &args(TermId t) const { return node(t).args; }
  TermId arg(TermId t, std::size_t i) const { return node(t).args.at(i); }
  bool is_bool(TermId t) const { return is_bool_kind(kind(t)); }
  bool is_var(TermId t) const { return kind(t) == Kind::Variable; }
  bool is_const(TermId t) const { return kind(t) == Kind::Constant; }
  const BvValue &const_value(TermId t) const;
  bool is_zero_const(TermId t) const { return is_const(t) && const_value(t).is_zero(); }
  std::size_t size() const { return nodes_.size(); }

  const std::vector<TermId> &free_vars(TermId t) const { return node(t).free_vars; }
  bool is_ground(TermId t) const { return node(t).free_vars.empty(); }
  /// True iff `y` does not occur in `t`. Memoized per (t, y).
  bool is_evaluable(TermId t, TermId y) const;

  /// Variables in declaration order.
  const std::vector<TermId> &vars() const { return vars_; }
  std::size_t var_index(TermId v) const { return node(v).payload; }
  const std::string &var_name(TermId v) const { return var_names_.at(node(v).payload); }
  std::optional<TermId> find_var(const std::string &name) const;

  /// Strips one Not; returns the atom and polarity.
  std::pair<TermId, bool> atom_of(TermId lit) const;

  /// SMT-LIB rendering.
  std::string to_string(TermId t) const;

private:
  struct Key {
    Kind kind;
    unsigned p0, p1;
    std::uint32_t payload;
    std::vector<TermId> args;
    bool operator==(const Key &) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key &k) const;
  };

  TermId intern(TermNode node, std::uint32_t payload_for_key);
  void check_args(Kind kind, const std::vector<TermId> &args, unsigned p0, unsigned p1,
                  unsigned &width) const;

  std::vector<TermNode> nodes_;
  std::unordered_map<Key, TermId, KeyHash> table_;
  std::vector<BvValue> constants_;
  std::unordered_map<BvValue, std::uint32_t, BvValueHash> constant_index_;
  std::vector<TermId> vars_;
  std::vector<std::string> var_names_;
  std::unordered_map<std::string, TermId> var_by_name_;
  mutable std::unordered_map<std::uint64_t, bool> evaluable_cache_;
};

/// Partial assignment of variables to values, indexed by variable index.
class Assignment {
public:
  void set(const TermStore &store, TermId var, const BvValue &value);
  void unset(const TermStore &store, TermId var);
  const BvValue *get(const TermStore &store, TermId var) const;
  bool is_assigned(const TermStore &store, TermId var) const { return get(store, var) != nullptr; }
  void clear() { values_.clear(); }

private:
  std::vector<std::optional<BvValue>> values_;
};

using Value = std::variant<BvValue, bool>;

/// Standard-interpretation evaluation. Returns nullopt when some free
/// variable of `t` is unassigned.
std::optional<Value> evaluate(const TermStore &store, TermId t, const Assignment &m);
std::optional<BvValue> evaluate_bv(const TermStore &store, TermId t, const Assignment &m);
std::optional<bool> evaluate_bool(const TermStore &store, TermId t, const Assignment &m);

} // namespace mcbv
