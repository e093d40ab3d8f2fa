#include "mcbv/term_store.hpp"

#include <algorithm>
#include <sstream>

namespace mcbv {

const char *kind_name(Kind k) {
  switch (k) {
  case Kind::Variable: return "var";
  case Kind::Constant: return "const";
  case Kind::Concat: return "concat";
  case Kind::Extract: return "extract";
  case Kind::Add: return "bvadd";
  case Kind::Neg: return "bvneg";
  case Kind::Mul: return "bvmul";
  case Kind::BvNot: return "bvnot";
  case Kind::SignExtend: return "sign_extend";
  case Kind::Ule: return "bvule";
  case Kind::Ult: return "bvult";
  case Kind::Sle: return "bvsle";
  case Kind::Slt: return "bvslt";
  case Kind::Eq: return "=";
  case Kind::Not: return "not";
  case Kind::And: return "and";
  case Kind::Or: return "or";
  }
  return "?";
}

bool is_atom_kind(Kind k) {
  return k == Kind::Ule || k == Kind::Ult || k == Kind::Sle || k == Kind::Slt || k == Kind::Eq;
}

bool is_bool_kind(Kind k) {
  return is_atom_kind(k) || k == Kind::Not || k == Kind::And || k == Kind::Or;
}

std::size_t TermStore::KeyHash::operator()(const Key &k) const {
  std::size_t h = static_cast<std::size_t>(k.kind);
  auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2); };
  mix(k.p0);
  mix(k.p1);
  mix(k.payload);
  for (TermId a : k.args)
    mix(a.index);
  return h;
}

TermId TermStore::intern(TermNode node, std::uint32_t payload_for_key) {
  Key key{node.kind, node.p0, node.p1, payload_for_key, node.args};
  if (auto it = table_.find(key); it != table_.end())
    return it->second;
  // Derived data: tree size and sorted free-variable set.
  std::uint64_t size = 1;
  std::vector<TermId> fv;
  for (TermId a : node.args) {
    const TermNode &child = nodes_.at(a.index);
    size += child.size;
    std::vector<TermId> merged;
    merged.reserve(fv.size() + child.free_vars.size());
    std::set_union(fv.begin(), fv.end(), child.free_vars.begin(), child.free_vars.end(),
                   std::back_inserter(merged));
    fv = std::move(merged);
  }
  node.size = static_cast<std::uint32_t>(std::min<std::uint64_t>(size, 0xffffffffu));
  TermId id(static_cast<std::uint32_t>(nodes_.size()));
  if (node.kind == Kind::Variable)
    fv = {id};
  node.free_vars = std::move(fv);
  nodes_.push_back(std::move(node));
  table_.emplace(std::move(key), id);
  return id;
}

TermId TermStore::mk_var(const std::string &name, unsigned width) {
  if (width == 0)
    throw SortError("variable '" + name + "' must have positive width");
  if (auto it = var_by_name_.find(name); it != var_by_name_.end()) {
    if (this->width(it->second) != width)
      throw SortError("variable '" + name + "' redeclared with a different width");
    return it->second;
  }
  TermNode n;
  n.kind = Kind::Variable;
  n.width = width;
  n.payload = static_cast<std::uint32_t>(vars_.size());
  TermId id = intern(std::move(n), static_cast<std::uint32_t>(vars_.size()));
  vars_.push_back(id);
  var_names_.push_back(name);
  var_by_name_.emplace(name, id);
  return id;
}

TermId TermStore::mk_const(const BvValue &value) {
  if (value.width() == 0)
    throw SortError("constant must have positive width");
  std::uint32_t idx;
  if (auto it = constant_index_.find(value); it != constant_index_.end()) {
    idx = it->second;
  } else {
    idx = static_cast<std::uint32_t>(constants_.size());
    constants_.push_back(value);
    constant_index_.emplace(value, idx);
  }
  TermNode n;
  n.kind = Kind::Constant;
  n.width = value.width();
  n.payload = idx;
  return intern(std::move(n), idx);
}

const BvValue &TermStore::const_value(TermId t) const {
  const TermNode &n = node(t);
  if (n.kind != Kind::Constant)
    throw std::logic_error("const_value on non-constant term");
  return constants_.at(n.payload);
}

void TermStore::check_args(Kind kind, const std::vector<TermId> &args, unsigned p0, unsigned p1,
                           unsigned &width) const {
  auto require = [](bool ok, const std::string &msg) {
    if (!ok)
      throw SortError(msg);
  };
  for (TermId a : args)
    require(a.valid() && a.index < nodes_.size(), "invalid argument handle");
  auto bv = [&](TermId a) { return !is_bool(a); };
  auto all_bv_same_width = [&]() {
    for (TermId a : args)
      require(bv(a), std::string(kind_name(kind)) + ": Boolean argument where bitvector expected");
    for (TermId a : args)
      require(this->width(a) == this->width(args[0]),
              std::string(kind_name(kind)) + ": operand widths differ");
  };
  switch (kind) {
  case Kind::Variable:
  case Kind::Constant:
    throw SortError("use mk_var/mk_const for leaves");
  case Kind::Concat: {
    require(args.size() >= 2, "concat needs at least two arguments");
    unsigned w = 0;
    for (TermId a : args) {
      require(bv(a), "concat: Boolean argument");
      w += this->width(a);
    }
    width = w;
    return;
  }
  case Kind::Extract:
    require(args.size() == 1 && bv(args[0]), "extract takes one bitvector");
    require(p1 < p0 && p0 <= this->width(args[0]), "extract: bounds must satisfy 0 <= lo < hi <= width");
    width = p0 - p1;
    return;
  case Kind::Add:
  case Kind::Mul:
    require(args.size() >= 2, std::string(kind_name(kind)) + " needs at least two arguments");
    all_bv_same_width();
    width = this->width(args[0]);
    return;
  case Kind::Neg:
  case Kind::BvNot:
    require(args.size() == 1 && bv(args[0]), std::string(kind_name(kind)) + " takes one bitvector");
    width = this->width(args[0]);
    return;
  case Kind::SignExtend:
    require(args.size() == 1 && bv(args[0]), "sign_extend takes one bitvector");
    width = this->width(args[0]) + p0;
    return;
  case Kind::Ule:
  case Kind::Ult:
  case Kind::Sle:
  case Kind::Slt:
  case Kind::Eq:
    require(args.size() == 2, std::string(kind_name(kind)) + " takes two arguments");
    all_bv_same_width();
    width = 0;
    return;
  case Kind::Not:
    require(args.size() == 1 && is_bool(args[0]), "not takes one Boolean");
    width = 0;
    return;
  case Kind::And:
  case Kind::Or:
    require(!args.empty(), std::string(kind_name(kind)) + " needs arguments");
    for (TermId a : args)
      require(is_bool(a), std::string(kind_name(kind)) + ": bitvector argument");
    width = 0;
    return;
  }
}

TermId TermStore::mk_term(Kind kind, std::vector<TermId> args, unsigned p0, unsigned p1) {
  unsigned w = 0;
  check_args(kind, args, p0, p1, w);
  if (kind == Kind::Eq && args[1] < args[0])
    std::swap(args[0], args[1]);
  if (kind != Kind::Extract)
    p1 = 0;
  if (kind != Kind::Extract && kind != Kind::SignExtend)
    p0 = 0;
  TermNode n;
  n.kind = kind;
  n.width = w;
  n.p0 = p0;
  n.p1 = p1;
  n.args = std::move(args);
  return intern(std::move(n), 0);
}

TermId TermStore::mk_extract(TermId t, unsigned hi, unsigned lo) {
  return mk_term(Kind::Extract, {t}, hi, lo);
}

TermId TermStore::mk_zero_extend(TermId a, unsigned k) {
  if (k == 0)
    return a;
  return mk_concat(mk_const(BvValue::zero(k)), a);
}

TermId TermStore::mk_not(TermId a) {
  if (kind(a) == Kind::Not)
    return arg(a, 0);
  return mk_term(Kind::Not, {a});
}

TermId TermStore::mk_true() {
  TermId one = mk_const(1, 1);
  return mk_eq(one, one);
}

bool TermStore::is_evaluable(TermId t, TermId y) const {
  std::uint64_t key = (std::uint64_t{t.index} << 32) | y.index;
  if (auto it = evaluable_cache_.find(key); it != evaluable_cache_.end())
    return it->second;
  const auto &fv = node(t).free_vars;
  bool result = !std::binary_search(fv.begin(), fv.end(), y);
  evaluable_cache_.emplace(key, result);
  return result;
}

std::optional<TermId> TermStore::find_var(const std::string &name) const {
  if (auto it = var_by_name_.find(name); it != var_by_name_.end())
    return it->second;
  return std::nullopt;
}

std::pair<TermId, bool> TermStore::atom_of(TermId lit) const {
  if (kind(lit) == Kind::Not)
    return {arg(lit, 0), false};
  return {lit, true};
}

namespace {

void print(const TermStore &s, TermId t, std::ostringstream &out) {
  const TermNode &n = s.node(t);
  auto list = [&](const char *op) {
    out << '(' << op;
    for (TermId a : n.args) {
      out << ' ';
      print(s, a, out);
    }
    out << ')';
  };
  switch (n.kind) {
  case Kind::Variable:
    out << s.var_name(t);
    return;
  case Kind::Constant:
    out << "#b" << s.const_value(t).to_binary();
    return;
  case Kind::Concat: {
    // SMT-LIB concat is binary; nest to the right.
    for (std::size_t i = 0; i + 1 < n.args.size(); ++i) {
      out << "(concat ";
      print(s, n.args[i], out);
      out << ' ';
    }
    print(s, n.args.back(), out);
    for (std::size_t i = 0; i + 1 < n.args.size(); ++i)
      out << ')';
    return;
  }
  case Kind::Extract:
    out << "((_ extract " << (n.p0 - 1) << ' ' << n.p1 << ") ";
    print(s, n.args[0], out);
    out << ')';
    return;
  case Kind::SignExtend:
    out << "((_ sign_extend " << n.p0 << ") ";
    print(s, n.args[0], out);
    out << ')';
    return;
  default:
    list(kind_name(n.kind));
    return;
  }
}

} // namespace

std::string TermStore::to_string(TermId t) const {
  std::ostringstream out;
  print(*this, t, out);
  return out.str();
}

void Assignment::set(const TermStore &store, TermId var, const BvValue &value) {
  std::size_t i = store.var_index(var);
  if (values_.size() <= i)
    values_.resize(i + 1);
  values_[i] = value;
}

void Assignment::unset(const TermStore &store, TermId var) {
  std::size_t i = store.var_index(var);
  if (i < values_.size())
    values_[i].reset();
}

const BvValue *Assignment::get(const TermStore &store, TermId var) const {
  std::size_t i = store.var_index(var);
  if (i >= values_.size() || !values_[i])
    return nullptr;
  return &*values_[i];
}

namespace {

std::optional<BvValue> eval_bv(const TermStore &s, TermId t, const Assignment &m);

std::optional<bool> eval_bool(const TermStore &s, TermId t, const Assignment &m) {
  const TermNode &n = s.node(t);
  switch (n.kind) {
  case Kind::Not: {
    auto v = eval_bool(s, n.args[0], m);
    if (!v)
      return std::nullopt;
    return !*v;
  }
  case Kind::And:
  case Kind::Or: {
    bool is_and = n.kind == Kind::And;
    bool undefined = false;
    for (TermId a : n.args) {
      auto v = eval_bool(s, a, m);
      if (!v)
        undefined = true;
      else if (*v != is_and)
        return !is_and;
    }
    if (undefined)
      return std::nullopt;
    return is_and;
  }
  default:
    break;
  }
  auto a = eval_bv(s, n.args[0], m);
  if (!a)
    return std::nullopt;
  auto b = eval_bv(s, n.args[1], m);
  if (!b)
    return std::nullopt;
  switch (n.kind) {
  case Kind::Ule: return a->ule(*b);
  case Kind::Ult: return a->ult(*b);
  case Kind::Sle: return a->sle(*b);
  case Kind::Slt: return a->slt(*b);
  case Kind::Eq: return *a == *b;
  default: throw std::logic_error("eval_bool: not a Boolean term");
  }
}

std::optional<BvValue> eval_bv(const TermStore &s, TermId t, const Assignment &m) {
  const TermNode &n = s.node(t);
  switch (n.kind) {
  case Kind::Variable: {
    const BvValue *v = m.get(s, t);
    if (!v)
      return std::nullopt;
    return *v;
  }
  case Kind::Constant:
    return s.const_value(t);
  case Kind::Concat: {
    auto acc = eval_bv(s, n.args[0], m);
    if (!acc)
      return std::nullopt;
    for (std::size_t i = 1; i < n.args.size(); ++i) {
      auto v = eval_bv(s, n.args[i], m);
      if (!v)
        return std::nullopt;
      acc = acc->concat(*v);
    }
    return acc;
  }
  case Kind::Extract: {
    auto v = eval_bv(s, n.args[0], m);
    if (!v)
      return std::nullopt;
    return v->extract(n.p0, n.p1);
  }
  case Kind::Add:
  case Kind::Mul: {
    auto acc = eval_bv(s, n.args[0], m);
    if (!acc)
      return std::nullopt;
    for (std::size_t i = 1; i < n.args.size(); ++i) {
      auto v = eval_bv(s, n.args[i], m);
      if (!v)
        return std::nullopt;
      acc = n.kind == Kind::Add ? *acc + *v : *acc * *v;
    }
    return acc;
  }
  case Kind::Neg: {
    auto v = eval_bv(s, n.args[0], m);
    if (!v)
      return std::nullopt;
    return -*v;
  }
  case Kind::BvNot: {
    auto v = eval_bv(s, n.args[0], m);
    if (!v)
      return std::nullopt;
    return ~*v;
  }
  case Kind::SignExtend: {
    auto v = eval_bv(s, n.args[0], m);
    if (!v)
      return std::nullopt;
    return v->sign_extend(n.p0);
  }
  default:
    throw std::logic_error("eval_bv: not a bitvector term");
  }
}

} // namespace

std::optional<BvValue> evaluate_bv(const TermStore &store, TermId t, const Assignment &m) {
  return eval_bv(store, t, m);
}

std::optional<bool> evaluate_bool(const TermStore &store, TermId t, const Assignment &m) {
  return eval_bool(store, t, m);
}

std::optional<Value> evaluate(const TermStore &store, TermId t, const Assignment &m) {
  if (store.is_bool(t)) {
    auto v = eval_bool(store, t, m);
    if (!v)
      return std::nullopt;
    return Value{*v};
  }
  auto v = eval_bv(store, t, m);
  if (!v)
    return std::nullopt;
  return Value{*v};
}

} // namespace mcbv
