#include "mcbv/bdd.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

namespace mcbv {

namespace {

BvValue value_from_bits(const std::vector<bool> &bits) {
  unsigned w = static_cast<unsigned>(bits.size());
  if (w <= 64) {
    std::uint64_t v = 0;
    for (unsigned i = 0; i < w; ++i)
      if (bits[i])
        v |= std::uint64_t{1} << i;
    return BvValue(w, v);
  }
  BvValue::Big v = 0;
  for (unsigned i = w; i-- > 0;)
    v = (v << 1) | (bits[i] ? 1 : 0);
  return BvValue::from_big(w, v);
}

std::uint64_t sat_mul_pow2(std::uint64_t c, unsigned k) {
  if (c == 0)
    return 0;
  if (k >= 64 || c > (~std::uint64_t{0} >> k))
    return ~std::uint64_t{0};
  return c << k;
}

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = a + b;
  return r < a ? ~std::uint64_t{0} : r;
}

} // namespace

std::size_t BddManager::TripleHash::operator()(const std::tuple<unsigned, BddRef, BddRef> &k) const {
  std::uint64_t h = std::get<0>(k);
  h = h * 0x9e3779b97f4a7c15ull + std::get<1>(k);
  h = h * 0x9e3779b97f4a7c15ull + std::get<2>(k);
  return static_cast<std::size_t>(h ^ (h >> 29));
}

BddManager::BddManager() {
  nodes_.push_back({kTerminalVar, False, False});
  nodes_.push_back({kTerminalVar, True, True});
}

BddRef BddManager::mk(unsigned var, BddRef lo, BddRef hi) {
  if (lo == hi)
    return lo;
  auto key = std::make_tuple(var, lo, hi);
  if (auto it = unique_.find(key); it != unique_.end())
    return it->second;
  if (budget_ != 0 && ++created_ > budget_)
    throw BddBudgetExceeded();
  BddRef r;
  if (!free_.empty()) {
    r = free_.back();
    free_.pop_back();
    nodes_[r] = {var, lo, hi};
    is_free_[r] = false;
  } else {
    r = static_cast<BddRef>(nodes_.size());
    nodes_.push_back({var, lo, hi});
    is_free_.push_back(false);
  }
  unique_.emplace(key, r);
  return r;
}

BddRef BddManager::bit(unsigned i) { return mk(i, False, True); }

BddRef BddManager::ite(BddRef f, BddRef g, BddRef h) {
  if (f == True)
    return g;
  if (f == False)
    return h;
  if (g == h)
    return g;
  if (g == True && h == False)
    return f;
  auto key = std::make_tuple(f, g, h);
  if (auto it = ite_cache_.find(key); it != ite_cache_.end())
    return it->second;
  unsigned v = std::min({nodes_[f].var, nodes_[g].var, nodes_[h].var});
  auto cof = [&](BddRef x, bool high) {
    if (nodes_[x].var != v)
      return x;
    return high ? nodes_[x].hi : nodes_[x].lo;
  };
  BddRef t = ite(cof(f, true), cof(g, true), cof(h, true));
  BddRef e = ite(cof(f, false), cof(g, false), cof(h, false));
  BddRef r = mk(v, e, t);
  ite_cache_.emplace(key, r);
  return r;
}

BddRef BddManager::bdd_not(BddRef a) { return ite(a, False, True); }
BddRef BddManager::bdd_and(BddRef a, BddRef b) { return ite(a, b, False); }
BddRef BddManager::bdd_or(BddRef a, BddRef b) { return ite(a, True, b); }
BddRef BddManager::bdd_xor(BddRef a, BddRef b) { return ite(a, bdd_not(b), b); }

BddRef BddManager::singleton(const BvValue &v) {
  BddRef node = True;
  for (unsigned i = v.width(); i-- > 0;)
    node = v.bit(i) ? mk(i, False, node) : mk(i, node, False);
  return node;
}

bool BddManager::contains(BddRef a, const BvValue &v) const {
  while (!is_terminal(a))
    a = v.bit(nodes_[a].var) ? nodes_[a].hi : nodes_[a].lo;
  return a == True;
}

BvValue BddManager::pick(BddRef a, unsigned width, const std::optional<BvValue> &hint) const {
  if (a == False)
    throw EmptySet();
  if (hint && hint->width() == width && contains(a, *hint))
    return *hint;
  std::vector<bool> bits(width, false);
  if (hint && hint->width() == width)
    for (unsigned i = 0; i < width; ++i)
      bits[i] = hint->bit(i);
  while (!is_terminal(a)) {
    const Node &n = nodes_[a];
    bool pref = bits[n.var];
    BddRef next = pref ? n.hi : n.lo;
    if (next == False) {
      pref = !pref;
      next = pref ? n.hi : n.lo;
    }
    bits[n.var] = pref;
    a = next;
  }
  return value_from_bits(bits);
}

std::uint64_t BddManager::count(BddRef a, unsigned width) {
  std::unordered_map<BddRef, std::uint64_t> memo;
  auto level = [&](BddRef x) { return is_terminal(x) ? width : nodes_[x].var; };
  // Iterative post-order to avoid deep recursion on wide variables.
  std::vector<BddRef> stack{a};
  while (!stack.empty()) {
    BddRef x = stack.back();
    if (is_terminal(x)) {
      memo[x] = x == True ? 1 : 0;
      stack.pop_back();
      continue;
    }
    if (memo.count(x)) {
      stack.pop_back();
      continue;
    }
    const Node &n = nodes_[x];
    bool ready = true;
    for (BddRef c : {n.lo, n.hi})
      if (!memo.count(c)) {
        stack.push_back(c);
        ready = false;
      }
    if (!ready)
      continue;
    std::uint64_t lo = sat_mul_pow2(memo[n.lo], level(n.lo) - n.var - 1);
    std::uint64_t hi = sat_mul_pow2(memo[n.hi], level(n.hi) - n.var - 1);
    memo[x] = sat_add(lo, hi);
    stack.pop_back();
  }
  return sat_mul_pow2(memo[a], level(a));
}

StatusResult BddManager::status(BddRef a, unsigned width) {
  if (a == False)
    return {SetStatus::Empty, BvValue()};
  if (count(a, width) == 1)
    return {SetStatus::Singleton, pick(a, width)};
  return {SetStatus::Many, BvValue()};
}

std::size_t BddManager::node_count(BddRef a) {
  if (is_terminal(a))
    return 0;
  if (auto it = size_cache_.find(a); it != size_cache_.end())
    return it->second;
  std::unordered_set<BddRef> seen;
  std::vector<BddRef> stack{a};
  while (!stack.empty()) {
    BddRef x = stack.back();
    stack.pop_back();
    if (is_terminal(x) || !seen.insert(x).second)
      continue;
    stack.push_back(nodes_[x].lo);
    stack.push_back(nodes_[x].hi);
  }
  size_cache_[a] = seen.size();
  return seen.size();
}

std::vector<BvValue> BddManager::enumerate(BddRef a, unsigned width) const {
  if (width > 24)
    throw std::invalid_argument("enumerate: width too large");
  std::vector<BvValue> out;
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << width); ++v) {
    BvValue bv(width, v);
    if (contains(a, bv))
      out.push_back(bv);
  }
  return out;
}

std::string BddManager::to_dot(BddRef a, const std::string &name) const {
  std::ostringstream out;
  out << "digraph " << name << " {\n";
  out << "  n0 [shape=box,label=\"0\"];\n  n1 [shape=box,label=\"1\"];\n";
  std::unordered_set<BddRef> seen;
  std::vector<BddRef> stack{a};
  while (!stack.empty()) {
    BddRef x = stack.back();
    stack.pop_back();
    if (is_terminal(x) || !seen.insert(x).second)
      continue;
    const Node &n = nodes_[x];
    out << "  n" << x << " [label=\"b" << n.var << "\"];\n";
    out << "  n" << x << " -> n" << n.lo << " [style=dashed];\n";
    out << "  n" << x << " -> n" << n.hi << ";\n";
    stack.push_back(n.lo);
    stack.push_back(n.hi);
  }
  out << "}\n";
  return out.str();
}

void BddManager::collect(const std::vector<BddRef> &roots) {
  std::vector<bool> marked(nodes_.size(), false);
  marked[False] = marked[True] = true;
  std::vector<BddRef> stack(roots.begin(), roots.end());
  while (!stack.empty()) {
    BddRef x = stack.back();
    stack.pop_back();
    if (x >= nodes_.size() || marked[x])
      continue;
    marked[x] = true;
    stack.push_back(nodes_[x].lo);
    stack.push_back(nodes_[x].hi);
  }
  for (BddRef r = 2; r < nodes_.size(); ++r) {
    if (marked[r] || is_free_[r])
      continue;
    unique_.erase(std::make_tuple(nodes_[r].var, nodes_[r].lo, nodes_[r].hi));
    is_free_[r] = true;
    free_.push_back(r);
  }
  ite_cache_.clear();
  size_cache_.clear();
}

namespace {

class BitEval {
public:
  BitEval(BddManager &mgr, const TermStore &store, TermId y, const Assignment &m)
      : b_(mgr), s_(store), y_(y), m_(m) {}

  BddRef boolean(TermId t) {
    if (auto it = bool_memo_.find(t); it != bool_memo_.end())
      return it->second;
    BddRef r = compute_bool(t);
    bool_memo_.emplace(t, r);
    return r;
  }

  const std::vector<BddRef> &bits(TermId t) {
    if (auto it = bv_memo_.find(t); it != bv_memo_.end())
      return it->second;
    auto r = compute_bits(t);
    return bv_memo_.emplace(t, std::move(r)).first->second;
  }

private:
  [[noreturn]] void not_unit(TermId t) const {
    throw NotUnit("constraint is not unit: unassigned variable in " + s_.to_string(t));
  }

  BddRef compute_bool(TermId t) {
    if (s_.is_evaluable(t, y_)) {
      auto v = evaluate_bool(s_, t, m_);
      if (!v)
        not_unit(t);
      return *v ? BddManager::True : BddManager::False;
    }
    const TermNode &n = s_.node(t);
    switch (n.kind) {
    case Kind::Not:
      return b_.bdd_not(boolean(n.args[0]));
    case Kind::And:
    case Kind::Or: {
      BddRef acc = n.kind == Kind::And ? BddManager::True : BddManager::False;
      for (TermId a : n.args)
        acc = n.kind == Kind::And ? b_.bdd_and(acc, boolean(a)) : b_.bdd_or(acc, boolean(a));
      return acc;
    }
    case Kind::Eq: {
      auto x = bits(n.args[0]);
      const auto &z = bits(n.args[1]);
      BddRef acc = BddManager::True;
      for (std::size_t i = 0; i < x.size(); ++i)
        acc = b_.bdd_and(acc, b_.bdd_not(b_.bdd_xor(x[i], z[i])));
      return acc;
    }
    case Kind::Ule:
    case Kind::Ult:
    case Kind::Sle:
    case Kind::Slt: {
      auto x = bits(n.args[0]);
      const auto &z = bits(n.args[1]);
      bool strict = n.kind == Kind::Ult || n.kind == Kind::Slt;
      bool is_signed = n.kind == Kind::Sle || n.kind == Kind::Slt;
      // Scan from the least significant bit; a differing higher bit decides.
      BddRef le = strict ? BddManager::False : BddManager::True;
      for (std::size_t i = 0; i < x.size(); ++i) {
        bool sign = is_signed && i + 1 == x.size();
        BddRef diff = b_.bdd_xor(x[i], z[i]);
        le = b_.ite(diff, sign ? x[i] : z[i], le);
      }
      return le;
    }
    default:
      throw std::logic_error("compute_bool: unexpected kind");
    }
  }

  std::vector<BddRef> add(const std::vector<BddRef> &x, const std::vector<BddRef> &z) {
    std::vector<BddRef> out(x.size());
    BddRef carry = BddManager::False;
    for (std::size_t i = 0; i < x.size(); ++i) {
      BddRef p = b_.bdd_xor(x[i], z[i]);
      out[i] = b_.bdd_xor(p, carry);
      if (i + 1 < x.size())
        carry = b_.bdd_or(b_.bdd_and(x[i], z[i]), b_.bdd_and(carry, p));
    }
    return out;
  }

  std::vector<BddRef> negate(const std::vector<BddRef> &x) {
    std::vector<BddRef> inv(x.size()), one(x.size(), BddManager::False);
    for (std::size_t i = 0; i < x.size(); ++i)
      inv[i] = b_.bdd_not(x[i]);
    one[0] = BddManager::True;
    return add(inv, one);
  }

  std::vector<BddRef> mul(const std::vector<BddRef> &x, const std::vector<BddRef> &z) {
    std::size_t w = x.size();
    std::vector<BddRef> acc(w, BddManager::False);
    for (std::size_t i = 0; i < w; ++i) {
      if (z[i] == BddManager::False)
        continue;
      std::vector<BddRef> pp(w, BddManager::False);
      for (std::size_t j = i; j < w; ++j)
        pp[j] = b_.bdd_and(x[j - i], z[i]);
      acc = add(acc, pp);
    }
    return acc;
  }

  std::vector<BddRef> compute_bits(TermId t) {
    const TermNode &n = s_.node(t);
    if (s_.is_evaluable(t, y_)) {
      auto v = evaluate_bv(s_, t, m_);
      if (!v)
        not_unit(t);
      std::vector<BddRef> out(n.width);
      for (unsigned i = 0; i < n.width; ++i)
        out[i] = v->bit(i) ? BddManager::True : BddManager::False;
      return out;
    }
    switch (n.kind) {
    case Kind::Variable: {
      std::vector<BddRef> out(n.width);
      for (unsigned i = 0; i < n.width; ++i)
        out[i] = b_.bit(i);
      return out;
    }
    case Kind::Concat: {
      std::vector<BddRef> out;
      out.reserve(n.width);
      for (std::size_t k = n.args.size(); k-- > 0;) {
        const auto &part = bits(n.args[k]);
        out.insert(out.end(), part.begin(), part.end());
      }
      return out;
    }
    case Kind::Extract: {
      const auto &a = bits(n.args[0]);
      return std::vector<BddRef>(a.begin() + n.p1, a.begin() + n.p0);
    }
    case Kind::Add:
    case Kind::Mul: {
      std::vector<BddRef> acc = bits(n.args[0]);
      for (std::size_t k = 1; k < n.args.size(); ++k) {
        const auto &next = bits(n.args[k]);
        acc = n.kind == Kind::Add ? add(acc, next) : mul(acc, next);
      }
      return acc;
    }
    case Kind::Neg:
      return negate(bits(n.args[0]));
    case Kind::BvNot: {
      std::vector<BddRef> out = bits(n.args[0]);
      for (BddRef &r : out)
        r = b_.bdd_not(r);
      return out;
    }
    case Kind::SignExtend: {
      std::vector<BddRef> out = bits(n.args[0]);
      BddRef msb = out.back();
      out.resize(n.width, msb);
      return out;
    }
    default:
      throw std::logic_error("compute_bits: unexpected kind");
    }
  }

  BddManager &b_;
  const TermStore &s_;
  TermId y_;
  const Assignment &m_;
  std::unordered_map<TermId, BddRef, TermIdHash> bool_memo_;
  std::unordered_map<TermId, std::vector<BddRef>, TermIdHash> bv_memo_;
};

} // namespace

std::size_t UnitCompiler::KeyHash::operator()(const Key &k) const {
  std::size_t h = (std::size_t{k.c.index} << 32) ^ k.y.index;
  for (const BvValue &v : k.values)
    h = h * 1000003u ^ v.hash();
  return h;
}

BddRef UnitCompiler::compile(const TermStore &store, TermId c, TermId y, const Assignment &m) {
  Key key{c, y, {}};
  for (TermId v : store.free_vars(c)) {
    if (v == y)
      continue;
    const BvValue *val = m.get(store, v);
    if (!val)
      throw NotUnit("variable " + store.var_name(v) + " of " + store.to_string(c) + " is unassigned");
    key.values.push_back(*val);
  }
  if (auto it = cache_.find(key); it != cache_.end()) {
    ++hits_;
    return it->second;
  }
  BitEval eval(mgr_, store, y, m);
  BddRef r = eval.boolean(c);
  cache_.emplace(std::move(key), r);
  return r;
}

} // namespace mcbv
