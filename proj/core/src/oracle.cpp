#include "mcbv/oracle.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>

namespace mcbv {

TooLarge::TooLarge(unsigned bits)
    : std::runtime_error("search space of 2^" + std::to_string(bits) + " assignments is too large"), bits_(bits) {}

namespace {

std::uint64_t mask(unsigned w) { return w >= 64 ? ~0ull : (1ull << w) - 1; }

std::int64_t sgn(std::uint64_t v, unsigned w) {
  if (w < 64 && ((v >> (w - 1)) & 1))
    return static_cast<std::int64_t>(v | ~mask(w));
  return static_cast<std::int64_t>(v);
}

// Straight-line program over 64-bit slots. Independent of the library's
// evaluator so the two can be checked against each other.
struct Program {
  struct Op {
    Kind kind;
    unsigned width;
    unsigned p0, p1;
    std::vector<std::uint32_t> args;
    std::uint64_t constant = 0;
    int var = -1;
  };
  std::vector<Op> ops;
  std::vector<std::uint32_t> roots;
  std::vector<std::uint64_t> slots;

  bool compile(const TermStore &s, TermId t, const std::unordered_map<TermId, int, TermIdHash> &vars,
               std::unordered_map<TermId, std::uint32_t, TermIdHash> &memo, std::uint32_t &out) {
    if (auto it = memo.find(t); it != memo.end()) {
      out = it->second;
      return true;
    }
    const TermNode &n = s.node(t);
    if (n.width > 64)
      return false;
    Op op{n.kind, n.width, n.p0, n.p1, {}, 0, -1};
    for (TermId a : n.args) {
      std::uint32_t slot;
      if (!compile(s, a, vars, memo, slot))
        return false;
      op.args.push_back(slot);
    }
    if (n.kind == Kind::Constant)
      op.constant = s.const_value(t).small();
    if (n.kind == Kind::Variable)
      op.var = vars.at(t);
    out = static_cast<std::uint32_t>(ops.size());
    ops.push_back(std::move(op));
    memo.emplace(t, out);
    return true;
  }

  void run(const std::vector<std::uint64_t> &values) {
    slots.resize(ops.size());
    for (std::size_t i = 0; i < ops.size(); ++i) {
      const Op &o = ops[i];
      auto a = [&](std::size_t k) { return slots[o.args[k]]; };
      auto aw = [&](std::size_t k) { return ops[o.args[k]].width; };
      std::uint64_t r = 0;
      switch (o.kind) {
      case Kind::Variable: r = values[o.var]; break;
      case Kind::Constant: r = o.constant; break;
      case Kind::Concat:
        for (std::size_t k = 0; k < o.args.size(); ++k)
          r = (aw(k) >= 64 ? 0 : r << aw(k)) | a(k);
        break;
      case Kind::Extract: r = (a(0) >> o.p1) & mask(o.p0 - o.p1); break;
      case Kind::Add:
        for (std::size_t k = 0; k < o.args.size(); ++k)
          r += a(k);
        break;
      case Kind::Neg: r = 0 - a(0); break;
      case Kind::Mul:
        r = 1;
        for (std::size_t k = 0; k < o.args.size(); ++k)
          r *= a(k);
        break;
      case Kind::BvNot: r = ~a(0); break;
      case Kind::SignExtend: r = static_cast<std::uint64_t>(sgn(a(0), aw(0))); break;
      case Kind::Ule: r = a(0) <= a(1); break;
      case Kind::Ult: r = a(0) < a(1); break;
      case Kind::Sle: r = sgn(a(0), aw(0)) <= sgn(a(1), aw(1)); break;
      case Kind::Slt: r = sgn(a(0), aw(0)) < sgn(a(1), aw(1)); break;
      case Kind::Eq: r = a(0) == a(1); break;
      case Kind::Not: r = !a(0); break;
      case Kind::And:
        r = 1;
        for (std::size_t k = 0; k < o.args.size(); ++k)
          r &= a(k);
        break;
      case Kind::Or:
        for (std::size_t k = 0; k < o.args.size(); ++k)
          r |= a(k);
        break;
      }
      slots[i] = o.width ? r & mask(o.width) : r;
    }
  }
};

} // namespace

OracleResult brute_force(const TermStore &store, const std::vector<TermId> &assertions, unsigned max_bits) {
  std::vector<TermId> vars;
  for (TermId a : assertions)
    for (TermId v : store.free_vars(a))
      vars.push_back(v);
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  unsigned bits = 0;
  for (TermId v : vars)
    bits += store.width(v);
  if (bits > max_bits)
    throw TooLarge(bits);

  std::unordered_map<TermId, int, TermIdHash> index;
  for (std::size_t i = 0; i < vars.size(); ++i)
    index.emplace(vars[i], static_cast<int>(i));
  Program prog;
  std::unordered_map<TermId, std::uint32_t, TermIdHash> memo;
  bool compiled = true;
  for (TermId a : assertions) {
    std::uint32_t slot;
    if (!prog.compile(store, a, index, memo, slot)) {
      compiled = false;
      break;
    }
    prog.roots.push_back(slot);
  }

  OracleResult res;
  std::vector<std::uint64_t> values(vars.size(), 0);
  auto holds = [&] {
    if (compiled) {
      prog.run(values);
      for (std::uint32_t r : prog.roots)
        if (!prog.slots[r])
          return false;
      return true;
    }
    // Some intermediate term is wider than 64 bits.
    Assignment m;
    for (std::size_t i = 0; i < vars.size(); ++i)
      m.set(store, vars[i], BvValue(store.width(vars[i]), values[i]));
    for (TermId a : assertions)
      if (!*evaluate_bool(store, a, m))
        return false;
    return true;
  };
  for (;;) {
    ++res.checked;
    if (holds()) {
      res.sat = true;
      for (std::size_t i = 0; i < vars.size(); ++i)
        res.model.set(store, vars[i], BvValue(store.width(vars[i]), values[i]));
      return res;
    }
    std::size_t i = 0;
    for (; i < vars.size(); ++i) {
      values[i] = (values[i] + 1) & mask(store.width(vars[i]));
      if (values[i] != 0)
        break;
    }
    if (i == vars.size())
      return res;
  }
}

} // namespace mcbv
