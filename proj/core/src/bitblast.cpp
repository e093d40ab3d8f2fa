#include "mcbv/bitblast.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

namespace mcbv {

using sat::Lit;

Blaster::Blaster(const TermStore &store, sat::Solver &solver) : store_(store), solver_(solver) {
  true_ = Lit(solver_.new_var(), false);
  solver_.add_clause({true_});
}

Lit Blaster::mk_and(Lit a, Lit b) {
  if (a == false_lit() || b == false_lit() || a == ~b)
    return false_lit();
  if (a == true_)
    return b;
  if (b == true_ || a == b)
    return a;
  if (b < a)
    std::swap(a, b);
  auto key = std::make_tuple(0, a.x, b.x, 0);
  if (auto it = gates_.find(key); it != gates_.end())
    return it->second;
  Lit g(solver_.new_var(), false);
  solver_.add_clause({~g, a});
  solver_.add_clause({~g, b});
  solver_.add_clause({g, ~a, ~b});
  gates_.emplace(key, g);
  return g;
}

Lit Blaster::mk_xor(Lit a, Lit b) {
  if (a == false_lit())
    return b;
  if (a == true_)
    return ~b;
  if (b == false_lit())
    return a;
  if (b == true_)
    return ~a;
  if (a == b)
    return false_lit();
  if (a == ~b)
    return true_;
  bool flip = a.sign() != b.sign();
  if (a.sign())
    a = ~a;
  if (b.sign())
    b = ~b;
  if (b < a)
    std::swap(a, b);
  auto key = std::make_tuple(1, a.x, b.x, 0);
  Lit g;
  if (auto it = gates_.find(key); it != gates_.end()) {
    g = it->second;
  } else {
    g = Lit(solver_.new_var(), false);
    solver_.add_clause({~g, a, b});
    solver_.add_clause({~g, ~a, ~b});
    solver_.add_clause({g, ~a, b});
    solver_.add_clause({g, a, ~b});
    gates_.emplace(key, g);
  }
  return flip ? ~g : g;
}

Lit Blaster::mk_ite(Lit c, Lit t, Lit e) {
  if (c == true_)
    return t;
  if (c == false_lit())
    return e;
  if (t == e)
    return t;
  if (t == true_)
    return mk_or(c, e);
  if (t == false_lit())
    return mk_and(~c, e);
  if (e == true_)
    return mk_or(~c, t);
  if (e == false_lit())
    return mk_and(c, t);
  if (t == ~e)
    return ~mk_xor(c, t);
  auto key = std::make_tuple(2, c.x, t.x, e.x);
  if (auto it = gates_.find(key); it != gates_.end())
    return it->second;
  Lit g(solver_.new_var(), false);
  solver_.add_clause({~c, ~t, g});
  solver_.add_clause({~c, t, ~g});
  solver_.add_clause({c, ~e, g});
  solver_.add_clause({c, e, ~g});
  gates_.emplace(key, g);
  return g;
}

std::vector<Lit> Blaster::add(const std::vector<Lit> &a, const std::vector<Lit> &b) {
  std::vector<Lit> out(a.size());
  Lit carry = false_lit();
  for (std::size_t i = 0; i < a.size(); ++i) {
    Lit p = mk_xor(a[i], b[i]);
    out[i] = mk_xor(p, carry);
    if (i + 1 < a.size())
      carry = mk_or(mk_and(a[i], b[i]), mk_and(carry, p));
  }
  return out;
}

std::vector<Lit> Blaster::negate(const std::vector<Lit> &a) {
  std::vector<Lit> inv(a.size()), one(a.size(), false_lit());
  for (std::size_t i = 0; i < a.size(); ++i)
    inv[i] = ~a[i];
  one[0] = true_;
  return add(inv, one);
}

std::vector<Lit> Blaster::mul(const std::vector<Lit> &a, const std::vector<Lit> &b) {
  std::size_t w = a.size();
  std::vector<Lit> acc(w, false_lit());
  for (std::size_t i = 0; i < w; ++i) {
    if (b[i] == false_lit())
      continue;
    std::vector<Lit> pp(w, false_lit());
    for (std::size_t j = i; j < w; ++j)
      pp[j] = mk_and(a[j - i], b[i]);
    acc = add(acc, pp);
  }
  return acc;
}

Lit Blaster::compare(const std::vector<Lit> &a, const std::vector<Lit> &b, bool strict, bool is_signed) {
  Lit le = strict ? false_lit() : true_;
  for (std::size_t i = 0; i < a.size(); ++i) {
    bool sign = is_signed && i + 1 == a.size();
    le = mk_ite(mk_xor(a[i], b[i]), sign ? a[i] : b[i], le);
  }
  return le;
}

const std::vector<Lit> &Blaster::bits(TermId t) {
  if (auto it = bv_cache_.find(t); it != bv_cache_.end())
    return it->second;
  auto r = compute_bits(t);
  return bv_cache_.emplace(t, std::move(r)).first->second;
}

Lit Blaster::bool_lit(TermId t) {
  if (auto it = bool_cache_.find(t); it != bool_cache_.end())
    return it->second;
  Lit r = compute_bool(t);
  bool_cache_.emplace(t, r);
  return r;
}

void Blaster::assert_true(TermId t) { solver_.add_clause({bool_lit(t)}); }

std::vector<Lit> Blaster::compute_bits(TermId t) {
  const TermNode &n = store_.node(t);
  switch (n.kind) {
  case Kind::Variable: {
    std::vector<Lit> out(n.width);
    for (unsigned i = 0; i < n.width; ++i)
      out[i] = Lit(solver_.new_var(), false);
    var_bits_[t] = true;
    return out;
  }
  case Kind::Constant: {
    const BvValue &v = store_.const_value(t);
    std::vector<Lit> out(n.width);
    for (unsigned i = 0; i < n.width; ++i)
      out[i] = v.bit(i) ? true_ : false_lit();
    return out;
  }
  case Kind::Concat: {
    std::vector<Lit> out;
    out.reserve(n.width);
    for (std::size_t k = n.args.size(); k-- > 0;) {
      const auto &part = bits(n.args[k]);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }
  case Kind::Extract: {
    const auto &a = bits(n.args[0]);
    return std::vector<Lit>(a.begin() + n.p1, a.begin() + n.p0);
  }
  case Kind::Add:
  case Kind::Mul: {
    std::vector<Lit> acc = bits(n.args[0]);
    for (std::size_t k = 1; k < n.args.size(); ++k) {
      std::vector<Lit> next = bits(n.args[k]);
      acc = n.kind == Kind::Add ? add(acc, next) : mul(acc, next);
    }
    return acc;
  }
  case Kind::Neg:
    return negate(bits(n.args[0]));
  case Kind::BvNot: {
    std::vector<Lit> out = bits(n.args[0]);
    for (Lit &l : out)
      l = ~l;
    return out;
  }
  case Kind::SignExtend: {
    std::vector<Lit> out = bits(n.args[0]);
    Lit msb = out.back();
    out.resize(n.width, msb);
    return out;
  }
  default:
    throw std::logic_error("Blaster: Boolean term where bitvector expected");
  }
}

Lit Blaster::compute_bool(TermId t) {
  const TermNode &n = store_.node(t);
  switch (n.kind) {
  case Kind::Not:
    return ~bool_lit(n.args[0]);
  case Kind::And:
  case Kind::Or: {
    bool is_and = n.kind == Kind::And;
    Lit acc = is_and ? true_ : false_lit();
    for (TermId a : n.args)
      acc = is_and ? mk_and(acc, bool_lit(a)) : mk_or(acc, bool_lit(a));
    return acc;
  }
  case Kind::Eq: {
    std::vector<Lit> a = bits(n.args[0]);
    const auto &b = bits(n.args[1]);
    Lit acc = true_;
    for (std::size_t i = 0; i < a.size(); ++i)
      acc = mk_and(acc, ~mk_xor(a[i], b[i]));
    return acc;
  }
  case Kind::Ule:
  case Kind::Ult:
  case Kind::Sle:
  case Kind::Slt: {
    std::vector<Lit> a = bits(n.args[0]);
    const auto &b = bits(n.args[1]);
    return compare(a, b, n.kind == Kind::Ult || n.kind == Kind::Slt,
                   n.kind == Kind::Sle || n.kind == Kind::Slt);
  }
  default:
    throw std::logic_error("Blaster: bitvector term where Boolean expected");
  }
}

std::vector<TermId> explain_bb(TermStore &store, const std::vector<TermId> &core, TermId y,
                               const Assignment &m, const BbOptions &opts, BbStats *stats) {
  sat::Solver solver;
  Blaster blaster(store, solver);
  std::vector<TermId> vars;
  for (TermId c : core) {
    blaster.assert_true(c);
    for (TermId v : store.free_vars(c))
      if (v != y && std::find(vars.begin(), vars.end(), v) == vars.end())
        vars.push_back(v);
  }
  std::sort(vars.begin(), vars.end(),
            [&](TermId a, TermId b) { return store.var_index(a) < store.var_index(b); });

  struct BitRef {
    TermId var;
    unsigned bit;
    bool value;
  };
  std::map<int, BitRef> by_var;
  std::vector<Lit> assumptions;
  for (TermId v : vars) {
    const BvValue *val = m.get(store, v);
    if (!val)
      throw std::invalid_argument("explain_bb: variable " + store.var_name(v) + " is unassigned");
    const auto &bits = blaster.var_bits(v);
    for (unsigned i = 0; i < bits.size(); ++i) {
      bool b = val->bit(i);
      Lit a = b ? bits[i] : ~bits[i];
      assumptions.push_back(a);
      by_var[a.var()] = {v, i, b};
    }
  }
  if (opts.dimacs) {
    for (const auto &[sv, ref] : by_var)
      *opts.dimacs << "c assume " << store.var_name(ref.var) << '[' << ref.bit << "] = " << ref.value
                   << " (var " << sv + 1 << ")\n";
    solver.write_dimacs(*opts.dimacs);
  }
  if (solver.solve(assumptions) != sat::Result::Unsat)
    throw std::runtime_error("explain_bb: core is satisfiable under the model");
  std::vector<Lit> core_bits = solver.core();
  for (unsigned attempt = 0, idx = 0; attempt < opts.minimize_budget && idx < core_bits.size(); ++attempt) {
    std::vector<Lit> trial;
    for (unsigned k = 0; k < core_bits.size(); ++k)
      if (k != idx)
        trial.push_back(core_bits[k]);
    if (solver.solve(trial) == sat::Result::Unsat)
      core_bits = solver.core();
    else
      ++idx;
  }

  std::vector<BitRef> refs;
  for (Lit l : core_bits)
    refs.push_back(by_var.at(l.var()));
  std::sort(refs.begin(), refs.end(), [&](const BitRef &a, const BitRef &b) {
    if (a.var != b.var)
      return store.var_index(a.var) < store.var_index(b.var);
    return a.bit > b.bit;
  });
  std::vector<TermId> out;
  for (const BitRef &r : refs) {
    TermId slice = store.width(r.var) == 1 ? r.var : store.mk_extract(r.var, r.bit + 1, r.bit);
    out.push_back(store.mk_not(store.mk_eq(slice, store.mk_const(1, r.value ? 1 : 0))));
  }
  if (stats) {
    ++stats->calls;
    stats->core_bits += core_bits.size();
    stats->total_bits += assumptions.size();
  }
  return out;
}

bool is_valid_clause(const TermStore &store, const std::vector<TermId> &clause) {
  sat::Solver solver;
  Blaster blaster(store, solver);
  for (TermId l : clause)
    solver.add_clause({~blaster.bool_lit(l)});
  return solver.solve() == sat::Result::Unsat;
}

bool is_satisfiable(const TermStore &store, const std::vector<TermId> &formulas) {
  sat::Solver solver;
  Blaster blaster(store, solver);
  for (TermId f : formulas)
    blaster.assert_true(f);
  return solver.solve() == sat::Result::Sat;
}

std::string InterpolantCheck::describe() const {
  std::ostringstream out;
  out << "implied=" << implied << " scoped=" << scoped << " falsified=" << falsified;
  return out.str();
}

InterpolantCheck check_interpolant(const TermStore &store, const std::vector<TermId> &core,
                                   const std::vector<TermId> &interpolant, TermId y, const Assignment &m) {
  InterpolantCheck r;
  {
    sat::Solver solver;
    Blaster blaster(store, solver);
    for (TermId c : core)
      blaster.assert_true(c);
    for (TermId l : interpolant)
      solver.add_clause({~blaster.bool_lit(l)});
    r.implied = solver.solve() == sat::Result::Unsat;
  }
  r.scoped = true;
  r.falsified = true;
  for (TermId l : interpolant) {
    for (TermId v : store.free_vars(l))
      if (v == y || !m.is_assigned(store, v))
        r.scoped = false;
    auto val = evaluate_bool(store, l, m);
    if (!val || *val)
      r.falsified = false;
  }
  return r;
}

} // namespace mcbv
