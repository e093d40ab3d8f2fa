#include "mcbv/normalizer.hpp"

#include <algorithm>
#include <stdexcept>

#include "mcbv/bitblast.hpp"

namespace mcbv {

const char *rule_name(Rule r) {
  switch (r) {
  case Rule::SltToSle: return "slt-to-sle";
  case Rule::UltToUle: return "ult-to-ule";
  case Rule::SleToUle: return "sle-to-ule";
  case Rule::EqToUle: return "eq-to-ule";
  case Rule::ExtractSplit: return "extract-split";
  case Rule::LowerOfUpper: return "lower-of-upper";
  case Rule::UpperOfConcatHigh: return "upper-of-concat-high";
  case Rule::UpperOfConcatLow: return "upper-of-concat-low";
  case Rule::LowerOfConcatLow: return "lower-of-concat-low";
  case Rule::LowerOfConcatHigh: return "lower-of-concat-high";
  case Rule::PowerOfTwoMul: return "power-of-two-mul";
  case Rule::LowerOfAdd: return "lower-of-add";
  case Rule::LowerOfMul: return "lower-of-mul";
  case Rule::LowerOfNeg: return "lower-of-neg";
  case Rule::BvNotToNeg: return "bvnot-to-neg";
  case Rule::SignExtendToConcat: return "sext-to-concat";
  case Rule::ConcatSplit: return "concat-split";
  }
  return "?";
}

namespace {

// Splits an n-ary concatenation into (all but the last part, last part).
std::pair<TermId, TermId> concat_halves(TermStore &s, TermId t) {
  const auto &a = s.args(t);
  TermId u2 = a.back();
  if (a.size() == 2)
    return {a[0], u2};
  return {s.mk_term(Kind::Concat, std::vector<TermId>(a.begin(), a.end() - 1)), u2};
}

TermId half_const(TermStore &s, unsigned w) { return s.mk_const(BvValue::power_of_two(w, w - 1)); }

} // namespace

std::optional<TermId> rewrite_once(TermStore &s, TermId t, Rule rule) {
  const TermNode n = s.node(t);
  auto is_lower = [&] { return n.kind == Kind::Extract && n.p1 == 0 && n.p0 < s.width(n.args[0]); };
  auto is_upper = [&] { return n.kind == Kind::Extract && n.p1 > 0 && n.p0 == s.width(n.args[0]); };
  switch (rule) {
  case Rule::SltToSle:
    if (n.kind != Kind::Slt)
      return std::nullopt;
    return s.mk_not(s.mk_sle(n.args[1], n.args[0]));
  case Rule::UltToUle:
    if (n.kind != Kind::Ult)
      return std::nullopt;
    return s.mk_not(s.mk_ule(n.args[1], n.args[0]));
  case Rule::SleToUle: {
    if (n.kind != Kind::Sle)
      return std::nullopt;
    TermId h = half_const(s, s.width(n.args[0]));
    return s.mk_ule(s.mk_add(n.args[0], h), s.mk_add(n.args[1], h));
  }
  case Rule::EqToUle:
    if (n.kind != Kind::Eq)
      return std::nullopt;
    return s.mk_ule(s.mk_sub(n.args[0], n.args[1]), s.mk_const(BvValue::zero(s.width(n.args[0]))));
  case Rule::ExtractSplit:
    if (n.kind != Kind::Extract || n.p1 == 0 || n.p0 == s.width(n.args[0]))
      return std::nullopt;
    return s.mk_extract(s.mk_extract(n.args[0], n.p0, 0), n.p0, n.p1);
  case Rule::LowerOfUpper: {
    if (!is_lower())
      return std::nullopt;
    TermId inner = n.args[0];
    const TermNode m = s.node(inner);
    if (m.kind != Kind::Extract || m.p1 == 0 || m.p0 != s.width(m.args[0]))
      return std::nullopt;
    unsigned h = n.p0, l = m.p1;
    return s.mk_extract(s.mk_extract(m.args[0], h + l, 0), h + l, l);
  }
  case Rule::UpperOfConcatHigh:
  case Rule::UpperOfConcatLow: {
    if (!is_upper() || s.kind(n.args[0]) != Kind::Concat)
      return std::nullopt;
    unsigned l = n.p1;
    auto [u1, u2] = concat_halves(s, n.args[0]);
    unsigned w2 = s.width(u2);
    if (rule == Rule::UpperOfConcatHigh) {
      if (w2 > l)
        return std::nullopt;
      return l == w2 ? u1 : s.mk_extract(u1, s.width(u1), l - w2);
    }
    if (w2 <= l)
      return std::nullopt;
    return s.mk_concat(u1, s.mk_extract(u2, w2, l));
  }
  case Rule::LowerOfConcatLow:
  case Rule::LowerOfConcatHigh: {
    if (!is_lower() || s.kind(n.args[0]) != Kind::Concat)
      return std::nullopt;
    unsigned h = n.p0;
    auto [u1, u2] = concat_halves(s, n.args[0]);
    unsigned w2 = s.width(u2);
    if (rule == Rule::LowerOfConcatLow) {
      if (h > w2)
        return std::nullopt;
      return h == w2 ? u2 : s.mk_extract(u2, h, 0);
    }
    if (h <= w2)
      return std::nullopt;
    return s.mk_concat(s.mk_extract(u1, h - w2, 0), u2);
  }
  case Rule::PowerOfTwoMul: {
    if (n.kind != Kind::Mul || n.args.size() != 2)
      return std::nullopt;
    for (int i = 0; i < 2; ++i) {
      TermId c = n.args[i], u = n.args[1 - i];
      if (!s.is_const(c))
        continue;
      auto k = s.const_value(c).exact_log2();
      if (!k)
        continue;
      if (*k == 0)
        return u;
      unsigned w = n.width;
      return s.mk_concat(s.mk_extract(u, w - *k, 0), s.mk_const(BvValue::zero(*k)));
    }
    return std::nullopt;
  }
  case Rule::LowerOfAdd:
  case Rule::LowerOfMul: {
    Kind want = rule == Rule::LowerOfAdd ? Kind::Add : Kind::Mul;
    if (!is_lower() || s.kind(n.args[0]) != want)
      return std::nullopt;
    std::vector<TermId> parts;
    for (TermId a : s.args(n.args[0]))
      parts.push_back(s.mk_extract(a, n.p0, 0));
    return s.mk_term(want, parts);
  }
  case Rule::LowerOfNeg:
    if (!is_lower() || s.kind(n.args[0]) != Kind::Neg)
      return std::nullopt;
    return s.mk_neg(s.mk_extract(s.arg(n.args[0], 0), n.p0, 0));
  case Rule::BvNotToNeg:
    if (n.kind != Kind::BvNot)
      return std::nullopt;
    return s.mk_neg(s.mk_add(n.args[0], s.mk_const(BvValue::one(n.width))));
  case Rule::SignExtendToConcat: {
    if (n.kind != Kind::SignExtend)
      return std::nullopt;
    TermId u = n.args[0];
    unsigned k = n.p0, w = s.width(u);
    if (k == 0)
      return u;
    TermId zk = s.mk_const(BvValue::zero(k)), h = half_const(s, w);
    return s.mk_sub(s.mk_concat(zk, s.mk_add(u, h)), s.mk_concat(zk, h));
  }
  case Rule::ConcatSplit: {
    if (n.kind != Kind::Concat)
      return std::nullopt;
    auto [u1, u2] = concat_halves(s, t);
    return s.mk_add(s.mk_concat(u1, s.mk_const(BvValue::zero(s.width(u2)))),
                    s.mk_concat(s.mk_const(BvValue::zero(s.width(u1))), u2));
  }
  }
  return std::nullopt;
}

void Normalizer::fired(Rule r) {
  if (log_ && std::find(log_->begin(), log_->end(), r) == log_->end())
    log_->push_back(r);
}

TermId Normalizer::canonical(TermId t) {
  if (auto it = canon_.find(t); it != canon_.end())
    return it->second;
  TermId r = store_.is_bool(t) ? canon_bool(t) : canon_bv(t);
  canon_.emplace(t, r);
  return r;
}

TermId Normalizer::canon_bool(TermId t) {
  const TermNode n = store_.node(t);
  switch (n.kind) {
  case Kind::Not: return store_.mk_not(canonical(n.args[0]));
  case Kind::And:
  case Kind::Or: {
    std::vector<TermId> a;
    for (TermId x : n.args)
      a.push_back(canonical(x));
    return store_.mk_term(n.kind, a);
  }
  default: break;
  }
  TermId a = canonical(n.args[0]), b = canonical(n.args[1]);
  unsigned w = store_.width(a);
  switch (n.kind) {
  case Kind::Ule: return store_.mk_ule(a, b);
  case Kind::Ult: fired(Rule::UltToUle); return store_.mk_not(store_.mk_ule(b, a));
  case Kind::Slt:
    fired(Rule::SltToSle);
    std::swap(a, b);
    [[fallthrough]];
  case Kind::Sle: {
    fired(Rule::SleToUle);
    TermId h = half_const(store_, w);
    TermId r = store_.mk_ule(add({a, h}), add({b, h}));
    return n.kind == Kind::Slt ? store_.mk_not(r) : r;
  }
  case Kind::Eq:
    fired(Rule::EqToUle);
    return store_.mk_ule(sub(a, b), store_.mk_const(BvValue::zero(w)));
  default: throw std::logic_error("canon_bool: unexpected kind");
  }
}

TermId Normalizer::canon_bv(TermId t) {
  const TermNode n = store_.node(t);
  switch (n.kind) {
  case Kind::Variable:
  case Kind::Constant: return t;
  case Kind::Extract: {
    TermId u = canonical(n.args[0]);
    unsigned h = n.p0, l = n.p1, w = store_.width(u);
    if (l == 0)
      return lower(u, h);
    if (h == w)
      return upper(u, l);
    fired(Rule::ExtractSplit);
    return upper(lower(u, h), l);
  }
  case Kind::Concat:
  case Kind::Add:
  case Kind::Mul: {
    std::vector<TermId> a;
    for (TermId x : n.args)
      a.push_back(canonical(x));
    if (n.kind == Kind::Concat)
      return concat(a);
    return n.kind == Kind::Add ? add(a) : mul(a);
  }
  case Kind::Neg: return neg(canonical(n.args[0]));
  case Kind::BvNot:
    fired(Rule::BvNotToNeg);
    return neg(add({canonical(n.args[0]), store_.mk_const(BvValue::one(n.width))}));
  case Kind::SignExtend: {
    TermId u = canonical(n.args[0]);
    unsigned k = n.p0, w = store_.width(u);
    if (k == 0)
      return u;
    fired(Rule::SignExtendToConcat);
    TermId zk = store_.mk_const(BvValue::zero(k)), h = half_const(store_, w);
    return sub(concat({zk, add({u, h})}), concat({zk, h}));
  }
  default: throw std::logic_error("canon_bv: unexpected kind");
  }
}

TermId Normalizer::lower(TermId t, unsigned h) {
  const TermNode n = store_.node(t);
  if (h == n.width)
    return t;
  switch (n.kind) {
  case Kind::Constant: return store_.mk_const(store_.const_value(t).extract(h, 0));
  case Kind::Extract: {
    TermId v = n.args[0];
    if (n.p1 == 0)
      return lower(v, h);
    fired(Rule::LowerOfUpper);
    return upper(lower(v, h + n.p1), n.p1);
  }
  case Kind::Concat: {
    TermId u2 = n.args.back();
    unsigned w2 = store_.width(u2);
    if (h <= w2) {
      fired(Rule::LowerOfConcatLow);
      return lower(u2, h);
    }
    fired(Rule::LowerOfConcatHigh);
    TermId u1 = concat(std::vector<TermId>(n.args.begin(), n.args.end() - 1));
    return concat({lower(u1, h - w2), u2});
  }
  case Kind::Add:
  case Kind::Mul: {
    fired(n.kind == Kind::Add ? Rule::LowerOfAdd : Rule::LowerOfMul);
    std::vector<TermId> a;
    for (TermId x : n.args)
      a.push_back(lower(x, h));
    return n.kind == Kind::Add ? add(a) : mul(a);
  }
  case Kind::Neg: fired(Rule::LowerOfNeg); return neg(lower(n.args[0], h));
  default: return store_.mk_extract(t, h, 0);
  }
}

TermId Normalizer::upper(TermId t, unsigned l) {
  const TermNode n = store_.node(t);
  if (l == 0)
    return t;
  switch (n.kind) {
  case Kind::Constant: return store_.mk_const(store_.const_value(t).extract(n.width, l));
  case Kind::Extract:
    if (n.p1 > 0)
      return upper(n.args[0], l + n.p1);
    return store_.mk_extract(t, n.width, l);
  case Kind::Concat: {
    TermId u2 = n.args.back();
    unsigned w2 = store_.width(u2);
    std::vector<TermId> rest(n.args.begin(), n.args.end() - 1);
    if (w2 <= l) {
      fired(Rule::UpperOfConcatHigh);
      return upper(concat(rest), l - w2);
    }
    fired(Rule::UpperOfConcatLow);
    rest.push_back(upper(u2, l));
    return concat(rest);
  }
  default: return store_.mk_extract(t, n.width, l);
  }
}

TermId Normalizer::concat(const std::vector<TermId> &parts) {
  std::vector<TermId> flat;
  auto push = [&](TermId p) {
    if (!flat.empty() && store_.is_const(flat.back()) && store_.is_const(p)) {
      BvValue v = store_.const_value(flat.back()).concat(store_.const_value(p));
      flat.back() = store_.mk_const(v);
    } else {
      flat.push_back(p);
    }
  };
  for (TermId p : parts) {
    if (store_.kind(p) == Kind::Concat)
      for (TermId q : store_.args(p))
        push(q);
    else
      push(p);
  }
  if (flat.size() == 1)
    return flat[0];
  return store_.mk_term(Kind::Concat, flat);
}

void Normalizer::add_into(Poly &acc, const Monomial &m, const BvValue &c) {
  auto it = acc.find(m);
  if (it == acc.end()) {
    if (!c.is_zero())
      acc.emplace(m, c);
    return;
  }
  it->second = it->second + c;
  if (it->second.is_zero())
    acc.erase(it);
}

Normalizer::Poly Normalizer::mul_poly(const Poly &a, const Poly &b, unsigned, bool &ok) {
  Poly r;
  if (a.size() * b.size() > 64) {
    ok = false;
    return r;
  }
  for (const auto &[ma, ca] : a)
    for (const auto &[mb, cb] : b) {
      Monomial m;
      std::merge(ma.begin(), ma.end(), mb.begin(), mb.end(), std::back_inserter(m));
      add_into(r, m, ca * cb);
    }
  return r;
}

Normalizer::Poly Normalizer::to_poly(TermId t) {
  const TermNode &n = store_.node(t);
  Poly p;
  switch (n.kind) {
  case Kind::Constant: add_into(p, {}, store_.const_value(t)); return p;
  case Kind::Add:
    for (TermId a : std::vector<TermId>(n.args))
      for (const auto &[m, c] : to_poly(a))
        add_into(p, m, c);
    return p;
  case Kind::Neg: {
    TermId a = n.args[0];
    for (const auto &[m, c] : to_poly(a))
      add_into(p, m, -c);
    return p;
  }
  case Kind::Mul: {
    unsigned w = n.width;
    std::vector<TermId> args = n.args;
    Poly acc;
    add_into(acc, {}, BvValue::one(w));
    bool ok = true;
    for (TermId a : args) {
      acc = mul_poly(acc, to_poly(a), w, ok);
      if (!ok)
        break;
    }
    if (ok)
      return acc;
    add_into(p, {t}, BvValue::one(w));
    return p;
  }
  default: add_into(p, {t}, BvValue::one(n.width)); return p;
  }
}

TermId Normalizer::product(const Monomial &m, unsigned) {
  if (m.size() == 1)
    return m[0];
  return store_.mk_term(Kind::Mul, m);
}

TermId Normalizer::emit_monomial(const Monomial &m, const BvValue &coef, unsigned width) {
  if (m.empty())
    return store_.mk_const(coef);
  TermId base = product(m, width);
  if (coef.is_one())
    return base;
  if (coef.is_ones())
    return store_.mk_neg(base);
  auto shifted = [&](unsigned k) {
    fired(Rule::PowerOfTwoMul);
    return concat({lower(base, width - k), store_.mk_const(BvValue::zero(k))});
  };
  if (auto k = coef.exact_log2())
    return shifted(*k);
  if (auto k = (-coef).exact_log2())
    return neg(shifted(*k));
  std::vector<TermId> args{store_.mk_const(coef)};
  args.insert(args.end(), m.begin(), m.end());
  return store_.mk_term(Kind::Mul, args);
}

TermId Normalizer::from_poly(const Poly &p, unsigned width) {
  std::vector<TermId> terms;
  for (const auto &[m, c] : p)
    terms.push_back(emit_monomial(m, c, width));
  // Emitted monomials may no longer match their keys (2^n * u becomes a
  // concatenation), so order the summands by the emitted terms themselves.
  std::sort(terms.begin(), terms.end());
  if (terms.empty())
    return store_.mk_const(BvValue::zero(width));
  if (terms.size() == 1)
    return terms[0];
  return store_.mk_term(Kind::Add, terms);
}

TermId Normalizer::add(const std::vector<TermId> &terms) {
  Poly p;
  for (TermId t : terms)
    for (const auto &[m, c] : to_poly(t))
      add_into(p, m, c);
  return from_poly(p, store_.width(terms.at(0)));
}

TermId Normalizer::neg(TermId t) {
  Poly p;
  for (const auto &[m, c] : to_poly(t))
    add_into(p, m, -c);
  return from_poly(p, store_.width(t));
}

TermId Normalizer::mul(const std::vector<TermId> &terms) {
  unsigned w = store_.width(terms.at(0));
  Poly acc;
  add_into(acc, {}, BvValue::one(w));
  bool ok = true;
  for (TermId t : terms) {
    acc = mul_poly(acc, to_poly(t), w, ok);
    if (!ok)
      break;
  }
  if (ok)
    return from_poly(acc, w);
  std::vector<TermId> sorted = terms;
  std::sort(sorted.begin(), sorted.end());
  return store_.mk_term(Kind::Mul, sorted);
}

TermId Normalizer::split(TermId t, TermId y) {
  auto key = std::make_pair(t, y);
  if (auto it = split_.find(key); it != split_.end())
    return it->second;
  const TermNode n = store_.node(t);
  TermId r = t;
  if (store_.is_bool(t)) {
    std::vector<TermId> a;
    for (TermId x : n.args)
      a.push_back(split(x, y));
    r = n.kind == Kind::Not ? store_.mk_not(a[0]) : store_.mk_term(n.kind, a);
  } else if (!store_.is_evaluable(t, y)) {
    switch (n.kind) {
    case Kind::Concat: {
      std::vector<TermId> parts;
      for (TermId x : n.args)
        parts.push_back(split(x, y));
      int hot = -1, cnt = 0;
      bool other_nonzero = false;
      for (std::size_t i = 0; i < parts.size(); ++i)
        if (!store_.is_evaluable(parts[i], y)) {
          hot = static_cast<int>(i);
          ++cnt;
        }
      for (std::size_t i = 0; i < parts.size(); ++i)
        if (static_cast<int>(i) != hot && !store_.is_zero_const(parts[i]))
          other_nonzero = true;
      if (cnt == 1 && other_nonzero) {
        fired(Rule::ConcatSplit);
        std::vector<TermId> ev = parts, tv;
        ev[hot] = store_.mk_const(BvValue::zero(store_.width(parts[hot])));
        unsigned hi = 0, lo = 0;
        for (int i = 0; i < hot; ++i)
          hi += store_.width(parts[i]);
        for (std::size_t i = hot + 1; i < parts.size(); ++i)
          lo += store_.width(parts[i]);
        if (hi)
          tv.push_back(store_.mk_const(BvValue::zero(hi)));
        tv.push_back(parts[hot]);
        if (lo)
          tv.push_back(store_.mk_const(BvValue::zero(lo)));
        r = add({concat(ev), concat(tv)});
      } else {
        r = concat(parts);
      }
      break;
    }
    case Kind::Add:
    case Kind::Mul: {
      std::vector<TermId> a;
      for (TermId x : n.args)
        a.push_back(split(x, y));
      r = n.kind == Kind::Add ? add(a) : mul(a);
      break;
    }
    case Kind::Neg: r = neg(split(n.args[0], y)); break;
    case Kind::Extract: {
      TermId u = split(n.args[0], y);
      r = n.p1 == 0 ? lower(u, n.p0) : upper(u, n.p1);
      break;
    }
    default: break;
    }
  }
  split_.emplace(key, r);
  return r;
}

TermId Normalizer::normalize(TermId t, TermId y) { return split(canonical(t), y); }

RewriteTrace Normalizer::trace(TermId t, TermId y) {
  RewriteTrace tr{t, t, {}};
  auto saved_canon = std::move(canon_);
  auto saved_split = std::move(split_);
  canon_.clear();
  split_.clear();
  log_ = &tr.rules;
  tr.result = normalize(t, y);
  log_ = nullptr;
  canon_.merge(saved_canon);
  split_.merge(saved_split);
  return tr;
}

bool check_equiv(TermStore &store, const RewriteTrace &trace) {
  TermId o = trace.original, r = trace.result;
  if (store.is_bool(o) != store.is_bool(r) || (!store.is_bool(o) && store.width(o) != store.width(r)))
    return false;
  std::vector<TermId> vars;
  for (TermId t : {o, r})
    for (TermId v : store.free_vars(t))
      if (std::find(vars.begin(), vars.end(), v) == vars.end())
        vars.push_back(v);
  unsigned total = 0;
  for (TermId v : vars)
    total += store.width(v);
  if (total <= 12) {
    Assignment m;
    for (std::uint64_t code = 0; code < (1ull << total); ++code) {
      std::uint64_t c = code;
      for (TermId v : vars) {
        unsigned w = store.width(v);
        m.set(store, v, BvValue(w, c & ((1ull << w) - 1)));
        c >>= w;
      }
      if (evaluate(store, o, m) != evaluate(store, r, m))
        return false;
    }
    return true;
  }
  if (!store.is_bool(o))
    return is_valid_clause(store, {store.mk_eq(o, r)});
  return is_valid_clause(store, {store.mk_not(o), r}) && is_valid_clause(store, {o, store.mk_not(r)});
}

} // namespace mcbv
