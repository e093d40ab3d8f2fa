#include "mcbv/explain_arith.hpp"

#include <algorithm>
#include <map>

namespace mcbv {

namespace {

class NoRow : public ExplainerUnavailable {
public:
  using ExplainerUnavailable::ExplainerUnavailable;
};

class CoverageGap : public ExplainerUnavailable {
public:
  using ExplainerUnavailable::ExplainerUnavailable;
};

using Kd = ForbiddenInterval::Kind;

BvValue val(const TermStore &s, TermId t, const Assignment &m) {
  auto v = evaluate_bv(s, t, m);
  if (!v)
    throw std::logic_error("explain_arith: bound not evaluable");
  return *v;
}

bool holds(const TermStore &s, TermId lit, const Assignment &m) {
  auto v = evaluate_bool(s, lit, m);
  if (!v)
    throw std::logic_error("explain_arith: condition not evaluable");
  return *v;
}

// Evaluable summands and the single unevaluable one (kNone if absent).
bool split_side(const TermStore &s, TermId x, TermId y, std::vector<TermId> &e, TermId &t) {
  t = TermId();
  if (s.is_evaluable(x, y)) {
    e.push_back(x);
    return true;
  }
  if (s.kind(x) != Kind::Add) {
    t = x;
    return true;
  }
  for (TermId a : s.args(x)) {
    if (s.is_evaluable(a, y)) {
      e.push_back(a);
    } else if (t.valid()) {
      return false;
    } else {
      t = a;
    }
  }
  return true;
}

struct Shape {
  AtomShape shape;
  bool positive;
  std::vector<TermId> e1, e2;
  TermId t;
};

bool match_shape(const TermStore &s, TermId lit, TermId y, Shape &out) {
  auto [atom, pos] = s.atom_of(lit);
  out.positive = pos;
  if (s.is_evaluable(atom, y)) {
    out.shape = AtomShape::Evaluable;
    return true;
  }
  if (s.kind(atom) != Kind::Ule)
    return false;
  TermId ta, tb;
  if (!split_side(s, s.arg(atom, 0), y, out.e1, ta) || !split_side(s, s.arg(atom, 1), y, out.e2, tb))
    return false;
  if (ta.valid() && tb.valid()) {
    if (ta != tb)
      return false;
    out.shape = AtomShape::BothSides;
  } else {
    out.shape = ta.valid() ? AtomShape::LeftOnly : AtomShape::RightOnly;
  }
  out.t = ta.valid() ? ta : tb;
  return true;
}

TermId sum(TermStore &s, Normalizer &nz, const std::vector<TermId> &ts, unsigned w) {
  if (ts.empty())
    return s.mk_const(BvValue::zero(w));
  return nz.add(ts);
}

ForbiddenInterval proper(TermId l, TermId u, unsigned w, std::vector<TermId> cond, TermId bound_cond) {
  ForbiddenInterval i;
  i.kind = Kd::Proper;
  i.width = w;
  i.lower = l;
  i.upper = u;
  i.condition = std::move(cond);
  i.bound_condition = bound_cond;
  return i;
}

ForbiddenInterval degenerate(Kd kind, std::vector<TermId> cond) {
  ForbiddenInterval i;
  i.kind = kind;
  i.width = 1;
  i.condition = std::move(cond);
  return i;
}

BvValue length(const TermStore &s, const ForbiddenInterval &i, const Assignment &m) {
  return val(s, i.upper, m) - val(s, i.lower, m);
}

bool contains(const TermStore &s, const ForbiddenInterval &i, const BvValue &v, const Assignment &m) {
  BvValue l = val(s, i.lower, m);
  return (v - l).ult(val(s, i.upper, m) - l);
}

std::size_t longest(const TermStore &s, const std::vector<ForbiddenInterval> &is, const Assignment &m) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < is.size(); ++k)
    if (length(s, is[best], m).ult(length(s, is[k], m)))
      best = k;
  return best;
}

// Among intervals containing v, the one whose upper bound lies furthest
// ahead of v; -1 if none contains v.
long furthest_extend(const TermStore &s, const std::vector<ForbiddenInterval> &is, const BvValue &v,
                     const Assignment &m) {
  long best = -1;
  BvValue reach;
  for (std::size_t k = 0; k < is.size(); ++k) {
    if (!contains(s, is[k], v, m))
      continue;
    BvValue r = val(s, is[k].upper, m) - v;
    if (best < 0 || reach.ult(r)) {
      best = static_cast<long>(k);
      reach = r;
    }
  }
  return best;
}

struct CoverState {
  std::vector<TermId> out;
  std::set<TermId> implied;
  std::set<int> used;

  void add(TermId lit) {
    if (lit.valid() && std::find(out.begin(), out.end(), lit) == out.end())
      out.push_back(lit);
  }
  void take(const ForbiddenInterval &i) {
    for (TermId c : i.condition)
      add(c);
    if (i.origin >= 0)
      used.insert(i.origin);
  }
  void member(TermStore &s, Normalizer &nz, TermId t, const ForbiddenInterval &i) {
    add(membership(s, nz, t, i));
    if (i.bound_condition.valid())
      implied.insert(i.bound_condition);
    if (i.origin >= 0)
      used.insert(i.origin);
  }
  void merge(const CoverState &o) {
    for (TermId l : o.out)
      add(l);
    implied.insert(o.implied.begin(), o.implied.end());
    used.insert(o.used.begin(), o.used.end());
  }
};

CoverState cover_from(TermStore &s, Normalizer &nz, std::vector<Layer> layers, std::size_t at, const Assignment &m) {
  while (at < layers.size() && layers[at].intervals.empty())
    ++at;
  if (at == layers.size())
    throw CoverageGap("forbidden intervals leave a value uncovered");
  const auto &s1 = layers[at].intervals;
  unsigned w1 = layers[at].width;
  const ForbiddenInterval &lg = s1[longest(s, s1, m)];
  CoverState st;
  TermId baseline = lg.upper;
  std::size_t guard = 4 * s1.size() + 8;
  while (!contains(s, lg, val(s, baseline, m), m)) {
    if (guard-- == 0)
      throw CoverageGap("coverage does not close");
    BvValue b = val(s, baseline, m);
    long k = furthest_extend(s, s1, b, m);
    if (k >= 0) {
      st.take(s1[k]);
      st.member(s, nz, baseline, s1[k]);
      baseline = s1[k].upper;
      continue;
    }
    // Hole: jump to the nearest lower bound ahead of the baseline.
    TermId next;
    BvValue gap;
    for (const auto &i : s1) {
      BvValue d = val(s, i.lower, m) - b;
      if (!next.valid() || d.ult(gap)) {
        next = i.lower;
        gap = d;
      }
    }
    std::size_t nx = at + 1;
    if (nx == layers.size())
      throw CoverageGap("hole with no narrower layer");
    unsigned w2 = layers[nx].width;
    if (!gap.ult(BvValue::power_of_two(w1, w2)))
      return cover_from(s, nz, std::move(layers), nx, m);
    st.add(s.mk_ult(nz.sub(next, baseline), s.mk_const(BvValue::power_of_two(w1, w2))));
    std::vector<Layer> sub = layers;
    sub[nx].intervals.push_back(proper(nz.lower(next, w2), nz.lower(baseline, w2), w2, {}, TermId()));
    st.merge(cover_from(s, nz, std::move(sub), nx, m));
    baseline = next;
  }
  st.take(lg);
  st.member(s, nz, baseline, lg);
  return st;
}

} // namespace

bool parse_chain(const TermStore &s, TermId t, TermId y, TermChain &out) {
  out.term = t;
  out.steps.clear();
  TermId cur = t;
  for (;;) {
    if (cur == y) {
      out.base_width = s.width(y);
      return true;
    }
    const TermNode &n = s.node(cur);
    switch (n.kind) {
    case Kind::Extract:
      if (n.p1 == 0) {
        if (n.args[0] != y)
          return false;
        out.base_width = n.p0;
        return true;
      }
      if (n.p0 != s.width(n.args[0]))
        return false;
      out.steps.push_back({ArithStep::Op::UpperExtract, n.p1, {}});
      cur = n.args[0];
      break;
    case Kind::Add: {
      std::vector<TermId> e;
      TermId inner;
      for (TermId a : n.args) {
        if (s.is_evaluable(a, y))
          e.push_back(a);
        else if (inner.valid())
          return false;
        else
          inner = a;
      }
      if (!inner.valid() || e.empty())
        return false;
      out.steps.push_back({ArithStep::Op::AddE, 0, std::move(e)});
      cur = inner;
      break;
    }
    case Kind::Neg:
      out.steps.push_back({ArithStep::Op::Negate, 0, {}});
      cur = n.args[0];
      break;
    case Kind::Concat: {
      std::vector<TermId> parts = n.args;
      unsigned hi = 0, lo = 0;
      if (s.is_zero_const(parts.front()) && parts.size() > 1) {
        hi = s.width(parts.front());
        parts.erase(parts.begin());
      }
      if (s.is_zero_const(parts.back()) && parts.size() > 1) {
        lo = s.width(parts.back());
        parts.pop_back();
      }
      if (parts.size() != 1 || (hi == 0 && lo == 0))
        return false;
      if (hi > 0)
        out.steps.push_back({ArithStep::Op::UpTrim, hi, {}});
      if (lo > 0)
        out.steps.push_back({ArithStep::Op::DownTrim, lo, {}});
      cur = parts[0];
      break;
    }
    default: return false;
    }
  }
}

TableEntry interval_of(TermStore &s, Normalizer &nz, TermId lit, TermId y, const Assignment &m) {
  Shape sh;
  if (!match_shape(s, lit, y, sh))
    throw NoRow("constraint has no forbidden-interval row");
  TableEntry te;
  te.shape = sh.shape;
  te.positive = sh.positive;
  if (sh.shape == AtomShape::Evaluable) {
    te.row = 0;
    te.interval = holds(s, lit, m) ? degenerate(Kd::Empty, {lit}) : degenerate(Kd::Full, {s.mk_not(lit)});
    return te;
  }
  if (!parse_chain(s, sh.t, y, te.chain))
    throw NoRow("unevaluable side outside the arithmetic fragment");
  unsigned w = s.width(sh.t);
  TermId e1 = sum(s, nz, sh.e1, w), e2 = sum(s, nz, sh.e2, w);
  te.e1 = e1;
  te.e2 = e2;
  // Per shape: the pair compared by the row condition, and the bounds of
  // the interval forbidden when the atom is asserted positively.
  TermId ca, cb, lo, hi;
  switch (sh.shape) {
  case AtomShape::BothSides:
    te.row = sh.positive ? 1 : 2;
    ca = e1;
    cb = e2;
    lo = nz.neg(e2);
    hi = nz.neg(e1);
    break;
  case AtomShape::RightOnly:
    te.row = sh.positive ? 3 : 4;
    ca = e1;
    cb = s.mk_const(BvValue::zero(w));
    lo = nz.neg(e2);
    hi = nz.sub(e1, e2);
    break;
  case AtomShape::LeftOnly:
    te.row = sh.positive ? 5 : 6;
    ca = e2;
    cb = s.mk_const(BvValue::ones(w));
    lo = nz.add({nz.sub(e2, e1), s.mk_const(BvValue::one(w))});
    hi = nz.neg(e1);
    break;
  case AtomShape::Evaluable: break;
  }
  TermId eq = s.mk_eq(ca, cb);
  if (val(s, ca, m) == val(s, cb, m)) {
    te.interval = degenerate(sh.positive ? Kd::Empty : Kd::Full, {eq});
  } else {
    TermId ne = s.mk_not(eq);
    te.interval = sh.positive ? proper(lo, hi, w, {ne}, ne) : proper(hi, lo, w, {ne}, ne);
  }
  return te;
}

bool applies_arith(const TermStore &store, const std::vector<TermId> &core, TermId y) {
  for (TermId c : core) {
    Shape sh;
    if (!match_shape(store, c, y, sh))
      return false;
    TermChain ch;
    if (sh.shape != AtomShape::Evaluable && !parse_chain(store, sh.t, y, ch))
      return false;
  }
  return !core.empty();
}

TermId membership(TermStore &s, Normalizer &nz, TermId t, const ForbiddenInterval &i) {
  switch (i.kind) {
  case Kd::Full: return TermId();
  case Kd::Empty: return s.mk_false();
  case Kd::Proper: break;
  }
  return s.mk_ult(nz.sub(t, i.lower), nz.sub(i.upper, i.lower));
}

ForbiddenInterval project_step(TermStore &s, Normalizer &nz, const ArithStep &step, unsigned inner_width,
                               ForbiddenInterval i, const Assignment &m) {
  if (i.kind != Kd::Proper) {
    i.width = 1;
    return i;
  }
  unsigned W = i.width, w = inner_width;
  ForbiddenInterval r = i;
  r.width = w;
  switch (step.op) {
  case ArithStep::Op::UpperExtract: {
    TermId z = s.mk_const(BvValue::zero(step.k));
    r.lower = nz.concat({i.lower, z});
    r.upper = nz.concat({i.upper, z});
    return r;
  }
  case ArithStep::Op::AddE: {
    TermId e = nz.add(step.e);
    r.lower = nz.sub(i.lower, e);
    r.upper = nz.sub(i.upper, e);
    return r;
  }
  case ArithStep::Op::Negate: {
    TermId one = s.mk_const(BvValue::one(W));
    r.lower = nz.sub(one, i.upper);
    r.upper = nz.sub(one, i.lower);
    return r;
  }
  case ArithStep::Op::UpTrim:
  case ArithStep::Op::DownTrim: break;
  }
  bool up = step.op == ArithStep::Op::UpTrim;
  unsigned k = step.k;
  TermId zk = s.mk_const(BvValue::zero(k));
  // New bound and the case literal (true in m) that justifies it.
  auto trim = [&](TermId b, TermId &lit) {
    if (up) {
      TermId a = s.mk_eq(nz.upper(b, w), zk);
      bool in = holds(s, a, m);
      lit = in ? a : s.mk_not(a);
      return in ? nz.lower(b, w) : s.mk_const(BvValue::zero(w));
    }
    TermId a = s.mk_eq(nz.lower(b, k), zk);
    bool exact = holds(s, a, m);
    lit = exact ? a : s.mk_not(a);
    TermId hb = nz.upper(b, k);
    return exact ? hb : nz.add({hb, s.mk_const(BvValue::one(w))});
  };
  TermId cl, cu;
  TermId nl = trim(i.lower, cl), nu = trim(i.upper, cu);
  std::vector<TermId> cond = i.condition;
  for (TermId c : {cl, cu})
    if (std::find(cond.begin(), cond.end(), c) == cond.end())
      cond.push_back(c);
  if (val(s, nl, m) != val(s, nu, m)) {
    // Without this literal the trimmed bounds may coincide under other
    // assignments satisfying the cube, where t would be fully forbidden.
    TermId ne = s.mk_not(s.mk_eq(nl, nu));
    cond.push_back(ne);
    r.lower = nl;
    r.upper = nu;
    r.condition = std::move(cond);
    r.bound_condition = ne;
    return r;
  }
  cond.push_back(s.mk_eq(nl, nu));
  TermId probe = up ? s.mk_const(BvValue::zero(W)) : nz.concat({nu, zk});
  TermId cp = membership(s, nz, probe, i);
  bool full = holds(s, cp, m);
  cond.push_back(full ? cp : s.mk_not(cp));
  ForbiddenInterval d = degenerate(full ? Kd::Full : Kd::Empty, std::move(cond));
  d.origin = i.origin;
  return d;
}

ForbiddenInterval project(TermStore &s, Normalizer &nz, const TermChain &chain, ForbiddenInterval i,
                          const Assignment &m) {
  unsigned w = i.width;
  for (const ArithStep &st : chain.steps) {
    if (i.kind != Kd::Proper)
      break;
    unsigned inner = w;
    switch (st.op) {
    case ArithStep::Op::UpperExtract: inner = w + st.k; break;
    case ArithStep::Op::UpTrim:
    case ArithStep::Op::DownTrim: inner = w - st.k; break;
    default: break;
    }
    i = project_step(s, nz, st, inner, std::move(i), m);
    w = inner;
  }
  if (i.kind != Kd::Proper)
    i.width = 1;
  return i;
}

std::vector<ForbiddenInterval> cover_single(TermStore &s, Normalizer &nz, const std::vector<ForbiddenInterval> &is,
                                            const Assignment &m, std::vector<TermId> *linking) {
  if (is.empty())
    throw CoverageGap("no intervals");
  const ForbiddenInterval &lg = is[longest(s, is, m)];
  std::vector<ForbiddenInterval> out;
  TermId baseline = lg.upper;
  std::size_t guard = 4 * is.size() + 8;
  while (!contains(s, lg, val(s, baseline, m), m)) {
    long k = furthest_extend(s, is, val(s, baseline, m), m);
    if (k < 0 || guard-- == 0)
      throw CoverageGap("intervals do not cover the domain");
    out.push_back(is[k]);
    baseline = is[k].upper;
  }
  if (out.empty() || !contains(s, out.front(), val(s, baseline, m), m))
    out.push_back(lg);
  if (linking) {
    linking->clear();
    for (std::size_t k = 0; k < out.size(); ++k)
      linking->push_back(membership(s, nz, out[k].upper, out[(k + 1) % out.size()]));
  }
  return out;
}

CoverResult cover_multi(TermStore &s, Normalizer &nz, std::vector<Layer> layers, const Assignment &m) {
  std::map<unsigned, std::vector<ForbiddenInterval>, std::greater<>> by_width;
  for (Layer &l : layers)
    for (ForbiddenInterval &i : l.intervals)
      if (i.kind == Kd::Proper)
        by_width[l.width].push_back(std::move(i));
  std::vector<Layer> sorted;
  for (auto &[w, is] : by_width)
    sorted.push_back({w, std::move(is)});
  CoverState st = cover_from(s, nz, std::move(sorted), 0, m);
  CoverResult r;
  for (TermId l : st.out)
    if (!st.implied.count(l))
      r.constraints.push_back(l);
  r.used = std::move(st.used);
  return r;
}

ArithExplanation explain_arith(TermStore &s, Normalizer &nz, const std::vector<TermId> &core, TermId y,
                               const Assignment &m) {
  ArithExplanation ex;
  std::vector<TermId> conds;
  std::set<int> used;
  std::vector<Layer> layers;
  auto negate_into = [&](const std::vector<TermId> &lits) {
    for (TermId l : lits) {
      if (s.is_ground(l) && holds(s, l, m))
        continue;
      TermId n = s.mk_not(l);
      if (std::find(ex.literals.begin(), ex.literals.end(), n) == ex.literals.end())
        ex.literals.push_back(n);
    }
  };
  for (std::size_t k = 0; k < core.size(); ++k) {
    TermId n = nz.normalize(core[k], y);
    TableEntry te = interval_of(s, nz, n, y, m);
    te.interval.origin = static_cast<int>(k);
    ForbiddenInterval p = project(s, nz, te.chain, te.interval, m);
    ex.entries.push_back(te);
    ex.projected.push_back(p);
    if (p.kind == Kd::Full) {
      ex.full_interval = true;
      ex.premises = {core[k]};
      ex.literals.clear();
      negate_into(p.condition);
      return ex;
    }
    if (p.kind == Kd::Empty) {
      used.insert(static_cast<int>(k));
      conds.insert(conds.end(), p.condition.begin(), p.condition.end());
      continue;
    }
    layers.push_back({p.width, {p}});
  }
  CoverResult cr = cover_multi(s, nz, std::move(layers), m);
  used.insert(cr.used.begin(), cr.used.end());
  for (int k : used)
    ex.premises.push_back(core[static_cast<std::size_t>(k)]);
  negate_into(conds);
  negate_into(cr.constraints);
  return ex;
}

} // namespace mcbv
