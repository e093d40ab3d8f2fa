#include "mcbv/explain_eq.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace mcbv {

namespace {

bool eq_shape(const TermStore &s, TermId t, TermId y) {
  if (s.is_evaluable(t, y) || s.is_var(t))
    return true;
  switch (s.kind(t)) {
  case Kind::Extract: return eq_shape(s, s.arg(t, 0), y);
  case Kind::Concat:
    for (TermId a : s.args(t))
      if (!eq_shape(s, a, y))
        return false;
    return true;
  default: return false;
  }
}

// A contiguous range [lo, hi) of the bits of `base`, which is a variable or
// an opaque evaluable term.
struct Piece {
  TermId base;
  unsigned hi, lo;
  unsigned width() const { return hi - lo; }
};

// Pieces are kept least significant first.
using Pieces = std::vector<Piece>;

Pieces restrict_to(const Pieces &ps, unsigned l, unsigned h) {
  Pieces out;
  unsigned off = 0;
  for (const Piece &p : ps) {
    unsigned a = std::max(off, l), b = std::min(off + p.width(), h);
    if (a < b)
      out.push_back({p.base, p.lo + (b - off), p.lo + (a - off)});
    off += p.width();
  }
  return out;
}

Pieces flatten(const TermStore &s, TermId t, TermId y) {
  const TermNode &n = s.node(t);
  switch (n.kind) {
  case Kind::Variable:
  case Kind::Constant: return {{t, n.width, 0}};
  case Kind::Concat: {
    Pieces out;
    for (auto it = n.args.rbegin(); it != n.args.rend(); ++it) {
      Pieces sub = flatten(s, *it, y);
      out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
  }
  case Kind::Extract: return restrict_to(flatten(s, n.args[0], y), n.p1, n.p0);
  default:
    if (!s.is_evaluable(t, y))
      throw ExplainerUnavailable("term outside the equality fragment");
    return {{t, n.width, 0}};
  }
}

TermId slice_term(TermStore &s, const Piece &p) {
  if (p.lo == 0 && p.hi == s.width(p.base))
    return p.base;
  if (s.is_const(p.base))
    return s.mk_const(s.const_value(p.base).extract(p.hi, p.lo));
  return s.mk_extract(p.base, p.hi, p.lo);
}

struct SideAtom {
  Pieces lhs, rhs;
  bool positive;
};

} // namespace

bool applies_eq(const TermStore &store, const std::vector<TermId> &core, TermId y) {
  for (TermId c : core) {
    TermId atom = store.atom_of(c).first;
    if (store.kind(atom) != Kind::Eq)
      return false;
    if (!eq_shape(store, store.arg(atom, 0), y) || !eq_shape(store, store.arg(atom, 1), y))
      return false;
  }
  return !core.empty();
}

SlicedSets slice(TermStore &store, const std::vector<TermId> &core, TermId y) {
  std::vector<SideAtom> atoms;
  std::map<TermId, std::set<unsigned>> cuts;
  for (TermId c : core) {
    auto [atom, pos] = store.atom_of(c);
    if (store.kind(atom) != Kind::Eq)
      throw ExplainerUnavailable("not an equality");
    SideAtom a{flatten(store, store.arg(atom, 0), y), flatten(store, store.arg(atom, 1), y), pos};
    for (const Pieces *side : {&a.lhs, &a.rhs})
      for (const Piece &p : *side) {
        auto &cs = cuts[p.base];
        cs.insert({0u, store.width(p.base), p.lo, p.hi});
      }
    atoms.push_back(std::move(a));
  }

  // Offsets (from bit 0 of the atom) of every base cut visible on a side.
  auto offsets = [&](const Pieces &side, std::set<unsigned> &out) {
    unsigned off = 0;
    for (const Piece &p : side) {
      const auto &cs = cuts[p.base];
      for (auto it = cs.lower_bound(p.lo); it != cs.end() && *it <= p.hi; ++it)
        out.insert(off + (*it - p.lo));
      off += p.width();
    }
  };
  // Transfers atom-level offsets back to base cuts; true if anything changed.
  auto transfer = [&](const Pieces &side, const std::set<unsigned> &g) {
    bool changed = false;
    unsigned off = 0;
    for (const Piece &p : side) {
      for (auto it = g.upper_bound(off); it != g.end() && *it < off + p.width(); ++it)
        changed |= cuts[p.base].insert(p.lo + (*it - off)).second;
      off += p.width();
    }
    return changed;
  };

  for (bool changed = true; changed;) {
    changed = false;
    for (const SideAtom &a : atoms) {
      std::set<unsigned> g;
      offsets(a.lhs, g);
      offsets(a.rhs, g);
      changed |= transfer(a.lhs, g);
      changed |= transfer(a.rhs, g);
    }
  }

  SlicedSets out;
  for (const SideAtom &a : atoms) {
    std::set<unsigned> g;
    offsets(a.lhs, g);
    offsets(a.rhs, g);
    std::vector<unsigned> bounds(g.begin(), g.end());
    std::vector<std::pair<TermId, TermId>> pairs;
    // Most significant segment first.
    for (std::size_t i = bounds.size() - 1; i > 0; --i) {
      Pieces l = restrict_to(a.lhs, bounds[i - 1], bounds[i]);
      Pieces r = restrict_to(a.rhs, bounds[i - 1], bounds[i]);
      TermId lt = slice_term(store, l.at(0)), rt = slice_term(store, r.at(0));
      if (lt != rt)
        pairs.emplace_back(lt, rt);
    }
    if (a.positive)
      out.eqs.insert(out.eqs.end(), pairs.begin(), pairs.end());
    else
      out.diss.push_back(std::move(pairs));
  }
  return out;
}

TermId EGraph::rep(TermId t) const {
  auto it = parent_.find(t);
  if (it == parent_.end() || it->second == t)
    return t;
  TermId r = rep(it->second);
  it->second = r;
  return r;
}

BvValue EGraph::value(TermId t) const {
  auto v = evaluate_bv(store_, t, m_);
  if (!v)
    throw std::logic_error("EGraph::value: term not evaluable");
  return *v;
}

TermId EGraph::select(TermId a, TermId b) const {
  bool ea = evaluable(a), eb = evaluable(b);
  if (ea != eb)
    return ea ? a : b;
  if (ea) {
    auto sa = store_.node(a).size, sb = store_.node(b).size;
    if (sa != sb)
      return sa < sb ? a : b;
    return std::min(a, b);
  }
  auto lo = [&](TermId t) { return store_.kind(t) == Kind::Extract ? store_.node(t).p1 : 0u; };
  if (lo(a) != lo(b))
    return lo(a) < lo(b) ? a : b;
  return std::min(a, b);
}

void EGraph::merge(TermId a, TermId b, TermId new_rep) {
  TermId ra = rep(a), rb = rep(b);
  for (TermId t : {a, b, ra, rb})
    if (!parent_.count(t)) {
      parent_[t] = t;
      members_.push_back(t);
    }
  if (ra == rb)
    return;
  parent_[ra] = new_rep;
  parent_[rb] = new_rep;
}

bool EGraph::check_invariants() const {
  for (TermId t : members_) {
    if (!evaluable(t))
      continue;
    TermId r = rep(t);
    if (!evaluable(r) || value(r) != value(t))
      return false;
  }
  return true;
}

std::optional<TermId> e_graph(TermStore &store, const SlicedSets &sliced, EGraph &g) {
  for (const auto &[t1, t2] : sliced.eqs) {
    TermId r1 = g.rep(t1), r2 = g.rep(t2);
    if (r1 == r2)
      continue;
    if (g.evaluable(r1) && g.evaluable(r2) && g.value(r1) != g.value(r2))
      return store.mk_eq(r1, r2);
    g.merge(t1, t2, g.select(r1, r2));
  }
  return std::nullopt;
}

EqExplanation dis_conflict(TermStore &store, const SlicedSets &sliced, const EGraph &g) {
  if (sliced.diss.empty())
    throw ExplainerUnavailable("no disequality to analyze");
  std::vector<TermId> c0, interface_terms;
  auto add_unique = [](std::vector<TermId> &v, TermId t) {
    if (std::find(v.begin(), v.end(), t) == v.end())
      v.push_back(t);
  };
  for (const auto &clause : sliced.diss) {
    std::vector<TermId> cm_rep, iface;
    bool open = false, satisfied = false;
    for (const auto &[t1, t2] : clause) {
      TermId r1 = g.rep(t1), r2 = g.rep(t2);
      if (r1 == r2)
        continue; // false because of the equalities
      bool e1 = g.evaluable(r1), e2 = g.evaluable(r2);
      if (e1 && e2) {
        if (g.value(r1) == g.value(r2))
          cm_rep.push_back(store.mk_not(store.mk_eq(r1, r2)));
        else
          satisfied = true; // true in the model whatever y is
      } else if (e1 || e2) {
        open = true;
        iface.push_back(e1 ? r1 : r2);
      } else {
        open = true;
      }
    }
    if (satisfied)
      continue;
    if (!open) {
      EqExplanation ex{EqOutcome::DisequalityTypeI, {}, {}, sliced};
      for (TermId l : cm_rep)
        add_unique(ex.literals, l);
      return ex;
    }
    for (TermId l : cm_rep)
      add_unique(c0, l);
    for (TermId t : iface)
      add_unique(interface_terms, t);
  }
  EqExplanation ex{EqOutcome::DisequalityTypeII, {}, c0, sliced};
  for (std::size_t i = 0; i < interface_terms.size(); ++i)
    for (std::size_t j = i + 1; j < interface_terms.size(); ++j) {
      TermId a = interface_terms[i], b = interface_terms[j];
      if (store.width(a) != store.width(b))
        continue;
      TermId eq = store.mk_eq(a, b);
      add_unique(ex.literals, g.value(a) == g.value(b) ? store.mk_not(eq) : eq);
    }
  return ex;
}

EqExplanation explain_eq(TermStore &store, const std::vector<TermId> &core, TermId y, const Assignment &m) {
  if (!applies_eq(store, core, y))
    throw ExplainerUnavailable("core outside the equality fragment");
  SlicedSets sliced = slice(store, core, y);
  EGraph g(store, y, m);
  if (auto eq = e_graph(store, sliced, g)) {
    EqExplanation ex{EqOutcome::EGraphConflict, {}, {*eq}, std::move(sliced)};
    for (TermId c : core)
      if (store.atom_of(c).second)
        ex.premises.push_back(c);
    return ex;
  }
  EqExplanation ex = dis_conflict(store, sliced, g);
  ex.premises = core;
  return ex;
}

} // namespace mcbv
