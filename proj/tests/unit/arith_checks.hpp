#pragma once

// Exhaustive soundness checks for forbidden intervals: the case table for
// each atom shape, and every projection step. Values are computed with a
// slot-indexed evaluator independent of the library's evaluator.

#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>

#include "mcbv/explain_arith.hpp"
#include "test_util.hpp"

namespace mcbv::test {

class FastEval {
public:
  explicit FastEval(const TermStore &s) : s_(s), slot_(s.vars().size(), 0) {}

  void set(TermId v, std::uint64_t x) { slot_[s_.var_index(v)] = x & mask(s_.width(v)); }

  std::uint64_t bv(TermId t) const {
    const TermNode &n = s_.node(t);
    std::uint64_t m = mask(n.width);
    switch (n.kind) {
    case Kind::Variable: return slot_[n.payload];
    case Kind::Constant: return s_.const_value(t).small();
    case Kind::Concat: {
      std::uint64_t acc = 0;
      for (TermId a : n.args)
        acc = (acc << s_.width(a)) | bv(a);
      return acc & m;
    }
    case Kind::Extract: return (bv(n.args[0]) >> n.p1) & m;
    case Kind::Add: {
      std::uint64_t acc = 0;
      for (TermId a : n.args)
        acc += bv(a);
      return acc & m;
    }
    case Kind::Mul: {
      std::uint64_t acc = 1;
      for (TermId a : n.args)
        acc *= bv(a);
      return acc & m;
    }
    case Kind::Neg: return (0 - bv(n.args[0])) & m;
    case Kind::BvNot: return ~bv(n.args[0]) & m;
    default: throw std::logic_error("FastEval::bv");
    }
  }

  bool b(TermId t) const {
    const TermNode &n = s_.node(t);
    switch (n.kind) {
    case Kind::Not: return !b(n.args[0]);
    case Kind::And:
      for (TermId a : n.args)
        if (!b(a))
          return false;
      return true;
    case Kind::Or:
      for (TermId a : n.args)
        if (b(a))
          return true;
      return false;
    case Kind::Eq: return bv(n.args[0]) == bv(n.args[1]);
    case Kind::Ule: return bv(n.args[0]) <= bv(n.args[1]);
    case Kind::Ult: return bv(n.args[0]) < bv(n.args[1]);
    default: throw std::logic_error("FastEval::b");
    }
  }

  bool all(const std::vector<TermId> &cube) const {
    for (TermId c : cube)
      if (!b(c))
        return false;
    return true;
  }

  /// v outside the interval (computed from the bound values directly).
  bool outside(std::uint64_t v, const ForbiddenInterval &i) const {
    switch (i.kind) {
    case ForbiddenInterval::Kind::Empty: return true;
    case ForbiddenInterval::Kind::Full: return false;
    case ForbiddenInterval::Kind::Proper: break;
    }
    std::uint64_t m = mask(i.width), l = bv(i.lower), u = bv(i.upper);
    return ((v - l) & m) >= ((u - l) & m);
  }

private:
  const TermStore &s_;
  std::vector<std::uint64_t> slot_;
};

/// Visits every assignment of `vars`, loading it into `ev`.
template <class F> void enumerate(const TermStore &s, FastEval &ev, const std::vector<TermId> &vars, F &&fn) {
  unsigned total = 0;
  for (TermId v : vars)
    total += s.width(v);
  if (total > 28)
    throw std::invalid_argument("enumerate: too many bits");
  for (std::uint64_t code = 0; code < (1ull << total); ++code) {
    std::uint64_t c = code;
    for (TermId v : vars) {
      ev.set(v, c);
      c >>= s.width(v);
    }
    fn();
  }
}

struct CheckStats {
  std::size_t models = 0;
  std::size_t checks = 0;
  std::size_t violations = 0;
  std::set<int> rows;
  std::string first_failure;

  void fail(const std::string &what) {
    if (violations++ == 0)
      first_failure = what;
  }
};

using IntervalKey = std::tuple<int, TermId, TermId, std::vector<TermId>>;

inline IntervalKey key_of(const ForbiddenInterval &i) {
  return {static_cast<int>(i.kind), i.lower, i.upper, i.condition};
}

inline TermId fresh(TermStore &s, const std::string &name, unsigned w) {
  std::string full = name + "_" + std::to_string(w);
  if (auto v = s.find_var(full))
    return *v;
  return s.mk_var(full, w);
}

/// Case table soundness: for every shape and polarity, widths 1..max_w,
/// every value of e1, e2 in the model, the produced (I, c) satisfies
/// c => (C <=> t notin I) for all values of e1, e2, t.
inline CheckStats check_table(unsigned max_w) {
  CheckStats st;
  TermStore s;
  Normalizer nz(s);
  for (unsigned w = 1; w <= max_w; ++w) {
    TermId e1 = fresh(s, "e1", w), e2 = fresh(s, "e2", w), y = fresh(s, "y", w);
    TermId atoms[] = {
        s.mk_ule(s.mk_add(e1, y), s.mk_add(e2, y)),
        s.mk_ule(e1, s.mk_add(e2, y)),
        s.mk_ule(s.mk_add(e1, y), e2),
    };
    for (TermId atom : atoms)
      for (bool pos : {true, false}) {
        TermId lit = pos ? atom : s.mk_not(atom);
        std::set<IntervalKey> verified;
        FastEval ev(s);
        enumerate(s, ev, {e1, e2}, [&] {
          ++st.models;
          Assignment m;
          m.set(s, e1, BvValue(w, ev.bv(e1)));
          m.set(s, e2, BvValue(w, ev.bv(e2)));
          TableEntry te = interval_of(s, nz, lit, y, m);
          st.rows.insert(te.row);
          if (!te.chain.steps.empty() || te.chain.base_width != w)
            st.fail("unexpected chain for " + s.to_string(lit));
          if (!ev.all(te.interval.condition))
            st.fail("condition false in model for " + s.to_string(lit));
          if (!verified.insert(key_of(te.interval)).second)
            return;
          FastEval all(s);
          enumerate(s, all, {e1, e2, y}, [&] {
            ++st.checks;
            if (all.all(te.interval.condition) && all.b(lit) != all.outside(all.bv(y), te.interval)) {
              std::ostringstream os;
              os << "row " << te.row << " width " << w << " e1=" << all.bv(e1) << " e2=" << all.bv(e2)
                 << " t=" << all.bv(y);
              st.fail(os.str());
            }
          });
        });
      }
  }
  return st;
}

inline const char *step_name(ArithStep::Op op) {
  switch (op) {
  case ArithStep::Op::UpperExtract: return "upper-extract";
  case ArithStep::Op::AddE: return "add";
  case ArithStep::Op::Negate: return "negate";
  case ArithStep::Op::UpTrim: return "up-trim";
  case ArithStep::Op::DownTrim: return "down-trim";
  }
  return "?";
}

/// Projection soundness for one step kind: outer bound width W <= max_w and
/// inner width <= max_w. For every model of the bounds (and of e) the result
/// (w, I', c') must have c' true in the model, and c' => c and
/// c' => (t notin I <=> y notin I') valid over all assignments.
inline CheckStats check_projection(ArithStep::Op op, unsigned max_w) {
  CheckStats st;
  TermStore s;
  Normalizer nz(s);
  for (unsigned W = 1; W <= max_w; ++W) {
    std::vector<unsigned> ks;
    switch (op) {
    case ArithStep::Op::UpperExtract:
      for (unsigned k = 1; W + k <= max_w; ++k)
        ks.push_back(k);
      break;
    case ArithStep::Op::UpTrim:
    case ArithStep::Op::DownTrim:
      for (unsigned k = 1; k < W; ++k)
        ks.push_back(k);
      break;
    default: ks.push_back(0);
    }
    for (unsigned k : ks) {
      unsigned inner = op == ArithStep::Op::UpperExtract ? W + k
                       : (op == ArithStep::Op::UpTrim || op == ArithStep::Op::DownTrim) ? W - k
                                                                                          : W;
      TermId L = fresh(s, "L", W), U = fresh(s, "U", W), e = fresh(s, "e", W), y = fresh(s, "yy", inner);
      TermId t;
      ArithStep step{op, k, {}};
      switch (op) {
      case ArithStep::Op::UpperExtract: t = s.mk_extract(y, inner, k); break;
      case ArithStep::Op::AddE:
        t = s.mk_add(y, e);
        step.e = {e};
        break;
      case ArithStep::Op::Negate: t = s.mk_neg(y); break;
      case ArithStep::Op::UpTrim: t = s.mk_concat(s.mk_const(BvValue::zero(k)), y); break;
      case ArithStep::Op::DownTrim: t = s.mk_concat(y, s.mk_const(BvValue::zero(k))); break;
      }
      std::vector<TermId> model_vars{L, U};
      if (op == ArithStep::Op::AddE)
        model_vars.push_back(e);
      std::vector<TermId> all_vars = model_vars;
      all_vars.push_back(y);
      TermId ne = s.mk_not(s.mk_eq(L, U));
      ForbiddenInterval in;
      in.width = W;
      in.lower = L;
      in.upper = U;
      in.condition = {ne};
      in.bound_condition = ne;
      std::set<IntervalKey> verified;
      FastEval ev(s);
      enumerate(s, ev, model_vars, [&] {
        if (ev.bv(L) == ev.bv(U))
          return;
        ++st.models;
        Assignment m;
        for (TermId v : model_vars)
          m.set(s, v, BvValue(W, ev.bv(v)));
        ForbiddenInterval r = project_step(s, nz, step, inner, in, m);
        std::string where = std::string(step_name(op)) + " W=" + std::to_string(W) + " k=" + std::to_string(k);
        if (!ev.all(r.condition))
          st.fail(where + ": condition false in model");
        if (r.kind == ForbiddenInterval::Kind::Proper && r.width != inner)
          st.fail(where + ": wrong result width");
        if (!verified.insert(key_of(r)).second)
          return;
        FastEval a(s);
        enumerate(s, a, all_vars, [&] {
          ++st.checks;
          if (!a.all(r.condition))
            return;
          if (!a.b(ne))
            st.fail(where + ": c' does not imply c");
          else if (a.outside(a.bv(t), in) != a.outside(a.bv(y), r))
            st.fail(where + ": membership mismatch L=" + std::to_string(a.bv(L)) +
                    " U=" + std::to_string(a.bv(U)) + " y=" + std::to_string(a.bv(y)));
        });
      });
      // Degenerate intervals pass through unchanged.
      for (auto kind : {ForbiddenInterval::Kind::Empty, ForbiddenInterval::Kind::Full}) {
        ForbiddenInterval d;
        d.kind = kind;
        d.width = W;
        d.condition = {ne};
        ForbiddenInterval r = project_step(s, nz, step, inner, d, Assignment());
        ++st.checks;
        if (r.kind != kind || r.width != 1 || r.condition != d.condition)
          st.fail(std::string(step_name(op)) + ": degenerate interval altered");
      }
    }
  }
  return st;
}

inline constexpr ArithStep::Op kAllSteps[] = {ArithStep::Op::UpperExtract, ArithStep::Op::AddE,
                                              ArithStep::Op::Negate, ArithStep::Op::UpTrim,
                                              ArithStep::Op::DownTrim};

} // namespace mcbv::test
