#pragma once

// The worked examples with their hand-computed explanations. Each check
// returns an empty string on success, otherwise a description of the first
// mismatch.

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "mcbv/bitblast.hpp"
#include "mcbv/explain_arith.hpp"
#include "mcbv/explain_eq.hpp"

namespace mcbv::golden {

struct Example {
  std::string name;
  std::function<std::string()> check;
};

namespace detail {

inline TermId ne(TermStore &s, TermId a, TermId b) { return s.mk_not(s.mk_eq(a, b)); }

inline std::string expect(bool cond, const std::string &what) { return cond ? "" : what; }

inline std::string interpolant(const TermStore &s, const std::vector<TermId> &premises,
                               const std::vector<TermId> &literals, TermId y, const Assignment &m) {
  InterpolantCheck chk = check_interpolant(s, premises, literals, y, m);
  return chk.ok() ? "" : "not an interpolant: " + chk.describe();
}

inline std::string slicing() {
  TermStore s;
  TermId x1 = s.mk_var("x1", 8), y = s.mk_var("y", 6);
  auto X = [&](unsigned h, unsigned l) { return s.mk_extract(x1, h, l); };
  auto Y = [&](unsigned h, unsigned l) { return s.mk_extract(y, h, l); };
  std::vector<TermId> core{s.mk_eq(X(4, 0), X(8, 4)), s.mk_eq(Y(6, 2), Y(4, 0)), ne(s, Y(4, 0), X(8, 4))};
  SlicedSets sl = slice(s, core, y);
  std::set<TermId> eqs, want_e{s.mk_eq(X(4, 2), X(8, 6)), s.mk_eq(X(2, 0), X(6, 4)), s.mk_eq(Y(6, 4), Y(4, 2)),
                               s.mk_eq(Y(4, 2), Y(2, 0))};
  for (auto [a, b] : sl.eqs)
    eqs.insert(s.mk_eq(a, b));
  if (eqs != want_e)
    return "sliced equalities differ";
  if (sl.diss.size() != 1)
    return "expected one sliced disequality";
  std::set<TermId> dis, want_d{ne(s, Y(4, 2), X(8, 6)), ne(s, Y(2, 0), X(6, 4))};
  for (auto [a, b] : sl.diss[0])
    dis.insert(ne(s, a, b));
  return expect(dis == want_d, "sliced disequality differs");
}

inline std::string baseline() {
  TermStore s;
  TermId x1 = s.mk_var("x1", 4), x2 = s.mk_var("x2", 4), y = s.mk_var("y", 4);
  Assignment m;
  m.set(s, x1, BvValue::from_binary("1001"));
  m.set(s, x2, BvValue::from_binary("0101"));
  std::vector<TermId> core{s.mk_eq(x1, y), s.mk_eq(x2, y)};
  EqExplanation ex = explain_eq(s, core, y, m);
  if (ex.outcome != EqOutcome::EGraphConflict)
    return "expected an e-graph conflict";
  if (ex.literals != std::vector<TermId>{s.mk_eq(x1, x2)})
    return "expected the single literal x1 = x2";
  return interpolant(s, ex.premises, ex.literals, y, m);
}

inline std::string disequality_type1() {
  TermStore s;
  TermId x1 = s.mk_var("x1", 5), x2 = s.mk_var("x2", 5), y = s.mk_var("y", 5);
  auto bit = [&](TermId v, unsigned i) { return s.mk_extract(v, i + 1, i); };
  Assignment m;
  m.set(s, x1, BvValue(5, 0));
  m.set(s, x2, BvValue(5, 0));
  std::vector<TermId> core{s.mk_eq(bit(x1, 0), bit(y, 0)), s.mk_eq(bit(x2, 1), bit(y, 1)),
                           s.mk_eq(bit(y, 2), bit(y, 4)), s.mk_eq(bit(y, 3), bit(y, 4)),
                           ne(s, s.mk_concat(bit(y, 0), bit(y, 2)), s.mk_concat(bit(y, 1), bit(y, 3)))};
  EqExplanation ex = explain_eq(s, core, y, m);
  if (ex.outcome != EqOutcome::DisequalityTypeI)
    return "expected a type I disequality conflict";
  if (ex.literals != std::vector<TermId>{ne(s, bit(x1, 0), bit(x2, 1))})
    return "expected the single literal x1[0] != x2[1]";
  return interpolant(s, ex.premises, ex.literals, y, m);
}

inline std::string disequality_type2() {
  TermStore s;
  TermId x1 = s.mk_var("x1", 2), x2 = s.mk_var("x2", 2), y = s.mk_var("y", 2);
  auto bit = [&](TermId v, unsigned i) { return s.mk_extract(v, i + 1, i); };
  Assignment m;
  m.set(s, x1, BvValue(2, 0));
  m.set(s, x2, BvValue(2, 0));
  std::vector<TermId> core{ne(s, s.mk_concat(bit(x2, 0), bit(y, 0)), s.mk_concat(bit(x2, 1), bit(y, 1))),
                           ne(s, bit(x1, 0), bit(y, 0)), ne(s, bit(x1, 1), bit(y, 1))};
  EqExplanation ex = explain_eq(s, core, y, m);
  if (ex.outcome != EqOutcome::DisequalityTypeII)
    return "expected a type II disequality conflict";
  std::set<TermId> got(ex.literals.begin(), ex.literals.end());
  if (got != std::set<TermId>{ne(s, bit(x2, 0), bit(x2, 1)), ne(s, bit(x1, 0), bit(x1, 1))})
    return "unexpected literals";
  return interpolant(s, ex.premises, ex.literals, y, m);
}

inline std::string full_interval() {
  TermStore s;
  Normalizer nz(s);
  TermId x1 = s.mk_var("x1", 4), y = s.mk_var("y", 4);
  Assignment m;
  m.set(s, x1, BvValue(4, 0));
  TermId c1 = s.mk_not(s.mk_ule(x1, y));
  TermId zero_eq = s.mk_eq(x1, s.mk_const(BvValue::zero(4)));
  ArithExplanation ex = explain_arith(s, nz, {c1}, y, m);
  if (!ex.full_interval || ex.literals != std::vector<TermId>{s.mk_not(zero_eq)})
    return "expected the clause x1 <=u y or x1 != 0";
  return interpolant(s, ex.premises, ex.literals, y, m);
}

struct ArithFixture {
  TermStore s;
  Normalizer nz{s};
  TermId x1 = s.mk_var("x1", 4), x2 = s.mk_var("x2", 4), x3 = s.mk_var("x3", 4), y = s.mk_var("y", 4);
  Assignment m;

  ArithFixture() {
    m.set(s, x1, BvValue::from_binary("1100"));
    m.set(s, x2, BvValue::from_binary("1101"));
    m.set(s, x3, BvValue::from_binary("0000"));
  }
  TermId c(unsigned w, std::uint64_t v) { return s.mk_const(BvValue(w, v)); }
  TermId plus1(TermId t) { return nz.add({t, c(s.width(t), 1)}); }
  TermId lo(TermId t, unsigned h) { return nz.lower(nz.canonical(t), h); }
  ForbiddenInterval iv(TermId l, TermId u) {
    ForbiddenInterval i;
    i.width = s.width(l);
    i.lower = nz.canonical(l);
    i.upper = nz.canonical(u);
    return i;
  }
  TermId in(TermId t, const ForbiddenInterval &i) { return membership(s, nz, nz.canonical(t), i); }
  std::set<TermId> negated(std::initializer_list<TermId> ds) {
    std::set<TermId> out;
    for (TermId d : ds)
      out.insert(s.mk_not(d));
    return out;
  }
  bool bounds(const ForbiddenInterval &got, const ForbiddenInterval &want) {
    return got.kind == ForbiddenInterval::Kind::Proper && got.lower == want.lower && got.upper == want.upper;
  }
};

inline std::string single_width() {
  ArithFixture f;
  TermStore &s = f.s;
  std::vector<TermId> core{s.mk_not(s.mk_eq(f.y, f.x1)), s.mk_ule(f.x1, s.mk_add(f.x3, f.y)),
                           s.mk_not(s.mk_ule(s.mk_sub(f.y, f.x2), s.mk_add(f.x3, f.y)))};
  ArithExplanation ex = explain_arith(s, f.nz, core, f.y, f.m);
  ForbiddenInterval i1 = f.iv(f.x1, f.plus1(f.x1)), i2 = f.iv(s.mk_neg(f.x3), s.mk_sub(f.x1, f.x3)),
                    i3 = f.iv(f.x2, s.mk_neg(f.x3));
  if (ex.projected.size() != 3 || !f.bounds(ex.projected[0], i1) || !f.bounds(ex.projected[1], i2) ||
      !f.bounds(ex.projected[2], i3))
    return "forbidden intervals differ";
  TermId d1 = f.in(s.mk_sub(f.x1, f.x3), i1), d2 = f.in(s.mk_neg(f.x3), i2), d3 = f.in(f.plus1(f.x1), i3);
  if (std::set<TermId>(ex.literals.begin(), ex.literals.end()) != f.negated({d1, d2, d3}))
    return "linking literals differ";
  return interpolant(s, ex.premises, ex.literals, f.y, f.m);
}

inline std::string multi_width() {
  ArithFixture f;
  TermStore &s = f.s;
  TermId x1 = f.x1, x2 = f.x2, x3 = f.x3, y = f.y;
  std::vector<TermId> core{s.mk_not(s.mk_eq(y, x1)), s.mk_ule(x1, s.mk_add(x3, y)),
                           s.mk_ule(s.mk_extract(y, 2, 0), s.mk_extract(x2, 2, 0)),
                           s.mk_eq(s.mk_extract(y, 1, 0), f.c(1, 0))};
  ArithExplanation ex = explain_arith(s, f.nz, core, y, f.m);
  ForbiddenInterval ic1 = f.iv(x1, f.plus1(x1)), ic2 = f.iv(s.mk_neg(x3), s.mk_sub(x1, x3)),
                    ic3 = f.iv(f.plus1(f.lo(x2, 2)), f.c(2, 0)), ic4 = f.iv(f.c(1, 1), f.c(1, 0));
  if (ex.projected.size() != 4 || !f.bounds(ex.projected[0], ic1) || !f.bounds(ex.projected[1], ic2) ||
      !f.bounds(ex.projected[2], ic3) || !f.bounds(ex.projected[3], ic4))
    return "forbidden intervals differ";
  ForbiddenInterval i = f.iv(f.lo(s.mk_neg(x3), 2), f.plus1(f.lo(x1, 2)));
  ForbiddenInterval ip = f.iv(f.plus1(f.lo(x2, 1)), f.plus1(f.lo(x1, 1)));
  std::set<TermId> want = f.negated(
      {f.in(s.mk_sub(x1, x3), ic1),
       s.mk_ult(f.nz.canonical(s.mk_sub(s.mk_sub(s.mk_neg(x3), x1), f.c(4, 1))), f.c(4, 4)),
       f.in(f.c(2, 0), i), s.mk_ult(f.nz.canonical(s.mk_sub(f.lo(x2, 2), f.lo(x1, 2))), f.c(2, 2)),
       f.in(f.plus1(f.lo(x1, 1)), ic4), f.in(f.c(1, 0), ip), f.in(f.plus1(f.lo(x2, 2)), ic3),
       f.in(s.mk_neg(x3), ic2)});
  if (ex.literals.size() != 8 || std::set<TermId>(ex.literals.begin(), ex.literals.end()) != want)
    return "interpolant literals differ";
  return interpolant(s, ex.premises, ex.literals, y, f.m);
}

} // namespace detail

inline std::vector<Example> examples() {
  return {{"eq slicing", detail::slicing},
          {"eq baseline", detail::baseline},
          {"eq disequality type I", detail::disequality_type1},
          {"eq disequality type II", detail::disequality_type2},
          {"arith full interval", detail::full_interval},
          {"arith single width", detail::single_width},
          {"arith multiple widths", detail::multi_width}};
}

} // namespace mcbv::golden
