#include <gtest/gtest.h>

#include "mcbv/domain.hpp"
#include "test_util.hpp"

using namespace mcbv;

TEST(Domain, SingletonAfterLowerBound) {
  TermStore s;
  BddManager b;
  DomainManager d(s, b);
  TermId x1 = s.mk_var("x1", 4), y = s.mk_var("y", 4);
  Assignment m;
  m.set(s, x1, BvValue(4, 15));
  auto r = d.assert_unit(s.mk_ule(x1, y), y, m);
  EXPECT_EQ(r.kind, UpdateKind::NowSingleton);
  EXPECT_EQ(r.value.to_binary(), "1111");
}

TEST(Domain, TautologyKeepsMany) {
  TermStore s;
  BddManager b;
  DomainManager d(s, b);
  TermId y = s.mk_var("y", 4);
  EXPECT_EQ(d.assert_unit(s.mk_eq(y, y), y, Assignment{}).kind, UpdateKind::StillMany);
}

TEST(Domain, EqualityConflictAndCore) {
  TermStore s;
  BddManager b;
  DomainManager d(s, b);
  TermId x1 = s.mk_var("x1", 4), x2 = s.mk_var("x2", 4), y = s.mk_var("y", 4);
  Assignment m;
  m.set(s, x1, BvValue::from_binary("1001"));
  m.set(s, x2, BvValue::from_binary("0101"));
  TermId c1 = s.mk_eq(x1, y), c2 = s.mk_eq(x2, y);
  EXPECT_EQ(d.assert_unit(c1, y, m).kind, UpdateKind::NowSingleton);
  EXPECT_EQ(d.assert_unit(c2, y, m).kind, UpdateKind::NowEmpty);
  ConflictCore core = d.conflict_core(y, m);
  EXPECT_EQ(core.var, y);
  EXPECT_EQ(std::set<TermId>(core.constraints.begin(), core.constraints.end()), (std::set<TermId>{c1, c2}));
}

TEST(Domain, SingleInfeasibleConstraintCore) {
  TermStore s;
  BddManager b;
  DomainManager d(s, b);
  TermId y = s.mk_var("y", 4);
  TermId ok = s.mk_ule(y, s.mk_const(4, 9));
  TermId bad = s.mk_not(s.mk_eq(y, y));
  d.assert_unit(ok, y, Assignment{});
  d.assert_unit(bad, y, Assignment{});
  EXPECT_EQ(d.conflict_core(y, Assignment{}).constraints, std::vector<TermId>{bad});
}

TEST(Domain, CoreDropsIrrelevantConstraint) {
  TermStore s;
  BddManager b;
  DomainManager d(s, b);
  TermId y = s.mk_var("y", 4);
  TermId le3 = s.mk_ule(y, s.mk_const(4, 3));
  TermId ge8 = s.mk_ule(s.mk_const(4, 8), y);
  TermId ne5 = s.mk_not(s.mk_eq(y, s.mk_const(4, 5)));
  d.assert_unit(le3, y, Assignment{});
  d.assert_unit(ne5, y, Assignment{});
  d.assert_unit(ge8, y, Assignment{});
  auto core = d.conflict_core(y, Assignment{}).constraints;
  EXPECT_EQ(std::set<TermId>(core.begin(), core.end()), (std::set<TermId>{le3, ge8}));
}

TEST(Domain, NotInConflict) {
  TermStore s;
  BddManager b;
  DomainManager d(s, b);
  TermId y = s.mk_var("y", 4);
  d.assert_unit(s.mk_ule(y, s.mk_const(4, 3)), y, Assignment{});
  EXPECT_THROW(d.conflict_core(y, Assignment{}), NotInConflict);
}

TEST(Domain, BacktrackRestoresSets) {
  TermStore s;
  BddManager b;
  DomainManager d(s, b);
  TermId y = s.mk_var("y", 4);
  d.assert_unit(s.mk_ule(y, s.mk_const(4, 7)), y, Assignment{});
  BddRef at0 = d.root(y);
  d.push_level();
  d.assert_unit(s.mk_ule(s.mk_const(4, 7), y), y, Assignment{});
  EXPECT_EQ(d.status(y).status, SetStatus::Singleton);
  d.push_level();
  d.assert_unit(s.mk_not(s.mk_eq(y, s.mk_const(4, 7))), y, Assignment{});
  EXPECT_EQ(d.root(y), BddManager::False);
  d.backtrack(0);
  EXPECT_EQ(d.root(y), at0);
  EXPECT_EQ(d.justifications(y).size(), 1u);
}

// Random cores are minimal and genuinely infeasible.
TEST(Domain, QuickXplainMinimality) {
  TermStore s;
  BddManager b;
  DomainManager d(s, b);
  std::mt19937 rng(17);
  TermId y = s.mk_var("y", 4), x = s.mk_var("x", 3);
  std::vector<TermId> vars{y, x};
  int checked = 0;
  for (int round = 0; round < 300 && checked < 60; ++round) {
    Assignment m;
    m.set(s, x, BvValue(3, rng() & 7));
    std::vector<TermId> cs;
    for (int i = 0; i < 6; ++i)
      cs.push_back(test::random_atom(s, rng, vars, 1 + rng() % 4, 2));
    std::vector<TermId> core;
    try {
      core = d.quickxplain(y, cs, m);
    } catch (const NotInConflict &) {
      continue;
    }
    ++checked;
    auto feasible = [&](const std::vector<TermId> &set) {
      for (std::uint64_t v = 0; v < 16; ++v) {
        test::Env env{{x, m.get(s, x)->small()}, {y, v}};
        bool all = true;
        for (TermId c : set)
          all = all && test::ref_bool(s, c, env);
        if (all)
          return true;
      }
      return false;
    };
    EXPECT_FALSE(feasible(core));
    for (std::size_t i = 0; i < core.size(); ++i) {
      auto smaller = core;
      smaller.erase(smaller.begin() + i);
      EXPECT_TRUE(feasible(smaller));
    }
  }
  EXPECT_GE(checked, 20);
}
