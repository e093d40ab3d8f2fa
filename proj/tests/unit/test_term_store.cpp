#include <gtest/gtest.h>

#include "mcbv/term_store.hpp"
#include "test_util.hpp"

using namespace mcbv;

TEST(TermStore, HashConsingReturnsSameId) {
  TermStore s;
  TermId x1 = s.mk_var("x1", 8);
  EXPECT_EQ(s.mk_extract(x1, 4, 0), s.mk_extract(x1, 4, 0));
  EXPECT_EQ(s.mk_var("x1", 8), x1);
  TermId y = s.mk_var("y", 8);
  EXPECT_EQ(s.mk_eq(x1, y), s.mk_eq(y, x1));
  EXPECT_NE(s.mk_ule(x1, y), s.mk_ule(y, x1));
}

TEST(TermStore, ConcatWidthIsSum) {
  TermStore s;
  TermId t = s.mk_var("t", 2), u = s.mk_var("u", 2);
  EXPECT_EQ(s.width(s.mk_concat(t, u)), 4u);
}

TEST(TermStore, SortErrors) {
  TermStore s;
  TermId t = s.mk_var("t", 4), u = s.mk_var("u", 8);
  EXPECT_THROW(s.mk_eq(t, u), SortError);
  EXPECT_THROW(s.mk_extract(t, 5, 0), SortError);
  EXPECT_THROW(s.mk_extract(t, 2, 2), SortError);
  EXPECT_THROW(s.mk_add(t, u), SortError);
  EXPECT_THROW(s.mk_not(t), SortError);
  EXPECT_THROW(s.mk_var("t", 5), SortError);
}

TEST(TermStore, EvaluateExtractUsesRightIndexedBits) {
  TermStore s;
  TermId c = s.mk_const(BvValue::from_binary("0011"));
  auto v = evaluate_bv(s, s.mk_extract(c, 2, 0), Assignment{});
  ASSERT_TRUE(v);
  EXPECT_EQ(v->to_binary(), "11");
}

TEST(TermStore, EvaluateWrapsModulo) {
  TermStore s;
  TermId t = s.mk_add(s.mk_const(4, 0xf), s.mk_const(4, 1));
  EXPECT_EQ(evaluate_bv(s, t, Assignment{})->to_binary(), "0000");
}

TEST(TermStore, EvaluateUndefinedWhenUnassigned) {
  TermStore s;
  TermId x1 = s.mk_var("x1", 2), y = s.mk_var("y", 2);
  Assignment m;
  m.set(s, x1, BvValue::from_binary("10"));
  EXPECT_FALSE(evaluate(s, s.mk_concat(x1, y), m).has_value());
}

TEST(TermStore, FreeVars) {
  TermStore s;
  TermId x1 = s.mk_var("x1", 8), y = s.mk_var("y", 8);
  EXPECT_TRUE(s.free_vars(s.mk_const(BvValue::from_binary("0101"))).empty());
  EXPECT_EQ(s.free_vars(s.mk_add(x1, y)), (std::vector<TermId>{x1, y}));
  TermId e = s.mk_eq(s.mk_extract(x1, 4, 0), s.mk_extract(x1, 8, 4));
  EXPECT_EQ(s.free_vars(e), std::vector<TermId>{x1});
}

TEST(TermStore, IsEvaluable) {
  TermStore s;
  TermId x1 = s.mk_var("x1", 2), x3 = s.mk_var("x3", 2), y = s.mk_var("y", 2);
  EXPECT_TRUE(s.is_evaluable(s.mk_sub(x1, x3), y));
  EXPECT_FALSE(s.is_evaluable(s.mk_add(y, x1), y));
  TermId y4 = s.mk_var("y4", 4);
  EXPECT_FALSE(s.is_evaluable(s.mk_concat(s.mk_const(2, 0), s.mk_extract(y4, 2, 0)), y4));
}

TEST(TermStore, RebuildFromDecompositionIsIdentity) {
  TermStore s;
  std::mt19937 rng(7);
  std::vector<TermId> vars{s.mk_var("a", 3), s.mk_var("b", 4), s.mk_var("c", 2)};
  for (int i = 0; i < 300; ++i) {
    TermId t = test::random_atom(s, rng, vars, 1 + rng() % 4, 3);
    for (TermId u : {t, s.atom_of(t).first}) {
      const TermNode &n = s.node(u);
      if (n.kind == Kind::Variable || n.kind == Kind::Constant)
        continue;
      EXPECT_EQ(s.mk_term(n.kind, n.args, n.p0, n.p1), u);
    }
  }
}

// Exhaustive agreement with the reference semantics at widths <= 4, which
// covers both the evaluation homomorphism and totality on full assignments.
TEST(TermStore, EvaluationMatchesReference) {
  TermStore s;
  std::mt19937 rng(11);
  std::vector<TermId> vars{s.mk_var("a", 3), s.mk_var("b", 4), s.mk_var("c", 2)};
  for (int i = 0; i < 60; ++i) {
    TermId atom = test::random_atom(s, rng, vars, 1 + rng() % 4, 3);
    TermId lhs = s.arg(s.atom_of(atom).first, 0);
    test::for_each_env(s, vars, [&](const test::Env &env) {
      Assignment m = test::to_assignment(s, env);
      auto b = evaluate_bool(s, atom, m);
      ASSERT_TRUE(b.has_value());
      EXPECT_EQ(*b, test::ref_bool(s, atom, env)) << s.to_string(atom);
      auto v = evaluate_bv(s, lhs, m);
      ASSERT_TRUE(v.has_value());
      EXPECT_EQ(v->small(), test::ref_bv(s, lhs, env));
    });
  }
}

TEST(TermStore, WideConstantsUseBigArithmetic) {
  TermStore s;
  BvValue a = BvValue::ones(100);
  TermId t = s.mk_add(s.mk_const(a), s.mk_const(BvValue::one(100)));
  EXPECT_TRUE(evaluate_bv(s, t, Assignment{})->is_zero());
  TermId e = s.mk_extract(s.mk_const(a), 99, 97);
  EXPECT_EQ(evaluate_bv(s, e, Assignment{})->to_binary(), "11");
  EXPECT_TRUE(BvValue::power_of_two(100, 99).exact_log2() == 99u);
  EXPECT_TRUE(BvValue::power_of_two(100, 99).sle(BvValue::zero(100)));
}

TEST(TermStore, ToStringIsSmtLib) {
  TermStore s;
  TermId x = s.mk_var("x", 4);
  EXPECT_EQ(s.to_string(s.mk_extract(x, 3, 1)), "((_ extract 2 1) x)");
  EXPECT_EQ(s.to_string(s.mk_ule(x, s.mk_const(4, 5))), "(bvule x #b0101)");
}
