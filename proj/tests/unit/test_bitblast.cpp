#include <gtest/gtest.h>

#include <sstream>

#include "mcbv/bitblast.hpp"
#include "test_util.hpp"

using namespace mcbv;

namespace {

// Number of input assignments the CNF admits, found by solving under each
// full assignment of the input bits.
std::size_t projected_count(const TermStore &s, const std::vector<TermId> &constraints,
                            const std::vector<TermId> &vars) {
  sat::Solver solver;
  Blaster bl(s, solver);
  for (TermId c : constraints)
    bl.assert_true(c);
  std::size_t count = 0;
  test::for_each_env(s, vars, [&](const test::Env &env) {
    std::vector<sat::Lit> assume;
    for (TermId v : vars) {
      const auto &bits = bl.var_bits(v);
      for (unsigned i = 0; i < bits.size(); ++i)
        assume.push_back(((env.at(v) >> i) & 1) ? bits[i] : ~bits[i]);
    }
    if (solver.solve(assume) == sat::Result::Sat)
      ++count;
  });
  return count;
}

std::size_t reference_count(const TermStore &s, const std::vector<TermId> &constraints,
                            const std::vector<TermId> &vars) {
  std::size_t count = 0;
  test::for_each_env(s, vars, [&](const test::Env &env) {
    bool all = true;
    for (TermId c : constraints)
      all = all && test::ref_bool(s, c, env);
    count += all;
  });
  return count;
}

} // namespace

TEST(Bitblast, EqualityHasFourSolutionsAtWidthTwo) {
  TermStore s;
  TermId x = s.mk_var("x", 2), y = s.mk_var("y", 2);
  EXPECT_EQ(projected_count(s, {s.mk_eq(x, y)}, {x, y}), 4u);
}

TEST(Bitblast, SumToZero) {
  TermStore s;
  TermId x = s.mk_var("x", 2), y = s.mk_var("y", 2);
  EXPECT_EQ(projected_count(s, {s.mk_eq(s.mk_add(x, y), s.mk_const(2, 0))}, {x, y}), 4u);
}

TEST(Bitblast, StrictGreaterAtWidthOne) {
  TermStore s;
  TermId x = s.mk_var("x", 1), y = s.mk_var("y", 1);
  sat::Solver solver;
  Blaster bl(s, solver);
  bl.assert_true(s.mk_not(s.mk_ule(x, y)));
  ASSERT_EQ(solver.solve(), sat::Result::Sat);
  EXPECT_TRUE(solver.model_value(bl.var_bits(x)[0]));
  EXPECT_FALSE(solver.model_value(bl.var_bits(y)[0]));
  EXPECT_EQ(projected_count(s, {s.mk_not(s.mk_ule(x, y))}, {x, y}), 1u);
}

TEST(Bitblast, ModelPreservingOnRandomConstraints) {
  TermStore s;
  std::mt19937 rng(21);
  std::vector<TermId> vars{s.mk_var("a", 3), s.mk_var("b", 4), s.mk_var("c", 2)};
  for (int i = 0; i < 60; ++i) {
    std::vector<TermId> cs{test::random_atom(s, rng, vars, 1 + rng() % 4, 2),
                           test::random_atom(s, rng, vars, 1 + rng() % 4, 2)};
    ASSERT_EQ(projected_count(s, cs, vars), reference_count(s, cs, vars)) << s.to_string(cs[0]);
  }
}

TEST(Bitblast, ExplainEqualityConflict) {
  TermStore s;
  TermId x1 = s.mk_var("x1", 4), x2 = s.mk_var("x2", 4), y = s.mk_var("y", 4);
  Assignment m;
  m.set(s, x1, BvValue::from_binary("1001"));
  m.set(s, x2, BvValue::from_binary("0101"));
  std::vector<TermId> core{s.mk_eq(x1, y), s.mk_eq(x2, y)};
  std::vector<TermId> interp = explain_bb(s, core, y, m);
  // A minimal core names one bit position where x1 and x2 differ.
  ASSERT_EQ(interp.size(), 2u);
  TermId e0 = s.arg(s.atom_of(interp[0]).first, 0);
  TermId e1 = s.arg(s.atom_of(interp[1]).first, 0);
  ASSERT_EQ(s.kind(e0), Kind::Extract);
  ASSERT_EQ(s.kind(e1), Kind::Extract);
  EXPECT_EQ(s.node(e0).p1, s.node(e1).p1);
  unsigned bit = s.node(e0).p1;
  EXPECT_TRUE(bit == 2 || bit == 3);
  EXPECT_TRUE(check_interpolant(s, core, interp, y, m).ok());
}

TEST(Bitblast, ExplainSelfContradictoryCore) {
  TermStore s;
  TermId x = s.mk_var("x", 3), y = s.mk_var("y", 3);
  Assignment m;
  m.set(s, x, BvValue(3, 5));
  std::vector<TermId> core{s.mk_ult(y, y), s.mk_ule(x, y)};
  std::vector<TermId> full = explain_bb(s, core, y, m, BbOptions{0});
  std::vector<TermId> small = explain_bb(s, core, y, m);
  EXPECT_LE(small.size(), full.size());
  EXPECT_TRUE(small.empty());
  EXPECT_TRUE(check_interpolant(s, core, small, y, m).ok());
}

TEST(Bitblast, ExplanationsOfRandomConflictsAreInterpolants) {
  TermStore s;
  std::mt19937 rng(4);
  TermId y = s.mk_var("y", 3), x = s.mk_var("x", 3), z = s.mk_var("z", 2);
  std::vector<TermId> vars{y, x, z};
  int found = 0;
  for (int i = 0; i < 2000 && found < 40; ++i) {
    test::Env env{{x, rng() & 7u}, {z, rng() & 3u}};
    std::vector<TermId> core{test::random_atom(s, rng, vars, 1 + rng() % 3, 2),
                             test::random_atom(s, rng, vars, 1 + rng() % 3, 2)};
    bool feasible = false;
    for (std::uint64_t v = 0; v < 8; ++v) {
      env[y] = v;
      feasible = feasible || (test::ref_bool(s, core[0], env) && test::ref_bool(s, core[1], env));
    }
    if (feasible)
      continue;
    ++found;
    env.erase(y);
    Assignment m = test::to_assignment(s, env);
    auto interp = explain_bb(s, core, y, m);
    auto check = check_interpolant(s, core, interp, y, m);
    EXPECT_TRUE(check.ok()) << check.describe();
  }
  EXPECT_GE(found, 10);
}

TEST(Bitblast, ClauseValidity) {
  TermStore s;
  TermId x1 = s.mk_var("x1", 4), x2 = s.mk_var("x2", 4), y = s.mk_var("y", 4);
  std::vector<TermId> clause{s.mk_not(s.mk_eq(x1, y)), s.mk_not(s.mk_eq(x2, y)), s.mk_eq(x1, x2)};
  EXPECT_TRUE(is_valid_clause(s, clause));
  EXPECT_FALSE(is_valid_clause(s, {s.mk_eq(x1, x2)}));
}

TEST(Bitblast, DimacsDump) {
  TermStore s;
  TermId x = s.mk_var("x", 2), y = s.mk_var("y", 2);
  Assignment m;
  m.set(s, x, BvValue(2, 1));
  std::ostringstream out;
  BbOptions opts;
  opts.dimacs = &out;
  explain_bb(s, {s.mk_ult(y, x), s.mk_ult(x, y)}, y, m, opts);
  EXPECT_NE(out.str().find("p cnf"), std::string::npos);
  EXPECT_NE(out.str().find("c assume x[0] = 1"), std::string::npos);
}
