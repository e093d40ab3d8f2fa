#include <gtest/gtest.h>

#include <random>

#include "mcbv/smtlib.hpp"
#include "mcbv/solver.hpp"
#include "test_util.hpp"

using namespace mcbv;
using namespace mcbv::test;

namespace {

SolveResult run(TermStore &s, const std::string &text, SolverConfig cfg = {}, SolverStats *stats = nullptr) {
  Script sc = parse_script(s, text);
  McSat solver(s, cfg);
  SolveResult r = solver.solve(sc.assertions);
  if (stats)
    *stats = solver.stats();
  return r;
}

bool reference_sat(const TermStore &s, const std::vector<TermId> &assertions) {
  bool sat = false;
  for_each_env(s, s.vars(), [&](const Env &env) {
    if (sat)
      return;
    bool all = true;
    for (TermId a : assertions)
      all = all && ref_bool(s, a, env);
    sat = all;
  });
  return sat;
}

} // namespace

TEST(Solver, SingleEqualityIsSat) {
  TermStore s;
  SolveResult r = run(s, "(declare-const x (_ BitVec 4)) (assert (= x #b0101))");
  ASSERT_EQ(r.verdict, Verdict::Sat);
  EXPECT_EQ(r.model.get(s, *s.find_var("x"))->small(), 5u);
}

TEST(Solver, OddCycleOfWidthOneIsUnsat) {
  TermStore s;
  SolveResult r = run(s, R"(
    (declare-const x (_ BitVec 1)) (declare-const y (_ BitVec 1)) (declare-const z (_ BitVec 1))
    (assert (not (= x y))) (assert (= x z)) (assert (= y z)))");
  EXPECT_EQ(r.verdict, Verdict::Unsat);
}

TEST(Solver, SlicingInstanceIsSat) {
  TermStore s;
  SolveResult r = run(s, R"(
    (declare-const x1 (_ BitVec 8)) (declare-const y (_ BitVec 6))
    (assert (= ((_ extract 3 0) x1) ((_ extract 7 4) x1)))
    (assert (= ((_ extract 5 2) y) ((_ extract 3 0) y)))
    (assert (not (= ((_ extract 3 0) y) ((_ extract 7 4) x1)))))",
                      {}, nullptr);
  EXPECT_EQ(r.verdict, Verdict::Sat);
}

TEST(Solver, LearnedClauseUndoesZeroDecision) {
  // x1 is decided first and gets 0, which leaves no value for y; the
  // learned clause x1 != 0 or x1 <=u y is asserting at level 0.
  TermStore s;
  SolverStats st;
  SolveResult r = run(s, R"(
    (declare-const x1 (_ BitVec 4)) (declare-const y (_ BitVec 4))
    (assert (not (bvule x1 y))))",
                      {}, &st);
  ASSERT_EQ(r.verdict, Verdict::Sat);
  EXPECT_NE(r.model.get(s, *s.find_var("x1"))->small(), 0u);
  EXPECT_EQ(st.conflicts, 1u);
  EXPECT_EQ(st.explain.arith, 1u);
  EXPECT_EQ(st.explain.bitblast, 0u);
}

TEST(Solver, SingletonDomainsPropagate) {
  TermStore s;
  SolverStats st;
  SolveResult r = run(s, R"(
    (declare-const x1 (_ BitVec 4)) (declare-const y (_ BitVec 4))
    (assert (= x1 #b1111)) (assert (bvule x1 y)))",
                      {}, &st);
  ASSERT_EQ(r.verdict, Verdict::Sat);
  EXPECT_EQ(r.model.get(s, *s.find_var("y"))->small(), 15u);
  EXPECT_EQ(st.decisions, 0u);
  EXPECT_EQ(st.propagations, 2u);
}

TEST(Solver, NoPropagationVariantDecidesInstead) {
  TermStore s;
  SolverStats st;
  SolveResult r = run(s, R"(
    (declare-const x1 (_ BitVec 4)) (declare-const y (_ BitVec 4))
    (assert (= x1 #b1111)) (assert (bvule x1 y)))",
                      *variant_config("all-prop"), &st);
  ASSERT_EQ(r.verdict, Verdict::Sat);
  EXPECT_EQ(st.propagations, 0u);
  // y's full set has fewer nodes than x1's singleton, so y goes first.
  EXPECT_GE(st.decisions, 2u);
  EXPECT_EQ(r.model.get(s, *s.find_var("y"))->small(), 15u);
}

TEST(Solver, EqualityConflictUsesEqExplainer) {
  TermStore s;
  SolverStats st;
  SolveResult r = run(s, R"(
    (declare-const x1 (_ BitVec 4)) (declare-const x2 (_ BitVec 4)) (declare-const y (_ BitVec 4))
    (assert (= x1 y)) (assert (= x2 y)) (assert (not (= x1 x2))))",
                      {}, &st);
  EXPECT_EQ(r.verdict, Verdict::Unsat);
  EXPECT_GE(st.explain.eq, 1u);
  EXPECT_EQ(st.explain.bitblast, 0u);
}

TEST(Solver, BooleanStructure) {
  TermStore s;
  SolveResult r = run(s, R"(
    (declare-const p Bool) (declare-const x (_ BitVec 3))
    (assert (or (and p (= x #b011)) (and (not p) (bvult x #b010))))
    (assert (not (= x #b000))) (assert (not (= x #b001))))");
  ASSERT_EQ(r.verdict, Verdict::Sat);
  EXPECT_EQ(r.model.get(s, *s.find_var("x"))->small(), 3u);
}

TEST(Solver, VariantsParse) {
  for (const char *v : {"all", "bb", "bb+eq", "bb+arith", "all-prop"})
    EXPECT_TRUE(variant_config(v).has_value()) << v;
  EXPECT_FALSE(variant_config("eq").has_value());
  EXPECT_FALSE(variant_config("bb")->use_eq);
  EXPECT_FALSE(variant_config("bb+eq")->use_arith);
  EXPECT_TRUE(variant_config("bb+eq")->use_eq);
}

TEST(Solver, CancelGivesUnknown) {
  TermStore s;
  Script sc = parse_script(s, "(declare-const x (_ BitVec 8)) (assert (= (bvmul x x) #x31))");
  McSat solver(s);
  solver.cancel();
  SolveResult r = solver.solve(sc.assertions);
  EXPECT_EQ(r.verdict, Verdict::Unknown);
  EXPECT_EQ(r.reason, "cancelled");
}

TEST(Solver, SameSeedSameRun) {
  const char *text = R"(
    (declare-const a (_ BitVec 5)) (declare-const b (_ BitVec 5)) (declare-const c (_ BitVec 5))
    (assert (= (bvadd a b) (bvmul c #b00011))) (assert (bvult a b)) (assert (bvult b c)))";
  for (std::uint64_t seed : {0u, 7u}) {
    SolverConfig cfg;
    cfg.seed = seed;
    TermStore s1, s2;
    SolverStats st1, st2;
    SolveResult r1 = run(s1, text, cfg, &st1), r2 = run(s2, text, cfg, &st2);
    EXPECT_EQ(r1.verdict, r2.verdict);
    EXPECT_EQ(st1.decisions, st2.decisions);
    EXPECT_EQ(st1.conflicts, st2.conflicts);
    EXPECT_EQ(st1.propagations, st2.propagations);
  }
}

TEST(Solver, RandomFormulasAgreeWithEnumeration) {
  std::mt19937 rng(2024);
  const char *variants[] = {"all", "bb", "bb+eq", "bb+arith", "all-prop"};
  int sat = 0, unsat = 0;
  for (int iter = 0; iter < 400; ++iter) {
    TermStore s;
    std::vector<TermId> vars;
    int nv = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < nv; ++i)
      vars.push_back(s.mk_var("v" + std::to_string(i), 1 + static_cast<unsigned>(rng() % 4)));
    std::vector<TermId> assertions;
    int na = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < na; ++i) {
      unsigned w = s.width(vars[rng() % vars.size()]);
      TermId a = random_atom(s, rng, vars, w, 2);
      if (rng() % 3 == 0)
        a = s.mk_or({a, random_atom(s, rng, vars, w, 1)});
      assertions.push_back(a);
    }
    bool expected = reference_sat(s, assertions);
    (expected ? sat : unsat)++;
    for (const char *v : variants) {
      SolverConfig cfg = *variant_config(v);
      cfg.debug_check = true;
      McSat solver(s, cfg);
      SolveResult r = solver.solve(assertions);
      ASSERT_EQ(r.verdict, expected ? Verdict::Sat : Verdict::Unsat) << "iteration " << iter << " variant " << v;
    }
  }
  EXPECT_GT(sat, 10);
  EXPECT_GT(unsat, 10);
}

TEST(Solver, CoreWithoutOtherVariablesNeedsNoBitblasting) {
  // 2a - 4a is not linear in single occurrences of a, but no other variable
  // is involved, so the core alone is the lemma.
  TermStore s;
  SolverStats st;
  SolveResult r = run(s, R"(
    (declare-const a (_ BitVec 4))
    (assert (= (bvadd (concat a #b0) (bvneg (concat ((_ extract 2 0) a) #b00))) #b00001)))",
                      {}, &st);
  EXPECT_EQ(r.verdict, Verdict::Unsat);
  EXPECT_GE(st.explain.closed, 1u);
  EXPECT_EQ(st.explain.bitblast, 0u);
}
