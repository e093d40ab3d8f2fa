// Microbenchmarks for the hot paths: BDD compilation, explanation, and
// whole solves of generated instances under each variant.

#include <benchmark/benchmark.h>

#include "mcbv/bench.hpp"
#include "mcbv/bitblast.hpp"
#include "mcbv/explain_arith.hpp"
#include "mcbv/explain_eq.hpp"
#include "mcbv/generator.hpp"

using namespace mcbv;

namespace {

void BM_CompileUnit(benchmark::State &state) {
  unsigned w = static_cast<unsigned>(state.range(0));
  TermStore s;
  TermId x = s.mk_var("x", w), y = s.mk_var("y", w);
  Assignment m;
  m.set(s, x, BvValue(w, 5));
  TermId c = s.mk_ule(s.mk_add(x, y), s.mk_mul(y, s.mk_const(BvValue(w, 3))));
  for (auto _ : state) {
    BddManager mgr;
    UnitCompiler uc(mgr);
    benchmark::DoNotOptimize(uc.compile(s, c, y, m));
  }
}
BENCHMARK(BM_CompileUnit)->Arg(4)->Arg(8)->Arg(12);

void BM_ExplainEq(benchmark::State &state) {
  TermStore s;
  TermId x1 = s.mk_var("x1", 4), x2 = s.mk_var("x2", 4), y = s.mk_var("y", 4);
  Assignment m;
  m.set(s, x1, BvValue(4, 9));
  m.set(s, x2, BvValue(4, 5));
  std::vector<TermId> core{s.mk_eq(x1, y), s.mk_eq(x2, y)};
  for (auto _ : state)
    benchmark::DoNotOptimize(explain_eq(s, core, y, m));
}
BENCHMARK(BM_ExplainEq);

struct ArithCore {
  TermStore s;
  TermId x1 = s.mk_var("x1", 4), x2 = s.mk_var("x2", 4), x3 = s.mk_var("x3", 4), y = s.mk_var("y", 4);
  Assignment m;
  std::vector<TermId> core;
  ArithCore() {
    m.set(s, x1, BvValue(4, 12));
    m.set(s, x2, BvValue(4, 13));
    m.set(s, x3, BvValue(4, 0));
    core = {s.mk_not(s.mk_eq(y, x1)), s.mk_ule(x1, s.mk_add(x3, y)),
            s.mk_not(s.mk_ule(s.mk_sub(y, x2), s.mk_add(x3, y)))};
  }
};

void BM_ExplainArith(benchmark::State &state) {
  ArithCore a;
  for (auto _ : state) {
    Normalizer nz(a.s);
    benchmark::DoNotOptimize(explain_arith(a.s, nz, a.core, a.y, a.m));
  }
}
BENCHMARK(BM_ExplainArith);

void BM_ExplainBitblast(benchmark::State &state) {
  ArithCore a;
  for (auto _ : state)
    benchmark::DoNotOptimize(explain_bb(a.s, a.core, a.y, a.m));
}
BENCHMARK(BM_ExplainBitblast);

// Solves a fixed batch of generated instances; range(0) picks the fragment,
// range(1) the variant.
void BM_SolveBatch(benchmark::State &state) {
  static const char *variants[] = {"all", "bb"};
  Fragment f = static_cast<Fragment>(state.range(0));
  SolverConfig cfg = *variant_config(variants[state.range(1)]);
  std::vector<std::string> batch;
  for (std::uint64_t i = 0; i < 20; ++i)
    batch.push_back(random_instance(f, 1000 + i));
  for (auto _ : state)
    for (const std::string &text : batch)
      benchmark::DoNotOptimize(run_script(text, cfg));
  state.SetLabel(std::string(fragment_name(f)) + "/" + variants[state.range(1)]);
}
BENCHMARK(BM_SolveBatch)->ArgsProduct({{0, 1, 2}, {0, 1}})->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
