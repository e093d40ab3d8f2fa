// Acceptance suite: one line per criterion, exit status 1 if any fails.
// Usage: mcbv_acceptance [corpus-dir]

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <thread>

#include "arith_checks.hpp"
#include "golden.hpp"
#include "mcbv/bench.hpp"
#include "mcbv/generator.hpp"
#include "rule_cases.hpp"

using namespace mcbv;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok;
  std::string detail;
};

struct Criterion {
  const char *name;
  /// Wall-clock budget in seconds; 0 means none.
  double budget;
  std::function<Outcome()> run;
};

const char *kVariants[] = {"all", "bb", "bb+eq", "bb+arith", "all-prop"};

Outcome golden_examples() {
  std::size_t n = 0;
  for (const golden::Example &e : golden::examples()) {
    std::string err = e.check();
    if (!err.empty())
      return {false, e.name + ": " + err};
    ++n;
  }
  for (const NamedInstance &w : worked_examples()) {
    std::string want = oracle_verdict(w.text), got = run_script(w.text, {}).verdict;
    if (got != want)
      return {false, w.name + ": got " + got + ", expected " + want};
    ++n;
  }
  return {true, std::to_string(n) + " examples"};
}

Outcome table_soundness() {
  test::CheckStats st = test::check_table(4);
  if (st.violations)
    return {false, st.first_failure};
  if (st.rows.size() != 6)
    return {false, "only " + std::to_string(st.rows.size()) + " of 6 table rows exercised"};
  return {true, std::to_string(st.checks) + " checks"};
}

Outcome projection_contract() {
  std::uint64_t checks = 0;
  for (auto op : test::kAllSteps) {
    test::CheckStats st = test::check_projection(op, 6);
    if (st.violations)
      return {false, std::string(test::step_name(op)) + ": " + st.first_failure};
    if (st.checks == 0)
      return {false, std::string(test::step_name(op)) + ": no cases"};
    checks += st.checks;
  }
  return {true, std::to_string(checks) + " checks over 5 rules"};
}

Outcome rewrite_rules() {
  std::size_t checked = 0, instances = 0;
  for (Rule r : kAllRules) {
    TermStore s;
    std::size_t inst = 0;
    std::size_t bad = test::rule_violations(s, r, 4, checked, inst);
    if (bad)
      return {false, std::string(rule_name(r)) + ": " + std::to_string(bad) + " violations"};
    if (inst == 0)
      return {false, std::string(rule_name(r)) + ": no instances"};
    instances += inst;
  }
  return {true, std::to_string(instances) + " instances, " + std::to_string(checked) + " assignments"};
}

Outcome debug_check_corpus(const fs::path &corpus) {
  BenchOptions opts;
  opts.variants.assign(std::begin(kVariants), std::end(kVariants));
  opts.debug_check = true;
  opts.jobs = std::max(1u, std::thread::hardware_concurrency());
  BenchReport rep = bench(corpus, opts);
  if (rep.rows.empty())
    return {false, "no instances under " + corpus.string()};
  std::size_t clauses = 0;
  for (const BenchRow &r : rep.rows) {
    if (r.run.verdict == "error")
      return {false, r.file + " (" + r.variant + "): " + r.run.message};
    clauses += r.run.stats.explain.checked;
  }
  return {true, std::to_string(clauses) + " learned clauses checked over " + std::to_string(rep.rows.size()) +
                    " runs"};
}

Outcome oracle_equivalence() {
  const std::size_t per_fragment = 200;
  std::size_t compared = 0, skipped = 0;
  for (Fragment f : {Fragment::Eq, Fragment::Arith, Fragment::Mixed})
    for (std::uint64_t i = 0; i < per_fragment; ++i) {
      std::string text = random_instance(f, 0x5eed0000 + i);
      std::string want = oracle_verdict(text);
      if (want != "sat" && want != "unsat") {
        ++skipped;
        continue;
      }
      for (const char *v : kVariants) {
        SolverConfig cfg = *variant_config(v);
        cfg.timeout = 10;
        std::string got = run_script(text, cfg).verdict;
        if (got != want)
          return {false, std::string(fragment_name(f)) + " instance " + std::to_string(i) + " under " + v + ": got " +
                             got + ", oracle " + want};
      }
      ++compared;
    }
  if (compared < 500)
    return {false, "only " + std::to_string(compared) + " instances within oracle range"};
  return {true, std::to_string(compared) + " instances x 5 variants agree (" + std::to_string(skipped) +
                    " beyond oracle range)"};
}

Outcome no_bitblasting(const fs::path &corpus) {
  std::string detail;
  for (const char *sub : {"eq", "arith"}) {
    BenchOptions opts;
    opts.jobs = std::max(1u, std::thread::hardware_concurrency());
    BenchReport rep = bench(corpus / sub, opts);
    if (rep.rows.empty())
      return {false, std::string("no instances in ") + sub};
    std::size_t bb = 0, solved = 0;
    for (const BenchRow &r : rep.rows) {
      bb += r.run.stats.explain.bitblast;
      solved += r.run.verdict == "sat" || r.run.verdict == "unsat";
    }
    if (solved != rep.rows.size())
      return {false, std::string(sub) + ": " + std::to_string(rep.rows.size() - solved) + " unsolved"};
    if (bb)
      return {false, std::string(sub) + ": " + std::to_string(bb) + " bitblast explanations"};
    detail += std::string(detail.empty() ? "" : ", ") + sub + " " + std::to_string(solved) + " solved";
  }
  return {true, detail + ", 0 bitblast explanations"};
}

Outcome all_covers_bb(const fs::path &corpus) {
  BenchOptions opts;
  opts.variants = {"all", "bb"};
  opts.jobs = std::max(1u, std::thread::hardware_concurrency());
  BenchReport rep = bench(corpus, opts);
  std::set<std::string> all, bb;
  for (const BenchRow &r : rep.rows)
    if (r.run.verdict == "sat" || r.run.verdict == "unsat")
      (r.variant == "all" ? all : bb).insert(r.file);
  for (const std::string &f : bb)
    if (!all.count(f))
      return {false, f + " solved by bb only"};
  return {true, "all " + std::to_string(all.size()) + ", bb " + std::to_string(bb.size())};
}

} // namespace

int main(int argc, char **argv) {
  fs::path corpus = argc > 1 ? fs::path(argv[1]) : fs::path(MCBV_CORPUS_DIR);
  Criterion criteria[] = {
      {"golden examples", 1, golden_examples},
      {"forbidden-interval table soundness, widths 1..4", 30, table_soundness},
      {"projection contract, combined width <= 6", 60, projection_contract},
      {"rewrite rules preserve semantics, widths <= 4", 30, rewrite_rules},
      {"learned clauses pass debug checks on the corpus", 0, [&] { return debug_check_corpus(corpus); }},
      {"oracle equivalence on random instances", 300, oracle_equivalence},
      {"eq and arith corpora need no bitblasting", 0, [&] { return no_bitblasting(corpus); }},
      {"all solves everything bb solves", 0, [&] { return all_covers_bb(corpus); }},
  };
  int failed = 0, idx = 0;
  for (const Criterion &c : criteria) {
    ++idx;
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.ok && c.budget > 0 && secs > c.budget) {
      o.ok = false;
      o.detail += "; over the " + std::to_string(static_cast<int>(c.budget)) + " s budget";
    }
    failed += !o.ok;
    std::printf("%s %d %s (%.2f s): %s\n", o.ok ? "PASS" : "FAIL", idx, c.name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
