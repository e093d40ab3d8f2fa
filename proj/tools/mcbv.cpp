// Command-line front end: solves one SMT-LIB file, or benchmarks every
// .smt2 file under a directory.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mcbv/bench.hpp"
#include "mcbv/oracle.hpp"
#include "mcbv/smtlib.hpp"
#include "mcbv/solver.hpp"

namespace fs = std::filesystem;
using namespace mcbv;

namespace {

struct Options {
  std::string input;
  std::vector<std::string> explainers{"eq", "arith"};
  bool no_propagation = false;
  double timeout = 0;
  std::uint64_t seed = 0;
  bool debug_check = false;
  bool stats = false;
  bool oracle = false;
  std::vector<std::string> variants{"all"};
  std::string dimacs_dump;
  std::string bdd_dot;
  unsigned jobs = 1;
  std::string csv;
  std::string cactus;
};

int usage_error(const std::string &msg) {
  std::cerr << "mcbv: " << msg << "\n";
  return 2;
}

void print_stats(std::ostream &os, const SolverStats &st) {
  os << "(:decisions " << st.decisions << "\n :bool-decisions " << st.bool_decisions << "\n :propagations "
     << st.propagations << "\n :bool-propagations " << st.bool_propagations << "\n :conflicts " << st.conflicts
     << "\n :learned " << st.learned << "\n :restarts " << st.restarts << "\n :eq-explanations " << st.explain.eq
     << "\n :arith-explanations " << st.explain.arith
     << "\n :closed-explanations " << st.explain.closed << "\n :bb-explanations " << st.explain.bitblast
     << "\n :explainer-fallbacks " << st.explain.fallbacks << "\n :checked-clauses " << st.explain.checked << ")\n";
}

int run_bench(const Options &o) {
  BenchOptions bo;
  bo.variants = o.variants;
  bo.timeout = o.timeout > 0 ? o.timeout : 10;
  bo.seed = o.seed;
  bo.oracle = o.oracle;
  bo.debug_check = o.debug_check;
  bo.jobs = o.jobs;
  for (const std::string &v : o.variants)
    if (!variant_config(v))
      return usage_error("unknown variant '" + v + "'");
  BenchReport rep = bench(o.input, bo);
  if (o.csv.empty()) {
    write_csv(std::cout, rep);
  } else {
    std::ofstream f(o.csv);
    write_csv(f, rep);
  }
  if (!o.cactus.empty()) {
    std::ofstream f(o.cactus);
    write_cactus(f, rep);
  }
  return 0;
}

int run_file(const Options &o) {
  SolverConfig cfg;
  cfg.use_eq = cfg.use_arith = false;
  for (const std::string &e : o.explainers) {
    if (e == "eq")
      cfg.use_eq = true;
    else if (e == "arith")
      cfg.use_arith = true;
    else if (e != "bb")
      return usage_error("unknown explainer '" + e + "'");
  }
  cfg.propagation = !o.no_propagation;
  cfg.timeout = o.timeout;
  cfg.seed = o.seed;
  cfg.debug_check = o.debug_check;
  std::ofstream dimacs;
  if (!o.dimacs_dump.empty()) {
    dimacs.open(o.dimacs_dump);
    if (!dimacs)
      return usage_error("cannot write " + o.dimacs_dump);
    cfg.dimacs = &dimacs;
  }

  std::ifstream in(o.input);
  if (!in)
    return usage_error("cannot read " + o.input);
  std::ostringstream text;
  text << in.rdbuf();

  TermStore store;
  Script script;
  try {
    script = parse_script(store, text.str());
  } catch (const ParseError &e) {
    std::cerr << o.input << ":" << e.line() << ":" << e.column() << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << o.input << ": " << e.what() << "\n";
    return 2;
  }

  std::vector<Command> checks;
  for (const Command &c : script.commands)
    if (c.kind == Command::CheckSat)
      checks.push_back(c);
  if (checks.empty())
    checks.push_back({Command::CheckSat, script.assertions.size()});

  int code = 0;
  std::ofstream dot;
  for (std::size_t k = 0; k < checks.size(); ++k) {
    std::vector<TermId> prefix(script.assertions.begin(),
                               script.assertions.begin() + static_cast<std::ptrdiff_t>(checks[k].assertion_count));
    McSat solver(store, cfg);
    SolveResult res;
    try {
      res = solver.solve(prefix);
    } catch (const InvalidLearnedClause &e) {
      std::cerr << "debug check failed: " << e.what() << "\n";
      return 3;
    }
    std::cout << verdict_name(res.verdict) << std::endl;
    if (res.verdict == Verdict::Unknown)
      code = 1;
    for (const Command &c : script.commands)
      if (c.kind == Command::GetModel && c.assertion_count == checks[k].assertion_count &&
          res.verdict == Verdict::Sat) {
        std::cout << "(\n" << print_model(store, script, res.model) << ")\n";
        break;
      }
    if (o.stats)
      print_stats(std::cout, solver.stats());
    if (o.oracle) {
      try {
        std::cout << "; oracle " << (brute_force(store, prefix).sat ? "sat" : "unsat") << "\n";
      } catch (const TooLarge &) {
        std::cout << "; oracle toolarge\n";
      }
    }
    if (!o.bdd_dot.empty()) {
      if (!dot.is_open())
        dot.open(o.bdd_dot);
      for (TermId v : store.vars())
        dot << solver.domains().bdds().to_dot(solver.domains().root(v), store.var_name(v)) << "\n";
    }
  }
  return code;
}

} // namespace

int main(int argc, char **argv) {
  Options o;
  CLI::App app{"MCSAT solver for quantifier-free bitvector formulas"};
  app.add_option("input", o.input, "SMT-LIB file, or a directory to benchmark")->required();
  app.add_option("--explainer", o.explainers, "Dedicated explainers to enable: eq, arith (bb is always available)")
      ->delimiter(',');
  app.add_flag("--no-propagation", o.no_propagation, "Do not assign variables with singleton feasible sets");
  app.add_option("--timeout", o.timeout, "Wall-clock limit in seconds (0 = none; 10 per file when benchmarking)");
  app.add_option("--seed", o.seed, "Tie-break seed for decisions");
  app.add_flag("--debug-check", o.debug_check, "Validate every learned clause and rewrite");
  app.add_flag("--stats", o.stats, "Print search statistics");
  app.add_flag("--oracle", o.oracle, "Also compute the brute-force verdict");
  app.add_option("--variants", o.variants, "Benchmark variants: all, bb, bb+eq, bb+arith, all-prop")->delimiter(',');
  app.add_option("--dimacs-dump", o.dimacs_dump, "Write bitblasted explanation queries here");
  app.add_option("--bdd-dot", o.bdd_dot, "Write final feasible sets as Graphviz");
  app.add_option("--jobs", o.jobs, "Benchmark worker threads");
  app.add_option("--csv", o.csv, "Benchmark CSV output (default stdout)");
  app.add_option("--cactus", o.cactus, "Benchmark solved-versus-time output");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (fs::is_directory(o.input))
    return run_bench(o);
  return run_file(o);
}
