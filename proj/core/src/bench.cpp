#include "mcbv/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "mcbv/oracle.hpp"
#include "mcbv/smtlib.hpp"

namespace mcbv {

RunResult run_script(const std::string &text, const SolverConfig &cfg) {
  RunResult r;
  auto start = std::chrono::steady_clock::now();
  try {
    TermStore store;
    Script sc = parse_script(store, text);
    McSat solver(store, cfg);
    SolveResult res = solver.solve(sc.assertions);
    r.verdict = verdict_name(res.verdict);
    r.stats = solver.stats();
    r.message = res.reason;
  } catch (const std::exception &e) {
    r.verdict = "error";
    r.message = e.what();
  }
  r.time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string oracle_verdict(const std::string &text) {
  try {
    TermStore store;
    Script sc = parse_script(store, text);
    return brute_force(store, sc.assertions).sat ? "sat" : "unsat";
  } catch (const TooLarge &) {
    return "toolarge";
  } catch (const std::exception &) {
    return "error";
  }
}

namespace {

std::string slurp(const std::filesystem::path &p) {
  std::ifstream f(p);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

} // namespace

BenchReport bench(const std::filesystem::path &dir, const BenchOptions &opts) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  if (fs::is_directory(dir))
    for (const auto &e : fs::recursive_directory_iterator(dir))
      if (e.is_regular_file() && e.path().extension() == ".smt2")
        files.push_back(e.path());
  std::sort(files.begin(), files.end());

  BenchReport report;
  const std::size_t nv = opts.variants.size();
  report.rows.resize(files.size() * nv);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < files.size();) {
      std::string text = slurp(files[i]);
      std::string oracle = opts.oracle ? oracle_verdict(text) : "";
      for (std::size_t v = 0; v < nv; ++v) {
        BenchRow &row = report.rows[i * nv + v];
        row.file = fs::relative(files[i], dir).generic_string();
        row.variant = opts.variants[v];
        row.oracle = oracle;
        std::optional<SolverConfig> cfg = variant_config(opts.variants[v]);
        if (!cfg) {
          row.run.verdict = "error";
          row.run.message = "unknown variant " + opts.variants[v];
          continue;
        }
        cfg->timeout = opts.timeout;
        cfg->seed = opts.seed;
        cfg->debug_check = opts.debug_check;
        row.run = run_script(text, *cfg);
      }
    }
  };
  unsigned jobs = std::max(1u, opts.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j)
      pool.emplace_back(worker);
    for (std::thread &t : pool)
      t.join();
  }
  return report;
}

void write_csv(std::ostream &os, const BenchReport &report) {
  os << "file,variant,verdict,time_ms,conflicts,eq_expl,arith_expl,bb_expl,oracle_verdict\n";
  for (const BenchRow &r : report.rows) {
    const SolverStats &st = r.run.stats;
    os << r.file << ',' << r.variant << ',' << r.run.verdict << ',' << r.run.time_ms << ',' << st.conflicts << ','
       << st.explain.eq << ',' << st.explain.arith << ',' << st.explain.bitblast << ',' << r.oracle << '\n';
  }
}

void write_cactus(std::ostream &os, const BenchReport &report) {
  std::map<std::string, std::vector<double>> times;
  std::vector<std::string> order;
  for (const BenchRow &r : report.rows) {
    if (!times.count(r.variant))
      order.push_back(r.variant);
    std::vector<double> &t = times[r.variant];
    if (r.run.verdict == "sat" || r.run.verdict == "unsat")
      t.push_back(r.run.time_ms);
  }
  os << "variant,solved,time_ms\n";
  for (const std::string &v : order) {
    std::vector<double> &t = times[v];
    std::sort(t.begin(), t.end());
    for (std::size_t i = 0; i < t.size(); ++i)
      os << v << ',' << i + 1 << ',' << t[i] << '\n';
  }
}

} // namespace mcbv
