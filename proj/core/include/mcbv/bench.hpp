#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mcbv/solver.hpp"

namespace mcbv {

/// Solver verdict and statistics for one script.
struct RunResult {
  /// sat, unsat, unknown, or error.
  std::string verdict;
  double time_ms = 0;
  SolverStats stats;
  std::string message;
};

/// Parses and solves one script under `cfg`. Never throws for bad input;
/// parse and feature errors come back as verdict "error".
RunResult run_script(const std::string &text, const SolverConfig &cfg);

/// Brute-force verdict for a script: sat, unsat, toolarge, or error.
std::string oracle_verdict(const std::string &text);

struct BenchOptions {
  std::vector<std::string> variants{"all"};
  double timeout = 10;
  std::uint64_t seed = 0;
  bool oracle = false;
  bool debug_check = false;
  unsigned jobs = 1;
};

struct BenchRow {
  std::string file;
  std::string variant;
  RunResult run;
  /// Empty unless the oracle was requested.
  std::string oracle;
};

struct BenchReport {
  std::vector<BenchRow> rows;
};

/// Runs every .smt2 file under `dir` (recursively, sorted by path) with
/// every variant. Rows come out in file order, then variant order,
/// whatever the number of jobs.
BenchReport bench(const std::filesystem::path &dir, const BenchOptions &opts);

/// file,variant,verdict,time_ms,conflicts,eq_expl,arith_expl,bb_expl,oracle_verdict
void write_csv(std::ostream &os, const BenchReport &report);
/// Solved-versus-time table: for each variant, the n-th fastest definite
/// answer and its time.
void write_cactus(std::ostream &os, const BenchReport &report);

} // namespace mcbv
