#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "drsplit/constraint_sets.hpp"
#include "drsplit/puzzles.hpp"
#include "drsplit/splitting.hpp"

namespace drs {

/// Everything a single solve needs besides the instance.
struct RunConfig {
  Method method = Method::sdr;
  /// Required for (and only for) the damped method.
  std::optional<double> gamma;
  StopPolicy policy;
  std::uint64_t seed = 0;
  TieBreak::Mode tie_break = TieBreak::Mode::lowest_index;
  std::string trace_path;

  /// Throws ContractViolation on inconsistent settings.
  void validate() const;
  SplittingConfig splitting(bool compute_residuals) const;
};

/// One seeded solve: random initial state from `seed`, tie-breaks keyed by the same seed.
RunResult solve(const PuzzleInstance& instance, const RunConfig& config, std::uint64_t seed,
                bool compute_residuals = false);

struct BenchRow {
  std::size_t run_id = 0;
  std::uint64_t seed = 0;
  Outcome outcome = Outcome::max_iter;
  std::size_t iterations = 0;
  double wall_ms = 0.0;
};

struct BenchReport {
  std::size_t runs = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  /// Over successful runs only; zero when there are none.
  double mean_iterations = 0.0;
  double median_iterations = 0.0;
  std::vector<BenchRow> rows;  // sorted by seed
};

/// Worker count from DR_THREADS when set (>= 1), otherwise the hardware concurrency.
std::size_t worker_count();

/// `runs` independent solves with seeds config.seed + 0 .. config.seed + runs - 1.
/// `threads == 0` picks worker_count().
BenchReport run_bench(const PuzzleInstance& instance, const RunConfig& config, std::size_t runs,
                      std::size_t threads = 0);

BenchReport summarize(std::vector<BenchRow> rows);

/// Columns: run_id, seed, outcome, iterations, wall_ms.
void write_bench_csv(std::ostream& os, const BenchReport& report);
std::string bench_summary(const BenchReport& report);

}  // namespace drs
