#include "drsplit/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <thread>

#include "drsplit/errors.hpp"

namespace drs {

void RunConfig::validate() const {
  policy.validate();
  if (method == Method::ddr && !gamma) throw ContractViolation("--gamma is required for ddr");
  if (method != Method::ddr && gamma) {
    throw ContractViolation("--gamma only applies to ddr");
  }
  if (gamma && !(*gamma > 0.0)) throw ContractViolation("gamma must be > 0");
}

SplittingConfig RunConfig::splitting(bool compute_residuals) const {
  validate();
  SplittingConfig cfg;
  cfg.method = method;
  cfg.damping = gamma ? DampingParam(*gamma) : DampingParam::standard();
  cfg.policy = policy;
  cfg.compute_residuals = compute_residuals;
  return cfg;
}

RunResult solve(const PuzzleInstance& instance, const RunConfig& config, std::uint64_t seed,
                bool compute_residuals) {
  const SplittingConfig cfg = config.splitting(compute_residuals);
  const TieBreak tie{config.tie_break, seed};
  const ProductProblem problem = make_problem(instance, tie);
  return run(problem, cfg, seed);
}

std::size_t worker_count() {
  if (const char* env = std::getenv("DR_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

BenchReport summarize(std::vector<BenchRow> rows) {
  std::sort(rows.begin(), rows.end(),
            [](const BenchRow& a, const BenchRow& b) { return a.seed < b.seed; });
  BenchReport report;
  report.runs = rows.size();
  std::vector<double> iters;
  for (const BenchRow& r : rows) {
    if (r.outcome == Outcome::feasible_found) {
      ++report.successes;
      iters.push_back(static_cast<double>(r.iterations));
    }
  }
  report.success_rate =
      report.runs ? static_cast<double>(report.successes) / static_cast<double>(report.runs) : 0.0;
  if (!iters.empty()) {
    double total = 0.0;
    for (double v : iters) total += v;
    report.mean_iterations = total / static_cast<double>(iters.size());
    std::sort(iters.begin(), iters.end());
    const std::size_t mid = iters.size() / 2;
    report.median_iterations =
        iters.size() % 2 ? iters[mid] : 0.5 * (iters[mid - 1] + iters[mid]);
  }
  report.rows = std::move(rows);
  return report;
}

BenchReport run_bench(const PuzzleInstance& instance, const RunConfig& config, std::size_t runs,
                      std::size_t threads) {
  if (runs == 0) throw ContractViolation("bench needs at least one run");
  config.validate();
  if (threads == 0) threads = worker_count();
  threads = std::min(threads, runs);

  std::vector<BenchRow> rows(runs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < runs; i = next++) {
      const std::uint64_t seed = config.seed + i;
      const RunResult r = solve(instance, config, seed);
      rows[i] = BenchRow{i, seed, r.outcome, r.iterations, r.wall_ms};
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return summarize(std::move(rows));
}

void write_bench_csv(std::ostream& os, const BenchReport& report) {
  os << "run_id,seed,outcome,iterations,wall_ms\n";
  char buf[64];
  for (const BenchRow& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%.3f", r.wall_ms);
    os << r.run_id << ',' << r.seed << ',' << to_string(r.outcome) << ',' << r.iterations << ','
       << buf << '\n';
  }
}

std::string bench_summary(const BenchReport& report) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "runs=%zu successes=%zu success_rate=%.4f mean_iter=%.1f median_iter=%.1f",
                report.runs, report.successes, report.success_rate, report.mean_iterations,
                report.median_iterations);
  return buf;
}

}  // namespace drs
