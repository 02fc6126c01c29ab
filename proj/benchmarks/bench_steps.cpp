#include <benchmark/benchmark.h>

#include <fstream>
#include <random>
#include <sstream>

#include "drsplit/bench.hpp"
#include "drsplit/puzzles.hpp"

using namespace drs;

namespace {

SudokuInstance load(const char* name) {
  std::ifstream in(std::string(DRSPLIT_DATA_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_sudoku(ss.str());
}

void BM_OneHotProjection(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec x(n);
  for (auto& v : x) v = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(project_one_hot(x));
}
BENCHMARK(BM_OneHotProjection)->Arg(9)->Arg(16)->Arg(64);

void BM_SudokuGroupProjection(benchmark::State& state) {
  const auto s = static_cast<std::size_t>(state.range(0));
  const GroupProjection p(s * s * s, sudoku_constraint_groups(s, SudokuConstraint::blocks));
  const ProductState st = random_product_state(1, s * s * s, 2);
  Vec out(s * s * s);
  for (auto _ : state) {
    p.project_into(st.z_blocks[0], out.span());
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_SudokuGroupProjection)->Arg(9)->Arg(16);

void BM_SudokuProductStep(benchmark::State& state) {
  const auto problem = sudoku_problem(load("sudoku9_37.txt"));
  ProductState st = random_product_state(problem.sets.size(), problem.dimension(), 3);
  const bool damped = state.range(0) != 0;
  for (auto _ : state) {
    st = damped ? ddr_product_step(problem.sets, DampingParam(0.2), st) : dr_product_step(problem.sets, st);
    benchmark::DoNotOptimize(st.x.data());
  }
}
BENCHMARK(BM_SudokuProductStep)->Arg(0)->Arg(1);

void BM_QueensProductStep(benchmark::State& state) {
  const auto problem = queens_problem(make_queens(static_cast<std::size_t>(state.range(0))));
  ProductState st = random_product_state(problem.sets.size(), problem.dimension(), 4);
  for (auto _ : state) {
    st = dr_product_step(problem.sets, st);
    benchmark::DoNotOptimize(st.x.data());
  }
}
BENCHMARK(BM_QueensProductStep)->Arg(8)->Arg(32);

void BM_SolveSudoku(benchmark::State& state) {
  const PuzzleInstance inst{load("sudoku9_37.txt")};
  RunConfig rc;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(solve(inst, rc, seed++).iterations);
}
BENCHMARK(BM_SolveSudoku)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
