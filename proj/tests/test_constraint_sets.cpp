#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "drsplit/constraint_sets.hpp"
#include "drsplit/errors.hpp"
#include "oracles.hpp"

using namespace drs;

namespace {

bool contains(const std::vector<std::vector<double>>& set, const Vec& v) {
  return std::find(set.begin(), set.end(), v.values()) != set.end();
}

}  // namespace

TEST(GroupProjection, OneHotExamples) {
  EXPECT_EQ(project_one_hot(Vec{0.2, 0.9, 0.1}), (Vec{0, 1, 0}));
  // exact tie: lowest index
  EXPECT_EQ(project_one_hot(Vec{0.5, 0.5}), (Vec{1, 0}));
  EXPECT_EQ(project_one_hot(Vec{-3.0, -1.0, -2.0}), (Vec{0, 1, 0}));
}

TEST(GroupProjection, AtMostOneExamples) {
  EXPECT_EQ(project_at_most_one(Vec{0.3, 0.4}), (Vec{0, 0}));
  EXPECT_EQ(project_at_most_one(Vec{0.3, 0.6}), (Vec{0, 1}));
  // max exactly 1/2 is a tie between 0 and e_i; the one-hot point wins
  EXPECT_EQ(project_at_most_one(Vec{0.5, 0.1}), (Vec{1, 0}));
  EXPECT_EQ(project_at_most_one(Vec{-1.0, -0.2}), (Vec{0, 0}));
}

// 1000 random small groups, with ties planted in a third of them.
TEST(GroupProjection, MatchesBruteForce) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> dim(1, 7);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t d = dim(rng);
    auto x = oracle::random_vector(rng, d, -1.0, 1.5);
    if (trial % 3 == 0 && d > 1) x[d - 1] = x[0] = *std::max_element(x.begin(), x.end());
    if (trial % 7 == 0) x[0] = 0.5;
    const bool amo = trial % 2 == 1;
    const auto cands = oracle::group_candidates(d, amo);
    const auto best = oracle::brute_force_nearest(x, cands);
    for (auto tie : {TieBreak::lowest(), TieBreak::random(static_cast<std::uint64_t>(trial))}) {
      const Vec p = amo ? project_at_most_one(Vec(x), tie) : project_one_hot(Vec(x), tie);
      ASSERT_TRUE(contains(best.minimisers, p)) << "trial " << trial;
      EXPECT_NEAR(oracle::sq_dist(x, p.values()), best.dist, 1e-15);
    }
  }
}

TEST(GroupProjection, SeededTieBreakIsDeterministic) {
  const Vec x{0.7, 0.7, 0.7, 0.7, 0.7, 0.7};
  std::set<std::size_t> picks;
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    const Vec a = project_one_hot(x, TieBreak::random(seed));
    const Vec b = project_one_hot(x, TieBreak::random(seed));
    EXPECT_EQ(a, b);
    picks.insert(argmax(a));
  }
  // the seed really changes the choice
  EXPECT_GT(picks.size(), 1u);
}

TEST(GroupProjection, IdempotentOnEveryConstraint) {
  std::mt19937_64 rng(3);
  for (std::size_t s : {4u, 9u}) {
    const std::size_t n = s * s * s;
    for (auto which : {SudokuConstraint::rows, SudokuConstraint::columns, SudokuConstraint::pillars,
                       SudokuConstraint::blocks}) {
      const GroupProjection p(n, sudoku_constraint_groups(s, which));
      const Vec once = p.project(Vec(oracle::random_vector(rng, n)));
      EXPECT_EQ(p.project(once), once);
    }
  }
  for (std::size_t s : {4u, 8u}) {
    const std::size_t n = s * s;
    for (auto which : {QueensConstraint::rows, QueensConstraint::columns,
                       QueensConstraint::anti_diagonals, QueensConstraint::diagonals}) {
      const GroupProjection p(n, queens_constraint_groups(s, which));
      const Vec once = p.project(Vec(oracle::random_vector(rng, n)));
      EXPECT_EQ(p.project(once), once);
    }
  }
}

TEST(SudokuGroups, PartitionTheCube) {
  for (std::size_t s : {4u, 9u, 16u}) {
    for (auto which : {SudokuConstraint::rows, SudokuConstraint::columns, SudokuConstraint::pillars,
                       SudokuConstraint::blocks}) {
      const auto groups = sudoku_constraint_groups(s, which);
      ASSERT_EQ(groups.size(), s * s);
      std::vector<int> seen(s * s * s, 0);
      for (const auto& g : groups) {
        EXPECT_EQ(g.indices.size(), s);
        EXPECT_EQ(g.kind, GroupKind::one_hot);
        for (auto i : g.indices) ++seen[i];
      }
      EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
    }
  }
}

TEST(SudokuGroups, Layout) {
  const std::size_t s = 4;
  const auto pillars = sudoku_constraint_groups(s, SudokuConstraint::pillars);
  // pillar (1, 2, :) is contiguous
  EXPECT_EQ(pillars[1 * s + 2].indices,
            (std::vector<std::size_t>{cube_index(s, 1, 2, 0), cube_index(s, 1, 2, 1),
                                      cube_index(s, 1, 2, 2), cube_index(s, 1, 2, 3)}));
  const auto blocks = sudoku_constraint_groups(s, SudokuConstraint::blocks);
  // digit 0, block 1 (top right): rows 0..1, columns 2..3
  std::set<std::size_t> b(blocks[1].indices.begin(), blocks[1].indices.end());
  EXPECT_EQ(b, (std::set<std::size_t>{cube_index(s, 0, 2, 0), cube_index(s, 0, 3, 0),
                                      cube_index(s, 1, 2, 0), cube_index(s, 1, 3, 0)}));
}

TEST(SudokuGroups, RejectsBadSide) {
  EXPECT_THROW(sudoku_constraint_groups(5, SudokuConstraint::rows), InvalidInstance);
  EXPECT_THROW(sudoku_constraint_groups(1, SudokuConstraint::rows), InvalidInstance);
  EXPECT_TRUE(is_perfect_square(16));
  EXPECT_EQ(integer_sqrt(16), 4u);
}

TEST(QueensGroups, Diagonals) {
  const std::size_t s = 4;
  const auto anti = queens_constraint_groups(s, QueensConstraint::anti_diagonals);
  const auto diag = queens_constraint_groups(s, QueensConstraint::diagonals);
  EXPECT_EQ(anti.size(), 2 * s - 1);
  EXPECT_EQ(diag.size(), 2 * s - 1);
  for (std::size_t d = 0; d < anti.size(); ++d) {
    EXPECT_EQ(anti[d].kind, GroupKind::at_most_one);
    for (auto idx : anti[d].indices) EXPECT_EQ(idx / s + idx % s, d);
  }
  for (std::size_t d = 0; d < diag.size(); ++d) {
    for (auto idx : diag[d].indices) {
      EXPECT_EQ(static_cast<long>(idx / s) - static_cast<long>(idx % s), static_cast<long>(d) - 3);
    }
  }
  EXPECT_THROW(queens_constraint_groups(3, QueensConstraint::rows), InvalidInstance);
}

TEST(GroupProjection, RejectsOverlapAndPassesUncovered) {
  EXPECT_THROW(GroupProjection(4, {{{0, 1}, GroupKind::one_hot}, {{1, 2}, GroupKind::one_hot}}),
               ContractViolation);
  const GroupProjection p(4, {{{0, 1}, GroupKind::one_hot}});
  EXPECT_EQ(p.project(Vec{0.1, 0.2, 0.3, -4.0}), (Vec{0, 1, 0.3, -4.0}));
}

TEST(ClueProjection, ClampsCluedPillarsOnly) {
  const std::size_t s = 4;
  const ClueProjection c5(ClueSet(s, {{0, 0, 2}, {3, 1, 0}}));
  std::mt19937_64 rng(8);
  const Vec x(oracle::random_vector(rng, s * s * s));
  const Vec p = c5.project(x);
  for (std::size_t k = 0; k < s; ++k) {
    EXPECT_EQ(p[cube_index(s, 0, 0, k)], k == 2 ? 1.0 : 0.0);
    EXPECT_EQ(p[cube_index(s, 3, 1, k)], k == 0 ? 1.0 : 0.0);
    EXPECT_EQ(p[cube_index(s, 1, 1, k)], x[cube_index(s, 1, 1, k)]);
  }
  EXPECT_EQ(c5.project(p), p);
  const auto diag = c5.linear_part_diagonal();
  EXPECT_EQ(std::count(diag.begin(), diag.end(), 0.0), static_cast<long>(2 * s));
}

TEST(ClueSet, RejectsBadClues) {
  EXPECT_THROW(ClueSet(4, {{0, 0, 4}}), InvalidInstance);
  EXPECT_THROW(ClueSet(4, {{4, 0, 0}}), InvalidInstance);
  EXPECT_THROW(ClueSet(4, {{1, 1, 0}, {1, 1, 2}}), InvalidInstance);
}

TEST(CircleProjection, Examples) {
  const Vec p = project_circle(Vec{3.0, 4.0});
  EXPECT_NEAR(p[0], 0.6, 1e-15);
  EXPECT_NEAR(p[1], 0.8, 1e-15);
  EXPECT_EQ(project_circle(Vec{0.0, 0.0}), (Vec{1.0, 0.0}));
  EXPECT_EQ(project_circle(p), p);
}
