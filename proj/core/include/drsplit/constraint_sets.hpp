#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "drsplit/geometry.hpp"

namespace drs {

/// How an argmax with several equal maxima is resolved.
///
/// `lowest_index` picks the first maximiser. `seeded_random` picks one of the
/// maximisers by hashing the seed with the group and the tied value, so the
/// projection stays a pure function of its input and reruns are bit-identical.
struct TieBreak {
  enum class Mode { lowest_index, seeded_random };

  Mode mode = Mode::lowest_index;
  std::uint64_t seed = 0;

  static TieBreak lowest() { return {}; }
  static TieBreak random(std::uint64_t seed) { return {Mode::seeded_random, seed}; }
};

enum class GroupKind { one_hot, at_most_one };

/// Positions of the ambient vector that form one projection group.
struct IndexGroup {
  std::vector<std::size_t> indices;
  GroupKind kind = GroupKind::one_hot;
};

/// Index of the maximal entry of `x` under the tie-break rule. `salt` keys the
/// random tie-break; it is ignored in lowest-index mode.
std::size_t argmax(std::span<const double> x, const TieBreak& tie = {}, std::uint64_t salt = 0);

/// Nearest standard basis vector.
Vec project_one_hot(const Vec& x, const TieBreak& tie = {});

/// Nearest point of {0, e_1, ..., e_d}. At max entry exactly 1/2 the one-hot
/// point is selected.
Vec project_at_most_one(const Vec& x, const TieBreak& tie = {});

// Sudoku cube layout: index = ((i * s) + j) * s + k for row i, column j,
// digit k. The digit axis is contiguous.

bool is_perfect_square(std::size_t s);
std::size_t integer_sqrt(std::size_t s);

inline std::size_t cube_index(std::size_t s, std::size_t i, std::size_t j, std::size_t k) {
  return ((i * s) + j) * s + k;
}

/// C1..C4 of the lifted Sudoku cube.
enum class SudokuConstraint {
  rows = 1,     // C1: (:, j, k), i varies
  columns = 2,  // C2: (i, :, k), j varies
  pillars = 3,  // C3: (i, j, :), k varies
  blocks = 4,   // C4: sqrt(s) x sqrt(s) block for each digit k
};

/// s^2 disjoint one-hot groups of size s covering the cube. Blocks are
/// enumerated row-major over block positions, digit-major outside that.
std::vector<IndexGroup> sudoku_constraint_groups(std::size_t s, SudokuConstraint which);

/// C1..C4 of the s-queens board (index i * s + j).
enum class QueensConstraint {
  rows = 1,            // one-hot per row
  columns = 2,         // one-hot per column
  anti_diagonals = 3,  // at most one per i + j = const, ordered by i + j
  diagonals = 4,       // at most one per i - j = const, ordered by i - j from -(s-1)
};

std::vector<IndexGroup> queens_constraint_groups(std::size_t s, QueensConstraint which);

/// Projection onto a product of group constraints: each group is projected
/// independently; positions covered by no group pass through unchanged.
/// Groups must be pairwise disjoint.
class GroupProjection final : public ProjectionSet {
 public:
  GroupProjection(std::size_t dimension, std::vector<IndexGroup> groups, TieBreak tie = {});

  std::size_t dimension() const override { return dimension_; }
  const std::vector<IndexGroup>& groups() const noexcept { return groups_; }
  void project_into(std::span<const double> x, std::span<double> out) const override;

 private:
  std::size_t dimension_;
  std::vector<IndexGroup> groups_;
  TieBreak tie_;
};

/// A given digit: cell (i, j) holds digit k (0-based).
struct Clue {
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t k = 0;

  friend bool operator==(const Clue&, const Clue&) = default;
};

/// Clues for an s x s grid. Bounds and duplicate cells are rejected; mutual
/// consistency is not checked.
class ClueSet {
 public:
  ClueSet() = default;
  ClueSet(std::size_t s, std::vector<Clue> clues);

  std::size_t side() const noexcept { return s_; }
  std::size_t size() const noexcept { return clues_.size(); }
  bool empty() const noexcept { return clues_.empty(); }
  const std::vector<Clue>& clues() const noexcept { return clues_; }
  auto begin() const noexcept { return clues_.begin(); }
  auto end() const noexcept { return clues_.end(); }

 private:
  std::size_t s_ = 0;
  std::vector<Clue> clues_;
};

/// C5: each clued pillar (i, j, :) is clamped to e_k; every other entry is
/// left alone. This is an affine subspace whose linear part is diagonal.
class ClueProjection final : public ProjectionSet {
 public:
  explicit ClueProjection(ClueSet clues);

  std::size_t dimension() const override;
  const ClueSet& clues() const noexcept { return clues_; }
  void project_into(std::span<const double> x, std::span<double> out) const override;

  /// 0 on clamped entries, 1 elsewhere.
  std::vector<double> linear_part_diagonal() const;

 private:
  ClueSet clues_;
};

/// Unit circle in R^2. The origin maps to (1, 0).
class CircleProjection final : public ProjectionSet {
 public:
  std::size_t dimension() const override { return 2; }
  void project_into(std::span<const double> x, std::span<double> out) const override;
};

Vec project_circle(const Vec& x);

}  // namespace drs
