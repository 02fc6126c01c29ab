#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "drsplit/constraint_sets.hpp"
#include "drsplit/geometry.hpp"
#include "drsplit/splitting.hpp"

namespace drs {

struct SudokuInstance {
  std::size_t s = 0;
  ClueSet clues;
};

struct QueensInstance {
  std::size_t s = 0;
};

/// Checks s >= 4.
QueensInstance make_queens(std::size_t s);

using PuzzleInstance = std::variant<SudokuInstance, QueensInstance>;

/// s lines of s whitespace-separated tokens; "." or "0" is blank, otherwise a
/// 1-based decimal digit in 1..s. CRLF line endings and blank trailing lines
/// are accepted.
SudokuInstance parse_sudoku(std::string_view text);
std::string serialize_sudoku(const SudokuInstance& instance);

/// Fully or partially filled digit grid, digits 0-based, -1 for blank.
class SudokuGrid {
 public:
  SudokuGrid() = default;
  explicit SudokuGrid(std::size_t s) : s_(s), cells_(s * s, -1) {}

  std::size_t side() const noexcept { return s_; }
  int at(std::size_t i, std::size_t j) const { return cells_[i * s_ + j]; }
  void set(std::size_t i, std::size_t j, int digit) { cells_[i * s_ + j] = digit; }
  const std::vector<int>& cells() const noexcept { return cells_; }

  friend bool operator==(const SudokuGrid&, const SudokuGrid&) = default;

 private:
  std::size_t s_ = 0;
  std::vector<int> cells_;
};

/// Same text format as puzzle files.
std::string serialize_grid(const SudokuGrid& grid);
SudokuGrid clues_as_grid(const SudokuInstance& instance);

class QueensBoard {
 public:
  QueensBoard() = default;
  explicit QueensBoard(std::size_t s) : s_(s), cells_(s * s, 0) {}

  std::size_t side() const noexcept { return s_; }
  bool at(std::size_t i, std::size_t j) const { return cells_[i * s_ + j] != 0; }
  void set(std::size_t i, std::size_t j, bool queen) { cells_[i * s_ + j] = queen ? 1 : 0; }
  std::size_t queens() const;

  friend bool operator==(const QueensBoard&, const QueensBoard&) = default;

 private:
  std::size_t s_ = 0;
  std::vector<std::uint8_t> cells_;
};

/// "Q" for a queen, "." otherwise, one row per line.
std::string serialize_board(const QueensBoard& board);

/// Each pillar (i, j, :) becomes its argmax digit (lowest index on ties).
SudokuGrid round_to_candidate(const Vec& x, const SudokuInstance& instance);
/// Each row keeps a single queen at its argmax.
QueensBoard round_to_candidate(const Vec& x, const QueensInstance& instance);

/// Binary encodings; inverse of rounding on binary points.
Vec lift(const SudokuGrid& grid);
Vec lift(const QueensBoard& board);

struct Validation {
  bool valid = false;
  std::vector<std::string> violations;

  explicit operator bool() const noexcept { return valid; }
};

/// Row, column and box constraints plus every clue. Blank cells are reported
/// as violations.
Validation validate(const SudokuGrid& grid, const SudokuInstance& instance);

/// Queens board rules. Violations are named after the constraint set:
/// "C1 row i", "C2 column j", "C3 anti-diagonal i+j=d", "C4 diagonal i-j=d".
Validation validate(const QueensBoard& board, const QueensInstance& instance);

/// Sets C1..C5 in that order; the feasibility check rounds and validates.
ProductProblem sudoku_problem(const SudokuInstance& instance, TieBreak tie = {});
/// Sets C1..C4 in that order.
ProductProblem queens_problem(const QueensInstance& instance, TieBreak tie = {});
ProductProblem make_problem(const PuzzleInstance& instance, TieBreak tie = {});

std::size_t lifted_dimension(const PuzzleInstance& instance);

/// Unit circle and the line <x, (1, 2)> = sqrt(2), started from (-10, -8).
struct CircleLineInstance {
  std::shared_ptr<const CircleProjection> circle;
  std::shared_ptr<const AffineSubspace> line;
  Vec z0;

  /// The circle is C, the line S. Feasible when within `tol` of both.
  TwoSetProblem problem(double tol = 1e-6) const;
  /// The two points of C ∩ S.
  std::vector<Vec> intersection_points() const;
};

CircleLineInstance circle_line_instance();

}  // namespace drs
