#include "drsplit/constraint_sets.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>
#include <utility>

#include "drsplit/errors.hpp"

namespace drs {

namespace {

// splitmix64 finaliser
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void project_group(std::span<const double> x, std::span<double> out, const IndexGroup& g,
                   const TieBreak& tie, std::vector<double>& scratch) {
  scratch.resize(g.indices.size());
  for (std::size_t t = 0; t < g.indices.size(); ++t) scratch[t] = x[g.indices[t]];
  const std::size_t best = argmax(scratch, tie, g.indices.front());
  const bool keep = g.kind == GroupKind::one_hot || scratch[best] >= 0.5;
  for (std::size_t t = 0; t < g.indices.size(); ++t) out[g.indices[t]] = 0.0;
  if (keep) out[g.indices[best]] = 1.0;
}

Vec project_single_group(const Vec& x, GroupKind kind, const TieBreak& tie) {
  if (x.empty()) throw ContractViolation("group projection needs at least one entry");
  IndexGroup g{{}, kind};
  g.indices.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) g.indices[i] = i;
  Vec out(x.size());
  std::vector<double> scratch;
  project_group(x.span(), out.span(), g, tie, scratch);
  return out;
}

void require_sudoku_side(std::size_t s) {
  if (s < 4 || !is_perfect_square(s)) {
    throw InvalidInstance("Sudoku side " + std::to_string(s) +
                          " is not a perfect square >= 4");
  }
}

}  // namespace

std::size_t argmax(std::span<const double> x, const TieBreak& tie, std::uint64_t salt) {
  std::size_t best = 0;
  std::size_t ties = 1;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (x[i] > x[best]) {
      best = i;
      ties = 1;
    } else if (x[i] == x[best]) {
      ++ties;
    }
  }
  if (ties == 1 || tie.mode == TieBreak::Mode::lowest_index) return best;

  const std::uint64_t h =
      mix(tie.seed ^ mix(salt ^ mix(std::bit_cast<std::uint64_t>(x[best]))));
  std::size_t pick = static_cast<std::size_t>(h % ties);
  for (std::size_t i = best; i < x.size(); ++i) {
    if (x[i] == x[best]) {
      if (pick == 0) return i;
      --pick;
    }
  }
  return best;
}

Vec project_one_hot(const Vec& x, const TieBreak& tie) {
  return project_single_group(x, GroupKind::one_hot, tie);
}

Vec project_at_most_one(const Vec& x, const TieBreak& tie) {
  return project_single_group(x, GroupKind::at_most_one, tie);
}

std::size_t integer_sqrt(std::size_t s) {
  auto r = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(s))));
  while (r * r > s) --r;
  while ((r + 1) * (r + 1) <= s) ++r;
  return r;
}

bool is_perfect_square(std::size_t s) {
  const std::size_t r = integer_sqrt(s);
  return r * r == s;
}

std::vector<IndexGroup> sudoku_constraint_groups(std::size_t s, SudokuConstraint which) {
  require_sudoku_side(s);
  const std::size_t b = integer_sqrt(s);
  std::vector<IndexGroup> groups;
  groups.reserve(s * s);
  auto add = [&](auto&& index_of) {
    IndexGroup g;
    g.indices.reserve(s);
    for (std::size_t t = 0; t < s; ++t) g.indices.push_back(index_of(t));
    groups.push_back(std::move(g));
  };

  switch (which) {
    case SudokuConstraint::rows:
      for (std::size_t j = 0; j < s; ++j)
        for (std::size_t k = 0; k < s; ++k) add([&](std::size_t i) { return cube_index(s, i, j, k); });
      break;
    case SudokuConstraint::columns:
      for (std::size_t i = 0; i < s; ++i)
        for (std::size_t k = 0; k < s; ++k) add([&](std::size_t j) { return cube_index(s, i, j, k); });
      break;
    case SudokuConstraint::pillars:
      for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j) add([&](std::size_t k) { return cube_index(s, i, j, k); });
      break;
    case SudokuConstraint::blocks:
      for (std::size_t k = 0; k < s; ++k)
        for (std::size_t bi = 0; bi < b; ++bi)
          for (std::size_t bj = 0; bj < b; ++bj)
            add([&](std::size_t t) { return cube_index(s, bi * b + t / b, bj * b + t % b, k); });
      break;
    default:
      throw ContractViolation("unknown Sudoku constraint");
  }
  return groups;
}

std::vector<IndexGroup> queens_constraint_groups(std::size_t s, QueensConstraint which) {
  if (s < 4) throw InvalidInstance("queens board side must be >= 4, got " + std::to_string(s));
  std::vector<IndexGroup> groups;
  switch (which) {
    case QueensConstraint::rows:
    case QueensConstraint::columns:
      for (std::size_t a = 0; a < s; ++a) {
        IndexGroup g{{}, GroupKind::one_hot};
        for (std::size_t t = 0; t < s; ++t)
          g.indices.push_back(which == QueensConstraint::rows ? a * s + t : t * s + a);
        groups.push_back(std::move(g));
      }
      break;
    case QueensConstraint::anti_diagonals:
      for (std::size_t sum = 0; sum + 1 < 2 * s; ++sum) {
        IndexGroup g{{}, GroupKind::at_most_one};
        for (std::size_t i = 0; i < s; ++i)
          if (sum >= i && sum - i < s) g.indices.push_back(i * s + (sum - i));
        groups.push_back(std::move(g));
      }
      break;
    case QueensConstraint::diagonals:
      // offset = i - j + (s - 1)
      for (std::size_t off = 0; off + 1 < 2 * s; ++off) {
        IndexGroup g{{}, GroupKind::at_most_one};
        for (std::size_t i = 0; i < s; ++i)
          if (i + (s - 1) >= off && i + (s - 1) - off < s) g.indices.push_back(i * s + (i + (s - 1) - off));
        groups.push_back(std::move(g));
      }
      break;
    default:
      throw ContractViolation("unknown queens constraint");
  }
  return groups;
}

GroupProjection::GroupProjection(std::size_t dimension, std::vector<IndexGroup> groups,
                                 TieBreak tie)
    : dimension_(dimension), groups_(std::move(groups)), tie_(tie) {
  std::vector<bool> seen(dimension_, false);
  for (const IndexGroup& g : groups_) {
    if (g.indices.empty()) throw ContractViolation("empty projection group");
    for (std::size_t idx : g.indices) {
      if (idx >= dimension_) throw ContractViolation("group index out of bounds");
      if (seen[idx]) throw ContractViolation("projection groups overlap");
      seen[idx] = true;
    }
  }
}

void GroupProjection::project_into(std::span<const double> x, std::span<double> out) const {
  if (x.data() != out.data()) std::copy(x.begin(), x.end(), out.begin());
  std::vector<double> scratch;
  for (const IndexGroup& g : groups_) project_group(x, out, g, tie_, scratch);
}

ClueSet::ClueSet(std::size_t s, std::vector<Clue> clues) : s_(s), clues_(std::move(clues)) {
  std::vector<bool> used(s_ * s_, false);
  for (const Clue& c : clues_) {
    if (c.i >= s_ || c.j >= s_ || c.k >= s_) {
      throw InvalidInstance("clue out of range for side " + std::to_string(s_));
    }
    if (used[c.i * s_ + c.j]) {
      throw InvalidInstance("two clues share cell (" + std::to_string(c.i) + ", " +
                            std::to_string(c.j) + ")");
    }
    used[c.i * s_ + c.j] = true;
  }
}

ClueProjection::ClueProjection(ClueSet clues) : clues_(std::move(clues)) {}

std::size_t ClueProjection::dimension() const {
  const std::size_t s = clues_.side();
  return s * s * s;
}

void ClueProjection::project_into(std::span<const double> x, std::span<double> out) const {
  if (x.data() != out.data()) std::copy(x.begin(), x.end(), out.begin());
  const std::size_t s = clues_.side();
  for (const Clue& c : clues_) {
    const std::size_t base = cube_index(s, c.i, c.j, 0);
    for (std::size_t k = 0; k < s; ++k) out[base + k] = 0.0;
    out[base + c.k] = 1.0;
  }
}

std::vector<double> ClueProjection::linear_part_diagonal() const {
  std::vector<double> d(dimension(), 1.0);
  const std::size_t s = clues_.side();
  for (const Clue& c : clues_) {
    const std::size_t base = cube_index(s, c.i, c.j, 0);
    for (std::size_t k = 0; k < s; ++k) d[base + k] = 0.0;
  }
  return d;
}

void CircleProjection::project_into(std::span<const double> x, std::span<double> out) const {
  const double r = std::hypot(x[0], x[1]);
  if (r == 0.0) {
    out[0] = 1.0;
    out[1] = 0.0;
    return;
  }
  const double x0 = x[0];
  const double x1 = x[1];
  out[0] = x0 / r;
  out[1] = x1 / r;
}

Vec project_circle(const Vec& x) { return CircleProjection{}.project(x); }

}  // namespace drs
