#include "drsplit/puzzles.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "drsplit/errors.hpp"

namespace drs {

namespace {

struct Token {
  std::string text;
  std::size_t column;
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    out.push_back({std::string(line.substr(start, i - start)), start + 1});
  }
  return out;
}

std::string cell_name(std::size_t i, std::size_t j) {
  return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

}  // namespace

QueensInstance make_queens(std::size_t s) {
  if (s < 4) throw InvalidInstance("queens board side must be >= 4, got " + std::to_string(s));
  return QueensInstance{s};
}

SudokuInstance parse_sudoku(std::string_view text) {
  std::vector<std::vector<Token>> rows;
  std::vector<std::size_t> line_numbers;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    auto tokens = tokenize(line);
    if (!tokens.empty()) {
      if (!rows.empty() && line_numbers.back() + 1 != line_no) {
        throw ParseError(line_no, 1, "blank line inside grid");
      }
      rows.push_back(std::move(tokens));
      line_numbers.push_back(line_no);
    }
    pos = end + 1;
  }
  if (rows.empty()) throw ParseError(1, 1, "empty puzzle");

  const std::size_t s = rows.size();
  for (std::size_t r = 0; r < s; ++r) {
    if (rows[r].size() != s) {
      const std::size_t col = rows[r].size() > s ? rows[r][s].column : 1;
      throw ParseError(line_numbers[r], col,
                       "expected " + std::to_string(s) + " tokens, found " +
                           std::to_string(rows[r].size()));
    }
  }
  if (s < 4 || !is_perfect_square(s)) {
    throw ParseError(line_numbers.front(), 1,
                     "grid side " + std::to_string(s) + " is not a perfect square >= 4");
  }

  std::vector<Clue> clues;
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = 0; j < s; ++j) {
      const Token& t = rows[i][j];
      if (t.text == "." || t.text == "0") continue;
      std::size_t value = 0;
      bool ok = !t.text.empty() && t.text.size() <= 4;
      for (char c : t.text) {
        if (c < '0' || c > '9') {
          ok = false;
          break;
        }
        value = value * 10 + static_cast<std::size_t>(c - '0');
      }
      if (!ok || value < 1 || value > s) {
        throw ParseError(line_numbers[i], t.column,
                         "token '" + t.text + "' is not a digit in 1.." + std::to_string(s));
      }
      clues.push_back({i, j, value - 1});
    }
  }
  return SudokuInstance{s, ClueSet(s, std::move(clues))};
}

std::string serialize_grid(const SudokuGrid& grid) {
  std::string out;
  const std::size_t s = grid.side();
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = 0; j < s; ++j) {
      if (j) out += ' ';
      const int d = grid.at(i, j);
      out += d < 0 ? std::string(".") : std::to_string(d + 1);
    }
    out += '\n';
  }
  return out;
}

SudokuGrid clues_as_grid(const SudokuInstance& instance) {
  SudokuGrid grid(instance.s);
  for (const Clue& c : instance.clues) grid.set(c.i, c.j, static_cast<int>(c.k));
  return grid;
}

std::string serialize_sudoku(const SudokuInstance& instance) {
  return serialize_grid(clues_as_grid(instance));
}

std::size_t QueensBoard::queens() const {
  std::size_t n = 0;
  for (auto c : cells_) n += c;
  return n;
}

std::string serialize_board(const QueensBoard& board) {
  std::string out;
  for (std::size_t i = 0; i < board.side(); ++i) {
    for (std::size_t j = 0; j < board.side(); ++j) {
      if (j) out += ' ';
      out += board.at(i, j) ? 'Q' : '.';
    }
    out += '\n';
  }
  return out;
}

SudokuGrid round_to_candidate(const Vec& x, const SudokuInstance& instance) {
  const std::size_t s = instance.s;
  if (x.size() != s * s * s) throw ContractViolation("rounding: vector is not an s^3 cube");
  SudokuGrid grid(s);
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = 0; j < s; ++j) {
      std::span<const double> pillar(x.data() + cube_index(s, i, j, 0), s);
      grid.set(i, j, static_cast<int>(argmax(pillar)));
    }
  }
  return grid;
}

QueensBoard round_to_candidate(const Vec& x, const QueensInstance& instance) {
  const std::size_t s = instance.s;
  if (x.size() != s * s) throw ContractViolation("rounding: vector is not an s^2 board");
  QueensBoard board(s);
  for (std::size_t i = 0; i < s; ++i) {
    std::span<const double> row(x.data() + i * s, s);
    board.set(i, argmax(row), true);
  }
  return board;
}

Vec lift(const SudokuGrid& grid) {
  const std::size_t s = grid.side();
  Vec x(s * s * s);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j)
      if (grid.at(i, j) >= 0) x[cube_index(s, i, j, static_cast<std::size_t>(grid.at(i, j)))] = 1.0;
  return x;
}

Vec lift(const QueensBoard& board) {
  const std::size_t s = board.side();
  Vec x(s * s);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j) x[i * s + j] = board.at(i, j) ? 1.0 : 0.0;
  return x;
}

Validation validate(const SudokuGrid& grid, const SudokuInstance& instance) {
  const std::size_t s = instance.s;
  if (grid.side() != s) throw ContractViolation("grid side does not match instance");
  const std::size_t b = integer_sqrt(s);
  Validation v;

  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j) {
      const int d = grid.at(i, j);
      if (d < 0 || static_cast<std::size_t>(d) >= s) v.violations.push_back("blank " + cell_name(i, j));
    }

  auto check = [&](const std::string& name, auto&& cell_at) {
    std::vector<int> seen(s, 0);
    for (std::size_t t = 0; t < s; ++t) {
      const int d = cell_at(t);
      if (d >= 0 && static_cast<std::size_t>(d) < s) ++seen[static_cast<std::size_t>(d)];
    }
    for (int c : seen) {
      if (c != 1) {
        v.violations.push_back(name);
        return;
      }
    }
  };
  for (std::size_t i = 0; i < s; ++i)
    check("row " + std::to_string(i), [&](std::size_t t) { return grid.at(i, t); });
  for (std::size_t j = 0; j < s; ++j)
    check("column " + std::to_string(j), [&](std::size_t t) { return grid.at(t, j); });
  for (std::size_t box = 0; box < s; ++box) {
    const std::size_t bi = box / b;
    const std::size_t bj = box % b;
    check("box " + std::to_string(box),
          [&](std::size_t t) { return grid.at(bi * b + t / b, bj * b + t % b); });
  }
  for (const Clue& c : instance.clues) {
    if (grid.at(c.i, c.j) != static_cast<int>(c.k)) v.violations.push_back("clue " + cell_name(c.i, c.j));
  }
  v.valid = v.violations.empty();
  return v;
}

Validation validate(const QueensBoard& board, const QueensInstance& instance) {
  const std::size_t s = instance.s;
  if (board.side() != s) throw ContractViolation("board side does not match instance");
  Validation v;
  for (std::size_t i = 0; i < s; ++i) {
    std::size_t n = 0;
    for (std::size_t j = 0; j < s; ++j) n += board.at(i, j);
    if (n != 1) v.violations.push_back("C1 row " + std::to_string(i));
  }
  for (std::size_t j = 0; j < s; ++j) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < s; ++i) n += board.at(i, j);
    if (n != 1) v.violations.push_back("C2 column " + std::to_string(j));
  }
  for (std::size_t sum = 0; sum + 1 < 2 * s; ++sum) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < s; ++i)
      if (sum >= i && sum - i < s) n += board.at(i, sum - i);
    if (n > 1) v.violations.push_back("C3 anti-diagonal i+j=" + std::to_string(sum));
  }
  const auto side = static_cast<long>(s);
  for (long d = -(side - 1); d <= side - 1; ++d) {
    std::size_t n = 0;
    for (long i = 0; i < side; ++i) {
      const long j = i - d;
      if (j >= 0 && j < side) n += board.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
    if (n > 1) v.violations.push_back("C4 diagonal i-j=" + std::to_string(d));
  }
  v.valid = v.violations.empty();
  return v;
}

ProductProblem sudoku_problem(const SudokuInstance& instance, TieBreak tie) {
  const std::size_t s = instance.s;
  const std::size_t n = s * s * s;
  ProductProblem p;
  for (auto which : {SudokuConstraint::rows, SudokuConstraint::columns, SudokuConstraint::pillars,
                     SudokuConstraint::blocks}) {
    p.sets.push_back(std::make_shared<GroupProjection>(n, sudoku_constraint_groups(s, which), tie));
  }
  p.sets.push_back(std::make_shared<ClueProjection>(instance.clues));
  p.feasible = [instance](const Vec& x) {
    return validate(round_to_candidate(x, instance), instance).valid;
  };
  return p;
}

ProductProblem queens_problem(const QueensInstance& instance, TieBreak tie) {
  const std::size_t s = make_queens(instance.s).s;
  ProductProblem p;
  for (auto which : {QueensConstraint::rows, QueensConstraint::columns,
                     QueensConstraint::anti_diagonals, QueensConstraint::diagonals}) {
    p.sets.push_back(std::make_shared<GroupProjection>(s * s, queens_constraint_groups(s, which), tie));
  }
  p.feasible = [instance](const Vec& x) {
    return validate(round_to_candidate(x, instance), instance).valid;
  };
  return p;
}

ProductProblem make_problem(const PuzzleInstance& instance, TieBreak tie) {
  return std::visit(
      [&](const auto& inst) -> ProductProblem {
        using T = std::decay_t<decltype(inst)>;
        if constexpr (std::is_same_v<T, SudokuInstance>) {
          return sudoku_problem(inst, tie);
        } else {
          return queens_problem(inst, tie);
        }
      },
      instance);
}

std::size_t lifted_dimension(const PuzzleInstance& instance) {
  if (const auto* sudoku = std::get_if<SudokuInstance>(&instance)) {
    return sudoku->s * sudoku->s * sudoku->s;
  }
  const auto& queens = std::get<QueensInstance>(instance);
  return queens.s * queens.s;
}

TwoSetProblem CircleLineInstance::problem(double tol) const {
  TwoSetProblem p;
  p.C = circle;
  p.S = line;
  p.feasible = [c = circle, l = line, tol](const Vec& x) {
    return distance(x, c->project(x)) <= tol && distance(x, l->project(x)) <= tol;
  };
  return p;
}

std::vector<Vec> CircleLineInstance::intersection_points() const {
  // x1 = sqrt2 - 2 t, x2 = t, with 5 t^2 - 4 sqrt2 t + 1 = 0
  const double r2 = std::sqrt(2.0);
  const double disc = std::sqrt(32.0 - 20.0);
  std::vector<Vec> pts;
  for (double sign : {-1.0, 1.0}) {
    const double t = (4.0 * r2 + sign * disc) / 10.0;
    pts.push_back(Vec{r2 - 2.0 * t, t});
  }
  return pts;
}

CircleLineInstance circle_line_instance() {
  CircleLineInstance inst;
  inst.circle = std::make_shared<CircleProjection>();
  inst.line = std::make_shared<AffineSubspace>(AffineSubspace::hyperplane(Vec{1.0, 2.0}, std::sqrt(2.0)));
  inst.z0 = Vec{-10.0, -8.0};
  return inst;
}

}  // namespace drs
