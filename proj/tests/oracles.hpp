// Reference implementations used only by the tests. They are deliberately
// naive and share no code with the library.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "drsplit/geometry.hpp"

#ifndef DRSPLIT_TEST_DATA_DIR
#error "DRSPLIT_TEST_DATA_DIR must be defined"
#endif

namespace oracle {

inline std::string data_path(const std::string& name) {
  return std::string(DRSPLIT_TEST_DATA_DIR) + "/" + name;
}

inline double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

/// All candidate points of a one-hot (or at-most-one) group of size d.
inline std::vector<std::vector<double>> group_candidates(std::size_t d, bool allow_zero) {
  std::vector<std::vector<double>> c;
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<double> e(d, 0.0);
    e[i] = 1.0;
    c.push_back(e);
  }
  if (allow_zero) c.emplace_back(d, 0.0);
  return c;
}

/// Smallest squared distance from x to the candidate set, and every minimiser.
struct Nearest {
  double dist = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> minimisers;
};

inline Nearest brute_force_nearest(const std::vector<double>& x,
                                   const std::vector<std::vector<double>>& candidates) {
  Nearest n;
  for (const auto& c : candidates) {
    const double d = sq_dist(x, c);
    if (d < n.dist - 1e-15) {
      n.dist = d;
      n.minimisers = {c};
    } else if (std::abs(d - n.dist) <= 1e-15) {
      n.minimisers.push_back(c);
    }
  }
  return n;
}

/// Dense orthogonal projector onto span of the columns of `a`.
inline Eigen::MatrixXd projector(const Eigen::MatrixXd& a) {
  Eigen::MatrixXd q = a.fullPivHouseholderQr().matrixQ().leftCols(
      a.fullPivHouseholderQr().rank());
  return q * q.transpose();
}

/// One step of the two-set iteration written out on the stacked vector:
/// x = P_D z, u = P_C(2x - z), z' = z + u - x, with P_D the explicit diagonal
/// projector and P_C applied blockwise.
inline std::vector<double> stacked_dr_step(const std::vector<const drs::ProjectionSet*>& sets,
                                           const std::vector<double>& z, double lambda) {
  const std::size_t m = sets.size();
  const std::size_t n = z.size() / m;
  Eigen::MatrixXd pd = Eigen::MatrixXd::Zero(m * n, m * n);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      for (std::size_t i = 0; i < n; ++i) pd(a * n + i, b * n + i) = 1.0 / static_cast<double>(m);
  const Eigen::Map<const Eigen::VectorXd> zv(z.data(), static_cast<Eigen::Index>(z.size()));
  const Eigen::VectorXd x = lambda * (pd * zv) + (1.0 - lambda) * zv;
  const Eigen::VectorXd r = 2.0 * x - zv;
  std::vector<double> out(z.size());
  for (std::size_t a = 0; a < m; ++a) {
    drs::Vec block(n);
    for (std::size_t i = 0; i < n; ++i) block[i] = r(static_cast<Eigen::Index>(a * n + i));
    const drs::Vec u = sets[a]->project(block);
    for (std::size_t i = 0; i < n; ++i) {
      const auto idx = static_cast<Eigen::Index>(a * n + i);
      out[a * n + i] = zv(idx) + u[i] - x(idx);
    }
  }
  return out;
}

/// Independent Sudoku check on a full 0-based grid (row-major, -1 blank).
inline bool sudoku_ok(const std::vector<int>& g, std::size_t s) {
  const auto b = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(s))));
  for (std::size_t r = 0; r < s; ++r) {
    std::set<int> row, col, box;
    for (std::size_t c = 0; c < s; ++c) {
      const int vr = g[r * s + c];
      const int vc = g[c * s + r];
      const int vb = g[((r / b) * b + c / b) * s + (r % b) * b + c % b];
      if (vr < 0 || vc < 0 || vb < 0) return false;
      row.insert(vr);
      col.insert(vc);
      box.insert(vb);
    }
    if (row.size() != s || col.size() != s || box.size() != s) return false;
  }
  return true;
}

/// Pairwise attack test on a 0/1 board.
inline bool queens_ok(const std::vector<int>& q, std::size_t s) {
  std::vector<std::pair<long, long>> pos;
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j)
      if (q[i * s + j]) pos.emplace_back(static_cast<long>(i), static_cast<long>(j));
  if (pos.size() != s) return false;
  for (std::size_t a = 0; a < pos.size(); ++a)
    for (std::size_t b = a + 1; b < pos.size(); ++b) {
      const auto [i1, j1] = pos[a];
      const auto [i2, j2] = pos[b];
      if (i1 == i2 || j1 == j2 || i1 + j1 == i2 + j2 || i1 - j1 == i2 - j2) return false;
    }
  return true;
}

/// Counts Sudoku completions of `g` by backtracking, stopping at `limit`.
inline std::size_t count_solutions(std::vector<int> g, std::size_t s, std::size_t limit = 2) {
  const auto b = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(s))));
  std::size_t found = 0;
  auto fits = [&](std::size_t cell, int v) {
    const std::size_t r = cell / s, c = cell % s;
    for (std::size_t t = 0; t < s; ++t) {
      if (g[r * s + t] == v || g[t * s + c] == v) return false;
      const std::size_t br = (r / b) * b + t / b, bc = (c / b) * b + t % b;
      if (g[br * s + bc] == v) return false;
    }
    return true;
  };
  auto rec = [&](auto&& self, std::size_t cell) -> void {
    if (found >= limit) return;
    while (cell < g.size() && g[cell] >= 0) ++cell;
    if (cell == g.size()) {
      ++found;
      return;
    }
    for (int v = 0; v < static_cast<int>(s); ++v) {
      if (!fits(cell, v)) continue;
      g[cell] = v;
      self(self, cell + 1);
      g[cell] = -1;
    }
  };
  rec(rec, 0);
  return found;
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo = -1.0,
                                         double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& e : v) e = u(rng);
  return v;
}

}  // namespace oracle
