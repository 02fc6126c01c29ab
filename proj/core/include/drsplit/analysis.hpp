#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "drsplit/puzzles.hpp"
#include "drsplit/splitting.hpp"

namespace drs {

using DenseMatrix = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Empirical rates

/// Least-squares fit of log10(residual) against k. `factor` is the fitted
/// per-iteration contraction 10^slope.
struct RateEstimate {
  double factor = 0.0;
  double log10_slope = 0.0;
  std::size_t k_start = 0;
  std::size_t k_end = 0;
  std::size_t points = 0;
  double r_squared = 0.0;
};

struct FitOptions {
  /// Fraction of the usable points, counted from the end, that enter the fit.
  double tail_fraction = 0.5;
  /// Records with k below this are ignored (e.g. before the C-shadows settle).
  std::size_t first_k = 0;
  /// Trailing records dropped because the final iterate is the reference.
  std::size_t drop_last = 5;
  /// Residuals below this are treated as round-off and skipped.
  double floor = 1e-13;
  std::size_t min_points = 10;
};

/// `residuals[i]` is taken to belong to iteration `k0 + i`.
RateEstimate fit_linear_rate(std::span<const double> residuals, const FitOptions& options = {},
                             std::size_t k0 = 1);
RateEstimate fit_linear_rate(const IterationTrace& trace, TraceQuantity quantity,
                             const FitOptions& options = {});

/// Which iterate of a trace to examine for finite termination.
struct TraceBlock {
  enum class Kind { z, x, u };
  Kind kind = Kind::z;
  std::size_t index = 0;  // u block index

  static TraceBlock z() { return {Kind::z, 0}; }
  static TraceBlock x() { return {Kind::x, 0}; }
  static TraceBlock u(std::size_t i) { return {Kind::u, i}; }
};

/// Smallest record index k such that the block equals the reference (the
/// final iterate unless set otherwise) for every record from k to the end:
/// zero mismatch for u blocks, residual <= `tol` for z and x. Returns nothing
/// when that constant tail is shorter than `min_tail` records.
std::optional<std::size_t> detect_finite_termination(const IterationTrace& trace, TraceBlock block,
                                                     std::size_t min_tail = 2, double tol = 1e-14);

/// Largest finite-termination index over the u blocks that do terminate; the
/// linear tail of the iteration starts there. Nothing when no block settles.
std::optional<std::size_t> shadow_settle_index(const IterationTrace& trace, std::size_t min_tail = 2);

// ---------------------------------------------------------------------------
// Angles between subspaces

/// Two subspaces of a common ambient space given by orthonormal column bases.
class SubspacePair {
 public:
  /// Throws ContractViolation unless both bases are orthonormal to 1e-12 and
  /// share the row count.
  SubspacePair(DenseMatrix first, DenseMatrix second);

  const DenseMatrix& first() const noexcept { return first_; }
  const DenseMatrix& second() const noexcept { return second_; }

 private:
  DenseMatrix first_;
  DenseMatrix second_;
};

/// Orthonormal basis of the column space of `m` (SVD, relative cutoff 1e-10).
DenseMatrix orthonormal_range(const DenseMatrix& m);

/// min(p, q) principal angles in ascending order. Angles whose cosine exceeds
/// 1/sqrt(2) are recovered from sines so that near-zero angles stay accurate.
std::vector<double> principal_angles(const SubspacePair& pair);

/// theta_{d+1}, where d counts principal angles below `intersection_tol`.
/// Throws ContractViolation when one subspace lies inside the other.
double friedrichs_angle(const SubspacePair& pair, double intersection_tol = 1e-8);

// ---------------------------------------------------------------------------
// Spectra

double spectral_radius(const DenseMatrix& m);
std::vector<std::complex<double>> eigenvalues(const DenseMatrix& m);
std::vector<double> singular_values(const DenseMatrix& m);

/// Number of singular values above `threshold`.
std::size_t numerical_rank(const DenseMatrix& m, double threshold);

struct SemiSimpleCheck {
  bool semi_simple = false;
  std::size_t rank = 0;          // rank(M - eta I)
  std::size_t rank_squared = 0;  // rank((M - eta I)^2)
  double threshold = 0.0;
};

/// Rank comparison with cutoff ||M||_2 * n * `rank_factor`.
SemiSimpleCheck semi_simple_check(const DenseMatrix& m, double eta, double rank_factor = 1e-12);
bool is_semi_simple(const DenseMatrix& m, double eta, double rank_factor = 1e-12);

// ---------------------------------------------------------------------------
// Local linearisation of the five-set Sudoku iteration

/// Linear maps governing z_k - z* once the C1..C4 shadows have settled.
struct SudokuLinearization {
  DenseMatrix projector_c;  // blockdiag(0, 0, 0, 0, linear part of C5)
  DenseMatrix projector_s;  // (1/5) ones(5, 5) kron I
  DenseMatrix iteration;    // M (standard) or M_gamma (damped)
  std::size_t rank_c = 0;
  std::size_t rank_s = 0;
};

/// Builds the matrices for `instance` with 5 s^3 ambient dimensions. Throws
/// SizeLimitExceeded above `dimension_cap`.
SudokuLinearization build_sudoku_linearization(const SudokuInstance& instance, DampingParam gamma,
                                               std::size_t dimension_cap = 2000);

/// Restriction of the iteration matrix to the 2p-dimensional invariant
/// subspace spanned by range(P_C) and the S-components orthogonal to it.
/// Throws ContractViolation if that subspace is not invariant to 1e-10.
DenseMatrix sudoku_reduced_block(const SudokuLinearization& lin);

/// (1/(1+gamma)) * [[gamma a^2 + 1, gamma a b], [-gamma a b, gamma a^2]] kron I_p
/// with a = cos(theta), b = sin(theta).
DenseMatrix closed_form_reduced_block(double gamma, double cos_theta, std::size_t p);

/// The eigenvalues (2 gamma a^2 + 1 ± sqrt(1 - 4 gamma^2 a^2 b^2)) / (2 (1 + gamma)).
std::pair<std::complex<double>, std::complex<double>> damped_pair_eigenvalues(double gamma,
                                                                              double cos_theta);

/// {0, lambda_-, gamma/(1+gamma), lambda_+} for cos_theta = sqrt(5)/5, in that
/// order. lambda_± are real for gamma <= 5/4.
std::vector<std::complex<double>> sudoku_damped_spectrum(double gamma);

/// Predicted local rate of ||z_k - z*||: sqrt(5)/5 for the standard iteration,
/// otherwise max(|lambda_+|, gamma/(1+gamma)).
double sudoku_local_rate(DampingParam gamma);

/// sqrt(5)/5.
double sudoku_standard_rate();

// ---------------------------------------------------------------------------
// Reports

struct RateReport {
  std::string quantity;
  RateEstimate estimate;
  std::optional<double> theoretical;

  double deviation() const;
};

void write_rate_reports_csv(std::ostream& os, const std::vector<RateReport>& reports);
std::string rate_reports_json(const std::vector<RateReport>& reports);

}  // namespace drs
