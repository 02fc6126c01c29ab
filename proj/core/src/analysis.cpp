#include "drsplit/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "drsplit/errors.hpp"
#include "json.hpp"

namespace drs {

namespace {

constexpr double kOrthonormalTol = 1e-12;

void require_orthonormal(const DenseMatrix& basis, const char* which) {
  const DenseMatrix gram = basis.transpose() * basis;
  const DenseMatrix eye = DenseMatrix::Identity(basis.cols(), basis.cols());
  if (basis.cols() > 0 && (gram - eye).cwiseAbs().maxCoeff() > kOrthonormalTol) {
    throw ContractViolation(std::string(which) + " basis is not orthonormal");
  }
}

}  // namespace

RateEstimate fit_linear_rate(std::span<const double> residuals, const FitOptions& options,
                             std::size_t k0) {
  if (!(options.tail_fraction > 0.0 && options.tail_fraction <= 1.0)) {
    throw ContractViolation("tail_fraction must lie in (0, 1]");
  }
  const std::size_t end =
      residuals.size() > options.drop_last ? residuals.size() - options.drop_last : 0;
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < end; ++i) {
    const double r = residuals[i];
    if (k0 + i < options.first_k) continue;
    if (std::isfinite(r) && r >= options.floor && r > 0.0) usable.push_back(i);
  }
  if (usable.size() < options.min_points) {
    throw InsufficientData("rate fit needs " + std::to_string(options.min_points) +
                           " usable residuals, found " + std::to_string(usable.size()));
  }
  auto take = static_cast<std::size_t>(
      std::ceil(options.tail_fraction * static_cast<double>(usable.size())));
  take = std::clamp(take, options.min_points, usable.size());
  const std::size_t from = usable.size() - take;

  double sk = 0.0, sy = 0.0;
  for (std::size_t t = from; t < usable.size(); ++t) {
    sk += static_cast<double>(k0 + usable[t]);
    sy += std::log10(residuals[usable[t]]);
  }
  const double n = static_cast<double>(take);
  const double mk = sk / n;
  const double my = sy / n;
  double skk = 0.0, sky = 0.0, syy = 0.0;
  for (std::size_t t = from; t < usable.size(); ++t) {
    const double dk = static_cast<double>(k0 + usable[t]) - mk;
    const double dy = std::log10(residuals[usable[t]]) - my;
    skk += dk * dk;
    sky += dk * dy;
    syy += dy * dy;
  }
  RateEstimate est;
  est.log10_slope = sky / skk;
  est.factor = std::pow(10.0, est.log10_slope);
  est.k_start = k0 + usable[from];
  est.k_end = k0 + usable.back();
  est.points = take;
  est.r_squared = syy > 0.0 ? (sky * sky) / (skk * syy) : 1.0;
  return est;
}

RateEstimate fit_linear_rate(const IterationTrace& trace, TraceQuantity quantity,
                             const FitOptions& options) {
  if (trace.size() < 30) {
    throw InsufficientData("rate fit needs a trace of at least 30 records, got " +
                           std::to_string(trace.size()));
  }
  const std::vector<double> series = trace.series(quantity);
  return fit_linear_rate(series, options, trace[0].k);
}

std::optional<std::size_t> detect_finite_termination(const IterationTrace& trace, TraceBlock block,
                                                     std::size_t min_tail, double tol) {
  if (block.kind == TraceBlock::Kind::u && block.index >= trace.blocks()) {
    throw ContractViolation("u block index out of range");
  }
  auto settled = [&](const TraceRecord& r) {
    switch (block.kind) {
      case TraceBlock::Kind::z: return std::isfinite(r.z_res) && r.z_res <= tol;
      case TraceBlock::Kind::x: return std::isfinite(r.x_res) && r.x_res <= tol;
      case TraceBlock::Kind::u:
        return block.index < r.u_mismatch.size() && r.u_mismatch[block.index] == 0;
    }
    return false;
  };
  std::size_t i = trace.size();
  while (i > 0 && settled(trace[i - 1])) --i;
  const std::size_t tail = trace.size() - i;
  if (tail == 0 || tail < min_tail) return std::nullopt;
  return trace[i].k;
}

std::optional<std::size_t> shadow_settle_index(const IterationTrace& trace, std::size_t min_tail) {
  std::optional<std::size_t> k;
  for (std::size_t b = 0; b < trace.blocks(); ++b) {
    if (auto kb = detect_finite_termination(trace, TraceBlock::u(b), min_tail)) {
      k = std::max(k.value_or(0), *kb);
    }
  }
  return k;
}

SubspacePair::SubspacePair(DenseMatrix first, DenseMatrix second)
    : first_(std::move(first)), second_(std::move(second)) {
  if (first_.rows() != second_.rows()) throw ContractViolation("subspaces live in different spaces");
  require_orthonormal(first_, "first");
  require_orthonormal(second_, "second");
}

DenseMatrix orthonormal_range(const DenseMatrix& m) {
  Eigen::BDCSVD<DenseMatrix> svd(m, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double cutoff = sv.size() > 0 ? sv(0) * 1e-10 : 0.0;
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > cutoff) ++r;
  return svd.matrixU().leftCols(r);
}

std::vector<double> principal_angles(const SubspacePair& pair) {
  // The smaller subspace plays the role of T1.
  const bool swap = pair.first().cols() > pair.second().cols();
  const DenseMatrix& a = swap ? pair.second() : pair.first();
  const DenseMatrix& b = swap ? pair.first() : pair.second();
  const Eigen::Index p = a.cols();
  if (p == 0) return {};

  const DenseMatrix cross = a.transpose() * b;
  Eigen::JacobiSVD<DenseMatrix> cos_svd(cross);
  const Eigen::VectorXd cosines = cos_svd.singularValues();  // descending

  const DenseMatrix residual = a - b * cross.transpose();  // (I - P_B) A
  Eigen::JacobiSVD<DenseMatrix> sin_svd(residual);
  Eigen::VectorXd sines = sin_svd.singularValues();  // descending, length p
  std::sort(sines.data(), sines.data() + sines.size());

  std::vector<double> angles(static_cast<std::size_t>(p));
  for (Eigen::Index i = 0; i < p; ++i) {
    const double c = std::clamp(cosines(i), 0.0, 1.0);
    const double s = std::clamp(sines(i), 0.0, 1.0);
    angles[static_cast<std::size_t>(i)] = c * c >= 0.5 ? std::asin(s) : std::acos(c);
  }
  std::sort(angles.begin(), angles.end());
  return angles;
}

double friedrichs_angle(const SubspacePair& pair, double intersection_tol) {
  const std::vector<double> angles = principal_angles(pair);
  std::size_t d = 0;
  while (d < angles.size() && angles[d] < intersection_tol) ++d;
  if (d == angles.size()) {
    throw ContractViolation("one subspace is contained in the other; Friedrichs angle undefined");
  }
  return angles[d];
}

std::vector<std::complex<double>> eigenvalues(const DenseMatrix& m) {
  if (m.rows() != m.cols()) throw ContractViolation("eigenvalues need a square matrix");
  Eigen::EigenSolver<DenseMatrix> solver(m, false);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigenvalue solver did not converge");
  const auto& ev = solver.eigenvalues();
  return std::vector<std::complex<double>>(ev.data(), ev.data() + ev.size());
}

double spectral_radius(const DenseMatrix& m) {
  double rho = 0.0;
  for (const auto& e : eigenvalues(m)) rho = std::max(rho, std::abs(e));
  return rho;
}

std::vector<double> singular_values(const DenseMatrix& m) {
  Eigen::BDCSVD<DenseMatrix> svd(m);
  const auto& sv = svd.singularValues();
  return std::vector<double>(sv.data(), sv.data() + sv.size());
}

std::size_t numerical_rank(const DenseMatrix& m, double threshold) {
  std::size_t r = 0;
  for (double s : singular_values(m)) r += s > threshold ? 1 : 0;
  return r;
}

SemiSimpleCheck semi_simple_check(const DenseMatrix& m, double eta, double rank_factor) {
  if (m.rows() != m.cols()) throw ContractViolation("semi-simplicity needs a square matrix");
  const auto n = m.rows();
  const std::vector<double> sv = singular_values(m);
  const double norm2 = sv.empty() ? 0.0 : sv.front();

  SemiSimpleCheck out;
  out.threshold = norm2 * static_cast<double>(n) * rank_factor;
  const DenseMatrix shifted = m - eta * DenseMatrix::Identity(n, n);
  out.rank = numerical_rank(shifted, out.threshold);
  out.rank_squared = numerical_rank(shifted * shifted, out.threshold);
  out.semi_simple = out.rank == out.rank_squared;
  return out;
}

bool is_semi_simple(const DenseMatrix& m, double eta, double rank_factor) {
  return semi_simple_check(m, eta, rank_factor).semi_simple;
}

SudokuLinearization build_sudoku_linearization(const SudokuInstance& instance, DampingParam gamma,
                                               std::size_t dimension_cap) {
  const std::size_t s = instance.s;
  const std::size_t cube = s * s * s;
  constexpr std::size_t kSets = 5;
  const std::size_t n = kSets * cube;
  if (n > dimension_cap) {
    throw SizeLimitExceeded("linearisation dimension " + std::to_string(n) + " exceeds cap " +
                            std::to_string(dimension_cap));
  }
  const auto N = static_cast<Eigen::Index>(n);
  const auto C = static_cast<Eigen::Index>(cube);

  SudokuLinearization lin;
  lin.projector_c = DenseMatrix::Zero(N, N);
  const std::vector<double> diag = ClueProjection(instance.clues).linear_part_diagonal();
  for (Eigen::Index i = 0; i < C; ++i) {
    lin.projector_c(4 * C + i, 4 * C + i) = diag[static_cast<std::size_t>(i)];
  }

  lin.projector_s = DenseMatrix::Zero(N, N);
  for (Eigen::Index a = 0; a < 5; ++a)
    for (Eigen::Index b = 0; b < 5; ++b)
      lin.projector_s.block(a * C, b * C, C, C).diagonal().setConstant(1.0 / kSets);

  for (const DenseMatrix* p : {&lin.projector_c, &lin.projector_s}) {
    if (((*p) * (*p) - *p).cwiseAbs().maxCoeff() > 1e-12 ||
        (p->transpose() - *p).cwiseAbs().maxCoeff() > 1e-12) {
      throw std::logic_error("linearisation projector is not an orthogonal projector");
    }
  }
  lin.rank_c = static_cast<std::size_t>(std::count(diag.begin(), diag.end(), 1.0));
  lin.rank_s = cube;

  const DenseMatrix eye = DenseMatrix::Identity(N, N);
  const DenseMatrix standard =
      eye + 2.0 * lin.projector_c * lin.projector_s - lin.projector_c - lin.projector_s;
  if (gamma.is_standard()) {
    lin.iteration = standard;
  } else {
    const double g = gamma.gamma();
    lin.iteration = (g * standard + lin.projector_c) / (1.0 + g);
  }
  return lin;
}

DenseMatrix sudoku_reduced_block(const SudokuLinearization& lin) {
  const Eigen::Index n = lin.projector_c.rows();
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < n; ++i)
    if (lin.projector_c(i, i) == 1.0) support.push_back(i);
  const auto p = static_cast<Eigen::Index>(support.size());

  DenseMatrix w = DenseMatrix::Zero(n, 2 * p);
  for (Eigen::Index t = 0; t < p; ++t) {
    w(support[static_cast<std::size_t>(t)], t) = 1.0;
    // Component of P_S e orthogonal to e.
    Eigen::VectorXd v = lin.projector_s.col(support[static_cast<std::size_t>(t)]);
    v(support[static_cast<std::size_t>(t)]) = 0.0;
    const double len = v.norm();
    if (len == 0.0) throw ContractViolation("range(P_C) direction lies inside range(P_S)");
    w.col(p + t) = v / len;
  }
  const DenseMatrix block = w.transpose() * lin.iteration * w;
  if ((lin.iteration * w - w * block).cwiseAbs().maxCoeff() > 1e-10) {
    throw ContractViolation("reduced subspace is not invariant under the iteration matrix");
  }
  return block;
}

DenseMatrix closed_form_reduced_block(double gamma, double cos_theta, std::size_t p) {
  const double a = cos_theta;
  const double b = std::sqrt(std::max(0.0, 1.0 - a * a));
  const auto P = static_cast<Eigen::Index>(p);
  const DenseMatrix eye = DenseMatrix::Identity(P, P);
  DenseMatrix m(2 * P, 2 * P);
  m << (gamma * a * a + 1.0) * eye, gamma * a * b * eye, -gamma * a * b * eye, gamma * a * a * eye;
  return m / (1.0 + gamma);
}

std::pair<std::complex<double>, std::complex<double>> damped_pair_eigenvalues(double gamma,
                                                                              double cos_theta) {
  const double a2 = cos_theta * cos_theta;
  const double b2 = 1.0 - a2;
  const std::complex<double> root = std::sqrt(std::complex<double>(1.0 - 4.0 * gamma * gamma * a2 * b2));
  const double centre = 2.0 * gamma * a2 + 1.0;
  const double denom = 2.0 * (1.0 + gamma);
  return {(centre - root) / denom, (centre + root) / denom};
}

double sudoku_standard_rate() { return std::sqrt(5.0) / 5.0; }

std::vector<std::complex<double>> sudoku_damped_spectrum(double gamma) {
  const auto [minus, plus] = damped_pair_eigenvalues(gamma, sudoku_standard_rate());
  return {0.0, minus, gamma / (1.0 + gamma), plus};
}

double sudoku_local_rate(DampingParam gamma) {
  if (gamma.is_standard()) return sudoku_standard_rate();
  const double g = gamma.gamma();
  const auto plus = damped_pair_eigenvalues(g, sudoku_standard_rate()).second;
  return std::max(std::abs(plus), g / (1.0 + g));
}

double RateReport::deviation() const {
  return theoretical ? estimate.factor - *theoretical : std::numeric_limits<double>::quiet_NaN();
}

void write_rate_reports_csv(std::ostream& os, const std::vector<RateReport>& reports) {
  os << "quantity,k_start,k_end,slope,r_squared,theoretical,deviation\n";
  char buf[256];
  for (const RateReport& r : reports) {
    std::snprintf(buf, sizeof buf, "%s,%zu,%zu,%.10f,%.10f,", r.quantity.c_str(), r.estimate.k_start,
                  r.estimate.k_end, r.estimate.factor, r.estimate.r_squared);
    os << buf;
    if (r.theoretical) {
      std::snprintf(buf, sizeof buf, "%.10f,%.10f", *r.theoretical, r.deviation());
      os << buf;
    } else {
      os << ',';
    }
    os << '\n';
  }
}

std::string rate_reports_json(const std::vector<RateReport>& reports) {
  nlohmann::json out = nlohmann::json::array();
  for (const RateReport& r : reports) {
    nlohmann::json j;
    j["quantity"] = r.quantity;
    j["window"] = {r.estimate.k_start, r.estimate.k_end};
    j["slope"] = r.estimate.factor;
    j["r_squared"] = r.estimate.r_squared;
    if (r.theoretical) {
      j["theoretical"] = *r.theoretical;
      j["deviation"] = r.deviation();
    } else {
      j["theoretical"] = nullptr;
      j["deviation"] = nullptr;
    }
    out.push_back(std::move(j));
  }
  return out.dump(2);
}

}  // namespace drs
