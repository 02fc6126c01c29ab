#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "drsplit/geometry.hpp"

namespace drs {

using ProjectionList = std::vector<std::shared_ptr<const ProjectionSet>>;

/// Damping coefficient gamma > 0 of the damped iteration. The standard
/// (undamped) iteration is represented by the +infinity sentinel.
class DampingParam {
 public:
  static DampingParam standard() noexcept { return DampingParam(); }
  explicit DampingParam(double gamma);

  bool is_standard() const noexcept { return standard_; }
  /// +infinity for the standard iteration.
  double gamma() const noexcept;
  /// gamma / (1 + gamma); exactly 1 for the standard iteration.
  double relaxation() const noexcept;

 private:
  DampingParam() = default;
  bool standard_ = true;
  double gamma_ = 0.0;
};

/// Result of one two-set step: the new fixed-point iterate z and the two
/// shadow points. `u` is always the point produced by the projection onto C
/// and `x` the point produced by the projection onto S, whatever the order.
struct StepResult {
  Vec z;
  Vec x;
  Vec u;
};

/// x = P_S(z), u = P_C(2x - z), z' = z + u - x.
StepResult dr_step(const ProjectionSet& C, const ProjectionSet& S, const Vec& z);

/// As dr_step with x = relaxed projection of z onto S with lambda = gamma/(1+gamma).
/// The standard sentinel takes the dr_step path and is bit-identical to it.
StepResult ddr_step(const ProjectionSet& C, const ProjectionSet& S, DampingParam gamma,
                    const Vec& z);

/// Switched order: the C-projection comes first, x_C = P_C(z), then
/// x_S = P_S(2 x_C - z) and z' = z + x_S - x_C. In the returned StepResult
/// `u` holds x_C and `x` holds x_S.
StepResult dr_step_switched(const ProjectionSet& C, const ProjectionSet& S, const Vec& z);

/// P_S(P_C(x)).
Vec alternating_projection_step(const ProjectionSet& C, const ProjectionSet& S, const Vec& x);

/// State of the m-set product-space iteration.
///
/// `u_blocks[i]` is the shadow produced by the projection onto C_i, `x` the
/// consensus (diagonal-subspace) shadow. The damped iteration additionally
/// keeps its per-block S-shadows in `x_blocks`; the other methods leave it
/// empty. Two-set problems use a single block.
struct ProductState {
  std::vector<Vec> z_blocks;
  std::vector<Vec> u_blocks;
  std::vector<Vec> x_blocks;
  Vec x;
  std::size_t k = 0;

  std::size_t blocks() const noexcept { return z_blocks.size(); }
  std::size_t block_size() const noexcept { return z_blocks.empty() ? 0 : z_blocks.front().size(); }
};

/// z blocks as given, shadows zero-initialised.
ProductState make_product_state(std::vector<Vec> z_blocks);

/// Every z entry i.i.d. uniform on [0, 1] from a seeded 64-bit Mersenne twister.
ProductState random_product_state(std::size_t blocks, std::size_t block_size, std::uint64_t seed);

/// x' = mean(z_i); u_i' = P_{C_i}(2x' - z_i); z_i' = z_i + u_i' - x'.
ProductState dr_product_step(const ProjectionList& sets, const ProductState& state);

/// x_i' = (z_i + gamma mean(z)) / (1 + gamma); u_i' = P_{C_i}(2x_i' - z_i);
/// z_i' = z_i + u_i' - x_i'.
ProductState ddr_product_step(const ProjectionList& sets, DampingParam gamma,
                              const ProductState& state);

enum class Method { sdr, ddr, sdr_switched, altproj };

std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view name);

enum class Outcome { feasible_found, stalled, max_iter };

std::string_view to_string(Outcome o);

/// Stopping rules. Nothing stops the loop before min_iter. From then on the
/// feasibility test runs every iteration, and the z-step rule fires when
/// ||z_{k+1} - z_k|| <= z_step_tol; the loop then continues for `settle_iter`
/// further iterations before stopping.
struct StopPolicy {
  std::size_t max_iter = 10000;
  std::size_t min_iter = 100;
  double z_step_tol = 1e-12;
  bool stop_on_feasible = true;
  std::size_t settle_iter = 0;

  void validate() const;
};

struct SplittingConfig {
  Method method = Method::sdr;
  DampingParam damping = DampingParam::standard();
  StopPolicy policy;
  /// Replay the run against its final iterate to fill the residual columns.
  bool compute_residuals = true;
};

/// Per-iteration record. Residuals are measured against a reference point
/// (by default the final iterate of the run) and are NaN when none was set.
struct TraceRecord {
  std::size_t k = 0;
  double z_step = 0.0;
  double z_res = 0.0;
  double x_res = 0.0;
  double u_res = 0.0;
  std::vector<std::size_t> u_mismatch;
  double objective = 0.0;
};

enum class TraceQuantity { z_step, z_res, x_res, u_res, objective };

std::optional<TraceQuantity> parse_quantity(std::string_view name);
std::string_view to_string(TraceQuantity q);

class IterationTrace {
 public:
  IterationTrace() = default;
  explicit IterationTrace(std::size_t blocks) : blocks_(blocks) {}

  void push(TraceRecord r);
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  std::size_t blocks() const noexcept { return blocks_; }
  const TraceRecord& operator[](std::size_t i) const { return records_[i]; }
  TraceRecord& operator[](std::size_t i) { return records_[i]; }
  const std::vector<TraceRecord>& records() const noexcept { return records_; }

  std::vector<double> series(TraceQuantity q) const;
  std::vector<std::size_t> mismatch_series(std::size_t block) const;

  /// Columns: k, z_step, z_res, x_res, u0_mismatch, ..., u{m-1}_mismatch, objective.
  void write_csv(std::ostream& os) const;
  /// Inverse of write_csv; u_res is not part of the file and reads back as NaN.
  static IterationTrace read_csv(std::istream& is);

 private:
  std::size_t blocks_ = 0;
  std::vector<TraceRecord> records_;
};

/// Receives the S-side consensus point and decides whether it solves the
/// problem (e.g. by rounding and exact validation).
using FeasibilityCheck = std::function<bool(const Vec&)>;

/// Find x in C ∩ S with S affine.
struct TwoSetProblem {
  std::shared_ptr<const ProjectionSet> C;
  std::shared_ptr<const ProjectionSet> S;
  FeasibilityCheck feasible;
};

/// Find x in C_1 ∩ ... ∩ C_m, solved on the product space against the
/// diagonal subspace.
struct ProductProblem {
  ProjectionList sets;
  FeasibilityCheck feasible;

  std::size_t dimension() const;
};

struct RunResult {
  ProductState state;
  IterationTrace trace;
  Outcome outcome = Outcome::max_iter;
  std::size_t iterations = 0;
  /// First iteration at which the feasibility check passed.
  std::optional<std::size_t> feasible_at;
  double wall_ms = 0.0;
};

RunResult run(const ProductProblem& problem, const SplittingConfig& config, ProductState init,
              const ProductState* reference = nullptr);

/// Seeds a random initial state (see random_product_state) and runs.
RunResult run(const ProductProblem& problem, const SplittingConfig& config, std::uint64_t seed);

RunResult run(const TwoSetProblem& problem, const SplittingConfig& config, const Vec& z0,
              const ProductState* reference = nullptr);

}  // namespace drs
