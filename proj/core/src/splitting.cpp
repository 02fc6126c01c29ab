#include "drsplit/splitting.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <utility>

#include "drsplit/errors.hpp"

namespace drs {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw ContractViolation(std::string(what) + ": dimension mismatch (" + std::to_string(got) +
                            " vs " + std::to_string(want) + ")");
  }
}

void mean_of(const std::vector<Vec>& blocks, Vec& out) {
  const std::size_t n = blocks.front().size();
  const double inv = 1.0 / static_cast<double>(blocks.size());
  if (out.size() != n) out = Vec(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (const Vec& b : blocks) s += b[j];
    out[j] = s * inv;
  }
}

double blocks_distance(const std::vector<Vec>& a, const std::vector<Vec>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a[i].size(); ++j) {
      const double d = a[i][j] - b[i][j];
      s += d * d;
    }
  }
  return std::sqrt(s);
}

// One iteration of an engine on a ProductState.
class Stepper {
 public:
  virtual ~Stepper() = default;
  virtual void advance(ProductState& s) = 0;
  virtual double objective(const ProductState& s) const = 0;
};

class TwoSetStepper final : public Stepper {
 public:
  TwoSetStepper(const ProjectionSet& C, const ProjectionSet& S, Method method, DampingParam gamma)
      : C_(C), S_(S), method_(method), gamma_(gamma) {
    require_dim(C.dimension(), S.dimension(), "two-set problem");
  }

  void advance(ProductState& s) override {
    Vec& z = s.z_blocks[0];
    Vec& u = s.u_blocks[0];
    Vec& x = s.x;
    const std::size_t n = z.size();
    tmp_ = Vec(n);
    switch (method_) {
      case Method::ddr:
        if (!gamma_.is_standard()) {
          const double lambda = gamma_.relaxation();
          S_.project_into(z.span(), x.span());
          for (std::size_t i = 0; i < n; ++i) x[i] = lambda * x[i] + (1.0 - lambda) * z[i];
          reflect_update(z, x, u);
          break;
        }
        [[fallthrough]];
      case Method::sdr:
        S_.project_into(z.span(), x.span());
        reflect_update(z, x, u);
        break;
      case Method::sdr_switched:
        C_.project_into(z.span(), u.span());
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = 2.0 * u[i] - z[i];
        S_.project_into(tmp_.span(), x.span());
        for (std::size_t i = 0; i < n; ++i) z[i] = z[i] + x[i] - u[i];
        break;
      case Method::altproj:
        C_.project_into(z.span(), u.span());
        S_.project_into(u.span(), x.span());
        z = x;
        break;
    }
  }

  double objective(const ProductState& s) const override {
    const Vec& u = s.u_blocks[0];
    Vec p(u.size());
    S_.project_into(u.span(), p.span());
    const double d = distance(u, p);
    return 0.5 * d * d;
  }

 private:
  // u = P_C(2x - z); z = z + u - x
  void reflect_update(Vec& z, const Vec& x, Vec& u) {
    const std::size_t n = z.size();
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = 2.0 * x[i] - z[i];
    C_.project_into(tmp_.span(), u.span());
    for (std::size_t i = 0; i < n; ++i) z[i] = z[i] + u[i] - x[i];
  }

  const ProjectionSet& C_;
  const ProjectionSet& S_;
  Method method_;
  DampingParam gamma_;
  Vec tmp_;
};

class ProductStepper final : public Stepper {
 public:
  ProductStepper(const ProjectionList& sets, Method method, DampingParam gamma)
      : sets_(sets), method_(method), gamma_(gamma) {
    if (sets_.size() < 2) throw ContractViolation("product problem needs at least two sets");
    for (const auto& set : sets_) {
      if (!set) throw ContractViolation("null projection set");
      require_dim(set->dimension(), sets_.front()->dimension(), "product problem");
    }
  }

  void advance(ProductState& s) override {
    require_dim(s.blocks(), sets_.size(), "product state blocks");
    const std::size_t m = s.blocks();
    const std::size_t n = s.block_size();
    tmp_ = Vec(n);
    switch (method_) {
      case Method::ddr:
        if (!gamma_.is_standard()) {
          const double lambda = gamma_.relaxation();
          mean_of(s.z_blocks, mean_);
          if (s.x_blocks.size() != m) s.x_blocks.assign(m, Vec(n));
          for (std::size_t b = 0; b < m; ++b) {
            Vec& z = s.z_blocks[b];
            Vec& xb = s.x_blocks[b];
            for (std::size_t i = 0; i < n; ++i) xb[i] = lambda * mean_[i] + (1.0 - lambda) * z[i];
            reflect_update(b, z, xb, s.u_blocks[b]);
          }
          mean_of(s.x_blocks, s.x);
          break;
        }
        [[fallthrough]];
      case Method::sdr:
        s.x_blocks.clear();
        mean_of(s.z_blocks, s.x);
        for (std::size_t b = 0; b < m; ++b) reflect_update(b, s.z_blocks[b], s.x, s.u_blocks[b]);
        break;
      case Method::sdr_switched:
        s.x_blocks.clear();
        if (reflected_.size() != m) reflected_.assign(m, Vec(n));
        for (std::size_t b = 0; b < m; ++b) {
          sets_[b]->project_into(s.z_blocks[b].span(), s.u_blocks[b].span());
          for (std::size_t i = 0; i < n; ++i)
            reflected_[b][i] = 2.0 * s.u_blocks[b][i] - s.z_blocks[b][i];
        }
        mean_of(reflected_, s.x);
        for (std::size_t b = 0; b < m; ++b) {
          Vec& z = s.z_blocks[b];
          for (std::size_t i = 0; i < n; ++i) z[i] = z[i] + s.x[i] - s.u_blocks[b][i];
        }
        break;
      case Method::altproj:
        s.x_blocks.clear();
        mean_of(s.z_blocks, mean_);
        for (std::size_t b = 0; b < m; ++b) sets_[b]->project_into(mean_.span(), s.u_blocks[b].span());
        mean_of(s.u_blocks, s.x);
        for (std::size_t b = 0; b < m; ++b) s.z_blocks[b] = s.x;
        break;
    }
  }

  double objective(const ProductState& s) const override {
    Vec ubar;
    mean_of(s.u_blocks, ubar);
    double total = 0.0;
    for (const Vec& u : s.u_blocks) {
      const double d = distance(u, ubar);
      total += d * d;
    }
    return 0.5 * total;
  }

 private:
  void reflect_update(std::size_t b, Vec& z, const Vec& x, Vec& u) {
    const std::size_t n = z.size();
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = 2.0 * x[i] - z[i];
    sets_[b]->project_into(tmp_.span(), u.span());
    for (std::size_t i = 0; i < n; ++i) z[i] = z[i] + u[i] - x[i];
  }

  const ProjectionList& sets_;
  Method method_;
  DampingParam gamma_;
  Vec tmp_;
  Vec mean_;
  std::vector<Vec> reflected_;
};

void fill_residuals(TraceRecord& rec, const ProductState& s, const ProductState& ref) {
  rec.z_res = blocks_distance(s.z_blocks, ref.z_blocks);
  rec.u_res = blocks_distance(s.u_blocks, ref.u_blocks);
  rec.x_res = distance(s.x, ref.x);
  rec.u_mismatch.assign(s.blocks(), 0);
  for (std::size_t b = 0; b < s.blocks(); ++b) {
    const Vec& u = s.u_blocks[b];
    const Vec& r = ref.u_blocks[b];
    std::size_t count = 0;
    for (std::size_t i = 0; i < u.size(); ++i) count += u[i] != r[i] ? 1 : 0;
    rec.u_mismatch[b] = count;
  }
}

void require_state_shape(const ProductState& s, std::size_t blocks, std::size_t n) {
  require_dim(s.z_blocks.size(), blocks, "initial state blocks");
  require_dim(s.u_blocks.size(), blocks, "initial state u blocks");
  for (std::size_t b = 0; b < blocks; ++b) {
    require_dim(s.z_blocks[b].size(), n, "initial z block");
    require_dim(s.u_blocks[b].size(), n, "initial u block");
  }
  require_dim(s.x.size(), n, "initial consensus");
}

RunResult run_with(Stepper& stepper, const SplittingConfig& config, const FeasibilityCheck& feasible,
                   ProductState init, const ProductState* reference) {
  const StopPolicy& policy = config.policy;
  policy.validate();
  const auto t0 = std::chrono::steady_clock::now();

  RunResult result;
  result.trace = IterationTrace(init.blocks());
  ProductState state = init;
  std::vector<Vec> prev;
  std::optional<std::size_t> stationary_at;

  for (std::size_t it = 1; it <= policy.max_iter; ++it) {
    prev = state.z_blocks;
    stepper.advance(state);
    state.k = it;

    TraceRecord rec;
    rec.k = it;
    rec.z_step = blocks_distance(state.z_blocks, prev);
    rec.objective = stepper.objective(state);
    if (reference != nullptr) {
      fill_residuals(rec, state, *reference);
    } else {
      rec.z_res = rec.x_res = rec.u_res = kNaN;
    }
    result.trace.push(std::move(rec));

    const double z_step = result.trace.records().back().z_step;
    if (feasible && it >= policy.min_iter && !result.feasible_at && feasible(state.x)) {
      result.feasible_at = it;
      if (policy.stop_on_feasible) break;
    }
    if (it >= policy.min_iter && z_step <= policy.z_step_tol) {
      if (!stationary_at) stationary_at = it;
      if (it - *stationary_at >= policy.settle_iter) break;
    }
  }
  result.iterations = state.k;
  result.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  bool found = false;
  if (result.feasible_at) {
    found = policy.stop_on_feasible || *result.feasible_at == result.iterations ||
            feasible(state.x);
  }
  if (found) {
    result.outcome = Outcome::feasible_found;
  } else if (stationary_at) {
    result.outcome = Outcome::stalled;
  } else {
    result.outcome = Outcome::max_iter;
  }

  if (reference == nullptr && config.compute_residuals) {
    // Replay is bit-identical: every projection is a pure function of its input.
    ProductState replay = std::move(init);
    for (std::size_t it = 1; it <= result.iterations; ++it) {
      stepper.advance(replay);
      fill_residuals(result.trace[it - 1], replay, state);
    }
  }
  result.state = std::move(state);
  return result;
}

}  // namespace

DampingParam::DampingParam(double gamma) {
  if (!(gamma > 0.0)) throw ContractViolation("damping gamma must be > 0");
  if (std::isinf(gamma)) {
    standard_ = true;
  } else {
    standard_ = false;
    gamma_ = gamma;
  }
}

double DampingParam::gamma() const noexcept {
  return standard_ ? std::numeric_limits<double>::infinity() : gamma_;
}

double DampingParam::relaxation() const noexcept {
  return standard_ ? 1.0 : gamma_ / (1.0 + gamma_);
}

namespace {

ProductState two_set_state(const Vec& z) {
  ProductState s;
  s.z_blocks = {z};
  s.u_blocks = {Vec(z.size())};
  s.x = Vec(z.size());
  return s;
}

StepResult two_set_step(const ProjectionSet& C, const ProjectionSet& S, Method method,
                        DampingParam gamma, const Vec& z) {
  require_dim(z.size(), S.dimension(), "step");
  TwoSetStepper stepper(C, S, method, gamma);
  ProductState s = two_set_state(z);
  stepper.advance(s);
  return {std::move(s.z_blocks[0]), std::move(s.x), std::move(s.u_blocks[0])};
}

}  // namespace

StepResult dr_step(const ProjectionSet& C, const ProjectionSet& S, const Vec& z) {
  return two_set_step(C, S, Method::sdr, DampingParam::standard(), z);
}

StepResult ddr_step(const ProjectionSet& C, const ProjectionSet& S, DampingParam gamma,
                    const Vec& z) {
  return two_set_step(C, S, Method::ddr, gamma, z);
}

StepResult dr_step_switched(const ProjectionSet& C, const ProjectionSet& S, const Vec& z) {
  return two_set_step(C, S, Method::sdr_switched, DampingParam::standard(), z);
}

Vec alternating_projection_step(const ProjectionSet& C, const ProjectionSet& S, const Vec& x) {
  return two_set_step(C, S, Method::altproj, DampingParam::standard(), x).x;
}

ProductState make_product_state(std::vector<Vec> z_blocks) {
  if (z_blocks.empty()) throw ContractViolation("product state needs at least one block");
  const std::size_t n = z_blocks.front().size();
  for (const Vec& z : z_blocks) require_dim(z.size(), n, "product state block");
  ProductState s;
  s.u_blocks.assign(z_blocks.size(), Vec(n));
  s.x = Vec(n);
  s.z_blocks = std::move(z_blocks);
  return s;
}

ProductState random_product_state(std::size_t blocks, std::size_t block_size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec> z(blocks, Vec(block_size));
  for (Vec& b : z)
    for (double& e : b) e = unit(rng);
  return make_product_state(std::move(z));
}

ProductState dr_product_step(const ProjectionList& sets, const ProductState& state) {
  ProductStepper stepper(sets, Method::sdr, DampingParam::standard());
  ProductState next = state;
  stepper.advance(next);
  next.k = state.k + 1;
  return next;
}

ProductState ddr_product_step(const ProjectionList& sets, DampingParam gamma,
                              const ProductState& state) {
  ProductStepper stepper(sets, Method::ddr, gamma);
  ProductState next = state;
  stepper.advance(next);
  next.k = state.k + 1;
  return next;
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::sdr: return "sdr";
    case Method::ddr: return "ddr";
    case Method::sdr_switched: return "sdr-switched";
    case Method::altproj: return "altproj";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : {Method::sdr, Method::ddr, Method::sdr_switched, Method::altproj}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::feasible_found: return "feasible-found";
    case Outcome::stalled: return "stalled";
    case Outcome::max_iter: return "max-iter";
  }
  return "?";
}

void StopPolicy::validate() const {
  if (min_iter > max_iter) throw ContractViolation("min_iter must not exceed max_iter");
  if (!(z_step_tol >= 0.0)) throw ContractViolation("z_step_tol must be >= 0");
}

std::optional<TraceQuantity> parse_quantity(std::string_view name) {
  for (TraceQuantity q : {TraceQuantity::z_step, TraceQuantity::z_res, TraceQuantity::x_res,
                          TraceQuantity::u_res, TraceQuantity::objective}) {
    if (to_string(q) == name) return q;
  }
  return std::nullopt;
}

std::string_view to_string(TraceQuantity q) {
  switch (q) {
    case TraceQuantity::z_step: return "z_step";
    case TraceQuantity::z_res: return "z_res";
    case TraceQuantity::x_res: return "x_res";
    case TraceQuantity::u_res: return "u_res";
    case TraceQuantity::objective: return "objective";
  }
  return "?";
}

void IterationTrace::push(TraceRecord r) { records_.push_back(std::move(r)); }

std::vector<double> IterationTrace::series(TraceQuantity q) const {
  std::vector<double> out;
  out.reserve(records_.size());
  for (const TraceRecord& r : records_) {
    switch (q) {
      case TraceQuantity::z_step: out.push_back(r.z_step); break;
      case TraceQuantity::z_res: out.push_back(r.z_res); break;
      case TraceQuantity::x_res: out.push_back(r.x_res); break;
      case TraceQuantity::u_res: out.push_back(r.u_res); break;
      case TraceQuantity::objective: out.push_back(r.objective); break;
    }
  }
  return out;
}

std::vector<std::size_t> IterationTrace::mismatch_series(std::size_t block) const {
  if (block >= blocks_) throw ContractViolation("mismatch block out of range");
  std::vector<std::size_t> out;
  out.reserve(records_.size());
  for (const TraceRecord& r : records_) {
    out.push_back(block < r.u_mismatch.size() ? r.u_mismatch[block]
                                              : std::numeric_limits<std::size_t>::max());
  }
  return out;
}

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void IterationTrace::write_csv(std::ostream& os) const {
  os << "k,z_step,z_res,x_res";
  for (std::size_t b = 0; b < blocks_; ++b) os << ",u" << b << "_mismatch";
  os << ",objective\n";
  for (const TraceRecord& r : records_) {
    os << r.k << ',' << format_double(r.z_step) << ',' << format_double(r.z_res) << ','
       << format_double(r.x_res);
    for (std::size_t b = 0; b < blocks_; ++b) {
      os << ',';
      if (b < r.u_mismatch.size()) os << r.u_mismatch[b];
    }
    os << ',' << format_double(r.objective) << '\n';
  }
}

IterationTrace IterationTrace::read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ParseError(1, 1, "empty trace file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 5 || header[0] != "k" || header[1] != "z_step" || header[2] != "z_res" ||
      header[3] != "x_res" || header.back() != "objective") {
    throw ParseError(1, 1, "unexpected trace header");
  }
  const std::size_t blocks = header.size() - 5;
  for (std::size_t b = 0; b < blocks; ++b) {
    if (header[4 + b] != "u" + std::to_string(b) + "_mismatch") {
      throw ParseError(1, 5 + b, "unexpected mismatch column '" + header[4 + b] + "'");
    }
  }

  IterationTrace trace(blocks);
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != header.size()) {
      throw ParseError(line_no, 1, "expected " + std::to_string(header.size()) + " columns");
    }
    auto number = [&](std::size_t col) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cells[col], &used);
        if (used != cells[col].size()) throw std::invalid_argument("trailing");
        return v;
      } catch (const std::exception&) {
        throw ParseError(line_no, col + 1, "not a number: '" + cells[col] + "'");
      }
    };
    TraceRecord r;
    r.k = static_cast<std::size_t>(number(0));
    r.z_step = number(1);
    r.z_res = number(2);
    r.x_res = number(3);
    r.u_res = kNaN;
    for (std::size_t b = 0; b < blocks; ++b) {
      if (cells[4 + b].empty()) {
        r.u_mismatch.clear();
        break;
      }
      r.u_mismatch.push_back(static_cast<std::size_t>(number(4 + b)));
    }
    r.objective = number(header.size() - 1);
    trace.push(std::move(r));
  }
  return trace;
}

std::size_t ProductProblem::dimension() const {
  return sets.empty() ? 0 : sets.front()->dimension();
}

RunResult run(const ProductProblem& problem, const SplittingConfig& config, ProductState init,
              const ProductState* reference) {
  ProductStepper stepper(problem.sets, config.method, config.damping);
  require_state_shape(init, problem.sets.size(), problem.dimension());
  return run_with(stepper, config, problem.feasible, std::move(init), reference);
}

RunResult run(const ProductProblem& problem, const SplittingConfig& config, std::uint64_t seed) {
  return run(problem, config, random_product_state(problem.sets.size(), problem.dimension(), seed));
}

RunResult run(const TwoSetProblem& problem, const SplittingConfig& config, const Vec& z0,
              const ProductState* reference) {
  if (!problem.C || !problem.S) throw ContractViolation("two-set problem needs both sets");
  TwoSetStepper stepper(*problem.C, *problem.S, config.method, config.damping);
  require_dim(z0.size(), problem.S->dimension(), "initial point");
  return run_with(stepper, config, problem.feasible, two_set_state(z0), reference);
}

}  // namespace drs
