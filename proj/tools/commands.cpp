#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "drsplit/analysis.hpp"
#include "drsplit/bench.hpp"
#include "drsplit/errors.hpp"
#include "drsplit/plot.hpp"
#include "drsplit/puzzles.hpp"

namespace drs::cli {
namespace {

struct Options {
  std::string method = "sdr";
  std::optional<double> gamma;
  std::size_t max_iter = StopPolicy{}.max_iter;
  std::size_t min_iter = StopPolicy{}.min_iter;
  double tol = StopPolicy{}.z_step_tol;
  std::uint64_t seed = 0;
  std::size_t runs = 100;
  std::string trace;
  std::string out;
  std::string puzzle;
  std::size_t queens_size = 0;
  std::string tie_break = "lowest";
  // rates
  std::vector<std::string> quantities{"z_res"};
  std::string plot;
  std::optional<double> theory;
  double tail = FitOptions{}.tail_fraction;
  // angles
  std::size_t dim_cap = 2000;
};

// Input problems that should end in exit code 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw UsageError("cannot write " + path);
  os << text;
}

SudokuInstance load_sudoku(const std::string& path) {
  try {
    return parse_sudoku(read_file(path));
  } catch (const ParseError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

std::optional<PuzzleInstance> load_instance(const Options& o, bool required) {
  if (!o.puzzle.empty() && o.queens_size != 0) {
    throw UsageError("give either --puzzle or --queens-size, not both");
  }
  if (!o.puzzle.empty()) return PuzzleInstance{load_sudoku(o.puzzle)};
  if (o.queens_size != 0) return PuzzleInstance{make_queens(o.queens_size)};
  if (required) throw UsageError("an instance is required (--puzzle or --queens-size)");
  return std::nullopt;
}

RunConfig run_config(const Options& o) {
  RunConfig rc;
  auto m = parse_method(o.method);
  if (!m) throw UsageError("unknown method '" + o.method + "'");
  rc.method = *m;
  rc.gamma = o.gamma;
  rc.policy.max_iter = o.max_iter;
  rc.policy.min_iter = o.min_iter;
  rc.policy.z_step_tol = o.tol;
  rc.seed = o.seed;
  if (o.tie_break == "lowest") {
    rc.tie_break = TieBreak::Mode::lowest_index;
  } else if (o.tie_break == "random") {
    rc.tie_break = TieBreak::Mode::seeded_random;
  } else {
    throw UsageError("unknown tie-break '" + o.tie_break + "'");
  }
  rc.trace_path = o.trace;
  try {
    rc.validate();
    rc.policy.validate();
  } catch (const ContractViolation& e) {
    throw UsageError(e.what());
  }
  return rc;
}

std::string candidate_text(const PuzzleInstance& instance, const Vec& x) {
  return std::visit([&](const auto& inst) -> std::string {
    using T = std::decay_t<decltype(inst)>;
    if constexpr (std::is_same_v<T, SudokuInstance>) {
      return serialize_grid(round_to_candidate(x, inst));
    } else {
      return serialize_board(round_to_candidate(x, inst));
    }
  }, instance);
}

void write_trace(const std::string& path, const IterationTrace& trace) {
  std::ostringstream ss;
  trace.write_csv(ss);
  write_file(path, ss.str());
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---------------------------------------------------------------------------

int cmd_solve(const Options& o, std::ostream& out) {
  const RunConfig rc = run_config(o);
  const PuzzleInstance instance = *load_instance(o, true);
  const RunResult r = solve(instance, rc, rc.seed, !o.trace.empty());
  if (!o.trace.empty()) write_trace(o.trace, r.trace);
  out << "outcome=" << to_string(r.outcome) << " iterations=" << r.iterations
      << " wall_ms=" << fmt("%.3f", r.wall_ms) << "\n";
  if (r.outcome != Outcome::feasible_found) return kExitNotSolved;
  const std::string grid = candidate_text(instance, r.state.x);
  if (o.out.empty()) {
    out << grid;
  } else {
    write_file(o.out, grid);
  }
  return kExitOk;
}

int cmd_bench(const Options& o, std::ostream& out) {
  if (o.runs == 0) throw UsageError("--runs must be at least 1");
  const RunConfig rc = run_config(o);
  const PuzzleInstance instance = *load_instance(o, true);
  const BenchReport report = run_bench(instance, rc, o.runs);
  if (!o.out.empty()) {
    std::ostringstream ss;
    write_bench_csv(ss, report);
    write_file(o.out, ss.str());
  }
  out << bench_summary(report) << "\n";
  return kExitOk;
}

// Theoretical local rate of the residuals for a method/instance pair, if one is known.
std::optional<double> known_rate(const PuzzleInstance& instance, const RunConfig& rc) {
  const bool sudoku = std::holds_alternative<SudokuInstance>(instance);
  if (rc.method == Method::sdr && sudoku) return sudoku_standard_rate();
  if (rc.method == Method::ddr) {
    const DampingParam d(*rc.gamma);
    if (sudoku) return sudoku_local_rate(d);
    return d.relaxation();
  }
  return std::nullopt;
}

int cmd_rates(const Options& o, std::ostream& out, std::ostream& err) {
  std::optional<PuzzleInstance> instance = load_instance(o, false);
  IterationTrace trace;
  std::optional<double> theory = o.theory;
  if (instance) {
    RunConfig rc = run_config(o);
    rc.policy.stop_on_feasible = false;
    rc.policy.settle_iter = std::max<std::size_t>(rc.policy.settle_iter, 10);
    const RunResult r = solve(*instance, rc, rc.seed, true);
    trace = r.trace;
    if (!o.trace.empty()) write_trace(o.trace, trace);
    if (!theory) theory = known_rate(*instance, rc);
    out << "run outcome=" << to_string(r.outcome) << " iterations=" << r.iterations << "\n";
  } else if (!o.trace.empty()) {
    std::ifstream in(o.trace);
    if (!in) throw UsageError("cannot read " + o.trace);
    try {
      trace = IterationTrace::read_csv(in);
    } catch (const ParseError& e) {
      throw UsageError(o.trace + ": " + e.what());
    }
  } else {
    throw UsageError("rates needs --trace or an instance");
  }

  std::vector<TraceQuantity> quantities;
  for (const auto& name : o.quantities) {
    auto q = parse_quantity(name);
    if (!q) throw UsageError("unknown quantity '" + name + "'");
    quantities.push_back(*q);
  }

  std::vector<PlotSeries> series;
  for (auto q : quantities) {
    const auto vals = trace.series(q);
    series.push_back({std::string(to_string(q)), vals, trace.empty() ? 1 : trace[0].k});
  }

  // A linear tail is fitted first. Without one, an exactly constant z means
  // finite termination and there is no rate to report.
  FitOptions fo;
  fo.tail_fraction = o.tail;
  fo.first_k = shadow_settle_index(trace).value_or(0);
  std::vector<RateReport> reports;
  for (auto q : quantities) {
    try {
      reports.push_back({std::string(to_string(q)), fit_linear_rate(trace, q, fo), theory});
    } catch (const InsufficientData& e) {
      if (auto k = detect_finite_termination(trace, TraceBlock::z(), 5)) {
        out << "finite termination: z constant from k=" << *k << "\n";
        if (!o.plot.empty()) write_file(o.plot, convergence_svg(series, std::nullopt, "residuals"));
        return kExitOk;
      }
      err << "drsolve rates: " << to_string(q) << ": " << e.what() << "\n";
      return kExitNotSolved;
    }
  }

  std::ostringstream csv;
  write_rate_reports_csv(csv, reports);
  out << csv.str();
  if (!o.out.empty()) {
    const bool json = o.out.size() >= 5 && o.out.compare(o.out.size() - 5, 5, ".json") == 0;
    write_file(o.out, json ? rate_reports_json(reports) + "\n" : csv.str());
  }
  if (!o.plot.empty()) {
    std::optional<GuideLine> guide;
    if (theory) {
      const RateEstimate& est = reports.front().estimate;
      const auto vals = trace.series(quantities.front());
      const std::size_t k0 = trace.empty() ? 1 : trace[0].k;
      const std::size_t idx = est.k_start >= k0 ? est.k_start - k0 : 0;
      const double anchor = idx < vals.size() ? vals[idx] : 1.0;
      guide = GuideLine{*theory, est.k_start, anchor, "rate " + fmt("%.5f", *theory)};
    }
    write_file(o.plot, convergence_svg(series, guide, "residuals"));
  }
  return kExitOk;
}

// Groups nearly equal eigenvalues, largest modulus first.
std::vector<std::pair<std::complex<double>, std::size_t>> cluster(std::vector<std::complex<double>> ev,
                                                                  double tol) {
  std::sort(ev.begin(), ev.end(), [](auto a, auto b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  std::vector<std::pair<std::complex<double>, std::size_t>> groups;
  for (auto v : ev) {
    if (!groups.empty() && std::abs(groups.back().first - v) <= tol) {
      ++groups.back().second;
    } else {
      groups.emplace_back(v, 1);
    }
  }
  return groups;
}

int cmd_angles(const Options& o, std::ostream& out) {
  if (o.queens_size != 0) throw UsageError("angles needs a Sudoku --puzzle");
  const SudokuInstance inst = load_sudoku(o.puzzle.empty() ? throw UsageError("--puzzle is required")
                                                           : o.puzzle);
  if (o.gamma && !(*o.gamma > 0.0)) throw UsageError("--gamma must be positive");
  const DampingParam damping = o.gamma ? DampingParam(*o.gamma) : DampingParam::standard();
  SudokuLinearization lin;
  try {
    lin = build_sudoku_linearization(inst, damping, o.dim_cap);
  } catch (const SizeLimitExceeded& e) {
    throw UsageError(e.what());
  }
  const SubspacePair pair(orthonormal_range(lin.projector_c), orthonormal_range(lin.projector_s));
  const double cos_f = std::cos(friedrichs_angle(pair));
  out << "dimension " << lin.iteration.rows() << " rank_c " << lin.rank_c << " rank_s " << lin.rank_s
      << "\n";
  out << "cos_friedrichs " << fmt("%.10f", cos_f) << "\n";

  std::vector<std::complex<double>> sv;
  for (double v : singular_values(lin.projector_c * lin.projector_s)) {
    if (v > 1e-10) sv.emplace_back(v, 0.0);
  }
  out << "singular values of P_C P_S (nonzero):\n";
  for (const auto& [v, n] : cluster(sv, 1e-8)) out << "  " << fmt("%.10f", v.real()) << " x" << n << "\n";

  const auto spectrum = cluster(eigenvalues(lin.iteration), 1e-6);
  out << "spectrum of " << (o.gamma ? "M_gamma" : "M") << ":\n";
  for (const auto& [v, n] : spectrum) {
    out << "  " << fmt("%.10f", v.real());
    if (std::abs(v.imag()) > 1e-12) out << (v.imag() > 0 ? " +" : " -") << fmt("%.10fi", std::abs(v.imag()));
    out << " x" << n << "\n";
  }
  out << "spectral_radius " << fmt("%.10f", spectral_radius(lin.iteration)) << "\n";
  if (!o.gamma) return kExitOk;

  const auto closed = sudoku_damped_spectrum(*o.gamma);
  const char* labels[] = {"zero", "lambda-", "gamma/(1+gamma)", "lambda+"};
  out << "closed form (label value nearest deviation):\n";
  for (std::size_t i = 0; i < closed.size(); ++i) {
    double best = INFINITY;
    std::complex<double> nearest;
    for (const auto& [v, n] : spectrum) {
      if (std::abs(v - closed[i]) < best) {
        best = std::abs(v - closed[i]);
        nearest = v;
      }
    }
    out << "  " << labels[i] << " " << fmt("%.10f", closed[i].real());
    if (closed[i].imag() != 0.0) out << fmt("%+.10fi", closed[i].imag());
    out << " " << fmt("%.10f", nearest.real()) << " " << fmt("%.3e", best) << "\n";
  }
  if (closed[3].imag() == 0.0) {
    // On the 2p-dimensional block where lambda+ lives.
    const DenseMatrix block = sudoku_reduced_block(lin);
    const auto check = semi_simple_check(block, closed[3].real());
    out << "semi_simple lambda+ " << (check.semi_simple ? "yes" : "no") << " block " << block.rows()
        << " rank " << check.rank << " rank_squared " << check.rank_squared << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

void add_run_options(CLI::App* sub, Options& o) {
  sub->add_option("--method", o.method, "sdr | ddr | sdr-switched | altproj");
  sub->add_option("--gamma", o.gamma, "damping parameter, required for ddr");
  sub->add_option("--max-iter", o.max_iter);
  sub->add_option("--min-iter", o.min_iter);
  sub->add_option("--tol", o.tol, "z-step tolerance");
  sub->add_option("--seed", o.seed);
  sub->add_option("--tie-break", o.tie_break, "lowest | random");
  sub->add_option("--puzzle", o.puzzle, "Sudoku file");
  sub->add_option("--queens-size", o.queens_size);
  sub->add_option("--trace", o.trace, "trace CSV path");
  sub->add_option("--out", o.out);
}

// Arguments from a --config file for every key not already given as a flag.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::string path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a path");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty() || rest.empty()) return rest;
  std::vector<std::pair<std::string, std::string>> entries;
  try {
    entries = parse_config(read_file(path));
  } catch (const ParseError& e) {
    throw UsageError(path + ": " + e.what());
  }
  auto given = [&](const std::string& flag) {
    return std::any_of(rest.begin(), rest.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
  };
  std::vector<std::string> expanded{rest.front()};
  for (const auto& [k, v] : entries) {
    if (given("--" + k)) continue;
    expanded.push_back("--" + k);
    expanded.push_back(v);
  }
  expanded.insert(expanded.end(), rest.begin() + 1, rest.end());
  return expanded;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_config(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string{};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
  };
  while (std::getline(in, line)) {
    ++n;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(n, 1, "expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(n, 1, "empty key");
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    entries.emplace_back(std::move(key), std::move(value));
  }
  return entries;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Douglas-Rachford feasibility solver", "drsolve"};
  app.require_subcommand(1);

  auto* solve_cmd = app.add_subcommand("solve", "solve one instance");
  add_run_options(solve_cmd, o);

  auto* bench_cmd = app.add_subcommand("bench", "success rate over seeded runs");
  add_run_options(bench_cmd, o);
  bench_cmd->add_option("--runs", o.runs);

  auto* rates_cmd = app.add_subcommand("rates", "fit local linear rates");
  add_run_options(rates_cmd, o);
  rates_cmd->add_option("--quantity", o.quantities, "z_res x_res u_res z_step objective")->delimiter(',');
  rates_cmd->add_option("--plot", o.plot, "SVG output path");
  rates_cmd->add_option("--theory", o.theory, "reference rate for the guide line");
  rates_cmd->add_option("--tail", o.tail, "fraction of the usable tail to fit");

  auto* angles_cmd = app.add_subcommand("angles", "angles and spectra of the Sudoku linearisation");
  angles_cmd->add_option("--puzzle", o.puzzle, "Sudoku file");
  angles_cmd->add_option("--queens-size", o.queens_size);
  angles_cmd->add_option("--gamma", o.gamma);
  angles_cmd->add_option("--dim-cap", o.dim_cap, "largest dense dimension");

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "drsolve: " << e.what() << "\n";
    return kExitInputError;
  } catch (const UsageError& e) {
    err << "drsolve: " << e.what() << "\n";
    return kExitInputError;
  }

  try {
    if (solve_cmd->parsed()) return cmd_solve(o, out);
    if (bench_cmd->parsed()) return cmd_bench(o, out);
    if (rates_cmd->parsed()) return cmd_rates(o, out, err);
    return cmd_angles(o, out);
  } catch (const UsageError& e) {
    err << "drsolve: " << e.what() << "\n";
  } catch (const InvalidInstance& e) {
    err << "drsolve: " << e.what() << "\n";
  } catch (const ContractViolation& e) {
    err << "drsolve: " << e.what() << "\n";
  }
  return kExitInputError;
}

}  // namespace drs::cli
