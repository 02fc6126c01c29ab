#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <sstream>

#include "drsplit/constraint_sets.hpp"
#include "drsplit/errors.hpp"
#include "drsplit/puzzles.hpp"
#include "drsplit/splitting.hpp"
#include "oracles.hpp"

using namespace drs;

namespace {

Vec combo(const Vec& a, double ca, const Vec& b, double cb) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = ca * a[i] + cb * b[i];
  return r;
}

// A mix of convex and non-convex sets in R^n for the product tests.
ProjectionList mixed_sets(std::size_t m, std::size_t n, std::mt19937_64& rng) {
  ProjectionList sets;
  for (std::size_t i = 0; i < m; ++i) {
    switch (i % 3) {
      case 0:
        sets.push_back(std::make_shared<GroupProjection>(
            n, std::vector<IndexGroup>{{{0, 1, 2}, GroupKind::one_hot}, {{3, 4}, GroupKind::at_most_one}}));
        break;
      case 1:
        sets.push_back(std::make_shared<AffineSubspace>(
            AffineSubspace::hyperplane(Vec(oracle::random_vector(rng, n)), 0.3)));
        break;
      default:
        sets.push_back(std::make_shared<GroupProjection>(
            n, std::vector<IndexGroup>{{{0, 2, 4}, GroupKind::at_most_one}, {{1, 3, 5}, GroupKind::one_hot}}));
    }
  }
  return sets;
}

std::vector<double> flatten(const std::vector<Vec>& blocks) {
  std::vector<double> v;
  for (const auto& b : blocks) v.insert(v.end(), b.begin(), b.end());
  return v;
}

}  // namespace

TEST(DrStep, MatchesFixedPointOperator) {
  // z' = ((2P_C - I)(2P_S - I) + I) z / 2
  const CircleProjection circle;
  const auto line = AffineSubspace::hyperplane(Vec{1.0, 2.0}, std::sqrt(2.0));
  std::mt19937_64 rng(1);
  for (int t = 0; t < 100; ++t) {
    const Vec z(oracle::random_vector(rng, 2, -10, 10));
    const StepResult r = dr_step(circle, line, z);
    const Vec expect = combo(reflect(circle, reflect(line, z)), 0.5, z, 0.5);
    EXPECT_NEAR(r.z[0], expect[0], 1e-12);
    EXPECT_NEAR(r.z[1], expect[1], 1e-12);
    EXPECT_EQ(r.x, line.project(z));
  }
}

TEST(DrStep, FixedPointShadowIsFeasible) {
  // z* with P_S z* in C is fixed
  const auto line = AffineSubspace::hyperplane(Vec{0.0, 1.0}, 0.0);
  const CircleProjection circle;
  const Vec z{1.0, 0.0};
  EXPECT_EQ(dr_step(circle, line, z).z, z);
}

TEST(DdrStep, StandardSentinelIsBitIdentical) {
  const CircleProjection circle;
  const auto line = AffineSubspace::hyperplane(Vec{1.0, 2.0}, std::sqrt(2.0));
  const Vec z{-10.0, -8.0};
  const StepResult a = dr_step(circle, line, z);
  const StepResult b = ddr_step(circle, line, DampingParam::standard(), z);
  EXPECT_EQ(a.z, b.z);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.u, b.u);
  const StepResult c = ddr_step(circle, line, DampingParam(std::numeric_limits<double>::infinity()), z);
  EXPECT_EQ(a.z, c.z);
}

TEST(DdrStep, LargeGammaApproachesStandard) {
  const CircleProjection circle;
  const auto line = AffineSubspace::hyperplane(Vec{1.0, 2.0}, std::sqrt(2.0));
  const Vec z{-3.0, 0.5};
  const Vec ref = dr_step(circle, line, z).z;
  double prev = std::numeric_limits<double>::infinity();
  for (double g : {1.0, 10.0, 100.0, 1e4, 1e6}) {
    const double d = distance(ddr_step(circle, line, DampingParam(g), z).z, ref);
    EXPECT_LT(d, prev);
    prev = d;
  }
  EXPECT_LT(prev, 1e-5);
}

TEST(DdrStep, ShadowIsRelaxedProjection) {
  const CircleProjection circle;
  const auto line = AffineSubspace::hyperplane(Vec{1.0, 2.0}, 1.0);
  const Vec z{0.4, -2.0};
  const StepResult r = ddr_step(circle, line, DampingParam(0.2), z);
  const Vec expect = relaxed_project(line, RelaxationParam(0.2 / 1.2), z);
  EXPECT_NEAR(distance(r.x, expect), 0.0, 1e-15);
}

TEST(DampingParam, Validation) {
  EXPECT_THROW(DampingParam(0.0), ContractViolation);
  EXPECT_THROW(DampingParam(-1.0), ContractViolation);
  EXPECT_DOUBLE_EQ(DampingParam(0.2).relaxation(), 0.2 / 1.2);
  EXPECT_EQ(DampingParam::standard().relaxation(), 1.0);
  EXPECT_TRUE(std::isinf(DampingParam::standard().gamma()));
}

TEST(SwitchedStep, IsStandardStepWithRolesSwapped) {
  const CircleProjection circle;
  const auto line = AffineSubspace::hyperplane(Vec{1.0, 2.0}, std::sqrt(2.0));
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const Vec z(oracle::random_vector(rng, 2, -5, 5));
    const StepResult sw = dr_step_switched(circle, line, z);
    const StepResult ref = dr_step(line, circle, z);
    EXPECT_EQ(sw.z, ref.z);
    EXPECT_EQ(sw.u, ref.x);  // C-side point
    EXPECT_EQ(sw.x, ref.u);  // S-side point
    EXPECT_EQ(sw.u, circle.project(z));
  }
}

TEST(AltProj, ComposesProjections) {
  const CircleProjection circle;
  const auto line = AffineSubspace::hyperplane(Vec{0.0, 1.0}, 0.5);
  const Vec x{2.0, 2.0};
  EXPECT_EQ(alternating_projection_step(circle, line, x), line.project(circle.project(x)));
}

class ProductVsStacked : public ::testing::TestWithParam<std::size_t> {};

TEST_P(ProductVsStacked, StandardAndDamped) {
  const std::size_t m = GetParam(), n = 6;
  std::mt19937_64 rng(100 + m);
  const ProjectionList sets = mixed_sets(m, n, rng);
  std::vector<const ProjectionSet*> raw;
  for (const auto& s : sets) raw.push_back(s.get());
  for (int t = 0; t < 25; ++t) {
    std::vector<Vec> blocks;
    for (std::size_t i = 0; i < m; ++i) blocks.emplace_back(oracle::random_vector(rng, n, -1, 2));
    const ProductState st = make_product_state(blocks);
    const auto sdr = flatten(dr_product_step(sets, st).z_blocks);
    const auto sdr_ref = oracle::stacked_dr_step(raw, flatten(blocks), 1.0);
    for (std::size_t i = 0; i < sdr.size(); ++i) ASSERT_NEAR(sdr[i], sdr_ref[i], 1e-10);
    const auto ddr = flatten(ddr_product_step(sets, DampingParam(0.2), st).z_blocks);
    const auto ddr_ref = oracle::stacked_dr_step(raw, flatten(blocks), 0.2 / 1.2);
    for (std::size_t i = 0; i < ddr.size(); ++i) ASSERT_NEAR(ddr[i], ddr_ref[i], 1e-10);
  }
}

INSTANTIATE_TEST_SUITE_P(Blocks, ProductVsStacked, ::testing::Values(2u, 3u, 5u));

TEST(ProductStep, ConsensusShadowIsMean) {
  std::mt19937_64 rng(9);
  const ProjectionList sets = mixed_sets(3, 6, rng);
  const ProductState st = random_product_state(3, 6, 42);
  const ProductState next = dr_product_step(sets, st);
  for (std::size_t i = 0; i < 6; ++i) {
    const double mean = (st.z_blocks[0][i] + st.z_blocks[1][i] + st.z_blocks[2][i]) / 3.0;
    EXPECT_NEAR(next.x[i], mean, 1e-15);
  }
  EXPECT_EQ(next.k, st.k + 1);
  EXPECT_EQ(next.u_blocks.size(), 3u);
}

TEST(ProductStep, RandomStateIsSeeded) {
  const ProductState a = random_product_state(4, 10, 7);
  const ProductState b = random_product_state(4, 10, 7);
  const ProductState c = random_product_state(4, 10, 8);
  EXPECT_EQ(a.z_blocks, b.z_blocks);
  EXPECT_NE(a.z_blocks, c.z_blocks);
  for (const auto& blk : a.z_blocks)
    for (double v : blk) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
}

TEST(Method, Names) {
  for (auto m : {Method::sdr, Method::ddr, Method::sdr_switched, Method::altproj}) {
    EXPECT_EQ(parse_method(to_string(m)), m);
  }
  EXPECT_EQ(to_string(Method::sdr_switched), "sdr-switched");
  EXPECT_FALSE(parse_method("dr").has_value());
  EXPECT_EQ(to_string(Outcome::feasible_found), "feasible-found");
}

TEST(StopPolicy, Validate) {
  StopPolicy p;
  EXPECT_NO_THROW(p.validate());
  p.min_iter = p.max_iter + 1;
  EXPECT_THROW(p.validate(), ContractViolation);
  p = {};
  p.z_step_tol = -1.0;
  EXPECT_THROW(p.validate(), ContractViolation);
}

TEST(Run, RespectsMinAndMaxIter) {
  const auto inst = circle_line_instance();
  SplittingConfig cfg;
  cfg.policy.max_iter = 50;
  cfg.policy.min_iter = 20;
  const RunResult r = run(inst.problem(), cfg, inst.z0);
  EXPECT_EQ(r.outcome, Outcome::max_iter);
  EXPECT_EQ(r.iterations, 50u);
  EXPECT_EQ(r.trace.size(), 50u);
}

TEST(Run, DeterministicReplay) {
  const auto problem = queens_problem(make_queens(8), TieBreak::random(3));
  SplittingConfig cfg;
  const RunResult a = run(problem, cfg, 3);
  const RunResult b = run(problem, cfg, 3);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.state.z_blocks, b.state.z_blocks);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    EXPECT_EQ(a.trace[i].z_step, b.trace[i].z_step);
    EXPECT_EQ(a.trace[i].z_res, b.trace[i].z_res);
    EXPECT_EQ(a.trace[i].u_mismatch, b.trace[i].u_mismatch);
  }
}

TEST(Run, ResidualsAgainstFinalIterate) {
  const auto inst = circle_line_instance();
  SplittingConfig cfg;
  cfg.damping = DampingParam(0.2);
  cfg.method = Method::ddr;
  const RunResult r = run(inst.problem(), cfg, inst.z0);
  ASSERT_FALSE(r.trace.empty());
  EXPECT_EQ(r.trace[r.trace.size() - 1].z_res, 0.0);
  EXPECT_GT(r.trace[0].z_res, 1.0);
}

TEST(Trace, CsvRoundTrip) {
  const auto problem = queens_problem(make_queens(6));
  SplittingConfig cfg;
  cfg.policy.max_iter = 40;
  cfg.policy.min_iter = 40;
  const RunResult r = run(problem, cfg, 1);
  std::stringstream ss;
  r.trace.write_csv(ss);
  const std::string header = ss.str().substr(0, ss.str().find('\n'));
  EXPECT_EQ(header, "k,z_step,z_res,x_res,u0_mismatch,u1_mismatch,u2_mismatch,u3_mismatch,objective");
  const IterationTrace back = IterationTrace::read_csv(ss);
  ASSERT_EQ(back.size(), r.trace.size());
  EXPECT_EQ(back.blocks(), 4u);
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].k, r.trace[i].k);
    EXPECT_EQ(back[i].z_step, r.trace[i].z_step);
    EXPECT_EQ(back[i].z_res, r.trace[i].z_res);
    EXPECT_EQ(back[i].x_res, r.trace[i].x_res);
    EXPECT_EQ(back[i].u_mismatch, r.trace[i].u_mismatch);
    EXPECT_EQ(back[i].objective, r.trace[i].objective);
    EXPECT_TRUE(std::isnan(back[i].u_res));
  }
}

TEST(Trace, CsvRejectsGarbage) {
  std::stringstream bad("k,z_step\n1,2\n");
  EXPECT_THROW(IterationTrace::read_csv(bad), ParseError);
  std::stringstream bad2("k,z_step,z_res,x_res,u0_mismatch,objective\n1,0.5,abc,0,0,0\n");
  EXPECT_THROW(IterationTrace::read_csv(bad2), ParseError);
}

TEST(CircleLine, StandardDoesNotConvergeDampedDoes) {
  const auto inst = circle_line_instance();
  SplittingConfig cfg;
  cfg.policy.max_iter = 2000;
  cfg.policy.z_step_tol = 0.0;
  const RunResult s = run(inst.problem(), cfg, inst.z0);
  EXPECT_NE(s.outcome, Outcome::feasible_found);
  EXPECT_GT(distance(s.state.u_blocks[0], s.state.x), 1e-2);

  cfg.method = Method::ddr;
  cfg.damping = DampingParam(0.2);
  const RunResult d = run(inst.problem(), cfg, inst.z0);
  EXPECT_EQ(d.outcome, Outcome::feasible_found);
  EXPECT_LT(distance(d.state.u_blocks[0], d.state.x), 1e-6);
}
