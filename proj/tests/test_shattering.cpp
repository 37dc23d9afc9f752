#include <gtest/gtest.h>

#include <cmath>

#include "oql/shattering.hpp"
#include "oql/trees.hpp"

using namespace oql;

namespace {

DensityMatrix diag2(double p) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = p;
  m(1, 1) = 1.0 - p;
  return DensityMatrix(m);
}

std::vector<DensityMatrix> diagonal_grid(int steps) {
  std::vector<DensityMatrix> g;
  for (int k = 0; k <= steps; ++k) g.push_back(diag2(static_cast<double>(k) / steps));
  return g;
}

}  // namespace

TEST(VerifyShattering, DepthTwoHalvingTree) {
  const auto b = build_halving_tree(0, 2, 1, false);
  auto r = verify_shattering(b.tree, b.witness, 0.125);
  EXPECT_EQ(r.mode, VerifyMode::exhaustive);
  EXPECT_EQ(r.paths_checked, 4u);
  EXPECT_TRUE(r.pass_at_delta);
  EXPECT_NEAR(r.min_margin, 0.125, 1e-15);

  r = verify_shattering(b.tree, b.witness, 0.25);
  EXPECT_FALSE(r.pass_at_delta);
  EXPECT_TRUE(r.pass_at_half_delta);
  r = verify_shattering(b.tree, b.witness, 0.3);
  EXPECT_FALSE(r.pass_at_delta);
  EXPECT_FALSE(r.pass_at_half_delta);
}

TEST(VerifyShattering, MinMarginAttainedAtReportedPathAndLevel) {
  for (auto c : {Construction::halving, Construction::von_neumann, Construction::general, Construction::pure}) {
    const auto b = build_tree(c, 2, 3);
    const auto r = verify_shattering(b.tree, b.witness, b.tree.delta);
    const auto pm = path_margin(b.tree, b.witness.state(r.worst_path), r.worst_path);
    EXPECT_DOUBLE_EQ(pm.min_margin, r.min_margin) << to_string(c);
    EXPECT_EQ(pm.level, r.worst_level);
    EXPECT_TRUE(!r.pass_at_delta || r.pass_at_half_delta);
  }
}

TEST(VerifyShattering, ConstantTreeHasZeroMargin) {
  auto tree = build_constant_tree(Measurement::basis_projector(2, 0), 3, 0.5);
  WitnessMap w;
  w.state = [](Bits) { return DensityMatrix::maximally_mixed(2); };
  const auto r = verify_shattering(tree, w, 1e-6);
  EXPECT_DOUBLE_EQ(r.min_margin, 0.0);
  EXPECT_FALSE(r.pass_at_half_delta);
}

TEST(VerifyShattering, SampledIncludesConstantPathsAndNeverBeatsExhaustive) {
  const auto b = build_vn_halving_tree(2, 2);  // depth 6
  const auto full = verify_shattering(b.tree, b.witness, b.tree.delta);
  VerifyOptions vo;
  vo.budget = 10;
  vo.record_paths = true;
  const auto sampled = verify_shattering(b.tree, b.witness, b.tree.delta, vo);
  EXPECT_EQ(sampled.mode, VerifyMode::sampled);
  EXPECT_EQ(sampled.paths_checked, 12u);
  EXPECT_EQ(sampled.paths[10].bits, Path(6, 1));
  EXPECT_EQ(sampled.paths[11].bits, Path(6, -1));
  EXPECT_GE(sampled.min_margin, full.min_margin);
}

TEST(VerifyShattering, DeterministicAcrossWorkerCounts) {
  const auto b = build_general_tree(2, 3);
  VerifyOptions one, four;
  one.workers = 1;
  four.workers = 4;
  one.seed = four.seed = 99;
  one.budget = four.budget = 500;
  one.record_paths = four.record_paths = true;
  const auto a = verify_shattering(b.tree, b.witness, b.tree.delta, one);
  const auto c = verify_shattering(b.tree, b.witness, b.tree.delta, four);
  EXPECT_EQ(a.min_margin, c.min_margin);
  EXPECT_EQ(a.worst_path, c.worst_path);
  ASSERT_EQ(a.paths.size(), c.paths.size());
  for (std::size_t i = 0; i < a.paths.size(); ++i) EXPECT_EQ(a.paths[i].bits, c.paths[i].bits);
}

TEST(VerifyShattering, BadWitnessIsReportedWithPath) {
  const auto b = build_halving_tree(0, 2, 1, false);
  WitnessMap w;
  w.state = [](Bits p) -> DensityMatrix {
    if (p[0] == -1) throw ValidationError("boom");
    return DensityMatrix::maximally_mixed(2);
  };
  try {
    verify_shattering(b.tree, w, 0.1);
    FAIL() << "expected a ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("-1"), std::string::npos) << e.what();
  }
}

TEST(PrefixMeasurability, PrefixValidTreesReportZero) {
  EXPECT_EQ(check_prefix_measurability(build_halving_tree(0, 6, 1, false).tree, 500, 1).max_discrepancy, 0.0);
  EXPECT_EQ(check_prefix_measurability(build_general_tree(2, 2).tree, 500, 1).max_discrepancy, 0.0);
  EXPECT_EQ(check_prefix_measurability(build_constant_tree(Measurement::basis_projector(2, 0), 5, 0.3), 200, 1)
                .max_discrepancy,
            0.0);
}

TEST(PrefixMeasurability, PureTreeViolationIsBounded) {
  for (int n = 2; n <= 3; ++n)
    for (int T = 2; T <= 3; ++T) {
      const auto b = build_pure_tree(T, n);
      const auto r = check_prefix_measurability(b.tree, 2000, 3);
      const double bound = std::ldexp(1.0, -T) / std::sqrt((1 << n) - 1.0);
      EXPECT_GT(r.max_discrepancy, 0.0);
      EXPECT_LE(r.max_discrepancy, bound);
      // The reported pair shares the prefix and really disagrees at that level.
      ASSERT_GE(r.level, 1);
      for (int k = 0; k < r.level - 1; ++k) EXPECT_EQ(r.path_a[k], r.path_b[k]);
      EXPECT_NEAR(std::abs(b.tree.v_value(r.path_a, r.level) - b.tree.v_value(r.path_b, r.level)),
                  r.max_discrepancy, 1e-15);
    }
}

TEST(BruteForceSfat, TwoPointGrid) {
  const std::vector<DensityMatrix> hyps = {diag2(1.0), diag2(0.0)};
  EXPECT_EQ(brute_force_sfat(hyps, {Measurement::basis_projector(2, 0)}, 0.5, 3), 1);
}

TEST(BruteForceSfat, EmptyHypothesisSetShattersNothing) {
  EXPECT_EQ(brute_force_sfat({}, {Measurement::basis_projector(2, 0)}, 0.25, 3), 0);
}

TEST(BruteForceSfat, DiagonalGridReachesDepthTwo) {
  const int sfat = brute_force_sfat(diagonal_grid(16), {Measurement::basis_projector(2, 0)}, 0.25, 4);
  EXPECT_GE(sfat, 2);
  // The halving certificate of depth 2 meets the same delta/2 threshold.
  const auto b = build_halving_tree(0, 2, 1, false);
  EXPECT_TRUE(verify_shattering(b.tree, b.witness, 0.25).pass_at_half_delta);
}

TEST(BruteForceSfat, MonotoneInGridAndDelta) {
  const std::vector<Measurement> meas = {Measurement::basis_projector(2, 0)};
  int prev = 0;
  for (int steps : {1, 2, 4, 8, 16}) {
    const int s = brute_force_sfat(diagonal_grid(steps), meas, 0.25, 4);
    EXPECT_GE(s, prev) << "grid " << steps;
    prev = s;
  }
  prev = 100;
  for (double delta : {0.125, 0.25, 0.5, 1.0}) {
    const int s = brute_force_sfat(diagonal_grid(16), meas, delta, 4);
    EXPECT_LE(s, prev) << "delta " << delta;
    prev = s;
  }
}

TEST(BruteForceSfat, RefusesWhenOverBudget) {
  EXPECT_THROW(brute_force_sfat(diagonal_grid(16), {Measurement::basis_projector(2, 0)}, 0.0625, 4, 1000),
               BudgetExceeded);
  EXPECT_THROW(brute_force_sfat(diagonal_grid(2), {Measurement::basis_projector(2, 0)}, 0.25, 5),
               std::invalid_argument);
}

TEST(Rademacher, SingletonIsMeanZeroAndShrinks) {
  const auto tree = build_constant_tree(Measurement::basis_projector(2, 0), 16, 0.5);
  HypothesisSet one;
  one.states.push_back(DensityMatrix::maximally_mixed(2));
  const auto small = sequential_rademacher_estimate(tree, one, 400, 5);
  const auto big = sequential_rademacher_estimate(tree, one, 6400, 5);
  EXPECT_LE(std::abs(small.value), 3 * small.standard_error);
  EXPECT_LE(std::abs(big.value), 3 * big.standard_error);
  // 16x the paths: standard error drops by about 4.
  EXPECT_NEAR(small.standard_error / big.standard_error, 4.0, 0.6);
}

TEST(Rademacher, DepthOneWithExtremeHypotheses) {
  const auto tree = build_constant_tree(Measurement::basis_projector(2, 0), 1, 0.5);
  HypothesisSet hs;
  hs.states = {diag2(0.0), diag2(1.0)};
  // sup over {0, 1} of eps*h is max(0, eps), mean 1/2.
  const auto r = sequential_rademacher_estimate(tree, hs, 4000, 6);
  EXPECT_NEAR(r.value, 0.5, 3 * r.standard_error + 1e-12);
}

TEST(Rademacher, ExactModeMatchesBinomialOracle) {
  const int T = 64;
  const auto tree = build_constant_tree(Measurement::basis_projector(2, 0), T, 0.5);
  const auto r = sequential_rademacher_estimate(tree, HypothesisSet::all(), 4000, 7);
  double oracle = 0.0, logc = -T * std::log(2.0);
  for (int k = 0; k <= T; ++k) {
    if (k > 0) logc += std::log(static_cast<double>(T - k + 1) / k);
    oracle += std::exp(logc) * std::max(0, 2 * k - T);
  }
  oracle /= T;
  EXPECT_NEAR(r.value, oracle, 3 * r.standard_error);
  EXPECT_NEAR(oracle, std::sqrt(T / (2.0 * M_PI)) / T, 0.002);
}

TEST(Rademacher, SampledNeverExceedsExactOnSamePaths) {
  const auto b = build_general_tree(2, 2);
  const auto exact = sequential_rademacher_estimate(b.tree, HypothesisSet::all(), 300, 8);
  const auto sampled = sequential_rademacher_estimate(b.tree, HypothesisSet::sampled(4, 64, 9), 300, 8);
  EXPECT_LE(sampled.value, exact.value + 1e-12);
}

TEST(Rademacher, DeterministicAcrossWorkers) {
  const auto b = build_general_tree(2, 2);
  const auto a = sequential_rademacher_estimate(b.tree, HypothesisSet::sampled(4, 32, 1), 200, 3, 1);
  const auto c = sequential_rademacher_estimate(b.tree, HypothesisSet::sampled(4, 32, 1), 200, 3, 3);
  EXPECT_EQ(a.value, c.value);
  EXPECT_EQ(a.standard_error, c.standard_error);
}

TEST(TheoreticalBounds, LowerBoundReducesAtNaturalDelta) {
  const int n = 3;
  const double T = 1000.0;
  const auto b = theoretical_bounds(n, T, std::sqrt(n / T), 1.0);
  EXPECT_NEAR(b.lower, std::sqrt(n * T) / (4.0 * std::sqrt(2.0)), 1e-9);
}

TEST(TheoreticalBounds, VanishAtZeroHorizonAndGrowWithT) {
  const auto z = theoretical_bounds(2, 1e-12, 0.1, 1.0);
  EXPECT_NEAR(z.upper, 0.0, 1e-4);
  EXPECT_NEAR(z.lower, 0.0, 1e-6);
  double prev_u = 0.0, prev_l = 0.0;
  for (double T : {1.0, 10.0, 100.0, 1000.0, 10000.0}) {
    const auto b = theoretical_bounds(2, T, 0.1, 1.0);
    EXPECT_GE(b.upper, prev_u);
    EXPECT_GE(b.lower, prev_l);
    EXPECT_LE(b.lower, b.upper);
    prev_u = b.upper;
    prev_l = b.lower;
  }
}
