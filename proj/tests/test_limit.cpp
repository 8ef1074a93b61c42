#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "quenchlab/errors.hpp"
#include "quenchlab/limit_study.hpp"

using namespace quenchlab;

TEST(BoxDecompose, Examples) {
  const auto a = box_decompose(7, 2, 1);
  EXPECT_EQ(a.m, 3);
  EXPECT_EQ(a.r, 1);
  EXPECT_DOUBLE_EQ(a.volume_fraction, 6.0 / 7.0);
  EXPECT_DOUBLE_EQ(box_decompose(10, 3, 2).volume_fraction, 0.81);
  const auto same = box_decompose(5, 5, 3);
  EXPECT_EQ(same.m, 1);
  EXPECT_EQ(same.r, 0);
  EXPECT_EQ(same.volume_fraction, 1.0);
}

TEST(BoxDecompose, FractionLowerBoundProperty) {
  for (int d = 1; d <= 3; ++d)
    for (int n = 1; n <= 40; ++n)
      for (int n1 = 1; n1 <= n; ++n1) {
        const auto dec = box_decompose(n, n1, d);
        ASSERT_LE(dec.r, n1 - 1);
        ASSERT_EQ(dec.m * n1 + dec.r, n);
        ASSERT_GE(dec.volume_fraction, std::pow(1.0 - static_cast<double>(n1) / n, d) - 1e-15);
        ASSERT_LE(dec.volume_fraction, 1.0);
      }
}

TEST(BoxDecompose, Preconditions) {
  EXPECT_THROW(box_decompose(3, 4, 1), Error);
  EXPECT_THROW(box_decompose(3, 0, 1), Error);
}

TEST(Norms, ClosedForms) {
  EXPECT_DOUBLE_EQ(norm(nearest_neighbour_family(1, Gaussian{1.0}), NormKind::l2sq).value, 1.0);
  EXPECT_DOUBLE_EQ(norm(nearest_neighbour_family(1, SymmetricPareto{1.5, 1.0}), NormKind::l1).value, 3.0);
  EXPECT_EQ(norm(nearest_neighbour_family(1, SymmetricPareto{1.5, 1.0}), NormKind::l2sq).value, kInfinity);
  EXPECT_DOUBLE_EQ(norm(nearest_neighbour_family(2, Deterministic{0.5}), NormKind::ferro).value, 1.0);
  EXPECT_DOUBLE_EQ(norm(nearest_neighbour_family(1, Rademacher{}), NormKind::lp, 1.5).value, 1.0);
}

TEST(Norms, BoxDensityNeverExceedsNorm) {
  const CouplingFamily families[] = {nearest_neighbour_family(1, Gaussian{1.0}),
                                     nearest_neighbour_family(2, Rademacher{}),
                                     nearest_neighbour_family(3, Uniform{1.0})};
  for (const auto& f : families)
    for (int side = 1; side <= 3; ++side)
      for (double p : {1.0, 1.5, 2.0}) {
        const double full = norm(f, p == 1.0 ? NormKind::l1 : NormKind::lp, p).value;
        EXPECT_LE(box_moment_density(f, Region::box(f.dimension(), side), p), full + 1e-15);
      }
}

TEST(Bounds, Examples) {
  const auto ferro = nearest_neighbour_family(1, Deterministic{1.0});
  const auto b = bound_value(ferro, 1.0, BoundKind::automatic);
  EXPECT_EQ(b.kind, BoundKind::ferro);
  EXPECT_NEAR(b.value, 2.6931472, 1e-7);

  const auto gaussian = nearest_neighbour_family(1, Gaussian{1.0});
  const auto g = bound_value(gaussian, 1.0, BoundKind::automatic);
  EXPECT_EQ(g.kind, BoundKind::l2sq);
  EXPECT_NEAR(g.value, 2.1931472, 1e-7);

  EXPECT_EQ(bound_value(gaussian, 0.0, BoundKind::l1).value, std::numbers::ln2);
}

TEST(Bounds, HeavyTailFallsBackToL1) {
  const auto pareto = nearest_neighbour_family(1, SymmetricPareto{1.5, 1.0});
  const auto b = bound_value(pareto, 1.0, BoundKind::automatic);
  EXPECT_EQ(b.kind, BoundKind::l1);
  EXPECT_DOUBLE_EQ(b.value, std::numbers::ln2 + 6.0);
  const auto l2 = bound_value(pareto, 1.0, BoundKind::l2sq);
  EXPECT_EQ(l2.value, kInfinity);
  EXPECT_TRUE(l2.warning.has_value());
  EXPECT_DOUBLE_EQ(bound_value(pareto, 1.0, BoundKind::combined).value, b.value);
}

TEST(Bounds, CenteringRequired) {
  const auto ferro = nearest_neighbour_family(1, Deterministic{1.0});
  try {
    bound_value(ferro, 1.0, BoundKind::l2sq);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::precondition);
  }
}

TEST(Convergence, FerroChainIncreasesTowardLimit) {
  const auto ferro = nearest_neighbour_family(1, Deterministic{1.0});
  const auto table = convergence_run(ferro, ConvergenceMode::ferro_exact, 1.0, {16, 2, 4, 8}, 0, 0);
  ASSERT_EQ(table.rows.size(), 4u);
  EXPECT_EQ(table.rows.front().n, 2);
  for (std::size_t i = 0; i + 1 < table.rows.size(); ++i)
    EXPECT_LT(table.rows[i].pressure, table.rows[i + 1].pressure);
  // infinite chain: ln(2 cosh 1)
  const double limit = std::log(2.0 * std::cosh(1.0));
  EXPECT_LT(table.rows.back().pressure, limit);
  EXPECT_LT(table.sup_pressure, table.claimed_limit_bound);
  EXPECT_TRUE(table.flags.empty());
}

TEST(Convergence, QuenchedRowsCarryErrors) {
  const auto glass = nearest_neighbour_family(1, Gaussian{1.0});
  const auto table = convergence_run(glass, ConvergenceMode::quenched_mc, 1.0, {2, 4}, 500, 3);
  for (const auto& row : table.rows) {
    EXPECT_FALSE(row.exact);
    EXPECT_GT(row.std_error, 0.0);
    EXPECT_LE(row.pressure, row.bound);
  }
}

TEST(Convergence, CapacityAndModeErrors) {
  const auto ferro2 = nearest_neighbour_family(2, Deterministic{1.0});
  try {
    convergence_run(ferro2, ConvergenceMode::ferro_exact, 1.0, {6}, 0, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::capacity);
  }
  const auto glass = nearest_neighbour_family(1, Rademacher{});
  try {
    convergence_run(glass, ConvergenceMode::ferro_exact, 1.0, {2}, 0, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::precondition);
  }
}
