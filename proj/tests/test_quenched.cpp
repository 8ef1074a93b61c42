#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "quenchlab/corpus.hpp"
#include "quenchlab/errors.hpp"
#include "quenchlab/quenched.hpp"

using namespace quenchlab;

TEST(Summarize, Basic) {
  const double xs[] = {1.0, 2.0, 3.0, 4.0};
  const auto s = summarize(xs);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.std_error, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
  EXPECT_DOUBLE_EQ(s.median, 2.5);
  EXPECT_DOUBLE_EQ(s.interquartile_range, 1.5);
}

TEST(Summarize, ConstantSamplesHaveZeroError) {
  const double xs[] = {0.1, 0.1, 0.1};
  const auto s = summarize(xs);
  EXPECT_EQ(s.mean, 0.1);
  EXPECT_EQ(s.std_error, 0.0);
}

// On a tree the sign of each bond can be gauged away, so the quenched
// rademacher chain equals the J = 1 ferromagnet.
TEST(Quenched, RademacherChainIsGaugeFerro) {
  const auto glass = nearest_neighbour_family(1, Rademacher{});
  for (int n = 1; n <= 8; ++n) {
    const auto box = Region::box(1, n);
    const auto e = quenched_exact(glass, box, 1.0);
    EXPECT_TRUE(e.exact);
    EXPECT_EQ(e.n_samples, std::size_t{1} << (n - 1));
    EXPECT_NEAR(e.mean, (std::numbers::ln2 + (n - 1) * std::log(2.0 * std::cosh(1.0))) / n, 1e-13);
  }
}

TEST(Quenched, ExactRejectsContinuous) {
  try {
    quenched_exact(nearest_neighbour_family(1, Gaussian{1.0}), Region::box(1, 4), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::precondition);
  }
}

TEST(Quenched, ExactCapacity) {
  // 21 independent rademacher bonds -> 2^21 outcomes
  try {
    quenched_exact(nearest_neighbour_family(1, Rademacher{}), Region::box(1, 22), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::capacity);
  }
}

TEST(Quenched, McNeedsTwoSamples) {
  EXPECT_THROW(quenched_mc(nearest_neighbour_family(1, Gaussian{1.0}), Region::box(1, 3), 1.0, 1, 0), Error);
}

// Gaussian chain: p_N = ln 2 + (N-1)/N E ln cosh(beta J), J ~ N(0, 1).
// E ln cosh(J) = 0.374567... by quadrature.
TEST(Quenched, GaussianChainAgainstQuadrature) {
  const double e_log_cosh = 0.37456720749143796;
  const auto est = quenched_mc(nearest_neighbour_family(1, Gaussian{1.0}), Region::box(1, 6), 1.0, 20000, 99);
  EXPECT_FALSE(est.control_variate);
  EXPECT_NEAR(est.mean, std::numbers::ln2 + 5.0 / 6.0 * e_log_cosh, 5.0 * est.std_error);
  ASSERT_TRUE(est.median);
  ASSERT_TRUE(est.interquartile_range);
}

// Pareto(1.5, 1) chain against the same form; E ln cosh(J) by quadrature.
TEST(Quenched, ParetoChainControlVariate) {
  const double e_log_cosh[] = {0.9754514652606128, 2.3549712056506507};  // beta 0.5, 1
  const double betas[] = {0.5, 1.0};
  const auto family = nearest_neighbour_family(1, SymmetricPareto{1.5, 1.0});
  for (int k = 0; k < 2; ++k) {
    for (int n : {2, 6, 12}) {
      const auto est = quenched_mc(family, Region::box(1, n), betas[k], 10000, 1234 + n);
      EXPECT_TRUE(est.control_variate);
      const double exact = std::numbers::ln2 + (n - 1.0) / n * e_log_cosh[k];
      EXPECT_NEAR(est.mean, exact, 5.0 * est.std_error) << n;
      EXPECT_LT(est.std_error, 0.01);
    }
  }
}

TEST(Quenched, McDeterministicAcrossThreads) {
  const auto family = nearest_neighbour_family(1, Gaussian{1.0});
  const auto a = quenched_mc(family, Region::box(1, 8), 1.0, 500, 42, 1);
  const auto b = quenched_mc(family, Region::box(1, 8), 1.0, 500, 42, 4);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.std_error, b.std_error);
  EXPECT_EQ(a.median, b.median);
  const auto c = quenched_mc(family, Region::box(1, 8), 1.0, 500, 43, 1);
  EXPECT_NE(a.mean, c.mean);
}

TEST(Quenched, ExactDeterministicAcrossThreads) {
  const auto model = corpus::random_rademacher_model(5, {8, 10, 3});
  EXPECT_EQ(quenched_exact(model, 1.0, 1).mean, quenched_exact(model, 1.0, 3).mean);
}

TEST(Quenched, McMatchesExactOnRademacher) {
  for (std::uint64_t i = 0; i < 10; ++i) {
    const auto model = corpus::random_rademacher_model(derive_seed(3, i), {8, 10, 3});
    const auto exact = quenched_exact(model, 1.0);
    const auto mc = quenched_mc(model, 1.0, 4000, i);
    EXPECT_LE(std::abs(mc.mean - exact.mean), 5.0 * mc.std_error + 1e-12);
  }
}

TEST(Annealed, GaussianClosedForm) {
  // ln 2 + beta^2 (N-1) / (2N) for the unit gaussian chain
  const auto family = nearest_neighbour_family(1, Gaussian{1.0});
  EXPECT_NEAR(annealed_pressure_gaussian(family, Region::box(1, 4), 1.0), std::numbers::ln2 + 3.0 / 8.0, 1e-15);
  EXPECT_NEAR(annealed_pressure_gaussian(family, Region::box(1, 2), 1.0), std::numbers::ln2 + 0.25, 1e-15);
  EXPECT_NEAR(annealed_pressure_gaussian(family, Region::box(1, 2), 1.0), 0.9431472, 1e-7);
}

TEST(Annealed, RejectsOtherLaws) {
  EXPECT_THROW(annealed_pressure_gaussian(nearest_neighbour_family(1, Rademacher{}), Region::box(1, 3), 1.0), Error);
}

TEST(Annealed, MixedDeterministic) {
  const DisorderedHamiltonian model(Region::box(1, 2), {Gaussian{1.0}, Deterministic{1.0}},
                                    {{0b11, 1.0, 0}, {0b01, 1.0, 1}});
  // E Z = e^{1/2} * sum_sigma e^{sigma_0} = e^{1/2} * 2 * 2cosh 1
  EXPECT_NEAR(annealed_pressure_gaussian(model, 1.0), (0.5 + std::log(4.0 * std::cosh(1.0))) / 2.0, 1e-14);
}

// Jensen: quenched <= annealed within 5 sigma.
TEST(Annealed, DominatesQuenchedProperty) {
  for (std::uint64_t i = 0; i < 10; ++i) {
    const auto model = corpus::random_gaussian_model(derive_seed(8, i), {8, 10, 3});
    const auto mc = quenched_mc(model, 1.0, 2000, i);
    EXPECT_LE(mc.mean, annealed_pressure_gaussian(model, 1.0) + 5.0 * mc.std_error);
  }
}
