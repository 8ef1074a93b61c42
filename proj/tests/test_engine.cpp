#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "quenchlab/corpus.hpp"
#include "quenchlab/engine.hpp"
#include "quenchlab/errors.hpp"

using namespace quenchlab;

namespace {

double chain_pressure(int n, double beta, double j = 1.0) {
  return (std::numbers::ln2 + (n - 1) * std::log(2.0 * std::cosh(beta * j))) / n;
}

}  // namespace

TEST(Engine, FrozenValues) {
  const Hamiltonian pair(Region::box(1, 2), {{0b11, 1.0, 1.0}});
  // ln Z = ln(4 cosh 1), pressure density half of it
  EXPECT_NEAR(log_partition(pair, 1.0).log_partition, 1.8200751916029179, 1e-13);
  EXPECT_NEAR(log_partition(pair, 1.0).pressure_density, 0.91003759580145893, 1e-13);
  EXPECT_NEAR(gibbs_expectation(pair, 1.0, 0b11), 0.7615942, 1e-7);
  EXPECT_NEAR(gibbs_expectation(pair, 1.0, 0b01), 0.0, 1e-15);

  const Hamiltonian single(Region::box(1, 1), {{0b1, 1.0, 1.0}});
  EXPECT_NEAR(log_partition(single, 1.0).log_partition, 1.1269280, 1e-7);

  const Hamiltonian chain4(Region::box(1, 4), {{0b0011, 1.0, 1.0}, {0b0110, 1.0, 1.0}, {0b1100, 1.0, 1.0}});
  EXPECT_NEAR(log_partition(chain4, 1.0).pressure_density, 1.0184828, 1e-7);
}

TEST(Engine, FreeAndZeroBeta) {
  const Hamiltonian h(Region::box(1, 5), {{0b00011, 1.0, 3.0}, {0b11100, 2.0, -1.0}});
  EXPECT_EQ(log_partition(h, 0.0).pressure_density, std::numbers::ln2);
  const Hamiltonian zero(Region::box(1, 5), {{0b00011, 1.0, 0.0}});
  EXPECT_EQ(log_partition(zero, 2.0).pressure_density, std::numbers::ln2);
  EXPECT_EQ(log_partition(Hamiltonian(Region::box(1, 3)), 1.0).log_partition, 3.0 * std::numbers::ln2);
}

TEST(Engine, ChainClosedForm) {
  for (double beta : {0.3, 1.0, 2.5})
    for (int n = 1; n <= 20; ++n) {
      std::vector<InteractionTerm> terms;
      for (int i = 0; i + 1 < n; ++i) terms.push_back({Subset{3} << i, 1.0, 1.0});
      const Hamiltonian h(Region::box(1, n), terms);
      EXPECT_NEAR(log_partition(h, beta).pressure_density, chain_pressure(n, beta), 1e-12) << n << ' ' << beta;
    }
}

TEST(Engine, LargeBetaNoOverflow) {
  const Hamiltonian h(Region::box(1, 3), {{0b011, 1.0, 400.0}, {0b110, 1.0, 400.0}});
  const auto s = log_partition(h, 5.0);
  ASSERT_TRUE(std::isfinite(s.log_partition));
  // two ground states dominate: ln Z = ln 2 + 4000 + O(e^-4000)
  EXPECT_NEAR(s.log_partition, std::numbers::ln2 + 4000.0, 1e-9);
}

TEST(Engine, CapacityAndValidation) {
  auto kind = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::io;
  };
  const Hamiltonian h(Region::box(1, 2), {{0b11, 1.0, 1.0}});
  EXPECT_EQ(kind([&] { log_partition(h, -1.0); }), ErrorKind::validation);
  EXPECT_EQ(kind([&] { log_partition(h, std::nan("")); }), ErrorKind::validation);
  EXPECT_EQ(kind([&] { gibbs_expectation(h, 1.0, 0b100); }), ErrorKind::validation);
  EXPECT_EQ(kind([&] { partition_ratio(h, {0b100, 1.0, 1.0}, 1.0); }), ErrorKind::validation);
}

// Gray-code walk and naive enumeration agree on 1000 seeded instances.
TEST(Engine, GrayMatchesNaiveProperty) {
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const auto seed = derive_seed(2024, i);
    const auto h = corpus::random_gaussian_hamiltonian(seed, {16, 20, 4});
    const double beta = (i % 3 == 0) ? 0.2 : (i % 3 == 1) ? 1.0 : 5.0;
    std::vector<Subset> obs;
    for (const auto& t : h.terms()) obs.push_back(t.subset);
    const auto fast = evaluate(h, beta, obs);
    const auto slow = evaluate_naive(h, beta, obs);
    ASSERT_NEAR(fast.summary.log_partition, slow.summary.log_partition,
                1e-12 * std::max(1.0, std::abs(slow.summary.log_partition)))
        << "seed " << seed;
    for (std::size_t k = 0; k < obs.size(); ++k)
      ASSERT_NEAR(fast.correlations[k].expectation(), slow.correlations[k].expectation(), 1e-12) << "seed " << seed;
  }
}

// Flipping the sign of every odd-order coupling maps sigma -> -sigma and
// leaves Z unchanged.
TEST(Engine, GlobalFlipSymmetryProperty) {
  for (std::uint64_t i = 0; i < 200; ++i) {
    const auto h = corpus::random_gaussian_hamiltonian(derive_seed(5, i), {10, 12, 3});
    std::vector<InteractionTerm> flipped(h.terms().begin(), h.terms().end());
    for (auto& t : flipped)
      if (subset_size(t.subset) % 2) t.coupling = -t.coupling;
    const Hamiltonian g(h.shared_region(), flipped);
    ASSERT_NEAR(log_partition(h, 1.0).log_partition, log_partition(g, 1.0).log_partition, 1e-12);
  }
}

// Z does not depend on the order of the terms.
TEST(Engine, TermOrderInvarianceProperty) {
  for (std::uint64_t i = 0; i < 200; ++i) {
    const auto h = corpus::random_gaussian_hamiltonian(derive_seed(6, i), {10, 12, 3});
    ASSERT_NEAR(log_partition(h, 1.0).log_partition, log_partition(h.shuffled(i), 1.0).log_partition, 1e-12);
  }
}

TEST(Engine, CorrelationBoundsProperty) {
  for (std::uint64_t i = 0; i < 200; ++i) {
    const auto h = corpus::random_gaussian_hamiltonian(derive_seed(7, i), {10, 12, 3});
    std::vector<Subset> obs;
    for (Subset s = 1; s < (Subset{1} << std::min<std::size_t>(h.num_sites(), 5)); ++s) obs.push_back(s);
    for (const auto& c : evaluate(h, 2.0, obs).correlations) {
      ASSERT_LE(std::abs(c.expectation()), 1.0);
      ASSERT_NEAR(c.plus_fraction + c.minus_fraction, 1.0, 1e-14);
      ASSERT_NEAR(c.defect(), 1.0 - std::abs(c.expectation()), 1e-14);
    }
  }
}

TEST(Engine, PartitionRatio) {
  const Hamiltonian empty(Region::box(1, 2));
  EXPECT_NEAR(partition_ratio(empty, {0b11, 1.0, 1.0}, 1.0), std::cosh(1.0), 1e-15);
  EXPECT_NEAR(partition_ratio(empty, {0b11, 1.0, 1.0}, 1.0), 1.5430806, 1e-7);
  // adding a term equal to an existing one: cosh(1)(1 + tanh(1)^2)
  const Hamiltonian one(Region::box(1, 2), {{0b11, 1.0, 1.0}});
  EXPECT_NEAR(partition_ratio(one, {0b11, 1.0, 1.0}, 1.0), std::cosh(1.0) * (1 + std::tanh(1.0) * std::tanh(1.0)),
              1e-14);
  // opposite term cancels: Z returns to 4
  EXPECT_NEAR(log_partition_ratio(one, {0b11, 1.0, -1.0}, 1.0), std::log(4.0) - std::log(4.0 * std::cosh(1.0)),
              1e-14);
}

TEST(Engine, LogCosh) {
  EXPECT_EQ(log_cosh(0.0), 0.0);
  EXPECT_NEAR(log_cosh(1.0), 0.4337809, 1e-7);
  EXPECT_NEAR(log_cosh(1e-5), 0.5e-10 - 1e-20 / 12.0, 1e-25);
  EXPECT_NEAR(log_cosh(1000.0), 1000.0 - std::numbers::ln2, 1e-12);
  EXPECT_EQ(log_cosh(-3.0), log_cosh(3.0));
}

TEST(Engine, TwoDimensionalLargestBox) {
  // 5x5 Ising at beta 0: 25 ln 2, and finite positive coupling raises it
  const auto box = Region::box(2, 5);
  std::vector<InteractionTerm> terms;
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 5; ++c) {
      const int i = r * 5 + c;
      if (c + 1 < 5) terms.push_back({(Subset{1} << i) | (Subset{1} << (i + 1)), 1.0, 0.5});
      if (r + 1 < 5) terms.push_back({(Subset{1} << i) | (Subset{1} << (i + 5)), 1.0, 0.5});
    }
  const Hamiltonian h(box, terms);
  EXPECT_EQ(log_partition(h, 0.0).log_partition, 25.0 * std::numbers::ln2);
  EXPECT_GT(log_partition(h, 0.5).pressure_density, std::numbers::ln2);
}
