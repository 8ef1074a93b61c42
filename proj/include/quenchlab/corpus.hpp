#pragma once

// Seeded random instances for property sweeps. Each generator draws from
// Philox stream (seed, 0), so an instance is fully determined by its seed.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "disorder.hpp"
#include "disordered.hpp"
#include "lattice.hpp"
#include "rng.hpp"

namespace quenchlab::corpus {

struct Shape {
  int max_sites = 8;
  int max_terms = 10;
  int max_order = 3;  ///< largest |X|
};

/// Integer uniform on [lo, hi].
inline int uniform_int(Philox4x32& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

/// Nonempty subset of {0..n-1} with at most max_order sites.
inline Subset random_subset(Philox4x32& rng, int n, int max_order) {
  const int order = uniform_int(rng, 1, std::min(max_order, n));
  Subset s = 0;
  while (std::popcount(s) < order) s |= Subset{1} << uniform_int(rng, 0, n - 1);
  return s;
}

inline Region random_region(Philox4x32& rng, const Shape& shape) {
  return Region::box(1, uniform_int(rng, 2, shape.max_sites));
}

inline Hamiltonian random_gaussian_hamiltonian(std::uint64_t seed, const Shape& shape) {
  Philox4x32 rng(seed, 0);
  const auto region = random_region(rng, shape);
  const int n = static_cast<int>(region.size());
  const int k = uniform_int(rng, 1, shape.max_terms);
  std::vector<InteractionTerm> terms;
  for (int t = 0; t < k; ++t) {
    const Subset x = random_subset(rng, n, shape.max_order);
    const double lambda = 0.5 + rng.uniform();
    terms.push_back({x, lambda, sample(Gaussian{1.0}, rng)});
  }
  return Hamiltonian(region, std::move(terms));
}

/// Couplings uniform on [0, 2), with roughly one in five set to zero.
inline Hamiltonian random_nonnegative_hamiltonian(std::uint64_t seed, const Shape& shape) {
  Philox4x32 rng(seed, 0);
  const auto region = random_region(rng, shape);
  const int n = static_cast<int>(region.size());
  const int k = uniform_int(rng, 1, shape.max_terms);
  std::vector<InteractionTerm> terms;
  for (int t = 0; t < k; ++t) {
    const Subset x = random_subset(rng, n, shape.max_order);
    const double j = rng.uniform() < 0.2 ? 0.0 : 2.0 * rng.uniform();
    terms.push_back({x, 1.0, j});
  }
  return Hamiltonian(region, std::move(terms));
}

/// Independent rademacher couplings, one variable per term, with random
/// multipliers. When with_fixed is set, some terms carry deterministic
/// couplings instead.
inline DisorderedHamiltonian random_rademacher_model(std::uint64_t seed, const Shape& shape, bool with_fixed = false) {
  Philox4x32 rng(seed, 0);
  const auto region = random_region(rng, shape);
  const int n = static_cast<int>(region.size());
  const int k = uniform_int(rng, 1, shape.max_terms);
  std::vector<Distribution> variables;
  std::vector<DisorderedTerm> terms;
  for (int t = 0; t < k; ++t) {
    DisorderedTerm term;
    term.subset = random_subset(rng, n, shape.max_order);
    term.multiplier = 0.25 + 1.5 * rng.uniform();
    term.variable = variables.size();
    if (with_fixed && rng.uniform() < 0.3) variables.push_back(Deterministic{2.0 * rng.uniform() - 1.0});
    else variables.push_back(Rademacher{});
    terms.push_back(term);
  }
  return DisorderedHamiltonian(region, std::move(variables), std::move(terms));
}

/// Dependent couplings over rademacher variables. Either several terms share
/// a variable, or each variable feeds a truncation pair (bounded part on one
/// subset, tail on another) with cutoff 0.5 or 2.
inline DisorderedHamiltonian random_dependent_model(std::uint64_t seed, const Shape& shape) {
  Philox4x32 rng(seed, 0);
  const auto region = random_region(rng, shape);
  const int n = static_cast<int>(region.size());
  const int k = uniform_int(rng, 2, std::max(2, shape.max_terms));
  std::vector<Distribution> variables;
  std::vector<DisorderedTerm> terms;
  if (rng.uniform() < 0.5) {
    const int n_vars = uniform_int(rng, 1, std::max(1, k / 2));
    variables.assign(static_cast<std::size_t>(n_vars), Rademacher{});
    for (int t = 0; t < k; ++t) {
      DisorderedTerm term;
      term.subset = random_subset(rng, n, shape.max_order);
      term.multiplier = 0.25 + 1.5 * rng.uniform();
      term.variable = static_cast<std::size_t>(uniform_int(rng, 0, n_vars - 1));
      terms.push_back(term);
    }
  } else {
    for (int t = 0; t + 1 < k; t += 2) {
      const double cutoff = rng.uniform() < 0.5 ? 0.5 : 2.0;
      const auto pair = truncate(Rademacher{}, cutoff);
      const std::size_t v = variables.size();
      variables.push_back(Rademacher{});
      for (auto part : {CouplingPart::bounded, CouplingPart::tail}) {
        DisorderedTerm term;
        term.subset = random_subset(rng, n, shape.max_order);
        term.multiplier = 0.25 + 1.5 * rng.uniform();
        term.variable = v;
        term.part = part;
        term.cutoff = pair.cutoff;
        term.centering = pair.centering;
        terms.push_back(term);
      }
    }
  }
  return DisorderedHamiltonian(region, std::move(variables), std::move(terms));
}

/// Independent gaussian couplings, one variable per term.
inline DisorderedHamiltonian random_gaussian_model(std::uint64_t seed, const Shape& shape) {
  Philox4x32 rng(seed, 0);
  const auto region = random_region(rng, shape);
  const int n = static_cast<int>(region.size());
  const int k = uniform_int(rng, 1, shape.max_terms);
  std::vector<Distribution> variables;
  std::vector<DisorderedTerm> terms;
  for (int t = 0; t < k; ++t) {
    DisorderedTerm term;
    term.subset = random_subset(rng, n, shape.max_order);
    term.multiplier = 0.25 + 1.5 * rng.uniform();
    term.variable = variables.size();
    variables.push_back(Gaussian{0.5 + rng.uniform()});
    terms.push_back(term);
  }
  return DisorderedHamiltonian(region, std::move(variables), std::move(terms));
}

}  // namespace quenchlab::corpus
