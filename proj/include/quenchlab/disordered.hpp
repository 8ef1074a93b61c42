#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "disorder.hpp"
#include "errors.hpp"
#include "lattice.hpp"
#include "rng.hpp"

namespace quenchlab {

/// Which piece of an underlying variable a term couples to.
enum class CouplingPart { whole, bounded, tail };

struct DisorderedTerm {
  Subset subset = 0;
  double multiplier = 1.0;
  std::size_t variable = 0;
  CouplingPart part = CouplingPart::whole;
  /// Truncation data, used by the bounded and tail parts.
  double cutoff = 0.0;
  double centering = 0.0;

  double coupling(std::span<const double> values) const {
    const double j = values[variable];
    if (part == CouplingPart::whole) return j;
    const auto parts = TruncatedPair{cutoff, centering, Deterministic{}}.split(j);
    return part == CouplingPart::bounded ? parts.bounded : parts.tail;
  }
};

/// A Hamiltonian whose couplings are functions of independent random
/// variables. Several terms may share one variable (dependent couplings,
/// e.g. the two halves of a truncation pair).
class DisorderedHamiltonian {
 public:
  DisorderedHamiltonian(Region region, std::vector<Distribution> variables, std::vector<DisorderedTerm> terms)
      : DisorderedHamiltonian(std::make_shared<const Region>(std::move(region)), std::move(variables),
                              std::move(terms)) {}

  DisorderedHamiltonian(std::shared_ptr<const Region> region, std::vector<Distribution> variables,
                        std::vector<DisorderedTerm> terms)
      : region_(std::move(region)), variables_(std::move(variables)), terms_(std::move(terms)) {
    for (const auto& v : variables_) validate(v);
    for (const auto& t : terms_) {
      require(t.variable < variables_.size(), ErrorKind::validation, "term references an unknown variable");
      require(t.subset != 0, ErrorKind::validation, "interaction subset must be nonempty");
      require(t.multiplier >= 0.0, ErrorKind::validation, "multiplier must be nonnegative");
      require(t.part == CouplingPart::whole || t.cutoff > 0.0, ErrorKind::validation,
              "truncated term needs a positive cutoff");
    }
  }

  const Region& region() const { return *region_; }
  const std::shared_ptr<const Region>& shared_region() const { return region_; }
  std::size_t num_sites() const { return region_->size(); }
  const std::vector<Distribution>& variables() const { return variables_; }
  const std::vector<DisorderedTerm>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  std::vector<double> draw(Philox4x32& rng) const {
    std::vector<double> values;
    values.reserve(variables_.size());
    for (const auto& v : variables_) values.push_back(sample(v, rng));
    return values;
  }

  Hamiltonian realize(std::span<const double> values) const {
    std::vector<InteractionTerm> terms;
    terms.reserve(terms_.size());
    for (const auto& t : terms_) terms.push_back({t.subset, t.multiplier, t.coupling(values)});
    return Hamiltonian(region_, std::move(terms));
  }

  DisorderedHamiltonian prefix(std::size_t n) const {
    require(n <= terms_.size(), ErrorKind::precondition, "prefix length exceeds term count");
    return DisorderedHamiltonian(region_, variables_,
                                 std::vector<DisorderedTerm>(terms_.begin(), terms_.begin() + n));
  }

  DisorderedHamiltonian with_multiplier(std::span<const std::size_t> term_indices, double multiplier) const {
    auto terms = terms_;
    for (auto n : term_indices) terms.at(n).multiplier = multiplier;
    return DisorderedHamiltonian(region_, variables_, std::move(terms));
  }

  bool deterministic() const {
    return std::none_of(variables_.begin(), variables_.end(), [](const auto& v) { return is_random(v); });
  }

  bool finitely_supported() const {
    return std::all_of(variables_.begin(), variables_.end(),
                       [](const auto& v) { return finite_support(v).has_value(); });
  }

  /// True when every term has its own variable and uses it whole.
  bool independent_terms() const {
    std::vector<int> uses(variables_.size(), 0);
    for (const auto& t : terms_) {
      if (t.part != CouplingPart::whole || uses[t.variable]++ > 0) return false;
    }
    return true;
  }

  /// Number of joint disorder outcomes, saturating at SIZE_MAX.
  std::size_t outcome_count() const {
    std::size_t count = 1;
    for (const auto& v : variables_) {
      const auto support = finite_support(v);
      require(support.has_value(), ErrorKind::precondition,
              "exact disorder enumeration needs finitely supported couplings, got " + kind_name(v));
      if (count > std::numeric_limits<std::size_t>::max() / support->size())
        return std::numeric_limits<std::size_t>::max();
      count *= support->size();
    }
    return count;
  }

  struct Outcome {
    std::vector<double> values;
    double probability;
  };

  /// Outcome number `index` in mixed-radix order (first variable fastest).
  Outcome outcome(std::size_t index) const {
    Outcome out{{}, 1.0};
    out.values.reserve(variables_.size());
    for (const auto& v : variables_) {
      const auto support = *finite_support(v);
      const auto& atom = support[index % support.size()];
      index /= support.size();
      out.values.push_back(atom.value);
      out.probability *= atom.probability;
    }
    return out;
  }

 private:
  std::shared_ptr<const Region> region_;
  std::vector<Distribution> variables_;
  std::vector<DisorderedTerm> terms_;
};

/// Wraps a fixed Hamiltonian as a disorder model with point-mass variables.
inline DisorderedHamiltonian as_disordered(const Hamiltonian& h) {
  std::vector<Distribution> variables;
  std::vector<DisorderedTerm> terms;
  for (const auto& term : h.terms()) {
    terms.push_back({term.subset, term.multiplier, variables.size()});
    variables.emplace_back(Deterministic{term.coupling});
  }
  return DisorderedHamiltonian(h.shared_region(), std::move(variables), std::move(terms));
}

/// Disorder model of a family on a box, with term-to-orbit bookkeeping.
struct FamilyInstance {
  DisorderedHamiltonian model;
  std::vector<std::size_t> orbit_of_term;

  std::vector<std::size_t> terms_of_orbit(std::size_t orbit) const {
    std::vector<std::size_t> out;
    for (std::size_t n = 0; n < orbit_of_term.size(); ++n)
      if (orbit_of_term[n] == orbit) out.push_back(n);
    return out;
  }
};

/// One term per translate of each representative that fits inside the box,
/// each with its own variable, in canonical order. Translates that do not fit
/// are dropped (free boundary).
inline FamilyInstance instantiate_disordered(const CouplingFamily& family, const Region& region) {
  require(region.box_side().has_value(), ErrorKind::unsupported_region,
          "translation-invariant families can only be instantiated on boxes");
  require(region.dimension() == family.dimension(), ErrorKind::validation,
          "family and region dimensions differ");
  const int d = region.dimension();
  const int side = *region.box_side();

  struct Pending {
    Subset subset;
    std::size_t orbit;
  };
  std::vector<Pending> pending;
  for (std::size_t o = 0; o < family.orbits().size(); ++o) {
    const auto& rep = family.orbits()[o].representative;
    Site lo(d), hi(d);
    for (int k = 0; k < d; ++k) {
      lo[k] = 1 - std::min_element(rep.begin(), rep.end(), [k](auto& a, auto& b) { return a[k] < b[k]; })->at(k);
      hi[k] = side - std::max_element(rep.begin(), rep.end(), [k](auto& a, auto& b) { return a[k] < b[k]; })->at(k);
    }
    bool fits = true;
    for (int k = 0; k < d; ++k) fits = fits && lo[k] <= hi[k];
    if (!fits) continue;
    require(region.size() <= kMaxSites, ErrorKind::capacity,
            "box has more than 32 sites; bitmask terms cannot be formed");
    Site shift = lo;
    while (true) {
      Subset mask = 0;
      for (const auto& s : rep) {
        Site moved(d);
        for (int k = 0; k < d; ++k) moved[k] = s[k] + shift[k];
        mask |= Subset{1} << *region.index_of(moved);
      }
      pending.push_back({mask, o});
      int k = d - 1;
      for (; k >= 0; --k) {
        if (++shift[k] <= hi[k]) break;
        shift[k] = lo[k];
      }
      if (k < 0) break;
    }
  }
  std::sort(pending.begin(), pending.end(),
            [](const Pending& a, const Pending& b) { return canonical_less(a.subset, b.subset); });

  std::vector<Distribution> variables;
  std::vector<DisorderedTerm> terms;
  std::vector<std::size_t> orbit_of_term;
  for (const auto& p : pending) {
    const auto& orbit = family.orbits()[p.orbit];
    terms.push_back({p.subset, orbit.multiplier, variables.size()});
    variables.push_back(orbit.distribution);
    orbit_of_term.push_back(p.orbit);
  }
  return {DisorderedHamiltonian(region, std::move(variables), std::move(terms)), std::move(orbit_of_term)};
}

/// A concrete Hamiltonian: random couplings drawn from stream (seed, 0).
inline Hamiltonian instantiate(const CouplingFamily& family, const Region& region, std::uint64_t seed) {
  const auto instance = instantiate_disordered(family, region);
  Philox4x32 rng(seed, 0);
  return instance.model.realize(instance.model.draw(rng));
}

}  // namespace quenchlab
