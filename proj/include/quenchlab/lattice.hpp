#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "disorder.hpp"
#include "errors.hpp"
#include "rng.hpp"

namespace quenchlab {

/// A set of sites as a bitmask over site indices.
using Subset = std::uint32_t;

/// Bitmask width; also the largest region the exact engine accepts.
inline constexpr std::size_t kMaxSites = 32;

using Site = std::vector<int>;

inline int subset_size(Subset s) { return std::popcount(s); }
inline int lowest_site(Subset s) { return std::countr_zero(s); }

/// sigma_X for a configuration whose set bits mark the sites with sigma_i = -1.
inline int spin_product(std::uint64_t config, Subset subset) {
  return (std::popcount(config & subset) & 1) ? -1 : 1;
}

/// A finite set of lattice sites with a fixed enumeration order.
class Region {
 public:
  Region(int dimension, std::vector<Site> sites) : dimension_(dimension), sites_(std::move(sites)) {
    require(dimension_ >= 1, ErrorKind::validation, "region dimension must be >= 1");
    require(!sites_.empty(), ErrorKind::validation, "region must contain at least one site");
    for (std::size_t i = 0; i < sites_.size(); ++i) {
      require(static_cast<int>(sites_[i].size()) == dimension_, ErrorKind::validation,
              "site has wrong dimension");
      const bool fresh = index_.emplace(sites_[i], i).second;
      require(fresh, ErrorKind::validation, "region sites must be distinct");
    }
  }

  /// [1, side]^dimension in row-major order (last coordinate fastest).
  static Region box(int dimension, int side) {
    require(dimension >= 1 && side >= 1, ErrorKind::validation, "box needs dimension >= 1 and side >= 1");
    std::size_t volume = 1;
    for (int k = 0; k < dimension; ++k) volume *= static_cast<std::size_t>(side);
    std::vector<Site> sites;
    sites.reserve(volume);
    Site site(dimension, 1);
    for (std::size_t i = 0; i < volume; ++i) {
      sites.push_back(site);
      for (int k = dimension - 1; k >= 0; --k) {
        if (++site[k] <= side) break;
        site[k] = 1;
      }
    }
    Region region(dimension, std::move(sites));
    region.box_side_ = side;
    return region;
  }

  int dimension() const { return dimension_; }
  std::size_t size() const { return sites_.size(); }
  const std::vector<Site>& sites() const { return sites_; }
  std::optional<int> box_side() const { return box_side_; }

  std::optional<std::size_t> index_of(const Site& site) const {
    const auto it = index_.find(site);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  friend bool operator==(const Region& a, const Region& b) {
    return a.dimension_ == b.dimension_ && a.sites_ == b.sites_;
  }

 private:
  int dimension_;
  std::vector<Site> sites_;
  std::map<Site, std::size_t> index_;
  std::optional<int> box_side_;
};

struct InteractionTerm {
  Subset subset = 0;
  double multiplier = 1.0;  ///< lambda_X, nonnegative
  double coupling = 0.0;    ///< J_X

  double effective() const { return multiplier * coupling; }

  friend bool operator==(const InteractionTerm&, const InteractionTerm&) = default;
};

/// Canonical term order: lowest site index, then |X|, then the bitmask.
inline bool canonical_less(Subset a, Subset b) {
  const auto key = [](Subset s) { return std::tuple(lowest_site(s), subset_size(s), s); };
  return key(a) < key(b);
}

/// -H(sigma) = sum_n lambda_n J_n sigma_{X_n} on a region; term order is
/// significant since prefixes X_[n] are taken along it.
class Hamiltonian {
 public:
  explicit Hamiltonian(Region region, std::vector<InteractionTerm> terms = {})
      : Hamiltonian(std::make_shared<const Region>(std::move(region)), std::move(terms)) {}

  Hamiltonian(std::shared_ptr<const Region> region, std::vector<InteractionTerm> terms)
      : region_(std::move(region)), terms_(std::move(terms)) {
    for (const auto& term : terms_) check_term(term);
  }

  const Region& region() const { return *region_; }
  const std::shared_ptr<const Region>& shared_region() const { return region_; }
  std::size_t num_sites() const { return region_->size(); }
  std::span<const InteractionTerm> terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  const InteractionTerm& operator[](std::size_t n) const { return terms_[n]; }

  /// The first n terms, same region.
  Hamiltonian prefix(std::size_t n) const {
    require(n <= terms_.size(), ErrorKind::precondition,
            "prefix length " + std::to_string(n) + " exceeds term count " + std::to_string(terms_.size()));
    return Hamiltonian(region_, std::vector<InteractionTerm>(terms_.begin(), terms_.begin() + n));
  }

  Hamiltonian with_term(const InteractionTerm& term) const {
    auto terms = terms_;
    terms.push_back(term);
    return Hamiltonian(region_, std::move(terms));
  }

  Hamiltonian with_coupling(std::size_t n, double coupling) const {
    auto terms = terms_;
    terms.at(n).coupling = coupling;
    return Hamiltonian(region_, std::move(terms));
  }

  Hamiltonian with_multiplier(std::size_t n, double multiplier) const {
    auto terms = terms_;
    terms.at(n).multiplier = multiplier;
    return Hamiltonian(region_, std::move(terms));
  }

  /// Reorders the terms by a seeded Fisher-Yates shuffle.
  Hamiltonian shuffled(std::uint64_t seed) const {
    auto terms = terms_;
    Philox4x32 rng(seed, 0);
    for (std::size_t i = terms.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rng() % i);
      std::swap(terms[i - 1], terms[j]);
    }
    return Hamiltonian(region_, std::move(terms));
  }

  /// -H(sigma), re-evaluated from scratch.
  double minus_energy(std::uint64_t config) const {
    double sum = 0.0;
    for (const auto& term : terms_) sum += term.effective() * spin_product(config, term.subset);
    return sum;
  }

  bool fits(Subset subset) const {
    return region_->size() >= kMaxSites || (subset >> region_->size()) == 0;
  }

 private:
  void check_term(const InteractionTerm& term) const {
    require(term.subset != 0, ErrorKind::validation, "interaction subset must be nonempty");
    require(region_->size() <= kMaxSites, ErrorKind::capacity,
            "regions with more than 32 sites cannot carry bitmask terms");
    require(fits(term.subset), ErrorKind::validation, "interaction subset lies outside the region");
    require(std::isfinite(term.multiplier) && term.multiplier >= 0.0, ErrorKind::validation,
            "multiplier must be finite and nonnegative");
    require(std::isfinite(term.coupling), ErrorKind::validation, "coupling must be finite");
  }

  std::shared_ptr<const Region> region_;
  std::vector<InteractionTerm> terms_;
};

/// One translation orbit of a translation-invariant family: the representative
/// contains the origin and every translate carries an independent copy of
/// `distribution`.
struct Orbit {
  std::vector<Site> representative;
  Distribution distribution;
  double multiplier = 1.0;
};

class CouplingFamily {
 public:
  CouplingFamily(int dimension, std::vector<Orbit> orbits) : dimension_(dimension), orbits_(std::move(orbits)) {
    require(dimension_ >= 1, ErrorKind::validation, "family dimension must be >= 1");
    std::vector<std::vector<Site>> shapes;
    for (const auto& orbit : orbits_) {
      require(!orbit.representative.empty(), ErrorKind::validation, "orbit representative must be nonempty");
      const Site origin(dimension_, 0);
      bool has_origin = false;
      for (const auto& site : orbit.representative) {
        require(static_cast<int>(site.size()) == dimension_, ErrorKind::validation,
                "orbit site has wrong dimension");
        has_origin = has_origin || site == origin;
      }
      require(has_origin, ErrorKind::validation, "orbit representative must contain the origin");
      require(std::isfinite(orbit.multiplier) && orbit.multiplier >= 0.0, ErrorKind::validation,
              "orbit multiplier must be finite and nonnegative");
      validate(orbit.distribution);
      auto shape = normalized_shape(orbit.representative);
      require(std::adjacent_find(shape.begin(), shape.end()) == shape.end(), ErrorKind::validation,
              "orbit representative has repeated sites");
      require(std::find(shapes.begin(), shapes.end(), shape) == shapes.end(), ErrorKind::validation,
              "two orbits are translates of each other");
      shapes.push_back(std::move(shape));
    }
  }

  int dimension() const { return dimension_; }
  const std::vector<Orbit>& orbits() const { return orbits_; }

  /// Largest number of lattice rows any representative spans along one axis.
  int range() const {
    int extent = 0;
    for (const auto& orbit : orbits_) {
      for (int k = 0; k < dimension_; ++k) {
        const auto [lo, hi] = std::minmax_element(orbit.representative.begin(), orbit.representative.end(),
                                                  [k](const Site& a, const Site& b) { return a[k] < b[k]; });
        extent = std::max(extent, (*hi)[k] - (*lo)[k] + 1);
      }
    }
    return extent;
  }

  bool deterministic() const {
    return std::none_of(orbits_.begin(), orbits_.end(),
                        [](const Orbit& o) { return is_random(o.distribution); });
  }

 private:
  std::vector<Site> normalized_shape(const std::vector<Site>& sites) const {
    Site low = sites.front();
    for (const auto& s : sites)
      for (int k = 0; k < dimension_; ++k) low[k] = std::min(low[k], s[k]);
    std::vector<Site> shape;
    for (auto s : sites) {
      for (int k = 0; k < dimension_; ++k) s[k] -= low[k];
      shape.push_back(std::move(s));
    }
    std::sort(shape.begin(), shape.end());
    return shape;
  }

  int dimension_;
  std::vector<Orbit> orbits_;
};

/// Nearest-neighbour pairs {0, e_k} for each axis, all with the same law.
inline CouplingFamily nearest_neighbour_family(int dimension, const Distribution& dist) {
  std::vector<Orbit> orbits;
  for (int k = 0; k < dimension; ++k) {
    Site origin(dimension, 0);
    Site step(dimension, 0);
    step[k] = 1;
    orbits.push_back(Orbit{{origin, step}, dist, 1.0});
  }
  return CouplingFamily(dimension, std::move(orbits));
}

}  // namespace quenchlab
