#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "errors.hpp"
#include "lattice.hpp"

namespace quenchlab {

struct GibbsSummary {
  double log_partition = 0.0;     ///< ln Z
  double pressure_density = 0.0;  ///< ln Z / |Lambda|
  double beta = 0.0;
};

/// Split of the Gibbs weight of an observable sigma_X into its +1 and -1
/// parts, kept as fractions of Z so that 1 - |<sigma_X>| is available without
/// cancellation.
struct Correlation {
  double plus_fraction = 0.5;
  double minus_fraction = 0.5;

  double expectation() const { return plus_fraction - minus_fraction; }
  /// 1 - |<sigma_X>|
  double defect() const { return 2.0 * std::min(plus_fraction, minus_fraction); }
};

struct Evaluation {
  GibbsSummary summary;
  std::vector<Correlation> correlations;
};

/// ln cosh x without overflow.
inline double log_cosh(double x) {
  const double a = std::abs(x);
  if (a < 1.0) {
    const double s = std::sinh(0.5 * a);
    return std::log1p(2.0 * s * s);
  }
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

namespace detail {

/// Streaming log-sum-exp with a running maximum, plus per-observable split
/// sums sharing the same shift.
class WeightAccumulator {
 public:
  explicit WeightAccumulator(std::span<const Subset> observables)
      : observables_(observables), plus_(observables.size(), 0.0), minus_(observables.size(), 0.0) {}

  void add(double exponent, std::uint64_t config) {
    double w;
    if (exponent > shift_) {
      const double factor = std::exp(shift_ - exponent);
      total_ *= factor;
      for (auto& p : plus_) p *= factor;
      for (auto& m : minus_) m *= factor;
      shift_ = exponent;
      w = 1.0;
    } else {
      w = std::exp(exponent - shift_);
    }
    total_ += w;
    for (std::size_t k = 0; k < observables_.size(); ++k) {
      if (std::popcount(config & observables_[k]) & 1) minus_[k] += w;
      else plus_[k] += w;
    }
  }

  double log_total() const { return shift_ + std::log(total_); }

  std::vector<Correlation> correlations() const {
    std::vector<Correlation> out;
    out.reserve(observables_.size());
    for (std::size_t k = 0; k < observables_.size(); ++k) {
      const double z = plus_[k] + minus_[k];
      out.push_back({plus_[k] / z, minus_[k] / z});
    }
    return out;
  }

 private:
  std::span<const Subset> observables_;
  std::vector<double> plus_;
  std::vector<double> minus_;
  double shift_ = -std::numeric_limits<double>::infinity();
  double total_ = 0.0;
};

inline void check_inputs(const Hamiltonian& h, double beta, std::span<const Subset> observables) {
  require(h.num_sites() <= kMaxSites, ErrorKind::capacity,
          "exact enumeration supports at most 32 sites, region has " + std::to_string(h.num_sites()));
  require(std::isfinite(beta) && beta >= 0.0, ErrorKind::validation, "beta must be finite and >= 0");
  for (auto x : observables) {
    require(x != 0, ErrorKind::validation, "observable subset must be nonempty");
    require(h.fits(x), ErrorKind::validation, "observable subset lies outside the region");
  }
}

inline bool is_free(const Hamiltonian& h, double beta) {
  return beta == 0.0 ||
         std::all_of(h.terms().begin(), h.terms().end(), [](const auto& t) { return t.effective() == 0.0; });
}

inline Evaluation free_evaluation(const Hamiltonian& h, double beta, std::size_t n_observables) {
  const double n = static_cast<double>(h.num_sites());
  return {{n * std::numbers::ln2, std::numbers::ln2, beta}, std::vector<Correlation>(n_observables)};
}

/// Configurations between exact re-summations of the running energy; bounds
/// the rounding drift of the incremental updates.
inline constexpr std::uint64_t kResyncInterval = 32;

}  // namespace detail

/// Exact ln Z and <sigma_X> for each observable by a Gray-code walk over all
/// 2^|Lambda| configurations. A flip of site i touches only the terms that
/// contain i.
inline Evaluation evaluate(const Hamiltonian& h, double beta, std::span<const Subset> observables = {}) {
  detail::check_inputs(h, beta, observables);
  if (detail::is_free(h, beta)) return detail::free_evaluation(h, beta, observables.size());

  const std::size_t n = h.num_sites();
  const std::size_t n_terms = h.size();

  // signed[t] = beta * lambda_t J_t * sigma_{X_t} for the current configuration
  std::vector<double> signed_term(n_terms);
  for (std::size_t t = 0; t < n_terms; ++t) signed_term[t] = beta * h[t].effective();

  // site -> incident terms, CSR layout
  std::vector<std::uint32_t> offsets(n + 1, 0);
  for (const auto& term : h.terms())
    for (Subset s = term.subset; s; s &= s - 1) ++offsets[std::countr_zero(s) + 1];
  for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
  std::vector<std::uint32_t> incident(offsets[n]);
  {
    auto cursor = offsets;
    for (std::size_t t = 0; t < n_terms; ++t)
      for (Subset s = h[t].subset; s; s &= s - 1) incident[cursor[std::countr_zero(s)]++] = static_cast<std::uint32_t>(t);
  }

  const auto exact_sum = [&] {
    double sum = 0.0;
    for (double v : signed_term) sum += v;
    return sum;
  };

  detail::WeightAccumulator acc(observables);
  std::uint64_t config = 0;
  double exponent = exact_sum();
  acc.add(exponent, config);
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < count; ++k) {
    const int site = std::countr_zero(k);
    config ^= std::uint64_t{1} << site;
    for (auto e = offsets[site]; e < offsets[site + 1]; ++e) {
      double& v = signed_term[incident[e]];
      exponent -= 2.0 * v;
      v = -v;
    }
    if (k % detail::kResyncInterval == 0) exponent = exact_sum();
    acc.add(exponent, config);
  }

  const double log_z = acc.log_total();
  return {{log_z, log_z / static_cast<double>(n), beta}, acc.correlations()};
}

/// Reference path: every configuration's energy re-evaluated from scratch.
inline Evaluation evaluate_naive(const Hamiltonian& h, double beta, std::span<const Subset> observables = {}) {
  detail::check_inputs(h, beta, observables);
  const std::size_t n = h.num_sites();
  detail::WeightAccumulator acc(observables);
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t config = 0; config < count; ++config) acc.add(beta * h.minus_energy(config), config);
  const double log_z = acc.log_total();
  return {{log_z, log_z / static_cast<double>(n), beta}, acc.correlations()};
}

inline GibbsSummary log_partition(const Hamiltonian& h, double beta) { return evaluate(h, beta).summary; }

inline double gibbs_expectation(const Hamiltonian& h, double beta, Subset observable) {
  const Subset obs[] = {observable};
  return evaluate(h, beta, obs).correlations.front().expectation();
}

/// ln of cosh(x) [1 + tanh(x) <sigma_X>], x = beta lambda J. When the bracket
/// would cancel it is evaluated as (1 - |tanh x|) + |tanh x| (1 - |<sigma_X>|).
inline double log_ratio_closed_form(double x, const Correlation& corr) {
  const double t = std::tanh(x);
  const double s = corr.expectation();
  double bracket;
  if (t * s >= 0.0) {
    bracket = 1.0 + t * s;
  } else {
    const double one_minus_abs_t = 2.0 / (1.0 + std::exp(2.0 * std::abs(x)));
    bracket = one_minus_abs_t + std::abs(t) * corr.defect();
  }
  return log_cosh(x) + std::log(bracket);
}

/// Z(prefix + next) / Z(prefix) from the Gibbs average over the prefix, in
/// log form.
inline double log_partition_ratio(const Hamiltonian& prefix, const InteractionTerm& next, double beta) {
  require(prefix.fits(next.subset) && next.subset != 0, ErrorKind::validation,
          "next term must be a nonempty subset of the region");
  const Subset obs[] = {next.subset};
  const auto eval = evaluate(prefix, beta, obs);
  return log_ratio_closed_form(beta * next.effective(), eval.correlations.front());
}

inline double partition_ratio(const Hamiltonian& prefix, const InteractionTerm& next, double beta) {
  return std::exp(log_partition_ratio(prefix, next, beta));
}

}  // namespace quenchlab
