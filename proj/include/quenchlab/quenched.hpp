#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "disordered.hpp"
#include "engine.hpp"
#include "errors.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace quenchlab {

struct PressureEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  bool exact = false;
  std::uint64_t seed = 0;
  std::optional<double> median;
  std::optional<double> interquartile_range;
  bool control_variate = false;
};

/// Cap on the number of joint disorder outcomes enumerated exactly.
inline constexpr std::size_t kMaxDisorderOutcomes = std::size_t{1} << 20;

struct SampleStats {
  double mean = 0.0;
  double std_error = 0.0;
  double median = 0.0;
  double interquartile_range = 0.0;
};

/// Mean and standard error (sample variance, n - 1) plus median and IQR.
/// Summation runs in index order so results are reproducible bit for bit.
inline SampleStats summarize(std::span<const double> xs) {
  SampleStats s;
  if (xs.empty()) return s;
  if (std::all_of(xs.begin(), xs.end(), [&](double x) { return x == xs.front(); })) {
    s.mean = s.median = xs.front();
    return s;
  }
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.std_error = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  }
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  s.median = quantile(0.5);
  s.interquartile_range = quantile(0.75) - quantile(0.25);
  return s;
}

/// Sum over all disorder outcomes of probability * fn(outcome), for a
/// vector-valued fn of fixed length. Outcomes are evaluated in parallel and
/// reduced in outcome order.
template <class Fn>
std::vector<double> disorder_expectation(const DisorderedHamiltonian& model, std::size_t threads, Fn&& fn) {
  const std::size_t count = model.outcome_count();
  require(count <= kMaxDisorderOutcomes, ErrorKind::capacity,
          "exact disorder enumeration is capped at 2^20 outcomes");
  std::vector<std::vector<double>> per_outcome(count);
  std::vector<double> weights(count);
  parallel_for(count, threads, [&](std::size_t i) {
    auto outcome = model.outcome(i);
    weights[i] = outcome.probability;
    per_outcome[i] = fn(static_cast<const DisorderedHamiltonian::Outcome&>(outcome));
  });
  std::vector<double> total(count ? per_outcome.front().size() : 0, 0.0);
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t k = 0; k < total.size(); ++k) total[k] += weights[i] * per_outcome[i][k];
  return total;
}

/// fn(values, i) for disorder replica i drawn from stream (seed, i).
template <class Fn>
auto disorder_replicas(const DisorderedHamiltonian& model, std::size_t n_samples, std::uint64_t seed,
                       std::size_t threads, Fn&& fn) {
  using Result = decltype(fn(std::vector<double>{}, std::size_t{}));
  std::vector<Result> out(n_samples);
  parallel_for(n_samples, threads, [&](std::size_t i) {
    Philox4x32 rng(seed, i);
    out[i] = fn(model.draw(rng), i);
  });
  return out;
}

/// E[p(beta, J)] by enumerating every disorder outcome.
inline PressureEstimate quenched_exact(const DisorderedHamiltonian& model, double beta, std::size_t threads = 1) {
  const auto mean = disorder_expectation(model, threads, [&](const auto& outcome) {
    return std::vector<double>{log_partition(model.realize(outcome.values), beta).pressure_density};
  });
  return {mean.front(), 0.0, model.outcome_count(), true, 0, std::nullopt, std::nullopt, false};
}

inline PressureEstimate quenched_exact(const CouplingFamily& family, const Region& region, double beta,
                                       std::size_t threads = 1) {
  return quenched_exact(instantiate_disordered(family, region).model, beta, threads);
}

enum class McEstimator { automatic, plain, control_variate };

/// E|J| is finite for every variable and every term uses its variable whole.
inline bool control_variate_available(const DisorderedHamiltonian& model) {
  for (const auto& t : model.terms())
    if (t.part != CouplingPart::whole) return false;
  return std::all_of(model.variables().begin(), model.variables().end(),
                     [](const auto& v) { return moment_p(v, 1.0) < kInfinity; });
}

inline bool infinite_variance(const DisorderedHamiltonian& model) {
  return std::any_of(model.variables().begin(), model.variables().end(),
                     [](const auto& v) { return !(moment_p(v, 2.0) < kInfinity); });
}

/// Monte Carlo estimate of E[p(beta, J)] over i.i.d. disorder replicas.
///
/// With infinite-variance couplings the sample standard error of p is not a
/// usable error bar. The control-variate estimator averages
/// p(J) - c(J), c(J) = (beta/|Lambda|) sum_X lambda_X |J_X|, and adds back
/// E[c]; a single huge coupling moves p and c together, so the residual has
/// finite variance. `automatic` selects it exactly in that case.
inline PressureEstimate quenched_mc(const DisorderedHamiltonian& model, double beta, std::size_t n_samples,
                                    std::uint64_t seed, std::size_t threads = 1,
                                    McEstimator estimator = McEstimator::automatic) {
  require(n_samples >= 2, ErrorKind::precondition, "quenched Monte Carlo needs at least 2 samples");
  require(model.num_sites() <= kMaxSites, ErrorKind::capacity, "exact enumeration supports at most 32 sites");
  if (estimator == McEstimator::automatic)
    estimator = infinite_variance(model) && control_variate_available(model) ? McEstimator::control_variate
                                                                             : McEstimator::plain;
  const bool control = estimator == McEstimator::control_variate;
  require(!control || control_variate_available(model), ErrorKind::precondition,
          "control variate needs untruncated couplings with finite E|J|");
  const double volume = static_cast<double>(model.num_sites());
  const auto control_value = [&](std::span<const double> values) {
    double c = 0.0;
    for (const auto& t : model.terms()) c += t.multiplier * std::abs(values[t.variable]);
    return beta * c / volume;
  };
  double control_mean = 0.0;
  if (control) {
    for (const auto& t : model.terms()) control_mean += t.multiplier * moment_p(model.variables()[t.variable], 1.0);
    control_mean *= beta / volume;
  }

  struct Sample {
    double pressure = 0.0;
    double residual = 0.0;
  };
  const auto samples = disorder_replicas(model, n_samples, seed, threads, [&](const auto& values, std::size_t) {
    const double p = log_partition(model.realize(values), beta).pressure_density;
    return Sample{p, control ? p - control_value(values) : p};
  });
  std::vector<double> pressures(n_samples), residuals(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    pressures[i] = samples[i].pressure;
    residuals[i] = samples[i].residual;
  }
  const auto raw = summarize(pressures);
  const auto fit = summarize(residuals);
  return {fit.mean + control_mean, fit.std_error,          n_samples, false, seed,
          raw.median,              raw.interquartile_range, control};
}

inline PressureEstimate quenched_mc(const CouplingFamily& family, const Region& region, double beta,
                                    std::size_t n_samples, std::uint64_t seed, std::size_t threads = 1,
                                    McEstimator estimator = McEstimator::automatic) {
  return quenched_mc(instantiate_disordered(family, region).model, beta, n_samples, seed, threads, estimator);
}

/// (1/|Lambda|) ln E[Z]. Gaussian terms contribute beta^2 lambda^2 sd^2 / 2
/// each (sigma_X^2 = 1); deterministic terms are summed over sigma exactly.
inline double annealed_pressure_gaussian(const DisorderedHamiltonian& model, double beta) {
  std::vector<int> uses(model.variables().size(), 0);
  for (const auto& t : model.terms()) ++uses[t.variable];
  double gaussian_part = 0.0;
  std::vector<InteractionTerm> fixed;
  for (const auto& t : model.terms()) {
    const auto& law = model.variables()[t.variable];
    require(t.part == CouplingPart::whole, ErrorKind::precondition, "annealed pressure needs untruncated couplings");
    if (const auto* g = std::get_if<Gaussian>(&law)) {
      require(uses[t.variable] == 1, ErrorKind::precondition,
              "annealed closed form needs each gaussian coupling on its own term");
      gaussian_part += 0.5 * beta * beta * t.multiplier * t.multiplier * g->sd * g->sd;
    } else if (const auto* d = std::get_if<Deterministic>(&law)) {
      fixed.push_back({t.subset, t.multiplier, d->value});
    } else {
      fail(ErrorKind::precondition, "annealed pressure is only available for gaussian or deterministic couplings, got " +
                                        kind_name(law));
    }
  }
  const double n = static_cast<double>(model.num_sites());
  if (fixed.empty()) return std::numbers::ln2 + gaussian_part / n;
  const Hamiltonian h(model.shared_region(), std::move(fixed));
  return (log_partition(h, beta).log_partition + gaussian_part) / n;
}

inline double annealed_pressure_gaussian(const CouplingFamily& family, const Region& region, double beta) {
  return annealed_pressure_gaussian(instantiate_disordered(family, region).model, beta);
}

}  // namespace quenchlab
