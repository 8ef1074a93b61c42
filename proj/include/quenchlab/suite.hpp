#pragma once

// Named verification suites over the seeded corpus, and replay of single
// serialized instances.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "inequality_lab.hpp"
#include "io.hpp"
#include "limit_study.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace quenchlab {

struct SuiteOptions {
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::optional<std::size_t> instances;  ///< overrides the per-suite default
  std::optional<std::size_t> samples;    ///< overrides Monte Carlo sample counts
};

namespace detail {

inline constexpr double kBetas[] = {0.2, 1.0, 5.0};

/// Runs make_checks(i, seed_i) for every instance and merges reports in
/// instance order, so the result does not depend on the thread count.
template <class Fn>
CheckSet sweep(std::size_t count, const SuiteOptions& options, Fn&& make_checks) {
  std::vector<CheckSet> parts(count);
  parallel_for(count, options.threads,
               [&](std::size_t i) { parts[i] = make_checks(i, derive_seed(options.seed, i)); });
  CheckSet total;
  for (const auto& part : parts) merge_into(total, part);
  return total;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t points) {
  std::vector<double> out(points);
  for (std::size_t i = 0; i < points; ++i)
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  return out;
}

inline double ferro_chain_pressure(int n, double beta) {
  return (std::numbers::ln2 + (n - 1) * std::log(2.0 * std::cosh(beta))) / n;
}

}  // namespace detail

inline CheckSet suite_scalar(const SuiteOptions&) {
  const auto grid = detail::linspace(-50.0, 50.0, 100001);
  return scalar_toolbox_check(grid);
}

inline CheckSet suite_ratio(const SuiteOptions& o) {
  return detail::sweep(o.instances.value_or(1000), o, [](std::size_t i, std::uint64_t seed) {
    const auto h = corpus::random_gaussian_hamiltonian(seed, {12, 14, 3});
    return ratio_identity_check(h, detail::kBetas[i % 3], seed);
  });
}

inline CheckSet suite_telescoping(const SuiteOptions& o) {
  return detail::sweep(o.instances.value_or(1000), o, [](std::size_t i, std::uint64_t seed) {
    const auto h = corpus::random_gaussian_hamiltonian(seed, {12, 14, 3});
    return telescoping_bound_check(h, detail::kBetas[i % 3], std::nullopt, seed);
  });
}

inline CheckSet suite_corollary(const SuiteOptions& o) {
  return detail::sweep(o.instances.value_or(600), o, [](std::size_t i, std::uint64_t seed) {
    const corpus::Shape shape{8, 10, 3};
    const double beta = detail::kBetas[(i / 3) % 3];
    switch (i % 3) {
      case 0:
        return corollary_bound_check(as_disordered(corpus::random_gaussian_hamiltonian(seed, shape)), beta,
                                     std::nullopt, CorollaryVariant::nonrandom, seed);
      case 1:
        return corollary_bound_check(corpus::random_dependent_model(seed, shape), beta, std::nullopt,
                                     CorollaryVariant::dependent, seed);
      default:
        return corollary_bound_check(corpus::random_rademacher_model(seed, shape, true), beta, std::nullopt,
                                     CorollaryVariant::independent, seed);
    }
  });
}

inline CheckSet suite_cl(const SuiteOptions& o) {
  static constexpr double kClBetas[] = {0.2, 1.0, 2.0};
  const auto grid = detail::linspace(0.0, 2.0, 21);
  return detail::sweep(o.instances.value_or(100), o, [&grid](std::size_t i, std::uint64_t seed) {
    const auto model = corpus::random_rademacher_model(seed, {8, 10, 3});
    Philox4x32 rng(seed, 1);
    std::vector<std::size_t> scaled;
    for (std::size_t t = 0; t < model.size(); ++t)
      if (rng.uniform() < 0.4) scaled.push_back(t);
    if (scaled.empty()) scaled.push_back(rng() % model.size());
    return cl_monotonicity_check(model, scaled, kClBetas[i % 3], grid, seed);
  });
}

inline CheckSet suite_griffiths(const SuiteOptions& o) {
  static constexpr double kGriffithsBetas[] = {0.2, 1.0, 2.0};
  const auto grid = detail::linspace(0.0, 2.0, 9);
  return detail::sweep(o.instances.value_or(200), o, [&grid](std::size_t i, std::uint64_t seed) {
    const auto h = corpus::random_nonnegative_hamiltonian(seed, {10, 12, 3});
    Philox4x32 rng(seed, 1);
    return griffiths_check(h, kGriffithsBetas[i % 3], rng() % h.size(), grid, seed);
  });
}

/// Closed-form ferromagnetic chain, the decomposition inequality for every
/// (N, N1) with N <= 16, and its quenched form on exact rademacher chains.
inline CheckSet suite_superadditivity(const SuiteOptions& o) {
  static constexpr double kSuperBetas[] = {0.5, 1.0, 2.0};
  const auto ferro = nearest_neighbour_family(1, Deterministic{1.0});
  const auto rademacher = nearest_neighbour_family(1, Rademacher{});
  CheckSet total;

  auto closed = make_report("ferro_closed_form", 1e-12);
  closed.instances_run = 0;
  for (double beta : kSuperBetas) {
    for (int n = 1; n <= 20; ++n) {
      const double p = log_partition(instantiate(ferro, Region::box(1, n), 0), beta).pressure_density;
      ++closed.instances_run;
      closed.record(std::abs(p - detail::ferro_chain_pressure(n, beta)), static_cast<std::uint64_t>(n), [&] {
        return json{{"check", "ferro_closed_form"}, {"beta", beta}, {"N", n}};
      });
    }
  }
  total.push_back(closed);

  struct Case {
    const CouplingFamily* family;
    int n, n1;
    double beta;
  };
  std::vector<Case> cases;
  for (double beta : {0.5, 1.0})
    for (int n = 1; n <= 16; ++n)
      for (int n1 = 1; n1 <= n; ++n1) cases.push_back({&ferro, n, n1, beta});
  for (double beta : {0.5, 1.0})
    for (int n = 1; n <= 8; ++n)
      for (int n1 = 1; n1 <= n; ++n1) cases.push_back({&rademacher, n, n1, beta});
  SuiteOptions inner = o;
  merge_into(total, detail::sweep(cases.size(), inner, [&](std::size_t i, std::uint64_t seed) {
    const auto& c = cases[i];
    return superadditivity_check(*c.family, c.n, c.n1, c.beta, DisorderMode::exact, 0, seed);
  }));
  return total;
}

/// Pareto(1.5, 1) nearest-neighbour chain of six sites at beta = 1.
inline TruncationStudy pareto_truncation_study(const SuiteOptions& o) {
  const auto family = nearest_neighbour_family(1, SymmetricPareto{1.5, 1.0});
  const double cutoffs[] = {1.0, 3.0, 10.0, 30.0, 100.0};
  return truncation_error_check(family, Region::box(1, 6), 1.0, cutoffs, o.samples.value_or(10000), o.seed,
                                o.threads);
}

inline CheckSet suite_truncation(const SuiteOptions& o) {
  auto study = pareto_truncation_study(o);
  // every one of the 5 bonds has E|J^(2)| = 3 R^(-1/2)
  auto closed = make_report("truncation_closed_form", 1e-12);
  closed.record(-kInfinity, o.seed, {});
  for (const auto& row : study.rows) {
    const double expected = 2.0 * 1.0 * 5.0 / 6.0 * 3.0 / std::sqrt(row.cutoff);
    closed.record(std::abs(row.bound - expected), o.seed, [&] {
      return json{{"check", "truncation_closed_form"}, {"cutoff", row.cutoff}, {"bound", row.bound}};
    });
  }
  study.reports.push_back(closed);
  return study.reports;
}

inline CheckSet suite_oracle(const SuiteOptions& o) {
  const std::size_t samples = o.samples.value_or(4000);
  return detail::sweep(o.instances.value_or(50), o, [samples](std::size_t i, std::uint64_t seed) {
    const auto model = corpus::random_rademacher_model(seed, {8, 10, 3});
    return oracle_agreement_check(model, detail::kBetas[i % 3], samples, seed);
  });
}

inline CheckSet suite_annealed(const SuiteOptions& o) {
  const std::size_t samples = o.samples.value_or(4000);
  return detail::sweep(o.instances.value_or(20), o, [samples](std::size_t i, std::uint64_t seed) {
    const auto model = corpus::random_gaussian_model(seed, {8, 10, 3});
    return annealed_domination_check(model, detail::kBetas[i % 3], samples, seed);
  });
}

/// The reference families with unit norms: ferro ||J|| = 1, gaussian
/// ||J||_2^2 = 1, pareto(1.5) ||J||_1 = 3.
inline std::vector<std::pair<std::string, CouplingFamily>> reference_families() {
  return {{"ferro", nearest_neighbour_family(1, Deterministic{1.0})},
          {"gaussian", nearest_neighbour_family(1, Gaussian{1.0})},
          {"pareto", nearest_neighbour_family(1, SymmetricPareto{1.5, 1.0})}};
}

/// Every computed p_N (plus 5 standard errors) stays below the applicable
/// limit bound.
inline CheckSet limit_bound_check(const CouplingFamily& family, double beta, const std::vector<int>& sides,
                                  std::size_t samples, std::uint64_t seed, std::size_t threads) {
  const auto mode = family.deterministic() ? ConvergenceMode::ferro_exact : ConvergenceMode::quenched_mc;
  const auto table = convergence_run(family, mode, beta, sides, samples, seed, threads);
  auto report = make_report("limit_bound", 0.0);
  report.details = {{"beta", beta}, {"bound", bound_name(table.bound_kind)}, {"value", table.claimed_limit_bound}};
  for (const auto& row : table.rows) {
    report.record(row.pressure + kSigmas * row.std_error - row.bound, seed, [&] {
      return json{{"check", "limit"}, {"beta", beta}, {"sides", sides}, {"samples", samples}, {"seed", seed},
                  {"family", family_to_json(family)}};
    });
  }
  return {report};
}

inline CheckSet suite_limit(const SuiteOptions& o) {
  const std::vector<int> sides = {2, 4, 6, 8, 10, 12};
  CheckSet total;
  for (const auto& [name, family] : reference_families())
    for (double beta : {0.5, 1.0})
      merge_into(total, limit_bound_check(family, beta, sides, o.samples.value_or(10000), o.seed, o.threads));
  return total;
}

struct SuiteEntry {
  std::string name;
  std::function<CheckSet(const SuiteOptions&)> run;
};

inline const std::vector<SuiteEntry>& suites() {
  static const std::vector<SuiteEntry> all = {
      {"scalar", suite_scalar},       {"ratio", suite_ratio},
      {"telescoping", suite_telescoping}, {"corollary", suite_corollary},
      {"cl", suite_cl},               {"griffiths", suite_griffiths},
      {"superadditivity", suite_superadditivity}, {"truncation", suite_truncation},
      {"oracle", suite_oracle},       {"annealed", suite_annealed},
      {"limit", suite_limit},
  };
  return all;
}

inline const SuiteEntry& find_suite(const std::string& name) {
  for (const auto& s : suites())
    if (s.name == name) return s;
  fail(ErrorKind::config, "unknown check '" + name + "'");
}

// ---------------------------------------------------------------------------
// Replay of a serialized instance, the format written into worst_instance.

inline CheckSet run_instance(const json& j, std::size_t threads = 1) {
  const std::string where = "instance";
  const auto check = detail::field<std::string>(j, "check", where);
  const auto beta = [&] { return detail::field<double>(j, "beta", where); };
  const auto prefix = [&]() -> std::optional<std::size_t> {
    if (!j.contains("n") || j.at("n").is_string()) return std::nullopt;
    return detail::field<std::size_t>(j, "n", where);
  };
  const auto seed = detail::field_or<std::uint64_t>(j, "seed", 0, where);
  const auto samples = [&] { return detail::field<std::size_t>(j, "samples", where); };
  const auto hamiltonian = [&] { return hamiltonian_from_json(detail::field<json>(j, "hamiltonian", where)); };
  const auto model = [&] { return disordered_from_json(detail::field<json>(j, "model", where)); };
  const auto family = [&] { return family_from_json(detail::field<json>(j, "family", where)); };
  const auto grid = [&](const char* key) { return detail::field<std::vector<double>>(j, key, where); };

  if (check == "scalar") return scalar_toolbox_check(grid("grid"));
  if (check == "ratio") return ratio_identity_check(hamiltonian(), beta(), seed);
  if (check == "telescoping") return telescoping_bound_check(hamiltonian(), beta(), prefix(), seed);
  if (check == "corollary") {
    const auto v = detail::field<std::string>(j, "variant", where);
    const auto variant = v == "nonrandom"   ? CorollaryVariant::nonrandom
                         : v == "dependent" ? CorollaryVariant::dependent
                         : v == "independent"
                             ? CorollaryVariant::independent
                             : (fail(ErrorKind::config, "unknown corollary variant '" + v + "'"), CorollaryVariant{});
    return corollary_bound_check(model(), beta(), prefix(), variant, seed, threads);
  }
  if (check == "cl") {
    const auto scaled = detail::field<std::vector<std::size_t>>(j, "scaled_terms", where);
    return cl_monotonicity_check(model(), scaled, beta(), grid("lambda_grid"), seed, threads);
  }
  if (check == "griffiths")
    return griffiths_check(hamiltonian(), beta(), detail::field<std::size_t>(j, "term_index", where), grid("j_grid"),
                           seed);
  if (check == "superadditivity") {
    const auto mode = detail::field_or<std::string>(j, "mode", "exact", where) == "mc" ? DisorderMode::mc
                                                                                       : DisorderMode::exact;
    return superadditivity_check(family(), detail::field<int>(j, "N", where), detail::field<int>(j, "N1", where),
                                 beta(), mode, detail::field_or<std::size_t>(j, "samples", 10000, where), seed,
                                 threads);
  }
  if (check == "truncation")
    return truncation_error_check(model(), beta(), grid("cutoffs"), samples(), seed, threads).reports;
  if (check == "oracle") return oracle_agreement_check(model(), beta(), samples(), seed, threads);
  if (check == "annealed") return annealed_domination_check(model(), beta(), samples(), seed, threads);
  if (check == "limit")
    return limit_bound_check(family(), beta(), detail::field<std::vector<int>>(j, "sides", where), samples(), seed,
                             threads);
  fail(ErrorKind::config, "unknown instance check '" + check + "'");
}

}  // namespace quenchlab
