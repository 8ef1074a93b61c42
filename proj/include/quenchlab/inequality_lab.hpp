#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "disordered.hpp"
#include "engine.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "lattice.hpp"
#include "limit_study.hpp"
#include "quenched.hpp"

namespace quenchlab {

/// Outcome of one named inequality over one or more instances.
/// max_violation > 0 means the inequality failed by that much.
struct CheckReport {
  std::string name;
  double tolerance = 0.0;
  std::size_t instances_run = 0;
  double max_violation = -kInfinity;
  std::uint64_t worst_instance_seed = 0;
  json worst_instance;
  json details;
  bool passed = true;

  void record(double violation, std::uint64_t seed, const std::function<json()>& describe) {
    if (std::isnan(violation)) violation = kInfinity;
    if (violation > max_violation) {
      max_violation = violation;
      worst_instance_seed = seed;
      worst_instance = describe ? describe() : json();
    }
    passed = max_violation <= tolerance;
  }

  void merge(const CheckReport& other) {
    instances_run += other.instances_run;
    if (other.max_violation > max_violation) {
      max_violation = other.max_violation;
      worst_instance_seed = other.worst_instance_seed;
      worst_instance = other.worst_instance;
    }
    passed = max_violation <= tolerance;
  }
};

using CheckSet = std::vector<CheckReport>;

inline CheckReport make_report(std::string name, double tolerance) {
  CheckReport r;
  r.name = std::move(name);
  r.tolerance = tolerance;
  r.instances_run = 1;
  return r;
}

/// Merges reports by name, keeping first-seen order.
inline void merge_into(CheckSet& total, const CheckSet& part) {
  for (const auto& report : part) {
    auto it = std::find_if(total.begin(), total.end(), [&](const auto& r) { return r.name == report.name; });
    if (it == total.end()) total.push_back(report);
    else it->merge(report);
  }
}

inline bool all_passed(const CheckSet& set) {
  return std::all_of(set.begin(), set.end(), [](const auto& r) { return r.passed; });
}

inline json report_to_json(const CheckReport& r) {
  json j{{"name", r.name},
         {"instances_run", r.instances_run},
         {"max_violation", std::isfinite(r.max_violation) ? json(r.max_violation) : json(nullptr)},
         {"tolerance", r.tolerance},
         {"worst_instance_seed", r.worst_instance_seed},
         {"passed", r.passed}};
  if (!r.details.is_null()) j["details"] = r.details;
  return j;
}

// Pure-enumeration inequalities, finite differences, and the agreement of an
// analytic derivative with its finite difference.
inline constexpr double kEnumerationTolerance = 1e-10;
inline constexpr double kDerivativeTolerance = 1e-8;
inline constexpr double kAgreementTolerance = 1e-6;
inline constexpr double kRatioTolerance = 1e-12;
inline constexpr double kQuadratureTolerance = 1e-9;
inline constexpr double kSigmas = 5.0;
/// Floating-point slack for Monte Carlo comparisons whose standard error can
/// be exactly zero.
inline constexpr double kStatisticalSlack = 1e-12;

// ---------------------------------------------------------------------------
// Scalar inequalities used to bound ln cosh and tanh.

/// int_lo^hi tanh^2 by 20-point Gauss-Legendre on pieces of length <= 1/4;
/// tanh^2 is analytic within pi/2 of the real axis, so this is exact to
/// rounding without adaptivity.
inline double integral_tanh_squared(double lo, double hi) {
  using boost::math::quadrature::gauss;
  const auto f = [](double y) {
    const double t = std::tanh(y);
    return t * t;
  };
  const auto pieces = static_cast<std::size_t>(std::ceil((hi - lo) / 0.25));
  double sum = 0.0;
  for (std::size_t k = 0; k < pieces; ++k) {
    const double a = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(pieces);
    const double b = lo + (hi - lo) * static_cast<double>(k + 1) / static_cast<double>(pieces);
    sum += gauss<double, 20>::integrate(f, a, b);
  }
  return sum;
}

/// int_0^|x| tanh^2 for every grid point, as a running sum of quadratures
/// between consecutive sorted |x| (compensated summation).
inline std::vector<double> integral_tanh_squared(std::span<const double> grid) {
  std::vector<std::size_t> order(grid.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return std::abs(grid[a]) < std::abs(grid[b]); });
  std::vector<double> out(grid.size());
  double sum = 0.0, carry = 0.0, at = 0.0;
  for (auto i : order) {
    const double a = std::abs(grid[i]);
    const double piece = integral_tanh_squared(at, a) - carry;
    const double next = sum + piece;
    carry = (next - sum) - piece;
    sum = next;
    at = a;
    out[i] = sum;
  }
  return out;
}

/// Checks, pointwise on the grid:
///   ln cosh x <= x^2/2,  ln cosh x <= |x|,  |tanh x| <= |x|,
///   |x - tanh x| <= |x| tanh^2 x <= min(|x|,|x|^3) <= x^2,
///   and for p in [1,2]: ln cosh x, min(|x|,|x|^3), min(|x|,x^2) <= |x|^p;
/// plus |x - tanh x| = int_0^|x| tanh^2 by quadrature.
inline CheckSet scalar_toolbox_check(std::span<const double> grid) {
  auto ineq = make_report("scalar_inequalities", kEnumerationTolerance);
  auto integral = make_report("scalar_integral_identity", kQuadratureTolerance);
  ineq.instances_run = integral.instances_run = grid.size();
  constexpr double kOrders[] = {1.0, 1.25, 1.5, 1.75, 2.0};
  for (double x : grid) require(std::isfinite(x), ErrorKind::precondition, "scalar grid must be finite");
  const auto integrals = integral_tanh_squared(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    const double a = std::abs(x);
    const double lc = log_cosh(x);
    const double t = std::tanh(x);
    const double gap = std::abs(x - t);
    const double cubic_env = a * t * t;
    const double min13 = std::min(a, a * a * a);
    const double min12 = std::min(a, a * a);
    const double chain[] = {lc - 0.5 * x * x, lc - a,         std::abs(t) - a,
                            gap - cubic_env,  cubic_env - min13, min13 - x * x};
    double worst = -kInfinity;
    for (double v : chain) worst = std::max(worst, v);
    for (double p : kOrders) {
      const double env = std::pow(a, p);
      worst = std::max({worst, lc - env, min13 - env, min12 - env});
    }
    const auto describe = [x] { return json{{"check", "scalar"}, {"grid", json::array({x})}}; };
    ineq.record(worst, i, describe);
    integral.record(std::abs(gap - integrals[i]), i, describe);
  }
  return {ineq, integral};
}

// ---------------------------------------------------------------------------
// Exact prefix chains: ln Z of every prefix and the next term's correlation.

struct PrefixProfile {
  std::vector<double> log_z;         ///< ln Z(prefix k), k = 0..N
  std::vector<Correlation> next;     ///< <sigma_{X_k}> under prefix k, k = 0..N-1
};

inline PrefixProfile prefix_profile(const Hamiltonian& h, double beta) {
  PrefixProfile profile;
  for (std::size_t k = 0; k <= h.size(); ++k) {
    std::vector<Subset> obs;
    if (k < h.size()) obs.push_back(h[k].subset);
    const auto eval = evaluate(h.prefix(k), beta, obs);
    profile.log_z.push_back(eval.summary.log_partition);
    if (k < h.size()) profile.next.push_back(eval.correlations.front());
  }
  return profile;
}

/// exp(ln Z_{n+1} - ln Z_n) against cosh(x)[1 + tanh(x)<sigma_X>] for every n,
/// as a relative error.
inline CheckSet ratio_identity_check(const Hamiltonian& h, double beta, std::uint64_t seed = 0) {
  auto report = make_report("ratio_identity", kRatioTolerance);
  const auto profile = prefix_profile(h, beta);
  const auto describe = [&] { return json{{"check", "ratio"}, {"beta", beta}, {"hamiltonian", hamiltonian_to_json(h)}}; };
  report.record(-kInfinity, seed, describe);
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double quotient = profile.log_z[k + 1] - profile.log_z[k];
    const double closed = log_ratio_closed_form(beta * h[k].effective(), profile.next[k]);
    report.record(std::abs(std::expm1(quotient - closed)), seed, describe);
  }
  return {report};
}

/// p(full) - p(prefix n) <= (1/|Lambda|) sum_{k>n} [ln cosh(beta J_k) + tanh(beta J_k) <sigma_{X_k}>_{k-1}]
/// for the given n, or for every n when n is empty. Also checks that the
/// slack equals the sum of per-step gaps  stated_k - ln(ratio_k) >= 0.
inline CheckSet telescoping_bound_check(const Hamiltonian& h, double beta, std::optional<std::size_t> n = std::nullopt,
                                        std::uint64_t seed = 0) {
  require(!n || *n <= h.size(), ErrorKind::precondition, "prefix index exceeds term count");
  auto bound = make_report("telescoping_bound", kEnumerationTolerance);
  auto decomposition = make_report("telescoping_decomposition", kEnumerationTolerance);
  const auto describe = [&] {
    return json{{"check", "telescoping"}, {"beta", beta}, {"n", n ? json(*n) : json("all")}, {"hamiltonian", hamiltonian_to_json(h)}};
  };
  const auto profile = prefix_profile(h, beta);
  const double volume = static_cast<double>(h.num_sites());
  const std::size_t total = h.size();
  std::vector<double> stated(total), gap(total);
  for (std::size_t k = 0; k < total; ++k) {
    const double x = beta * h[k].effective();
    stated[k] = log_cosh(x) + std::tanh(x) * profile.next[k].expectation();
    gap[k] = stated[k] - log_ratio_closed_form(x, profile.next[k]);
    decomposition.record(-gap[k], seed, describe);
  }
  const std::size_t first = n ? *n : 0;
  const std::size_t last = n ? *n : total;
  for (std::size_t m = first; m <= last; ++m) {
    const double lhs = (profile.log_z[total] - profile.log_z[m]) / volume;
    double rhs = 0.0, gaps = 0.0;
    for (std::size_t k = m; k < total; ++k) {
      rhs += stated[k];
      gaps += gap[k];
    }
    rhs /= volume;
    gaps /= volume;
    bound.record(lhs - rhs, seed, describe);
    decomposition.record(std::abs((rhs - lhs) - gaps), seed, describe);
  }
  return {bound, decomposition};
}

// ---------------------------------------------------------------------------
// The three one-sided pressure bounds: fixed couplings, dependent random
// couplings, independent random couplings.

enum class CorollaryVariant { nonrandom, dependent, independent };

inline std::string variant_name(CorollaryVariant v) {
  switch (v) {
    case CorollaryVariant::nonrandom: return "nonrandom";
    case CorollaryVariant::dependent: return "dependent";
    default: return "independent";
  }
}

inline CheckSet corollary_bound_check(const DisorderedHamiltonian& model, double beta, std::optional<std::size_t> n,
                                      CorollaryVariant variant, std::uint64_t seed = 0, std::size_t threads = 1) {
  const std::size_t total = model.size();
  require(!n || *n <= total, ErrorKind::precondition, "prefix index exceeds term count");
  switch (variant) {
    case CorollaryVariant::nonrandom:
      require(model.deterministic(), ErrorKind::precondition, "nonrandom bound needs deterministic couplings");
      break;
    case CorollaryVariant::independent:
      require(model.independent_terms(), ErrorKind::precondition,
              "independent bound needs one untruncated variable per term");
      [[fallthrough]];
    case CorollaryVariant::dependent:
      require(model.finitely_supported(), ErrorKind::precondition,
              "exact expectations need finitely supported couplings");
      break;
  }
  auto report = make_report("corollary_" + variant_name(variant), kEnumerationTolerance);
  const auto describe = [&] {
    return json{{"check", "corollary"}, {"variant", variant_name(variant)}, {"beta", beta}, {"n", n ? json(*n) : json("all")},
                {"model", disordered_to_json(model)}};
  };

  // layout: p_0..p_N, E ln cosh, E |tanh|, E tanh per term
  const auto moments = disorder_expectation(model, threads, [&](const auto& outcome) {
    const auto h = model.realize(outcome.values);
    std::vector<double> row;
    row.reserve(total + 1 + 3 * total);
    for (std::size_t k = 0; k <= total; ++k) row.push_back(log_partition(h.prefix(k), beta).pressure_density);
    for (std::size_t k = 0; k < total; ++k) row.push_back(log_cosh(beta * h[k].effective()));
    for (std::size_t k = 0; k < total; ++k) row.push_back(std::abs(std::tanh(beta * h[k].effective())));
    for (std::size_t k = 0; k < total; ++k) row.push_back(std::tanh(beta * h[k].effective()));
    return row;
  });
  const auto pressure = [&](std::size_t k) { return moments[k]; };
  const auto mean_log_cosh = [&](std::size_t k) { return moments[total + 1 + k]; };
  const auto mean_abs_tanh = [&](std::size_t k) { return moments[total + 1 + total + k]; };
  const auto mean_tanh = [&](std::size_t k) { return moments[total + 1 + 2 * total + k]; };

  const double volume = static_cast<double>(model.num_sites());
  const std::size_t first = n ? *n : 0;
  const std::size_t last = n ? *n : total;
  report.record(-kInfinity, seed, describe);
  for (std::size_t m = first; m <= last; ++m) {
    double rhs = 0.0;
    for (std::size_t k = m; k < total; ++k) {
      rhs += mean_log_cosh(k) +
             (variant == CorollaryVariant::independent ? std::abs(mean_tanh(k)) : mean_abs_tanh(k));
    }
    report.record(pressure(total) - pressure(m) - rhs / volume, seed, describe);
  }
  return {report};
}

// ---------------------------------------------------------------------------
// Monotonicity of the quenched pressure in the multipliers lambda_X.

struct QuenchedDerivative {
  double pressure = 0.0;
  double derivative = 0.0;  ///< (beta/|Lambda|) sum_t E[J_t <sigma_{X_t}>]
};

inline QuenchedDerivative quenched_with_derivative(const DisorderedHamiltonian& model,
                                                   std::span<const std::size_t> scaled, double beta,
                                                   std::size_t threads) {
  std::vector<Subset> obs;
  for (auto t : scaled) obs.push_back(model.terms()[t].subset);
  const double volume = static_cast<double>(model.num_sites());
  const auto m = disorder_expectation(model, threads, [&](const auto& outcome) {
    const auto eval = evaluate(model.realize(outcome.values), beta, obs);
    double d = 0.0;
    for (std::size_t k = 0; k < scaled.size(); ++k)
      d += model.terms()[scaled[k]].coupling(outcome.values) * eval.correlations[k].expectation();
    return std::vector<double>{eval.summary.pressure_density, beta * d / volume};
  });
  return {m[0], m[1]};
}

inline CheckSet cl_monotonicity_check(const DisorderedHamiltonian& model, std::span<const std::size_t> scaled,
                                      double beta, std::span<const double> lambda_grid, std::uint64_t seed = 0,
                                      std::size_t threads = 1) {
  require(model.finitely_supported(), ErrorKind::precondition, "CL check needs finitely supported disorder");
  require(model.independent_terms(), ErrorKind::precondition, "CL check needs independent couplings");
  require(!scaled.empty(), ErrorKind::precondition, "CL check needs at least one scaled term");
  for (auto t : scaled) {
    require(t < model.size(), ErrorKind::precondition, "scaled term index out of range");
    const auto& law = model.variables()[model.terms()[t].variable];
    require(is_random(law) && is_centered(law), ErrorKind::precondition, "scaled terms must carry centered random couplings");
  }
  require(lambda_grid.size() >= 2, ErrorKind::precondition, "lambda grid needs at least two points");
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    require(lambda_grid[i] >= 0.0, ErrorKind::precondition, "lambda grid must be nonnegative");
    require(i == 0 || lambda_grid[i] > lambda_grid[i - 1], ErrorKind::precondition, "lambda grid must increase");
  }

  auto monotone = make_report("cl_monotone", kEnumerationTolerance);
  auto sign = make_report("cl_derivative_sign", kDerivativeTolerance);
  auto agreement = make_report("cl_derivative_agreement", kAgreementTolerance);
  const auto describe = [&] {
    return json{{"check", "cl"},
                {"beta", beta},
                {"scaled_terms", std::vector<std::size_t>(scaled.begin(), scaled.end())},
                {"lambda_grid", std::vector<double>(lambda_grid.begin(), lambda_grid.end())},
                {"model", disordered_to_json(model)}};
  };
  const auto at = [&](double lambda) {
    return quenched_with_derivative(model.with_multiplier(scaled, lambda), scaled, beta, threads);
  };

  std::vector<QuenchedDerivative> values;
  for (double lambda : lambda_grid) values.push_back(at(lambda));
  for (std::size_t i = 0; i + 1 < values.size(); ++i)
    monotone.record(values[i].pressure - values[i + 1].pressure, seed, describe);

  sign.record(-kInfinity, seed, describe);
  agreement.record(-kInfinity, seed, describe);
  for (std::size_t i = 1; i + 1 < lambda_grid.size(); ++i) {
    const double lambda = lambda_grid[i];
    const double step = std::min(1e-4 * std::max(1.0, lambda), lambda);
    const double fd = (at(lambda + step).pressure - at(lambda - step).pressure) / (2.0 * step);
    sign.record(-fd, seed, describe);
    agreement.record(std::abs(fd - values[i].derivative), seed, describe);
  }
  return {monotone, sign, agreement};
}

inline CheckSet cl_monotonicity_check(const CouplingFamily& family, const Region& region, double beta,
                                      std::size_t orbit_index, std::span<const double> lambda_grid,
                                      std::uint64_t seed = 0, std::size_t threads = 1) {
  require(orbit_index < family.orbits().size(), ErrorKind::precondition, "orbit index out of range");
  const auto instance = instantiate_disordered(family, region);
  const auto scaled = instance.terms_of_orbit(orbit_index);
  return cl_monotonicity_check(instance.model, scaled, beta, lambda_grid, seed, threads);
}

// ---------------------------------------------------------------------------
// First Griffiths inequality on ferromagnets.

inline CheckSet griffiths_check(const Hamiltonian& h, double beta, std::size_t term_index,
                                std::span<const double> j_grid, std::uint64_t seed = 0) {
  require(term_index < h.size(), ErrorKind::precondition, "term index out of range");
  for (const auto& t : h.terms())
    require(t.effective() >= 0.0, ErrorKind::precondition, "Griffiths check needs nonnegative couplings");
  for (std::size_t i = 0; i < j_grid.size(); ++i) {
    require(j_grid[i] >= 0.0, ErrorKind::precondition, "coupling grid must be nonnegative");
    require(i == 0 || j_grid[i] > j_grid[i - 1], ErrorKind::precondition, "coupling grid must increase");
  }
  auto monotone = make_report("griffiths_monotone", kEnumerationTolerance);
  auto derivative = make_report("griffiths_derivative", kEnumerationTolerance);
  auto correlation = make_report("griffiths_correlation", 1e-12);
  const auto describe = [&] {
    return json{{"check", "griffiths"},
                {"beta", beta},
                {"term_index", term_index},
                {"j_grid", std::vector<double>(j_grid.begin(), j_grid.end())},
                {"hamiltonian", hamiltonian_to_json(h)}};
  };
  std::vector<Subset> obs;
  for (const auto& t : h.terms()) obs.push_back(t.subset);
  const auto pressure = [&](double j) { return log_partition(h.with_coupling(term_index, j), beta).pressure_density; };

  monotone.record(-kInfinity, seed, describe);
  std::optional<double> previous;
  for (double j : j_grid) {
    const auto eval = evaluate(h.with_coupling(term_index, j), beta, obs);
    for (const auto& c : eval.correlations) correlation.record(-c.expectation(), seed, describe);
    if (previous) monotone.record(*previous - eval.summary.pressure_density, seed, describe);
    previous = eval.summary.pressure_density;
    const double step = 1e-4 * std::max(1.0, j);
    const double fd = j >= step ? (pressure(j + step) - pressure(j - step)) / (2.0 * step)
                                : (pressure(j + step) - eval.summary.pressure_density) / step;
    derivative.record(-fd, seed, describe);
  }
  return {monotone, derivative, correlation};
}

// ---------------------------------------------------------------------------
// Super-additivity over the decomposition of [1,N]^d into translates of [1,N1]^d:
//   p_N >= (m N1)^d / N^d p_N1 + (1 - (m N1)^d / N^d) ln 2.

enum class DisorderMode { exact, mc };

inline CheckSet superadditivity_check(const CouplingFamily& family, int n, int n1, double beta, DisorderMode mode,
                                      std::size_t samples = 10000, std::uint64_t seed = 0, std::size_t threads = 1) {
  const auto dec = box_decompose(n, n1, family.dimension());
  const auto conv_mode = family.deterministic() ? ConvergenceMode::ferro_exact
                         : mode == DisorderMode::exact ? ConvergenceMode::quenched_exact
                                                       : ConvergenceMode::quenched_mc;
  const auto big = box_pressure(family, n, beta, conv_mode, samples, seed, threads);
  const auto small = box_pressure(family, n1, beta, conv_mode, samples, seed, threads);
  const double rhs = dec.volume_fraction * small.mean + (1.0 - dec.volume_fraction) * std::numbers::ln2;
  const double sigma = std::hypot(big.std_error, dec.volume_fraction * small.std_error);
  auto report = make_report("superadditivity", kEnumerationTolerance);
  report.details = {{"N", n}, {"N1", n1}, {"m", dec.m}, {"r", dec.r}, {"volume_fraction", dec.volume_fraction},
                    {"p_N", big.mean}, {"p_N1", small.mean}, {"rhs", rhs}};
  report.record(rhs - big.mean - kSigmas * sigma, seed, [&] {
    return json{{"check", "superadditivity"}, {"beta", beta}, {"N", n}, {"N1", n1},
                {"mode", mode == DisorderMode::exact ? "exact" : "mc"}, {"samples", samples}, {"seed", seed},
                {"family", family_to_json(family)}};
  });
  return {report};
}

// ---------------------------------------------------------------------------
// Centered truncation of heavy-tailed couplings: with common random numbers,
//   p(J) - p(J^(1)) <= (2 beta/|Lambda|) sum_X lambda_X E|J_X^(2)|.

struct TruncationRow {
  double cutoff = 0.0;
  double tail_abs_mean = 0.0;  ///< mean over terms of lambda E|J^(2)|
  double difference = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
};

struct TruncationStudy {
  std::vector<TruncationRow> rows;
  CheckSet reports;
};

inline TruncationStudy truncation_error_check(const DisorderedHamiltonian& model, double beta,
                                              std::span<const double> cutoffs, std::size_t n_samples,
                                              std::uint64_t seed, std::size_t threads = 1) {
  for (const auto& v : model.variables())
    require(is_centered(v) || !is_random(v), ErrorKind::precondition,
            "truncation study needs E|J| < infinity (pareto alpha > 1), got " + kind_name(v));
  for (const auto& t : model.terms())
    require(t.part == CouplingPart::whole, ErrorKind::precondition, "truncation study needs untruncated couplings");
  require(!cutoffs.empty(), ErrorKind::precondition, "cutoff grid must be nonempty");
  for (std::size_t i = 0; i < cutoffs.size(); ++i)
    require(cutoffs[i] > 0.0 && (i == 0 || cutoffs[i] > cutoffs[i - 1]), ErrorKind::precondition,
            "cutoff grid must be positive and increasing");
  require(n_samples >= 2, ErrorKind::precondition, "truncation study needs at least 2 samples");

  std::vector<std::vector<TruncatedPair>> pairs(cutoffs.size());
  for (std::size_t r = 0; r < cutoffs.size(); ++r)
    for (const auto& v : model.variables()) pairs[r].push_back(truncate(v, cutoffs[r]));

  // Residuals p(J) - p(J^(1)) - c_R(J) with the control variate
  // c_R(J) = (beta/|Lambda|) sum_X lambda_X |J_X^(2)|, whose mean is known in
  // closed form. The residual is <= 0 pathwise and, unlike the raw
  // difference, has finite variance for heavy-tailed couplings.
  const double volume = static_cast<double>(model.num_sites());
  const auto residuals = disorder_replicas(model, n_samples, seed, threads, [&](const auto& values, std::size_t) {
    const double full = log_partition(model.realize(values), beta).pressure_density;
    std::vector<double> out;
    std::vector<double> bounded(values.size());
    for (std::size_t r = 0; r < cutoffs.size(); ++r) {
      for (std::size_t v = 0; v < values.size(); ++v) bounded[v] = pairs[r][v].split(values[v]).bounded;
      double control = 0.0;
      for (const auto& t : model.terms()) control += t.multiplier * std::abs(values[t.variable] - bounded[t.variable]);
      out.push_back(full - log_partition(model.realize(bounded), beta).pressure_density - beta * control / volume);
    }
    return out;
  });

  TruncationStudy study;
  auto bound_report = make_report("truncation_bound", kEnumerationTolerance);
  auto decay_report = make_report("truncation_bound_decay", kEnumerationTolerance);
  const auto describe = [&] {
    return json{{"check", "truncation"},
                {"beta", beta},
                {"cutoffs", std::vector<double>(cutoffs.begin(), cutoffs.end())},
                {"samples", n_samples},
                {"seed", seed},
                {"model", disordered_to_json(model)}};
  };
  std::vector<double> column(n_samples);
  for (std::size_t r = 0; r < cutoffs.size(); ++r) {
    double tail_sum = 0.0;
    for (const auto& t : model.terms()) tail_sum += t.multiplier * pairs[r][t.variable].tail_abs_mean();
    for (std::size_t i = 0; i < n_samples; ++i) column[i] = residuals[i][r];
    const auto stats = summarize(column);
    TruncationRow row;
    row.cutoff = cutoffs[r];
    row.tail_abs_mean = model.size() ? tail_sum / static_cast<double>(model.size()) : 0.0;
    row.difference = stats.mean + beta * tail_sum / volume;
    row.std_error = stats.std_error;
    row.bound = 2.0 * beta * tail_sum / volume;
    bound_report.record(row.difference - row.bound - kSigmas * row.std_error, seed, describe);
    study.rows.push_back(row);
  }
  decay_report.record(-kInfinity, seed, describe);
  for (std::size_t r = 0; r + 1 < study.rows.size(); ++r)
    decay_report.record(study.rows[r + 1].bound - study.rows[r].bound, seed, describe);
  const double first = study.rows.front().bound;
  const double last = study.rows.back().bound;
  if (study.rows.size() > 1 && first > 0.0 && !(last < first)) decay_report.record(kInfinity, seed, describe);
  study.reports = {bound_report, decay_report};
  return study;
}

inline TruncationStudy truncation_error_check(const CouplingFamily& family, const Region& region, double beta,
                                              std::span<const double> cutoffs, std::size_t n_samples,
                                              std::uint64_t seed, std::size_t threads = 1) {
  return truncation_error_check(instantiate_disordered(family, region).model, beta, cutoffs, n_samples, seed, threads);
}

// ---------------------------------------------------------------------------
// Estimator cross-checks.

/// Monte Carlo quenched pressure within 5 standard errors of the exact one.
inline CheckSet oracle_agreement_check(const DisorderedHamiltonian& model, double beta, std::size_t n_samples,
                                       std::uint64_t seed, std::size_t threads = 1) {
  const auto exact = quenched_exact(model, beta, threads);
  const auto mc = quenched_mc(model, beta, n_samples, seed, threads);
  auto report = make_report("oracle_agreement", kStatisticalSlack);
  report.details = {{"exact", exact.mean}, {"mc", mc.mean}, {"std_error", mc.std_error}};
  report.record(std::abs(mc.mean - exact.mean) - kSigmas * mc.std_error, seed, [&] {
    return json{{"check", "oracle"}, {"beta", beta}, {"samples", n_samples}, {"seed", seed}, {"model", disordered_to_json(model)}};
  });
  return {report};
}

/// Quenched <= annealed (Jensen) up to 5 standard errors.
inline CheckSet annealed_domination_check(const DisorderedHamiltonian& model, double beta, std::size_t n_samples,
                                          std::uint64_t seed, std::size_t threads = 1) {
  const double annealed = annealed_pressure_gaussian(model, beta);
  const auto mc = quenched_mc(model, beta, n_samples, seed, threads);
  auto report = make_report("annealed_domination", kStatisticalSlack);
  report.details = {{"annealed", annealed}, {"quenched", mc.mean}, {"std_error", mc.std_error}};
  report.record(mc.mean - annealed - kSigmas * mc.std_error, seed, [&] {
    return json{{"check", "annealed"}, {"beta", beta}, {"samples", n_samples}, {"seed", seed}, {"model", disordered_to_json(model)}};
  });
  return {report};
}

}  // namespace quenchlab
