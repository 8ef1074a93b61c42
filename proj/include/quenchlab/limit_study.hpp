#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "disorder.hpp"
#include "disordered.hpp"
#include "engine.hpp"
#include "errors.hpp"
#include "lattice.hpp"
#include "quenched.hpp"
#include "rng.hpp"

namespace quenchlab {

// ---------------------------------------------------------------------------
// Box decomposition: [1,N]^d contains m^d disjoint translates of [1,N1]^d.

struct BoxDecomposition {
  int m = 0;
  int r = 0;
  double volume_fraction = 0.0;  ///< (m N1)^d / N^d
};

/// m = floor(N / N1), so that N - m N1 <= N1 - 1.
inline BoxDecomposition box_decompose(int n, int n1, int dimension) {
  require(n1 >= 1 && n1 <= n && dimension >= 1, ErrorKind::precondition, "box_decompose needs 1 <= N1 <= N, d >= 1");
  BoxDecomposition out;
  out.m = n / n1;
  out.r = n - out.m * n1;
  out.volume_fraction = std::pow(static_cast<double>(out.m * n1) / static_cast<double>(n), dimension);
  return out;
}

// ---------------------------------------------------------------------------
// Translation-invariant norms.

enum class NormKind { ferro, l1, l2sq, lp };

inline std::string norm_name(NormKind kind) {
  switch (kind) {
    case NormKind::ferro: return "ferro";
    case NormKind::l1: return "l1";
    case NormKind::l2sq: return "l2sq";
    default: return "lp";
  }
}

struct NormReport {
  NormKind kind = NormKind::l1;
  double p = 1.0;
  double value = 0.0;
  /// (orbit index, contribution). A representative X containing the origin
  /// has exactly |X| translates that contain the origin, each weighted by
  /// 1/|X|, so an orbit contributes E|J_X|^p.
  std::vector<std::pair<std::size_t, double>> contributions;
};

inline double norm_order(NormKind kind, double p) {
  switch (kind) {
    case NormKind::l2sq: return 2.0;
    case NormKind::lp: return p;
    default: return 1.0;
  }
}

/// ||J|| (ferro, sum of J_X / |X|), ||J||_1, ||J||_2^2 or ||J||_p^p.
/// The ferro norm of a random orbit is taken as E|J_X|.
inline NormReport norm(const CouplingFamily& family, NormKind kind, double p = 1.0) {
  NormReport report{kind, norm_order(kind, p), 0.0, {}};
  for (std::size_t o = 0; o < family.orbits().size(); ++o) {
    const auto& orbit = family.orbits()[o];
    double c = moment_p(orbit.distribution, report.p) * std::pow(orbit.multiplier, report.p);
    if (kind == NormKind::ferro) {
      if (const auto* d = std::get_if<Deterministic>(&orbit.distribution)) c = orbit.multiplier * d->value;
    }
    report.contributions.emplace_back(o, c);
    report.value += c;
  }
  return report;
}

/// Direct double count (1/|Lambda|) sum_{X in Lambda} E|lambda J_X|^p over the
/// translates that fit in a box; never exceeds the norm.
inline double box_moment_density(const CouplingFamily& family, const Region& box, double p) {
  const auto instance = instantiate_disordered(family, box);
  double sum = 0.0;
  for (const auto& t : instance.model.terms())
    sum += moment_p(instance.model.variables()[t.variable], p) * std::pow(t.multiplier, p);
  return sum / static_cast<double>(box.size());
}

// ---------------------------------------------------------------------------
// Upper bounds on the limiting pressure.

enum class BoundKind { ferro, l1, l2sq, combined, lp, automatic };

inline std::string bound_name(BoundKind kind) {
  switch (kind) {
    case BoundKind::ferro: return "ferro";
    case BoundKind::l1: return "l1";
    case BoundKind::l2sq: return "l2sq";
    case BoundKind::combined: return "combined";
    case BoundKind::lp: return "lp";
    default: return "auto";
  }
}

struct BoundValue {
  BoundKind kind = BoundKind::automatic;
  double value = 0.0;
  std::optional<std::string> warning;  ///< set when the bound does not apply
};

/// Constant in p(beta) <= ln 2 + C beta^p ||J||_p^p. The envelopes
/// ln cosh x <= |x|^p and |x - tanh x| <= min(|x|,|x|^3) <= |x|^p give C = 2;
/// 3 is the documented (looser) choice.
inline constexpr double kLpBoundConstant = 3.0;

/// ferro when every orbit is deterministic, l2sq when every orbit has finite
/// variance, l1 otherwise.
inline BoundKind applicable_bound(const CouplingFamily& family) {
  if (family.deterministic()) return BoundKind::ferro;
  if (norm(family, NormKind::l2sq).value < kInfinity) return BoundKind::l2sq;
  return BoundKind::l1;
}

inline BoundValue bound_value(const CouplingFamily& family, double beta, BoundKind kind, double p = 1.5) {
  require(std::isfinite(beta) && beta >= 0.0, ErrorKind::validation, "beta must be finite and >= 0");
  if (kind == BoundKind::automatic) kind = applicable_bound(family);
  const auto needs_centered = [&](const char* what) {
    for (const auto& o : family.orbits())
      require(is_centered(o.distribution), ErrorKind::precondition,
              std::string(what) + " bound needs centered couplings on every orbit");
  };
  BoundValue out{kind, std::numbers::ln2, std::nullopt};
  if (beta == 0.0) return out;
  double extra = 0.0;
  switch (kind) {
    case BoundKind::ferro:
      extra = 2.0 * beta * norm(family, NormKind::ferro).value;
      break;
    case BoundKind::l1:
      extra = 2.0 * beta * norm(family, NormKind::l1).value;
      break;
    case BoundKind::l2sq:
      needs_centered("l2sq");
      extra = 1.5 * beta * beta * norm(family, NormKind::l2sq).value;
      break;
    case BoundKind::lp:
      needs_centered("lp");
      require(p >= 1.0 && p <= 2.0, ErrorKind::precondition, "lp bound needs 1 <= p <= 2");
      extra = kLpBoundConstant * std::pow(beta, p) * norm(family, NormKind::lp, p).value;
      break;
    case BoundKind::combined:
      // per orbit, the better of the finite-variance and finite-mean controls
      for (const auto& o : family.orbits()) {
        const double l1 = 2.0 * beta * o.multiplier * moment_p(o.distribution, 1.0);
        const double l2 = is_centered(o.distribution)
                              ? 1.5 * beta * beta * o.multiplier * o.multiplier * moment_p(o.distribution, 2.0)
                              : kInfinity;
        extra += std::min(l1, l2);
      }
      break;
    default:
      break;
  }
  out.value += extra;
  if (!std::isfinite(out.value)) out.warning = bound_name(kind) + " norm is infinite; the corresponding bound does not apply";
  return out;
}

// ---------------------------------------------------------------------------
// Convergence runs p_N, N in a list of box sides.

enum class ConvergenceMode { ferro_exact, quenched_exact, quenched_mc };

struct ConvergenceRow {
  int n = 0;
  double pressure = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
  bool exact = true;
};

struct ConvergenceTable {
  double beta = 0.0;
  BoundKind bound_kind = BoundKind::automatic;
  std::vector<ConvergenceRow> rows;
  double claimed_limit_bound = 0.0;
  double sup_pressure = 0.0;
  std::optional<std::string> bound_warning;
  /// Sub-box comparisons p_N vs p_N1 (N1 | N) that fall short of the
  /// decomposition inequality by more than 5 combined standard errors.
  std::vector<std::string> flags;
};

inline PressureEstimate box_pressure(const CouplingFamily& family, int side, double beta, ConvergenceMode mode,
                                     std::size_t samples, std::uint64_t seed, std::size_t threads) {
  const auto region = Region::box(family.dimension(), side);
  switch (mode) {
    case ConvergenceMode::ferro_exact: {
      require(family.deterministic(), ErrorKind::precondition, "ferro_exact mode needs a deterministic family");
      const auto summary = log_partition(instantiate(family, region, seed), beta);
      return {summary.pressure_density, 0.0, 1, true, seed, std::nullopt, std::nullopt, false};
    }
    case ConvergenceMode::quenched_exact:
      return quenched_exact(family, region, beta, threads);
    default:
      return quenched_mc(family, region, beta, samples, derive_seed(seed, static_cast<std::uint64_t>(side)), threads);
  }
}

inline ConvergenceTable convergence_run(const CouplingFamily& family, ConvergenceMode mode, double beta,
                                        const std::vector<int>& sides, std::size_t samples, std::uint64_t seed,
                                        std::size_t threads = 1, BoundKind bound_kind = BoundKind::automatic) {
  std::vector<int> sorted = sides;
  std::sort(sorted.begin(), sorted.end());
  require(!sorted.empty() && sorted.front() >= 1, ErrorKind::precondition, "N list must hold positive sides");
  for (int side : sorted) {
    double volume = std::pow(static_cast<double>(side), family.dimension());
    require(volume <= static_cast<double>(kMaxSites), ErrorKind::capacity,
            "box side " + std::to_string(side) + " exceeds the 32-site engine capacity");
  }
  const auto bound = bound_value(family, beta, bound_kind);
  ConvergenceTable table;
  table.beta = beta;
  table.bound_kind = bound.kind;
  table.claimed_limit_bound = bound.value;
  table.bound_warning = bound.warning;
  table.sup_pressure = -kInfinity;
  for (int side : sorted) {
    const auto est = box_pressure(family, side, beta, mode, samples, seed, threads);
    table.rows.push_back({side, est.mean, est.std_error, bound.value, est.exact});
    table.sup_pressure = std::max(table.sup_pressure, est.mean);
  }
  for (const auto& big : table.rows) {
    for (const auto& small : table.rows) {
      if (small.n >= big.n || big.n % small.n != 0) continue;
      const auto dec = box_decompose(big.n, small.n, family.dimension());
      const double rhs = dec.volume_fraction * small.pressure + (1.0 - dec.volume_fraction) * std::numbers::ln2;
      const double sigma = std::hypot(big.std_error, dec.volume_fraction * small.std_error);
      if (big.pressure < rhs - 5.0 * sigma - 1e-10)
        table.flags.push_back("p_" + std::to_string(big.n) + " below sub-box bound from p_" + std::to_string(small.n));
    }
  }
  return table;
}

}  // namespace quenchlab
