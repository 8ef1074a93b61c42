#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"

namespace quenchlab {

// Scalar coupling laws. Every random kind is sign-symmetric, hence centered
// whenever its mean exists.

struct Deterministic {
  double value = 0.0;
};
struct Rademacher {};
struct Gaussian {
  double sd = 1.0;
};
struct Uniform {
  double half_width = 1.0;
};
/// Density proportional to |x|^(-alpha-1) on |x| >= scale, random sign.
struct SymmetricPareto {
  double alpha = 2.0;
  double scale = 1.0;
};

using Distribution = std::variant<Deterministic, Rademacher, Gaussian, Uniform, SymmetricPareto>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

inline std::string kind_name(const Distribution& dist) {
  return std::visit(
      [](const auto& d) -> std::string {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Deterministic>) return "deterministic";
        else if constexpr (std::is_same_v<T, Rademacher>) return "rademacher";
        else if constexpr (std::is_same_v<T, Gaussian>) return "gaussian";
        else if constexpr (std::is_same_v<T, Uniform>) return "uniform";
        else return "symmetric_pareto";
      },
      dist);
}

inline void validate(const Distribution& dist) {
  std::visit(
      [](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Deterministic>) {
          require(std::isfinite(d.value), ErrorKind::validation, "deterministic coupling must be finite");
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          require(std::isfinite(d.sd) && d.sd > 0, ErrorKind::validation, "gaussian sd must be > 0");
        } else if constexpr (std::is_same_v<T, Uniform>) {
          require(std::isfinite(d.half_width) && d.half_width > 0, ErrorKind::validation,
                  "uniform half_width must be > 0");
        } else if constexpr (std::is_same_v<T, SymmetricPareto>) {
          require(std::isfinite(d.alpha) && d.alpha > 0, ErrorKind::validation, "pareto alpha must be > 0");
          require(std::isfinite(d.scale) && d.scale > 0, ErrorKind::validation, "pareto scale must be > 0");
        }
      },
      dist);
}

inline bool is_random(const Distribution& dist) {
  return !std::holds_alternative<Deterministic>(dist);
}

/// E[J] = 0 and E|J| < infinity.
inline bool is_centered(const Distribution& dist) {
  if (const auto* d = std::get_if<Deterministic>(&dist)) return d->value == 0.0;
  if (const auto* d = std::get_if<SymmetricPareto>(&dist)) return d->alpha > 1.0;
  return true;
}

/// Draws one value. The number of raw words consumed depends on the kind but
/// never on the values drawn.
inline double sample(const Distribution& dist, Philox4x32& rng) {
  return std::visit(
      [&rng](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Deterministic>) {
          return d.value;
        } else if constexpr (std::is_same_v<T, Rademacher>) {
          return (rng() >> 63) ? 1.0 : -1.0;
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          const double radius = std::sqrt(-2.0 * std::log(rng.uniform_open_zero()));
          return d.sd * radius * std::cos(2.0 * std::numbers::pi * rng.uniform());
        } else if constexpr (std::is_same_v<T, Uniform>) {
          return d.half_width * (2.0 * rng.uniform() - 1.0);
        } else {
          const std::uint64_t word = rng();
          const double u = static_cast<double>((word & ((1ull << 53) - 1)) + 1) * 0x1.0p-53;
          const double magnitude = d.scale * std::pow(u, -1.0 / d.alpha);
          return (word >> 63) ? magnitude : -magnitude;
        }
      },
      dist);
}

/// E[|J|^p] in closed form; +infinity when the moment diverges.
inline double moment_p(const Distribution& dist, double p) {
  require(p >= 1.0 && p <= 2.0, ErrorKind::precondition, "moment order p must lie in [1, 2]");
  return std::visit(
      [p](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Deterministic>) {
          return std::pow(std::abs(d.value), p);
        } else if constexpr (std::is_same_v<T, Rademacher>) {
          return 1.0;
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          return std::pow(d.sd, p) * std::pow(2.0, p / 2) * std::tgamma((p + 1) / 2) /
                 std::sqrt(std::numbers::pi);
        } else if constexpr (std::is_same_v<T, Uniform>) {
          return std::pow(d.half_width, p) / (p + 1);
        } else {
          if (p >= d.alpha) return kInfinity;
          return d.alpha * std::pow(d.scale, p) / (d.alpha - p);
        }
      },
      dist);
}

struct Atom {
  double value;
  double probability;
};

/// Atoms of a finitely supported law; nullopt for continuous kinds.
inline std::optional<std::vector<Atom>> finite_support(const Distribution& dist) {
  if (const auto* d = std::get_if<Deterministic>(&dist)) return std::vector<Atom>{{d->value, 1.0}};
  if (std::holds_alternative<Rademacher>(dist)) return std::vector<Atom>{{-1.0, 0.5}, {1.0, 0.5}};
  return std::nullopt;
}

/// Splits J into a centered bounded part and a remainder:
///   bounded = J 1{|J| <= R} - E[J 1{|J| <= R}],   tail = J - bounded.
struct TruncatedPair {
  double cutoff = 1.0;
  double centering = 0.0;
  Distribution base;

  struct Parts {
    double bounded;
    double tail;
  };

  Parts split(double j) const {
    const double bounded = (std::abs(j) <= cutoff ? j : 0.0) - centering;
    return {bounded, j - bounded};
  }

  /// E|J^(2)|, closed form.
  double tail_abs_mean() const {
    const double r = cutoff;
    return std::visit(
        [r](const auto& d) -> double {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, Deterministic>) {
            // bounded part is identically zero, the remainder is the constant
            return std::abs(d.value);
          } else if constexpr (std::is_same_v<T, Rademacher>) {
            return r >= 1.0 ? 0.0 : 1.0;
          } else if constexpr (std::is_same_v<T, Gaussian>) {
            const double z = r / d.sd;
            return d.sd * std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * z * z);
          } else if constexpr (std::is_same_v<T, Uniform>) {
            if (r >= d.half_width) return 0.0;
            return (d.half_width * d.half_width - r * r) / (2.0 * d.half_width);
          } else {
            if (d.alpha <= 1.0) return kInfinity;
            if (r < d.scale) return d.alpha * d.scale / (d.alpha - 1.0);
            return d.alpha * std::pow(d.scale, d.alpha) * std::pow(r, 1.0 - d.alpha) / (d.alpha - 1.0);
          }
        },
        base);
  }
};

inline TruncatedPair truncate(const Distribution& dist, double cutoff) {
  require(cutoff > 0 && !std::isnan(cutoff), ErrorKind::precondition, "truncation cutoff R must be > 0");
  validate(dist);
  double centering = 0.0;
  if (const auto* d = std::get_if<Deterministic>(&dist)) {
    centering = std::abs(d->value) <= cutoff ? d->value : 0.0;
  }
  return TruncatedPair{cutoff, centering, dist};
}

}  // namespace quenchlab
