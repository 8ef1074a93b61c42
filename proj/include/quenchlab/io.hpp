#pragma once

// JSON encodings of models and results. Field names are the config-file
// schema documented in README.md.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "disorder.hpp"
#include "disordered.hpp"
#include "errors.hpp"
#include "lattice.hpp"
#include "quenched.hpp"

namespace quenchlab {

using json = nlohmann::json;

namespace detail {

template <class T>
T field(const json& j, const char* key, const std::string& where) {
  require(j.is_object() && j.contains(key), ErrorKind::config, where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::config, where + ": bad field '" + key + "': " + e.what());
  }
}

template <class T>
T field_or(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return field<T>(j, key, where);
}

}  // namespace detail

inline json distribution_to_json(const Distribution& dist) {
  json j{{"kind", kind_name(dist)}};
  std::visit(
      [&j](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Deterministic>) j["value"] = d.value;
        else if constexpr (std::is_same_v<T, Gaussian>) j["sd"] = d.sd;
        else if constexpr (std::is_same_v<T, Uniform>) j["half_width"] = d.half_width;
        else if constexpr (std::is_same_v<T, SymmetricPareto>) {
          j["alpha"] = d.alpha;
          j["scale"] = d.scale;
        }
      },
      dist);
  return j;
}

inline Distribution distribution_from_json(const json& j) {
  const std::string where = "distribution";
  const auto kind = detail::field<std::string>(j, "kind", where);
  Distribution dist;
  if (kind == "deterministic") dist = Deterministic{detail::field<double>(j, "value", where)};
  else if (kind == "rademacher") dist = Rademacher{};
  else if (kind == "gaussian") dist = Gaussian{detail::field_or<double>(j, "sd", 1.0, where)};
  else if (kind == "uniform") dist = Uniform{detail::field<double>(j, "half_width", where)};
  else if (kind == "symmetric_pareto")
    dist = SymmetricPareto{detail::field<double>(j, "alpha", where), detail::field_or<double>(j, "scale", 1.0, where)};
  else fail(ErrorKind::config, "unknown distribution kind '" + kind + "'");
  try {
    validate(dist);
  } catch (const Error& e) {
    fail(ErrorKind::config, e.what());
  }
  return dist;
}

inline json family_to_json(const CouplingFamily& family) {
  json orbits = json::array();
  for (const auto& o : family.orbits())
    orbits.push_back({{"sites", o.representative},
                      {"distribution", distribution_to_json(o.distribution)},
                      {"lambda", o.multiplier}});
  return {{"dimension", family.dimension()}, {"orbits", orbits}};
}

inline CouplingFamily family_from_json(const json& j) {
  const std::string where = "model";
  const int dimension = detail::field<int>(j, "dimension", where);
  const auto orbits_json = detail::field<json>(j, "orbits", where);
  require(orbits_json.is_array(), ErrorKind::config, "model.orbits must be an array");
  std::vector<Orbit> orbits;
  for (const auto& o : orbits_json) {
    Orbit orbit;
    orbit.representative = detail::field<std::vector<Site>>(o, "sites", "orbit");
    orbit.distribution = distribution_from_json(detail::field<json>(o, "distribution", "orbit"));
    orbit.multiplier = detail::field_or<double>(o, "lambda", 1.0, "orbit");
    orbits.push_back(std::move(orbit));
  }
  try {
    return CouplingFamily(dimension, std::move(orbits));
  } catch (const Error& e) {
    fail(ErrorKind::config, std::string("model: ") + e.what());
  }
}

inline std::vector<int> subset_sites(Subset s) {
  std::vector<int> out;
  for (; s; s &= s - 1) out.push_back(std::countr_zero(s));
  return out;
}

inline Subset subset_from_sites(const std::vector<int>& sites) {
  Subset s = 0;
  for (int i : sites) {
    require(i >= 0 && i < static_cast<int>(kMaxSites), ErrorKind::config, "site index out of range");
    s |= Subset{1} << i;
  }
  return s;
}

inline json region_to_json(const Region& region) {
  json j{{"dimension", region.dimension()}};
  if (region.box_side()) j["box_side"] = *region.box_side();
  else j["sites"] = region.sites();
  return j;
}

inline Region region_from_json(const json& j) {
  const std::string where = "region";
  const int dimension = detail::field_or<int>(j, "dimension", 1, where);
  if (j.contains("box_side")) return Region::box(dimension, detail::field<int>(j, "box_side", where));
  return Region(dimension, detail::field<std::vector<Site>>(j, "sites", where));
}

inline json hamiltonian_to_json(const Hamiltonian& h) {
  json terms = json::array();
  for (const auto& t : h.terms())
    terms.push_back({{"sites", subset_sites(t.subset)}, {"lambda", t.multiplier}, {"coupling", t.coupling}});
  return {{"region", region_to_json(h.region())}, {"terms", terms}};
}

inline Hamiltonian hamiltonian_from_json(const json& j) {
  std::vector<InteractionTerm> terms;
  for (const auto& t : detail::field<json>(j, "terms", "hamiltonian"))
    terms.push_back({subset_from_sites(detail::field<std::vector<int>>(t, "sites", "term")),
                     detail::field_or<double>(t, "lambda", 1.0, "term"), detail::field<double>(t, "coupling", "term")});
  return Hamiltonian(region_from_json(detail::field<json>(j, "region", "hamiltonian")), std::move(terms));
}

inline const char* part_name(CouplingPart part) {
  switch (part) {
    case CouplingPart::bounded: return "bounded";
    case CouplingPart::tail: return "tail";
    default: return "whole";
  }
}

inline json disordered_to_json(const DisorderedHamiltonian& model) {
  json variables = json::array();
  for (const auto& v : model.variables()) variables.push_back(distribution_to_json(v));
  json terms = json::array();
  for (const auto& t : model.terms()) {
    json term{{"sites", subset_sites(t.subset)}, {"lambda", t.multiplier}, {"variable", t.variable}};
    if (t.part != CouplingPart::whole) {
      term["part"] = part_name(t.part);
      term["cutoff"] = t.cutoff;
      term["centering"] = t.centering;
    }
    terms.push_back(std::move(term));
  }
  return {{"region", region_to_json(model.region())}, {"variables", variables}, {"terms", terms}};
}

inline DisorderedHamiltonian disordered_from_json(const json& j) {
  std::vector<Distribution> variables;
  for (const auto& v : detail::field<json>(j, "variables", "model")) variables.push_back(distribution_from_json(v));
  std::vector<DisorderedTerm> terms;
  for (const auto& t : detail::field<json>(j, "terms", "model")) {
    DisorderedTerm term{subset_from_sites(detail::field<std::vector<int>>(t, "sites", "term")),
                        detail::field_or<double>(t, "lambda", 1.0, "term"),
                        detail::field<std::size_t>(t, "variable", "term")};
    const auto part = detail::field_or<std::string>(t, "part", "whole", "term");
    require(part == "whole" || part == "bounded" || part == "tail", ErrorKind::config,
            "term: unknown part '" + part + "'");
    term.part = part == "bounded" ? CouplingPart::bounded : part == "tail" ? CouplingPart::tail : CouplingPart::whole;
    term.cutoff = detail::field_or<double>(t, "cutoff", 0.0, "term");
    term.centering = detail::field_or<double>(t, "centering", 0.0, "term");
    terms.push_back(term);
  }
  return DisorderedHamiltonian(region_from_json(detail::field<json>(j, "region", "model")), std::move(variables),
                               std::move(terms));
}

inline json estimate_to_json(const PressureEstimate& e) {
  json j{{"mean", e.mean}, {"std_error", e.std_error}, {"n_samples", e.n_samples}, {"exact", e.exact}, {"seed", e.seed}};
  if (!e.exact) j["estimator"] = e.control_variate ? "control_variate" : "plain";
  if (e.median) j["median"] = *e.median;
  if (e.interquartile_range) j["interquartile_range"] = *e.interquartile_range;
  return j;
}

/// 64-bit FNV-1a over the canonical serialization of a config document.
inline std::uint64_t content_hash(const json& j) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[i] = digits[v & 0xf];
  return s;
}

}  // namespace quenchlab
