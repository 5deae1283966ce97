#pragma once

// JSON encodings of the library's value types and of job inputs.  Every number is
// exact: machine integers as JSON integers, big integers as decimal strings.

#include <nlohmann/json.hpp>

#include "epsilon0/k1_congruence.hpp"

namespace epsilon0 {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Encoders

inline json to_json(const CycloModulus& m) { return json::array({m.l, m.alpha, m.p, m.beta, m.m}); }

/// {"modulus": [l, alpha, p, beta, m], "den_exp": k, "terms": [[i, j, k, "num"], ...], "text": ...}
/// encodes l^{-den_exp} sum num zeta_{l^alpha}^i zeta_{p^beta}^j zeta_m^k.
inline json to_json(const CycloElem& x) {
  json terms = json::array();
  x.for_each_term([&](i64 i, i64 j, i64 k, const mpz_class& c) {
    if (c != 0) terms.push_back(json::array({i, j, k, c.get_str()}));
  });
  return json{{"modulus", to_json(x.modulus())}, {"den_exp", x.den_exp()}, {"terms", terms}, {"text", x.to_string()}};
}

inline json to_json(const FinAbGroup& g) { return json(g.moduli()); }

inline json to_json(const GroupRingElem& x) {
  json terms = json::array();
  for (const auto& [k, c] : x.terms()) terms.push_back(json{{"g", x.group().element(k)}, {"coeff", to_json(c)}});
  return json{{"group", to_json(x.group())}, {"terms", terms}, {"text", x.to_string()}};
}

inline json to_json(const GaloisRingPtr& r) {
  return json{{"l", r->l()}, {"d", r->d()}, {"a", r->a()}, {"defining_polynomial", r->defining_polynomial()}};
}

inline json to_json(const GaloisRingElem& u) { return json(u.c); }

inline json to_json(const RecDatum& d) {
  json gens = json::array();
  for (std::size_t k = 0; k < d.units->generators().size(); ++k) {
    gens.push_back(json{{"unit", to_json(d.units->generators()[k])},
                        {"order", d.units->orders()[k]},
                        {"image", d.unit_images[k]}});
  }
  return json{{"field", to_json(d.ring)}, {"target", to_json(d.target)}, {"unit_map", gens}, {"pi_image", d.pi_image}};
}

inline json to_json(const UnitCertificate& c) {
  json j{{"certified", c.certified}, {"method", c.method}, {"character_norms", c.norms}};
  if (c.scaled_inverse) {
    j["scaled_inverse"] = to_json(*c.scaled_inverse);
    j["scale"] = c.scale.get_str();
  }
  return j;
}

inline json to_json(const LawReport& r) {
  return json{{"law", r.law}, {"passed", r.passed}, {"checked", r.checked}, {"informational", r.informational},
              {"counterexample", r.counterexample}};
}

inline json to_json(const CoherenceReport& r) {
  return json{{"check", r.name}, {"level", r.level}, {"passed", r.passed}, {"checked", r.checked},
              {"counterexample", r.counterexample}};
}

inline json to_json(const ConditionResult& r) {
  return json{{"condition", r.condition}, {"i", r.i}, {"j", r.j}, {"passed", r.passed}, {"witness", r.witness}};
}

inline json to_json(const TowerSpec& s) {
  return json{{"l", s.l}, {"d0", s.d0}, {"p", s.p}, {"s", s.s}, {"n", s.n}, {"e", s.e}, {"m_delta", s.m_delta}};
}

inline json to_json(const EpsilonResult& e) {
  return json{{"element", to_json(e.element)},
              {"augmentation", to_json(e.element.augmentation())},
              {"lambda_sign", e.lambda_sign},
              {"certificate", to_json(e.certificate)}};
}

// ---------------------------------------------------------------------------
// Decoders for job inputs

namespace detail {

template <class T>
T require(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ValidationError(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(where + ": field '" + key + "' has the wrong type");
  }
}

template <class T>
T optional_field(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace detail

inline TowerSpec tower_spec_from_json(const json& j) {
  TowerSpec s;
  s.l = detail::require<i64>(j, "l", "tower");
  s.d0 = detail::require<int>(j, "d0", "tower");
  s.p = detail::require<i64>(j, "p", "tower");
  s.s = detail::require<int>(j, "s", "tower");
  s.n = detail::require<int>(j, "n", "tower");
  s.e = detail::require<i64>(j, "e", "tower");
  s.m_delta = detail::optional_field<i64>(j, "m_delta", 1);
  return s;
}

inline LocalFieldParams field_from_json(const json& j) {
  LocalFieldParams f;
  f.l = detail::require<i64>(j, "l", "field");
  f.d = detail::optional_field<int>(j, "d", 1);
  f.a = detail::optional_field<int>(j, "a", 1);
  if (!nt::is_prime(f.l)) throw ValidationError("field: l must be prime");
  if (f.d < 1 || f.a < 1) throw ValidationError("field: d and a must be >= 1");
  return f;
}

/// {"level": n, "twist": [coefficients]}; the twist is optional.
inline AdditiveCharSpec psi_from_json(const json& j, const GaloisRingPtr& ring) {
  AdditiveCharSpec psi{detail::optional_field<int>(j, "level", 0), std::nullopt};
  if (j.contains("twist")) psi.unit_twist = ring->from_coeffs(detail::require<std::vector<i64>>(j, "twist", "psi"));
  return psi;
}

/// {"field": {...}, "datum": {"kind": "full-units" | "synthetic" | "explicit", ...}}
inline RecDatum datum_from_json(const json& j, std::uint64_t seed, i64 cap) {
  const auto params = field_from_json(detail::require<json>(j, "field", "input"));
  const json dj = j.contains("datum") ? j.at("datum") : json{{"kind", "full-units"}};
  const auto kind = detail::optional_field<std::string>(dj, "kind", "full-units");
  if (kind == "full-units") return full_unit_datum(params, detail::optional_field<i64>(dj, "unramified_order", 1), cap);
  if (kind == "synthetic") {
    const FinAbGroup target(detail::require<Vec>(dj, "target", "datum"));
    return synthetic_rec(params, target, detail::optional_field<std::uint64_t>(dj, "seed", seed), cap);
  }
  if (kind == "explicit") {
    auto ring = GaloisRing::make(params);
    auto units = detail::make_units(ring, std::nullopt, cap);
    RecDatum d{ring, units, FinAbGroup(detail::require<Vec>(dj, "target", "datum")),
               detail::require<std::vector<Vec>>(dj, "unit_images", "datum"), detail::require<Vec>(dj, "pi_image", "datum")};
    d.validate();
    return d;
  }
  throw ValidationError("datum: unknown kind '" + kind + "'");
}

}  // namespace epsilon0
