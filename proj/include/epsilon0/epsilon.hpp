#pragma once

// Gauss sums and the abelian epsilon element
//   eps0 = sum_{i=0}^{a-1} l^{d(n-i)} sum_{u in (O/pi^a)^x} psi(u / c_{a-i}) [rec(c_{a-i} u^{-1})],
//   c_{a-i} = pi^{a-i+n} (times an optional unit part),
// in J[A] for a reciprocity datum onto A, with the checks relating it to the
// closed forms for characters.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "epsilon0/additive_char.hpp"
#include "epsilon0/group_ring.hpp"
#include "epsilon0/reciprocity.hpp"

namespace epsilon0 {

/// Coefficient modulus for data over l with coefficient prime p, containing zeta_order.
inline CycloModulus coefficient_modulus(i64 l, i64 p, i64 order = 1) { return CycloModulus::for_order(l, p, order); }

namespace detail {

inline CycloElem lpow_elem(const CycloModulus& m, i64 exponent) {
  return exponent >= 0 ? CycloElem::from_integer(m, detail::mpz_pow(m.l, static_cast<unsigned>(exponent)))
                       : CycloElem::from_lpow_rational(m, 1, static_cast<int>(-exponent));
}

inline i64 chi_exponent_numerator(const Character& chi, const Vec& g) { return chi.value_numerator(g); }

}  // namespace detail

/// Smallest b >= 0 such that the unit map kills 1 + pi^b (b = 0: kills all units).
inline int datum_conductor(const RecDatum& d) {
  bool unramified = true;
  for (const auto& img : d.unit_images) unramified = unramified && d.target.is_zero(img);
  if (unramified) return 0;
  for (int t = 1; t <= d.level(); ++t) {
    bool ok = true;
    for (std::size_t j = 1; j < d.unit_images.size() && ok; ++j) {
      ok = d.target.is_zero(d.target.scale(d.unit_images[j], nt::ipow(d.params().l, static_cast<unsigned>(t - 1))));
    }
    if (ok) return t;
  }
  throw MathCheckError("datum_conductor: unit map does not factor through level a");
}

/// -chi(pi^{n+1}) l^{dn} for chi trivial on units.
inline CycloElem eps_unramified(const RecDatum& d, const Character& chi, const AdditiveCharSpec& psi, i64 p) {
  if (d.conductor(chi) != 0) throw ValidationError("eps_unramified: character is ramified");
  const i64 E = d.target.exponent();
  const auto m = coefficient_modulus(d.params().l, p, E);
  CycloElem v = CycloElem::root(m, E, nt::mulmod(chi.value_numerator(d.pi_image), nt::mod(psi.level + 1, E), E));
  v *= detail::lpow_elem(m, static_cast<i64>(d.params().d) * psi.level);
  return -v;
}

/// l^{dn} sum_{u mod pi^{a(chi)}} chi^{-1}(rec(u c^{-1})) psi(u c^{-1}), v(c) = n + a(chi).
inline CycloElem gauss_sum(const RecDatum& d, const Character& chi, const AdditiveCharSpec& psi, i64 p,
                           const std::optional<GaloisRingElem>& c_unit = std::nullopt,
                           i64 cap = kDefaultEnumerationCap) {
  const int ac = d.conductor(chi);
  if (ac == 0) throw ValidationError("gauss_sum: character is unramified; use eps_unramified");
  const auto& R = d.ring;
  const i64 E = d.target.exponent();
  const i64 lt = nt::ipow(d.params().l, static_cast<unsigned>(ac));
  const auto m = coefficient_modulus(d.params().l, p, nt::lcm(E, lt));
  const GaloisRingElem w = c_unit ? R->from_coeffs(c_unit->c) : R->one();
  if (!R->is_unit(w)) throw ValidationError("gauss_sum: unit part of c is not a unit");
  const GaloisRingElem w_inv = R->inverse(w);
  const i64 v_c = psi.level + ac;
  // tally[chi exponent][psi exponent]
  std::vector<std::vector<i64>> tally(static_cast<std::size_t>(E), std::vector<i64>(static_cast<std::size_t>(lt), 0));
  const GaloisRingElem twist = psi.twist(R);
  R->for_each_unit(
      ac,
      [&](const GaloisRingElem& u) {
        const auto x = R->mul(u, w_inv);  // u c^{-1} = x pi^{-v_c}
        const Vec r = d.rec(x, -v_c);
        const i64 ce = nt::mod(-chi.value_numerator(r), E);
        const i64 pe = nt::mod(R->trace(R->mul(twist, x)), lt);
        ++tally[static_cast<std::size_t>(ce)][static_cast<std::size_t>(pe)];
      },
      cap);
  std::vector<std::pair<std::vector<CycloElem::RootTerm>, mpz_class>> terms;
  for (i64 ce = 0; ce < E; ++ce) {
    for (i64 pe = 0; pe < lt; ++pe) {
      const i64 cnt = tally[static_cast<std::size_t>(ce)][static_cast<std::size_t>(pe)];
      if (cnt != 0) terms.push_back({{{E, ce}, {lt, pe}}, mpz_class(static_cast<long>(cnt))});
    }
  }
  CycloElem s = CycloElem::sum_of_root_products(m, terms);
  s *= detail::lpow_elem(m, static_cast<i64>(d.params().d) * psi.level);
  return s;
}

/// Closed form for chi(eps0): eps_unramified or the Gauss sum at the conductor of chi.
inline CycloElem eps_closed_form(const RecDatum& d, const Character& chi, const AdditiveCharSpec& psi, i64 p) {
  return d.conductor(chi) == 0 ? eps_unramified(d, chi, psi, p) : gauss_sum(d, chi, psi, p);
}

struct EpsilonResult {
  GroupRingElem element;
  RecDatum datum;
  AdditiveCharSpec psi;
  int lambda_sign = 1;
  i64 p = 3;
  UnitCertificate certificate;
};

/// eps0 in J[A].  `unit_parts[i]` (optional) multiplies c_{a-i}.
inline EpsilonResult eps_abelian(const RecDatum& d, const AdditiveCharSpec& psi, i64 p,
                                 const std::vector<GaloisRingElem>& unit_parts = {}, bool certify = true,
                                 i64 cap = kDefaultEnumerationCap) {
  const int a = d.level();
  if (a < 1) throw ValidationError("eps_abelian: datum level must be >= 1");
  if (!unit_parts.empty() && static_cast<int>(unit_parts.size()) != a) {
    throw ValidationError("eps_abelian: need one unit part per level");
  }
  const auto& R = d.ring;
  const i64 l = d.params().l;
  const int dd = d.params().d;
  const FinAbGroup& A = d.target;
  const i64 la = nt::ipow(l, static_cast<unsigned>(a));
  const auto m = coefficient_modulus(l, p, la);
  const GaloisRingElem twist = psi.twist(R);
  std::vector<GaloisRingElem> units;
  R->for_each_unit(a, [&](const GaloisRingElem& u) { units.push_back(u); }, cap);
  GroupRingElem eps(A, m);
  for (int i = 0; i < a; ++i) {
    const int t = a - i;  // pole order of u / c
    const i64 lt = nt::ipow(l, static_cast<unsigned>(t));
    const GaloisRingElem w = unit_parts.empty() ? R->one() : R->from_coeffs(unit_parts[static_cast<std::size_t>(i)].c);
    if (!R->is_unit(w)) throw ValidationError("eps_abelian: unit part is not a unit");
    const GaloisRingElem w_inv = R->inverse(w);
    const Vec rec_c = d.rec(w, t + psi.level);
    std::vector<std::vector<i64>> tally(static_cast<std::size_t>(A.order()), std::vector<i64>(static_cast<std::size_t>(lt), 0));
    for (const auto& u : units) {
      const auto x = R->mul(u, w_inv);  // u / c = x pi^{-t-n}
      const i64 pe = nt::mod(R->trace(R->mul(twist, x)), lt);
      const Vec g = A.sub(rec_c, d.rec_unit(u));
      ++tally[A.index(g)][static_cast<std::size_t>(pe)];
    }
    const CycloElem scale = detail::lpow_elem(m, static_cast<i64>(dd) * (psi.level - i));
    for (std::size_t gi = 0; gi < tally.size(); ++gi) {
      CycloElem s(m);
      for (i64 pe = 0; pe < lt; ++pe) {
        const i64 cnt = tally[gi][static_cast<std::size_t>(pe)];
        if (cnt == 0) continue;
        CycloElem r = CycloElem::root(m, lt, pe);
        r *= mpz_class(static_cast<long>(cnt));
        s += r;
      }
      if (s.is_zero()) continue;
      s *= scale;
      eps.add_term(gi, s);
    }
  }
  EpsilonResult res{eps, d, psi, 1, p, {}};
  if (certify) {
    res.certificate = certify_unit(eps, p);
    if (!res.certificate.certified) throw MathCheckError("eps_abelian: result is not a unit of J[A]");
  }
  return res;
}

/// chi(eps0).
inline CycloElem eps_evaluate(const EpsilonResult& eps, const Character& chi) { return eps.element.evaluate(chi); }

/// Push-forward of eps0 along a quotient map.
inline GroupRingElem eps_project(const EpsilonResult& eps, const AbHom& quotient) {
  return eps.element.push_forward(quotient);
}

/// The quotient datum at its own level max(conductor, 1).
inline RecDatum quotient_datum(const RecDatum& d, const AbHom& quotient) {
  RecDatum q = d.push_forward(quotient);
  return q.at_level(std::max(datum_conductor(q), 1));
}

// ---------------------------------------------------------------------------
// Property laws

struct LawReport {
  std::string law;
  bool passed = true;
  i64 checked = 0;
  std::string counterexample;
  bool informational = false;
};

namespace detail {

inline GroupRingElem group_elem(const FinAbGroup& A, const CycloModulus& m, const Vec& g) {
  return GroupRingElem::basis(A, m, g, CycloElem::from_integer(m, 1));
}

inline AdditiveCharSpec twisted(const AdditiveCharSpec& psi, const GaloisRingPtr& R, const GaloisRingElem& c) {
  return {psi.level, R->mul(psi.twist(R), c)};
}

}  // namespace detail

/// Checks the twist law eps0(psi_c) = rec(c)^{+1} eps0(psi), the Frobenius law
/// phi_p(eps0) = rec(p)^{+1} eps0, the unramified closed form and the unramified
/// twist law; the inverse-exponent readings of the first two are reported as
/// informational entries.
inline std::vector<LawReport> property_suite(const RecDatum& d, const AdditiveCharSpec& psi, i64 p,
                                             std::uint64_t seed = 1, int samples = 10) {
  std::vector<LawReport> out;
  const auto& R = d.ring;
  const FinAbGroup& A = d.target;
  const EpsilonResult base = eps_abelian(d, psi, p, {}, false);
  const CycloModulus m = base.element.base();
  std::mt19937_64 rng(seed);
  auto units = R->units(d.level());

  LawReport twist{"unit-twist: eps(psi_c) = rec(c) eps(psi)", true, 0, {}, false};
  LawReport twist_inv{"unit-twist, inverse reading: eps(psi_c) = rec(c)^-1 eps(psi)", true, 0, {}, true};
  for (int k = 0; k < samples; ++k) {
    const auto& c = units[static_cast<std::size_t>(rng() % units.size())];
    const auto lhs = eps_abelian(d, detail::twisted(psi, R, c), p, {}, false).element;
    const Vec rc = d.rec_unit(c);
    ++twist.checked;
    ++twist_inv.checked;
    if (!(lhs == base.element * detail::group_elem(A, m, rc)) && twist.passed) {
      twist.passed = false;
      twist.counterexample = "c = " + R->to_string(c);
    }
    if (!(lhs == base.element * detail::group_elem(A, m, A.neg(rc))) && twist_inv.passed) {
      twist_inv.passed = false;
      twist_inv.counterexample = "c = " + R->to_string(c) + ", rec(c) = " + GroupRingElem::basis(A, m, rc, CycloElem::from_integer(m, 1)).to_string();
    }
  }
  out.push_back(twist);
  out.push_back(twist_inv);

  LawReport frob{"Frobenius: phi_p(eps) = rec(p) eps", true, 1, {}, false};
  LawReport frob_inv{"Frobenius, inverse reading: phi_p(eps) = rec(p)^-1 eps", true, 1, {}, true};
  {
    const auto lhs = base.element.map_coeffs([](const CycloElem& x) { return x.frobenius_p(); });
    const Vec rp = d.rec_unit(R->from_int(p));
    if (!(lhs == base.element * detail::group_elem(A, m, rp))) {
      frob.passed = false;
      frob.counterexample = "p = " + std::to_string(p);
    }
    if (!(lhs == base.element * detail::group_elem(A, m, A.neg(rp)))) {
      frob_inv.passed = false;
      frob_inv.counterexample = "p = " + std::to_string(p) + ", rec(p) nontrivial on the datum";
    }
  }
  out.push_back(frob);
  out.push_back(frob_inv);

  LawReport unram{"unramified closed form: eps = -l^{dn} [pi]^{1+n}", true, 0, {}, false};
  if (datum_conductor(d) == 0) {
    unram.checked = 1;
    GroupRingElem expect = detail::group_elem(A, m, A.scale(d.pi_image, psi.level + 1))
                               .scaled(-detail::lpow_elem(m, static_cast<i64>(d.params().d) * psi.level));
    if (!(base.element == expect)) {
      unram.passed = false;
      unram.counterexample = "eps = " + base.element.to_string();
    }
  }
  out.push_back(unram);

  LawReport tw{"unramified twist: eps(chi omega) = omega(pi)^{a(chi)+n or n+1} eps(chi)", true, 0, {}, false};
  const auto chars = characters(A);
  const i64 E = A.exponent();
  for (const auto& omega : chars) {
    if (d.conductor(omega) != 0) continue;
    for (const auto& chi : chars) {
      ++tw.checked;
      const int ac = d.conductor(chi);
      const i64 expo = ac == 0 ? psi.level + 1 : ac + psi.level;
      CycloElem rhs = eps_evaluate(base, chi);
      rhs *= CycloElem::root(m.with_order(E), E, nt::mulmod(omega.value_numerator(d.pi_image), nt::mod(expo, E), E));
      if (!(eps_evaluate(base, chi * omega) == rhs) && tw.passed) {
        tw.passed = false;
        tw.counterexample = "chi exps " + std::to_string(chi.exps.empty() ? 0 : chi.exps[0]);
      }
    }
  }
  out.push_back(tw);
  return out;
}

// ---------------------------------------------------------------------------
// Delta decomposition

/// Splits the coordinates of A into Delta (`delta_coords`) and the rest.
struct DeltaSplit {
  FinAbGroup whole;
  std::vector<std::size_t> delta_coords;

  [[nodiscard]] FinAbGroup delta() const {
    Vec m;
    for (auto k : delta_coords) m.push_back(whole.moduli()[k]);
    return FinAbGroup(m);
  }
  [[nodiscard]] std::vector<std::size_t> rest_coords() const {
    std::vector<std::size_t> r;
    for (std::size_t k = 0; k < whole.rank(); ++k) {
      if (std::find(delta_coords.begin(), delta_coords.end(), k) == delta_coords.end()) r.push_back(k);
    }
    return r;
  }
  [[nodiscard]] FinAbGroup rest() const {
    Vec m;
    for (auto k : rest_coords()) m.push_back(whole.moduli()[k]);
    return FinAbGroup(m);
  }
  [[nodiscard]] Vec delta_part(const Vec& g) const {
    Vec r;
    for (auto k : delta_coords) r.push_back(g[k]);
    return r;
  }
  [[nodiscard]] Vec rest_part(const Vec& g) const {
    Vec r;
    for (auto k : rest_coords()) r.push_back(g[k]);
    return r;
  }
  [[nodiscard]] Vec combine(const Vec& dlt, const Vec& h) const {
    Vec g(whole.rank(), 0);
    const auto rc = rest_coords();
    for (std::size_t k = 0; k < delta_coords.size(); ++k) g[delta_coords[k]] = dlt[k];
    for (std::size_t k = 0; k < rc.size(); ++k) g[rc[k]] = h[k];
    return g;
  }
};

/// J[Delta x H] -> J[rho][H], (delta, h) -> rho(delta) h.
inline GroupRingElem delta_decompose(const GroupRingElem& x, const DeltaSplit& split, const Character& rho) {
  if (!(x.group() == split.whole)) throw ValidationError("delta_decompose: group is not the stored product");
  if (!(rho.group == split.delta())) throw ValidationError("delta_decompose: rho is not a character of Delta");
  const FinAbGroup H = split.rest();
  const CycloModulus m = x.base().with_order(rho.group.exponent());
  GroupRingElem out(H, m);
  for (const auto& [k, v] : x.terms()) {
    const Vec g = x.group().element(k);
    CycloElem c = v;
    c *= rho.value(split.delta_part(g), m);
    out.add_term(H.index(split.rest_part(g)), c);
  }
  return out;
}

/// |Delta| * x recovered from its components: sum_rho sum_h c_h rho^{-1}(delta) (delta, h).
inline GroupRingElem delta_reconstruct_scaled(const std::vector<std::pair<Character, GroupRingElem>>& comps,
                                              const DeltaSplit& split, const CycloModulus& base) {
  GroupRingElem out(split.whole, base);
  const FinAbGroup D = split.delta();
  for (const auto& [rho, y] : comps) {
    const CycloModulus m = y.base().with_order(D.exponent());
    const auto rinv = rho.inverse();
    for (const auto& [k, v] : y.terms()) {
      const Vec h = y.group().element(k);
      for (const auto& dl : D.elements()) {
        CycloElem c = v;
        c *= rinv.value(dl, m);
        out.add_term(split.whole.index(split.combine(dl, h)), c);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Change of rings

/// Y free of rank r over J[P] with a right action of the abelian group G, given by
/// one r x r matrix over J[P] per generator of G.
struct ChangeOfRingsAction {
  FinAbGroup G;
  FinAbGroup P;
  std::vector<std::vector<std::vector<GroupRingElem>>> generator_matrices;
};

namespace detail {

using GrMatrix = std::vector<std::vector<GroupRingElem>>;

inline GrMatrix mat_identity(std::size_t r, const FinAbGroup& P, const CycloModulus& m) {
  GrMatrix I(r, std::vector<GroupRingElem>(r, GroupRingElem(P, m)));
  for (std::size_t k = 0; k < r; ++k) I[k][k] = GroupRingElem::one(P, m);
  return I;
}
inline GrMatrix mat_mul(const GrMatrix& a, const GrMatrix& b) {
  const std::size_t r = a.size();
  GrMatrix c(r, std::vector<GroupRingElem>(r, GroupRingElem(a[0][0].group(), a[0][0].base())));
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      for (std::size_t k = 0; k < r; ++k) c[i][j] += a[i][k] * b[k][j];
    }
  }
  return c;
}

}  // namespace detail

/// det over J[P] of the matrix by which x in J[G] acts on Y.
inline GroupRingElem k1_change_of_rings(const GroupRingElem& x, const ChangeOfRingsAction& act) {
  if (!(x.group() == act.G)) throw ValidationError("k1_change_of_rings: element of another group");
  if (act.generator_matrices.size() != act.G.rank()) throw ValidationError("k1_change_of_rings: one matrix per generator");
  const std::size_t r = act.generator_matrices.empty() ? 0 : act.generator_matrices[0].size();
  if (r == 0) throw ValidationError("k1_change_of_rings: empty module");
  const CycloModulus m = x.base();
  const auto I = detail::mat_identity(r, act.P, m);
  // relations: M_j^{n_j} = 1, M_j M_k = M_k M_j
  std::vector<std::vector<detail::GrMatrix>> powers;
  for (std::size_t j = 0; j < act.G.rank(); ++j) {
    const auto& M = act.generator_matrices[j];
    std::vector<detail::GrMatrix> pw{I};
    for (i64 e = 1; e <= act.G.moduli()[j]; ++e) pw.push_back(detail::mat_mul(pw.back(), M));
    if (!(pw.back() == I)) throw ValidationError("k1_change_of_rings: generator matrix order violates the relation");
    pw.pop_back();
    powers.push_back(std::move(pw));
  }
  for (std::size_t j = 0; j < act.G.rank(); ++j) {
    for (std::size_t k = j + 1; k < act.G.rank(); ++k) {
      if (!(detail::mat_mul(powers[j][1 % powers[j].size()], powers[k][1 % powers[k].size()]) ==
            detail::mat_mul(powers[k][1 % powers[k].size()], powers[j][1 % powers[j].size()]))) {
        throw ValidationError("k1_change_of_rings: generator matrices do not commute");
      }
    }
  }
  detail::GrMatrix X(r, std::vector<GroupRingElem>(r, GroupRingElem(act.P, m)));
  for (const auto& [k, v] : x.terms()) {
    const Vec g = act.G.element(k);
    detail::GrMatrix Mg = I;
    for (std::size_t j = 0; j < g.size(); ++j) Mg = detail::mat_mul(Mg, powers[j][static_cast<std::size_t>(g[j])]);
    for (std::size_t a = 0; a < r; ++a) {
      for (std::size_t b = 0; b < r; ++b) X[a][b] += Mg[a][b].scaled(v);
    }
  }
  return berkowitz_det(X, GroupRingElem::one(act.P, m), GroupRingElem(act.P, m));
}

}  // namespace epsilon0
