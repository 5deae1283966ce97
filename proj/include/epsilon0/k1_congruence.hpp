#pragma once

// The component maps of theta_{G,J} and beta_{G,J} for a tame tower
// G = (N x| Gamma) x Delta, trace ideals T_i, ver_i, the M1-M3 and A1-A3
// verifiers, and the integral logarithm at truncated p-adic precision.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "epsilon0/epsilon.hpp"
#include "epsilon0/metabelian.hpp"

namespace epsilon0 {

// ---------------------------------------------------------------------------
// Maps between the group rings of the tower

/// Nr: J[A] -> J[B] for an injective B -> A; determinant of multiplication on J[A]
/// as a free J[B]-module with a basis of coset representatives.
inline GroupRingElem norm_map(const GroupRingElem& x, const AbHom& embedding) {
  const FinAbGroup& A = embedding.dst;
  const FinAbGroup& B = embedding.src;
  if (!(x.group() == A)) throw ValidationError("norm_map: element is not over the ambient group");
  std::map<std::size_t, Vec> preimage;  // A-index of emb(b) -> b
  for (const auto& b : B.elements()) {
    if (!preimage.emplace(A.index(embedding.apply(b)), b).second) throw ValidationError("norm_map: map is not injective");
  }
  // coset representatives and the coset of every element of A
  std::vector<Vec> reps;
  std::vector<int> coset(static_cast<std::size_t>(A.order()), -1);
  for (const auto& a : A.elements()) {
    if (coset[A.index(a)] >= 0) continue;
    const int id = static_cast<int>(reps.size());
    reps.push_back(a);
    for (const auto& [ai, b] : preimage) coset[A.index(A.add(a, A.element(ai)))] = id;
  }
  const std::size_t r = reps.size();
  const CycloModulus m = x.base();
  std::vector<std::vector<GroupRingElem>> M(r, std::vector<GroupRingElem>(r, GroupRingElem(B, m)));
  for (std::size_t k = 0; k < r; ++k) {
    for (const auto& [gi, c] : x.terms()) {
      const Vec h = A.add(A.element(gi), reps[k]);
      const auto j = static_cast<std::size_t>(coset[A.index(h)]);
      const Vec b = preimage.at(A.index(A.sub(h, reps[j])));
      M[j][k].add_term(B.index(b), c);
    }
  }
  return berkowitz_det(M, GroupRingElem::one(B, m), GroupRingElem(B, m));
}

/// Tr: J[A] -> J[B], g -> [A:B] g for g in B, 0 otherwise.
inline GroupRingElem trace_map(const GroupRingElem& x, const AbHom& embedding) {
  const FinAbGroup& A = embedding.dst;
  const FinAbGroup& B = embedding.src;
  const i64 index = A.order() / B.order();
  std::map<std::size_t, Vec> preimage;
  for (const auto& b : B.elements()) preimage.emplace(A.index(embedding.apply(b)), b);
  GroupRingElem out(B, x.base());
  for (const auto& [gi, c] : x.terms()) {
    auto it = preimage.find(gi);
    if (it == preimage.end()) continue;
    CycloElem v = c;
    v *= mpz_class(static_cast<long>(index));
    out.add_term(B.index(it->second), v);
  }
  return out;
}

inline GroupRingElem pi_surjection(const MetabelianGroup& g, const GroupRingElem& x, int i, int j) {
  return x.push_forward(pi_hom(g, i, j));
}

/// Conjugation by gamma^k on J[G_i^ab].
inline GroupRingElem gamma_conjugate(const MetabelianGroup& g, const GroupRingElem& x, int i, i64 k = 1) {
  return x.map_basis([&](const Vec& v) { return g.gamma_act(v, i, k); });
}

/// sigma_i(x) = sum_{k < p^i} gamma^k x gamma^{-k}.
inline GroupRingElem sigma_trace(const MetabelianGroup& g, const GroupRingElem& x, int i) {
  GroupRingElem out(x.group(), x.base());
  const i64 pi = nt::ipow(g.p(), static_cast<unsigned>(i));
  for (i64 k = 0; k < pi; ++k) out += gamma_conjugate(g, x, i, k);
  return out;
}

/// Orbits of gamma on G_i^ab (as element-index lists, least index first).
inline std::vector<std::vector<std::size_t>> gamma_orbits(const MetabelianGroup& g, int i) {
  const FinAbGroup A = g.level_ab(i);
  std::vector<bool> seen(static_cast<std::size_t>(A.order()), false);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t k = 0; k < seen.size(); ++k) {
    if (seen[k]) continue;
    std::vector<std::size_t> orb;
    Vec v = A.element(k);
    while (!seen[A.index(v)]) {
      seen[A.index(v)] = true;
      orb.push_back(A.index(v));
      v = g.gamma_act(v, i);
    }
    std::sort(orb.begin(), orb.end());
    out.push_back(orb);
  }
  return out;
}

struct Membership {
  bool member = false;
  std::optional<GroupRingElem> witness;  // sigma_i(witness) = x (when extra_scale = 0)
  std::string reason;
};

/// x in p^{extra_scale} T_i?  Coefficients must be constant on gamma-orbits and the
/// value on an orbit O divisible by p^{i + extra_scale} / |O|.
inline Membership ti_membership(const MetabelianGroup& g, const GroupRingElem& x, int i, int extra_scale = 0) {
  const FinAbGroup& A = x.group();
  if (!(A == g.level_ab(i))) throw ValidationError("ti_membership: element is not over G_i^ab");
  const CycloModulus m = x.base();
  GroupRingElem witness(A, m);
  for (const auto& orb : gamma_orbits(g, i)) {
    const CycloElem c0 = x.coeff(A.element(orb.front()));
    for (std::size_t k = 1; k < orb.size(); ++k) {
      if (!(x.coeff(A.element(orb[k])) == c0)) {
        return {false, std::nullopt, "not constant on the gamma-orbit of " + GroupRingElem::basis(A, m, A.element(orb.front()), CycloElem::from_integer(m, 1)).to_string()};
      }
    }
    const int need = i + extra_scale - nt::valuation(static_cast<i64>(orb.size()), g.p());
    if (need > 0 && !c0.p_divisible(need)) {
      return {false, std::nullopt,
              "orbit of size " + std::to_string(orb.size()) + " has coefficient " + c0.to_string() +
                  " not divisible by " + std::to_string(g.p()) + "^" + std::to_string(need)};
    }
    if (extra_scale == 0 && !c0.is_zero()) {
      CycloElem w = c0;
      if (need > 0) w = w.divide_exact(detail::mpz_pow(g.p(), static_cast<unsigned>(need)));
      else if (need < 0) w *= detail::mpz_pow(g.p(), static_cast<unsigned>(-need));
      witness.add_term(orb.front(), w);
    }
  }
  Membership r{true, std::nullopt, {}};
  if (extra_scale == 0) r.witness = witness;
  return r;
}

/// Membership in T_i + p^M J[G_i^ab] for coefficients already reduced mod p^M.
inline Membership ti_membership_mod(const MetabelianGroup& g, const GroupRingElem& x, int i, int M) {
  const FinAbGroup& A = x.group();
  const CycloModulus m = x.base();
  for (const auto& orb : gamma_orbits(g, i)) {
    const CycloElem c0 = reduce_mod_pw(x.coeff(A.element(orb.front())), g.p(), M);
    for (std::size_t k = 1; k < orb.size(); ++k) {
      if (!(reduce_mod_pw(x.coeff(A.element(orb[k])), g.p(), M) == c0)) {
        return {false, std::nullopt, "not constant mod p^M on an orbit"};
      }
    }
    const int need = std::min(M, i - nt::valuation(static_cast<i64>(orb.size()), g.p()));
    if (need > 0 && !c0.p_divisible(need)) return {false, std::nullopt, "orbit coefficient fails divisibility"};
  }
  (void)m;
  return {true, std::nullopt, {}};
}

/// ver_i: J[G_{i-1}^ab] -> J[G_i^ab], transfer on group elements and phi_p on coefficients.
inline GroupRingElem ver_map(const MetabelianGroup& g, const GroupRingElem& x, int i) {
  return x.push_forward(tower_transfer(g, i)).map_coeffs([](const CycloElem& c) { return c.frobenius_p(); });
}

// ---------------------------------------------------------------------------
// Tuples and the M1-M3 verifier

struct ThetaTuple {
  MetabelianGroup group;
  std::vector<GroupRingElem> x;  // x[i] over G_i^ab
};

struct ConditionResult {
  std::string condition;  // "M1", "M2", "M3-additive", "M3-multiplicative", ...
  int i = 0;
  int j = 0;
  bool passed = true;
  std::string witness;
};

enum class CheckSet { M1 = 1, M2 = 2, M3 = 4, All = 7 };

inline std::vector<ConditionResult> check_M1_M2_M3(const ThetaTuple& t, CheckSet which = CheckSet::All,
                                                   bool multiplicative = true) {
  const auto& g = t.group;
  const int n = g.n();
  if (static_cast<int>(t.x.size()) != n + 1) throw ValidationError("check_M1_M2_M3: tuple length must be n + 1");
  const int mask = static_cast<int>(which);
  std::vector<ConditionResult> out;
  if (mask & 1) {
    for (int i = 0; i <= n; ++i) {
      for (int j = i; j <= n; ++j) {
        ConditionResult r{"M1", i, j, true, {}};
        const auto lhs = norm_map(t.x[static_cast<std::size_t>(i)], b_embedding(g, i, j));
        const auto rhs = pi_surjection(g, t.x[static_cast<std::size_t>(j)], i, j);
        if (!(lhs == rhs)) {
          r.passed = false;
          r.witness = "Nr(x_i) = " + lhs.to_string() + " but pi(x_j) = " + rhs.to_string();
        }
        out.push_back(r);
      }
    }
  }
  if (mask & 2) {
    for (int i = 0; i <= n; ++i) {
      ConditionResult r{"M2", i, i, true, {}};
      const auto& xi = t.x[static_cast<std::size_t>(i)];
      // tau and delta act trivially on G_i^ab; gamma acts by the tower action
      const auto c = gamma_conjugate(g, xi, i);
      if (!(c == xi)) {
        r.passed = false;
        r.witness = "gamma x_i gamma^-1 - x_i = " + (c - xi).to_string();
      }
      out.push_back(r);
    }
  }
  if (mask & 4) {
    for (int i = 1; i <= n; ++i) {
      const auto& xi = t.x[static_cast<std::size_t>(i)];
      const auto v = ver_map(g, t.x[static_cast<std::size_t>(i - 1)], i);
      ConditionResult add{"M3-additive", i, i, true, {}};
      const auto mem = ti_membership(g, xi - v, i);
      if (!mem.member) {
        add.passed = false;
        add.witness = "x_i - ver(x_{i-1}) not in T_i: " + mem.reason;
      } else {
        add.witness = "sigma_i-preimage " + mem.witness->to_string();
      }
      out.push_back(add);
      if (multiplicative) {
        ConditionResult mul{"M3-multiplicative", i, i, true, {}};
        const auto cert = certify_unit(v, g.p(), true, 1 << 20);
        if (!cert.scaled_inverse) {
          mul.passed = false;
          mul.witness = "ver(x_{i-1}) could not be inverted";
        } else {
          // x_i / v - 1 = (x_i w - D) / D with D = p^k D', D' prime to p
          const auto diff = xi * *cert.scaled_inverse -
                            GroupRingElem::scalar(xi.group(), CycloElem::from_integer(xi.base(), cert.scale));
          const auto memm = ti_membership(g, diff, i, cert.scale_p_valuation);
          if (!memm.member) {
            mul.passed = false;
            mul.witness = "x_i / ver(x_{i-1}) not in 1 + T_i: " + memm.reason;
          } else {
            mul.witness = "scale D = " + cert.scale.get_str();
          }
        }
        out.push_back(mul);
      }
    }
  }
  return out;
}

inline bool all_passed(const std::vector<ConditionResult>& rs) {
  return std::all_of(rs.begin(), rs.end(), [](const ConditionResult& r) { return r.passed; });
}

// ---------------------------------------------------------------------------
// The epsilon tuple

struct EpsilonTuple {
  ThetaTuple tuple;
  std::vector<EpsilonResult> levels;
  std::vector<int> signs;
};

/// lambda(L/K, psi) for L/K unramified of degree f:
/// prod_{eta^f = 1} eps0(K, eta, psi) / eps0(L, 1, psi o Tr) with eps0(K, eta, psi) = -eta(pi)^{n+1} q^n.
inline int unramified_lambda(i64 p, i64 f, int n_psi) {
  const int beta = nt::valuation(f, p);
  const CycloModulus m = CycloModulus::make(p == 2 ? 3 : 2, 0, p, std::max(beta, 1), 1);
  CycloElem prod = CycloElem::from_integer(m, 1);
  for (i64 k = 0; k < f; ++k) {
    CycloElem term = CycloElem::root(m, f, nt::mod(k * (n_psi + 1), f));
    term *= mpz_class(-1);
    prod *= term;
  }
  prod *= mpz_class(-1);  // divide by eps0(L, 1) / q^{fn} = -1
  if (prod == CycloElem::from_integer(m, 1)) return 1;
  if (prod == CycloElem::from_integer(m, -1)) return -1;
  throw MathCheckError("unramified_lambda: value is not a sign");
}

enum class TupleSign {
  Lambda,   // lambda(K_i/K, psi_i), the sign compatible with Nr
  Literal,  // (-1)^{[K_i:K]-1} for every psi
};

/// Entry i = sign_i * eps0(K_i, psi o Tr_{K_i/K}).
inline EpsilonTuple epsilon_tuple(const TameTower& tower, const AdditiveCharSpec& psi,
                                  TupleSign convention = TupleSign::Lambda) {
  const i64 p = tower.spec().p;
  EpsilonTuple out{{tower.group(), {}}, {}, {}};
  for (int i = 0; i <= tower.n(); ++i) {
    const auto& d = tower.datum(i);
    AdditiveCharSpec psi_i{psi.level, std::nullopt};
    if (psi.unit_twist) {
      const auto& base_ring = tower.datum(0).ring;
      psi_i.unit_twist = tower.embed(base_ring->from_coeffs(psi.unit_twist->c), 0, i);
    }
    auto e = eps_abelian(d, psi_i, p);
    const i64 f = tower.degree(i);
    const int sign = convention == TupleSign::Lambda ? unramified_lambda(p, f, psi.level) : ((f - 1) % 2 == 0 ? 1 : -1);
    e.lambda_sign = sign;
    out.signs.push_back(sign);
    out.tuple.x.push_back(sign == 1 ? e.element : -e.element);
    out.levels.push_back(std::move(e));
  }
  return out;
}

/// The rho-component of a tuple over (N x| Gamma) x Delta, as a tuple over N x| Gamma.
/// Requires rho^p = rho so that ver and phi_p preserve the component.
inline ThetaTuple delta_component_tuple(const ThetaTuple& t, const Character& rho) {
  const auto& g = t.group;
  if (g.m_delta() == 1) throw ValidationError("delta_component_tuple: group has no Delta factor");
  if (!(rho.group == FinAbGroup(Vec{g.m_delta()}))) throw ValidationError("delta_component_tuple: rho is not a character of Delta");
  Character rho_p = rho;
  for (i64 k = 1; k < g.p(); ++k) rho_p = rho_p * rho;
  if (!(rho_p.exps == rho.exps)) throw ValidationError("delta_component_tuple: rho^p != rho, components are permuted by ver");
  const MetabelianGroup h(g.p(), g.s(), g.n(), g.e(), 1);
  ThetaTuple out{h, {}};
  for (int i = 0; i <= g.n(); ++i) {
    const FinAbGroup A = g.level_ab(i);
    const DeltaSplit split{A, {2}};
    const auto comp = delta_decompose(t.x[static_cast<std::size_t>(i)], split, rho);
    const FinAbGroup Ah = h.level_ab(i);
    out.x.push_back(comp.push_forward(AbHom::make(comp.group(), Ah, {Ah.unit_vector(0), Ah.unit_vector(1)})));
  }
  return out;
}

// ---------------------------------------------------------------------------
// theta on J[G] (used to produce tuples that lie in the image)

using MetaElem = std::map<std::size_t, CycloElem>;  // group-element index -> coefficient

/// theta_i(x): det over J[G_i^ab] of left multiplication by x on J[G], free over J[G_i]
/// with basis gamma^k, k < p^i.
inline GroupRingElem theta_component(const MetabelianGroup& g, const MetaElem& x, int i, const CycloModulus& m) {
  const i64 r = nt::ipow(g.p(), static_cast<unsigned>(i));
  const FinAbGroup A = g.level_ab(i);
  std::vector<std::vector<GroupRingElem>> M(static_cast<std::size_t>(r),
                                            std::vector<GroupRingElem>(static_cast<std::size_t>(r), GroupRingElem(A, m)));
  for (i64 k = 0; k < r; ++k) {
    const Triple gk = g.pow(g.gamma(), k);
    for (const auto& [idx, c] : x) {
      const Triple h = g.mul(g.element(idx), gk);
      const i64 j = nt::mod(h.y, r);
      const Triple b = g.mul(g.pow(g.gamma(), -j), h);
      M[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)].add_term(A.index(g.ab_project(b, i)), c);
    }
  }
  return berkowitz_det(M, GroupRingElem::one(A, m), GroupRingElem(A, m));
}

inline ThetaTuple theta_tuple(const MetabelianGroup& g, const MetaElem& x, const CycloModulus& m) {
  ThetaTuple t{g, {}};
  for (int i = 0; i <= g.n(); ++i) t.x.push_back(theta_component(g, x, i, m));
  return t;
}

/// x = g (1 + p r) with r having small random coefficients in Z[zeta_l].
inline MetaElem random_unit(const MetabelianGroup& g, const CycloModulus& m, std::mt19937_64& rng, int terms = 4) {
  MetaElem x;
  auto add = [&](std::size_t idx, const CycloElem& c) {
    auto it = x.find(idx);
    if (it == x.end()) {
      if (!c.is_zero()) x.emplace(idx, c);
    } else {
      it->second += c;
      if (it->second.is_zero()) x.erase(it);
    }
  };
  const auto order = static_cast<nt::u64>(g.order());
  const Triple g0 = g.element(static_cast<std::size_t>(rng() % order));
  add(g.index(g0), CycloElem::from_integer(m, 1));
  for (int k = 0; k < terms; ++k) {
    const Triple h = g.element(static_cast<std::size_t>(rng() % order));
    CycloElem c = CycloElem::root(m, m.L(), static_cast<i64>(rng() % static_cast<nt::u64>(std::max<i64>(m.L(), 1))));
    c *= mpz_class(static_cast<long>(g.p()) * (static_cast<long>(rng() % 5) - 2));
    add(g.index(g.mul(g0, h)), c);
  }
  return x;
}

// ---------------------------------------------------------------------------
// Additive side: beta on J[Conj(G)] and A1-A3

struct ConjClassElem {
  std::vector<std::vector<Triple>> classes;  // conj_classes output
  std::vector<CycloElem> coeffs;             // one per class
};

/// Component i of beta: sum over classes of c_C sum_{k < p^i} [gamma^k g gamma^-k] for g in G_i.
inline GroupRingElem beta_component(const MetabelianGroup& g, const ConjClassElem& x, int i, const CycloModulus& m) {
  const FinAbGroup A = g.level_ab(i);
  GroupRingElem out(A, m);
  const i64 pi = nt::ipow(g.p(), static_cast<unsigned>(i));
  for (std::size_t c = 0; c < x.classes.size(); ++c) {
    if (x.coeffs[c].is_zero()) continue;
    const Triple& rep = x.classes[c].front();
    if (!g.in_level(rep, i)) continue;
    for (i64 k = 0; k < pi; ++k) {
      const Triple h = g.conj(g.pow(g.gamma(), k), rep);
      out.add_term(A.index(g.ab_project(h, i)), x.coeffs[c]);
    }
  }
  return out;
}

inline std::vector<GroupRingElem> beta_additive(const MetabelianGroup& g, const ConjClassElem& x, const CycloModulus& m) {
  std::vector<GroupRingElem> out;
  for (int i = 0; i <= g.n(); ++i) out.push_back(beta_component(g, x, i, m));
  return out;
}

/// A1 (Tr_{i,j}(a_i) = pi_{i,j}(a_j)), A2 (gamma-invariance), A3 (a_i in T_i); with
/// `precision` > 0 every comparison is made modulo p^precision.
inline std::vector<ConditionResult> check_A1_A2_A3(const MetabelianGroup& g, const std::vector<GroupRingElem>& a,
                                                   int precision = 0) {
  const int n = g.n();
  const i64 p = g.p();
  auto red = [&](const GroupRingElem& x) { return precision > 0 ? reduce_mod_pw(x, p, precision) : x; };
  std::vector<ConditionResult> out;
  for (int i = 0; i <= n; ++i) {
    for (int j = i; j <= n; ++j) {
      ConditionResult r{"A1", i, j, true, {}};
      const auto lhs = red(trace_map(a[static_cast<std::size_t>(i)], b_embedding(g, i, j)));
      const auto rhs = red(pi_surjection(g, a[static_cast<std::size_t>(j)], i, j));
      if (!(lhs == rhs)) {
        r.passed = false;
        r.witness = "Tr(a_i) = " + lhs.to_string() + ", pi(a_j) = " + rhs.to_string();
      }
      out.push_back(r);
    }
  }
  for (int i = 0; i <= n; ++i) {
    ConditionResult r{"A2", i, i, true, {}};
    const auto& ai = a[static_cast<std::size_t>(i)];
    if (!(red(gamma_conjugate(g, ai, i)) == red(ai))) {
      r.passed = false;
      r.witness = "a_i is not gamma-invariant";
    }
    out.push_back(r);
    ConditionResult t{"A3", i, i, true, {}};
    const auto mem = precision > 0 ? ti_membership_mod(g, red(ai), i, precision) : ti_membership(g, ai, i);
    if (!mem.member) {
      t.passed = false;
      t.witness = mem.reason;
    }
    out.push_back(t);
  }
  return out;
}

/// Rank of beta as a Z-linear map on the class basis (injective iff rank = #classes).
inline std::size_t beta_rank(const MetabelianGroup& g) {
  const auto classes = g.conj_classes();
  const CycloModulus m = CycloModulus::make(g.p() == 2 ? 3 : 2, 0, g.p(), 0, 1);
  IntMatrix rows;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    ConjClassElem x{classes, std::vector<CycloElem>(classes.size(), CycloElem(m))};
    x.coeffs[c] = CycloElem::from_integer(m, 1);
    Vec row;
    for (int i = 0; i <= g.n(); ++i) {
      const auto comp = beta_component(g, x, i, m);
      const FinAbGroup A = g.level_ab(i);
      for (const auto& h : A.elements()) {
        const auto v = comp.coeff(h);
        row.push_back(v.is_zero() ? 0 : v.numerators()[0].get_si());
      }
    }
    rows.push_back(row);
  }
  const auto snf = smith_normal_form(rows, rows.empty() ? 0 : rows[0].size());
  std::size_t rank = 0;
  for (i64 dv : snf.diagonal) rank += dv != 0;
  return rank;
}

// ---------------------------------------------------------------------------
// Integral logarithm

struct LogResult {
  std::vector<GroupRingElem> components;  // L_i mod p^M
  int precision = 0;
  std::vector<int> series_terms;
  std::vector<int> nilpotency;
};

namespace detail {

/// x * y with coefficients reduced mod p^W.
inline GroupRingElem mul_mod(const GroupRingElem& x, const GroupRingElem& y, i64 p, int W) {
  return reduce_mod_pw(x * y, p, W);
}

/// p^E log(1 + y) mod p^{M+E}; E is returned through `scale`.
inline GroupRingElem log_series(const GroupRingElem& y, i64 p, int M, int& scale, int& terms, int& nil) {
  // nilpotency of y mod p
  GroupRingElem pw = reduce_mod_pw(y, p, 1);
  int N0 = 1;
  const int limit = static_cast<int>(y.group().order()) * 4 + 8;
  while (!pw.is_zero()) {
    if (N0 > limit) throw ValidationError("integral_log: 1 + y is outside the convergence domain (y not nilpotent mod p)");
    pw = mul_mod(pw, y, p, 1);
    ++N0;
  }
  nil = N0;
  // last k with floor(k/N0) - v_p(k) < M
  int K = 0;
  for (int k = 1; k <= N0 * (M + 64); ++k) {
    if (k / N0 - nt::valuation(k, p) < M) K = k;
  }
  int E = 0;
  for (int k = 1; k <= K; ++k) E = std::max(E, nt::valuation(k, p));
  const int W = M + E;
  GroupRingElem acc(y.group(), y.base());
  GroupRingElem yk = reduce_mod_pw(y, p, W);
  const GroupRingElem yr = yk;
  const mpz_class pW = mpz_pow(p, static_cast<unsigned>(W));
  for (int k = 1; k <= K; ++k) {
    if (k > 1) yk = mul_mod(yk, yr, p, W);
    const int t = nt::valuation(k, p);
    mpz_class unit = k / static_cast<long>(nt::ipow(p, static_cast<unsigned>(t)));
    mpz_invert(unit.get_mpz_t(), unit.get_mpz_t(), pW.get_mpz_t());
    mpz_class f = unit * mpz_pow(p, static_cast<unsigned>(E - t));
    if (k % 2 == 0) f = -f;
    acc += yk.scaled(f);
    acc = reduce_mod_pw(acc, p, W);
  }
  scale = E;
  terms = K;
  return acc;
}

/// x / v mod p^W using the scaled inverse of v.
inline GroupRingElem divide_mod(const GroupRingElem& x, const GroupRingElem& v, i64 p, int W) {
  const auto cert = certify_unit(v, p, true, 1 << 20);
  if (!cert.scaled_inverse) throw ValidationError("integral_log: denominator is not a certified unit");
  GroupRingElem q = x * *cert.scaled_inverse;
  const int k = cert.scale_p_valuation;
  if (!q.p_divisible(k)) throw MathCheckError("integral_log: quotient is not p-integral");
  q = q.divide_exact(mpz_pow(p, static_cast<unsigned>(k)));
  mpz_class rest = cert.scale;
  for (int s = 0; s < k; ++s) rest /= p;
  const mpz_class pW = mpz_pow(p, static_cast<unsigned>(W));
  mpz_invert(rest.get_mpz_t(), rest.get_mpz_t(), pW.get_mpz_t());
  return reduce_mod_pw(q.scaled(rest), p, W);
}

/// Phi: phi_p on coefficients and g -> g^p.
inline GroupRingElem big_frobenius(const GroupRingElem& x, i64 p) {
  const FinAbGroup& A = x.group();
  GroupRingElem out(A, x.base());
  for (const auto& [k, c] : x.terms()) out.add_term(A.index(A.scale(A.element(k), p)), c.frobenius_p());
  return out;
}

}  // namespace detail

/// L_0 = (1/p) log(x_0^p / Phi(x_0)),  L_i = log(x_i / ver(x_{i-1})) for i >= 1, mod p^M.
inline LogResult integral_log(const ThetaTuple& t, int M) {
  const auto& g = t.group;
  const i64 p = g.p();
  if (M < 1) throw ValidationError("integral_log: precision must be >= 1");
  if (g.m_delta() > 1) throw ValidationError("integral_log: groups with a Delta factor are not supported; decompose over Delta first");
  LogResult out;
  out.precision = M;
  const int W = M + 1 + 24;  // precision of the quotients; must cover M + E below
  for (int i = 0; i <= g.n(); ++i) {
    const auto& xi = t.x[static_cast<std::size_t>(i)];
    int extra = i == 0 ? 1 : 0;
    const GroupRingElem ratio =
        i == 0 ? detail::divide_mod(xi.pow(static_cast<unsigned long>(p)), detail::big_frobenius(xi, p), p, W + 1)
               : detail::divide_mod(xi, ver_map(g, t.x[static_cast<std::size_t>(i - 1)], i), p, W);
    const GroupRingElem y = ratio - GroupRingElem::one(ratio.group(), ratio.base());
    if (!reduce_mod_pw(y, p, 1).augmentation().p_divisible(1)) {
      throw ValidationError("integral_log: augmentation of y at level " + std::to_string(i) + " is not divisible by p");
    }
    int E = 0, terms = 0, nil = 0;
    GroupRingElem s = detail::log_series(y, p, M + extra, E, terms, nil);
    const int total = E + extra;
    if (M + total > W) throw ResourceError("integral_log: series needs more working precision");
    // s = p^E log(ratio) mod p^{M+extra+E}; divide by p^{E+extra}
    if (!s.p_divisible(total)) {
      throw MathCheckError("integral_log: component " + std::to_string(i) + " is not integral at precision " +
                           std::to_string(M));
    }
    GroupRingElem li = s.divide_exact(detail::mpz_pow(p, static_cast<unsigned>(total)));
    out.components.push_back(reduce_mod_pw(li, p, M));
    out.series_terms.push_back(terms);
    out.nilpotency.push_back(nil);
  }
  return out;
}

/// Componentwise product of tuples.
inline ThetaTuple tuple_product(const ThetaTuple& a, const ThetaTuple& b) {
  ThetaTuple r{a.group, {}};
  for (std::size_t i = 0; i < a.x.size(); ++i) r.x.push_back(a.x[i] * b.x[i]);
  return r;
}

}  // namespace epsilon0
