#pragma once

// G = (N x| Gamma) x Delta with N = Z/p^s, Gamma = Z/p^n acting by x -> e x,
// Delta = Z/m_delta.  Elements are triples (x, y, z); the tower subgroups are
// G_i = (N x| Gamma^{p^i}) x Delta.

#include <functional>
#include <map>
#include <vector>

#include "epsilon0/abelian_group.hpp"

namespace epsilon0 {

struct Triple {
  i64 x = 0, y = 0, z = 0;
  auto operator<=>(const Triple&) const = default;
};

class MetabelianGroup {
 public:
  MetabelianGroup() = default;
  MetabelianGroup(i64 p, int s, int n, i64 e, i64 m_delta) : p_(p), s_(s), n_(n), m_delta_(m_delta) {
    if (!nt::is_prime(p)) throw ValidationError("MetabelianGroup: p must be prime");
    if (s < 0 || n < 0) throw ValidationError("MetabelianGroup: s and n must be nonnegative");
    if (m_delta < 1 || nt::gcd(m_delta, p) != 1) throw ValidationError("MetabelianGroup: m_delta must be coprime to p");
    ps_ = nt::ipow(p, static_cast<unsigned>(s));
    pn_ = nt::ipow(p, static_cast<unsigned>(n));
    e_ = nt::mod(e, ps_);
    if (nt::gcd(e_, p) != 1 && ps_ > 1) throw ValidationError("MetabelianGroup: e must be a unit mod p^s");
    if (nt::powmod(e_, static_cast<nt::u64>(pn_), ps_) != 1 % ps_) {
      throw ValidationError("MetabelianGroup: e^{p^n} != 1 mod p^s");
    }
    epow_.resize(static_cast<std::size_t>(pn_));
    for (i64 k = 0; k < pn_; ++k) epow_[static_cast<std::size_t>(k)] = nt::powmod(e_, static_cast<nt::u64>(k), ps_);
  }

  [[nodiscard]] i64 p() const { return p_; }
  [[nodiscard]] int s() const { return s_; }
  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] i64 e() const { return e_; }
  [[nodiscard]] i64 m_delta() const { return m_delta_; }
  [[nodiscard]] i64 order() const { return ps_ * pn_ * m_delta_; }
  [[nodiscard]] bool is_abelian() const { return nt::mod(e_ - 1, ps_) == 0; }

  [[nodiscard]] Triple identity() const { return {}; }
  [[nodiscard]] Triple gamma() const { return {0, 1 % pn_, 0}; }
  [[nodiscard]] Triple tau() const { return {1 % ps_, 0, 0}; }
  [[nodiscard]] Triple delta() const { return {0, 0, 1 % m_delta_}; }
  [[nodiscard]] std::vector<Triple> generators() const { return {tau(), gamma(), delta()}; }

  [[nodiscard]] Triple normalize(Triple a) const {
    return {nt::mod(a.x, ps_), nt::mod(a.y, pn_), nt::mod(a.z, m_delta_)};
  }
  [[nodiscard]] Triple mul(const Triple& a, const Triple& b) const {
    return {nt::mod(a.x + nt::mulmod(e_pow(a.y), b.x, ps_), ps_), nt::mod(a.y + b.y, pn_), nt::mod(a.z + b.z, m_delta_)};
  }
  [[nodiscard]] Triple inv(const Triple& a) const {
    // (x,y,z)^{-1} = (-e^{-y} x, -y, -z)
    const i64 ny = nt::mod(-a.y, pn_);
    return {nt::mod(-nt::mulmod(e_pow(ny), a.x, ps_), ps_), ny, nt::mod(-a.z, m_delta_)};
  }
  [[nodiscard]] Triple pow(Triple a, i64 k) const {
    if (k < 0) {
      a = inv(a);
      k = -k;
    }
    Triple r = identity();
    while (k > 0) {
      if (k & 1) r = mul(r, a);
      a = mul(a, a);
      k >>= 1;
    }
    return r;
  }
  [[nodiscard]] Triple conj(const Triple& g, const Triple& h) const { return mul(mul(g, h), inv(g)); }  // g h g^{-1}

  [[nodiscard]] std::size_t index(const Triple& a) const {
    return static_cast<std::size_t>((a.x * pn_ + a.y) * m_delta_ + a.z);
  }
  [[nodiscard]] Triple element(std::size_t idx) const {
    const auto k = static_cast<i64>(idx);
    return {k / (pn_ * m_delta_), (k / m_delta_) % pn_, k % m_delta_};
  }
  [[nodiscard]] std::vector<Triple> elements(i64 cap = 100'000) const {
    if (order() > cap) throw ResourceError("MetabelianGroup: order " + std::to_string(order()) + " exceeds the cap");
    std::vector<Triple> out;
    for (std::size_t k = 0; k < static_cast<std::size_t>(order()); ++k) out.push_back(element(k));
    return out;
  }

  // ---- the tower G_i ----

  [[nodiscard]] i64 e_level(int i) const { return nt::powmod(e_, static_cast<nt::u64>(nt::ipow(p_, static_cast<unsigned>(i))), ps_); }
  /// p^{s_i} = |N / [H_i, H_i]| = gcd(e^{p^i} - 1, p^s).
  [[nodiscard]] i64 commutator_index(int i) const {
    check_level(i);
    const i64 g = nt::gcd(nt::mod(e_level(i) - 1, ps_), ps_);
    return g == 0 ? ps_ : g;
  }
  /// H_i as a group in its own right: Gamma-part Z/p^{n-i} acting via e^{p^i}.
  [[nodiscard]] MetabelianGroup subgroup_Hi(int i) const {
    check_level(i);
    return {p_, s_, n_ - i, e_level(i), m_delta_};
  }
  [[nodiscard]] bool in_level(const Triple& a, int i) const {
    check_level(i);
    return nt::mod(a.y, nt::ipow(p_, static_cast<unsigned>(i))) == 0;
  }
  /// G_i^{ab} = Z/p^{s_i} x Z/p^{n-i} x Z/m_delta.
  [[nodiscard]] FinAbGroup level_ab(int i) const {
    return FinAbGroup({commutator_index(i), nt::ipow(p_, static_cast<unsigned>(n_ - i)), m_delta_});
  }
  /// Abelianization map G_i -> G_i^{ab} on elements of G_i.
  [[nodiscard]] Vec ab_project(const Triple& a, int i) const {
    if (!in_level(a, i)) throw ValidationError("ab_project: element not in G_i");
    const i64 pi = nt::ipow(p_, static_cast<unsigned>(i));
    return {nt::mod(a.x, commutator_index(i)), a.y / pi, a.z};
  }
  /// A lift of an element of G_i^{ab} to G_i.
  [[nodiscard]] Triple ab_lift(const Vec& v, int i) const {
    const i64 pi = nt::ipow(p_, static_cast<unsigned>(i));
    return normalize({v[0], v[1] * pi, v[2]});
  }
  /// Conjugation by gamma^k on G_i^{ab}: (a, b, c) -> (e^k a, b, c).
  [[nodiscard]] Vec gamma_act(const Vec& v, int i, i64 k = 1) const {
    const i64 m = commutator_index(i);
    return {nt::mulmod(nt::mod(e_pow(nt::mod(k, pn_)), m), v[0], m), v[1], v[2]};
  }

  /// Conjugacy classes (BFS closure under conjugation by generators), ordered by least member index.
  [[nodiscard]] std::vector<std::vector<Triple>> conj_classes(i64 cap = 100'000) const {
    const auto elems = elements(cap);
    std::vector<int> cls(elems.size(), -1);
    std::vector<std::vector<Triple>> out;
    const auto gens = generators();
    for (std::size_t k = 0; k < elems.size(); ++k) {
      if (cls[k] >= 0) continue;
      const int id = static_cast<int>(out.size());
      out.emplace_back();
      std::vector<Triple> frontier{elems[k]};
      cls[k] = id;
      while (!frontier.empty()) {
        Triple g = frontier.back();
        frontier.pop_back();
        out.back().push_back(g);
        for (const auto& h : gens) {
          Triple c = conj(h, g);
          auto& slot = cls[index(c)];
          if (slot < 0) {
            slot = id;
            frontier.push_back(c);
          }
        }
      }
      std::sort(out.back().begin(), out.back().end());
    }
    return out;
  }

 private:
  [[nodiscard]] i64 e_pow(i64 y) const { return epow_[static_cast<std::size_t>(nt::mod(y, pn_))]; }
  void check_level(int i) const {
    if (i < 0 || i > n_) throw ValidationError("tower level out of range");
  }

  i64 p_ = 2;
  int s_ = 0, n_ = 0;
  i64 e_ = 1, m_delta_ = 1, ps_ = 1, pn_ = 1;
  std::vector<i64> epow_{1};
};

/// Schreier transfer Ver: A^{ab} -> B^{ab}.  `in_b` tests membership of B, `project_b`
/// abelianizes elements of B, `transversal` lists left coset representatives of B in A.
/// Ver(a) = prod_j h_j where a t_j = t_{sigma(j)} h_j.
template <class Elem, class Mul, class Inv>
Vec schreier_transfer(const Elem& a, const std::vector<Elem>& transversal, Mul mul, Inv inv,
                      const std::function<bool(const Elem&)>& in_b,
                      const std::function<Vec(const Elem&)>& project_b, const FinAbGroup& b_ab) {
  Vec acc = b_ab.zero();
  for (const auto& t : transversal) {
    const Elem at = mul(a, t);
    bool found = false;
    for (const auto& u : transversal) {
      const Elem h = mul(inv(u), at);
      if (in_b(h)) {
        acc = b_ab.add(acc, project_b(h));
        found = true;
        break;
      }
    }
    if (!found) throw ValidationError("schreier_transfer: transversal does not cover the cosets");
  }
  return acc;
}

/// The transfer G_{i-1}^{ab} -> G_i^{ab} of the tower as a homomorphism.  `variant`
/// selects the transversal: 0 uses gamma^{p^{i-1} j}, 1 uses gamma^{p^{i-1} j} (tau delta)^j.
inline AbHom tower_transfer(const MetabelianGroup& g, int i, int variant = 0) {
  if (i < 1 || i > g.n()) throw ValidationError("tower_transfer: need 1 <= i <= n");
  const i64 step = nt::ipow(g.p(), static_cast<unsigned>(i - 1));
  std::vector<Triple> transversal;
  for (i64 j = 0; j < g.p(); ++j) {
    Triple t = g.pow(g.gamma(), step * j);
    if (variant == 1) t = g.mul(t, g.pow(g.mul(g.tau(), g.delta()), j));
    transversal.push_back(t);
  }
  const FinAbGroup src = g.level_ab(i - 1), dst = g.level_ab(i);
  auto mul = [&](const Triple& a, const Triple& b) { return g.mul(a, b); };
  auto inv = [&](const Triple& a) { return g.inv(a); };
  std::function<bool(const Triple&)> in_b = [&](const Triple& h) { return g.in_level(h, i); };
  std::function<Vec(const Triple&)> proj = [&](const Triple& h) { return g.ab_project(h, i); };
  std::vector<Vec> images;
  for (std::size_t k = 0; k < src.rank(); ++k) {
    const Triple lift = g.ab_lift(src.unit_vector(k), i - 1);
    images.push_back(schreier_transfer(lift, transversal, mul, inv, in_b, proj, dst));
  }
  return AbHom::make(src, dst, images);
}

/// Natural map G_j^{ab} -> B_{ij} = H_j/[H_i,H_i] x Delta, i <= j, with
/// B_{ij} = Z/p^{s_i} x Z/p^{n-j} x Z/m_delta.
inline FinAbGroup b_group(const MetabelianGroup& g, int i, int j) {
  return FinAbGroup({g.commutator_index(i), nt::ipow(g.p(), static_cast<unsigned>(g.n() - j)), g.m_delta()});
}
inline AbHom pi_hom(const MetabelianGroup& g, int i, int j) {
  if (i > j) throw ValidationError("pi_hom: need i <= j");
  const FinAbGroup src = g.level_ab(j), dst = b_group(g, i, j);
  return AbHom::make(src, dst, {dst.unit_vector(0), dst.unit_vector(1), dst.unit_vector(2)});
}
/// B_{ij} as a subgroup of G_i^{ab}: (a, b, c) -> (a, p^{j-i} b, c).
inline AbHom b_embedding(const MetabelianGroup& g, int i, int j) {
  const FinAbGroup src = b_group(g, i, j), dst = g.level_ab(i);
  const i64 step = nt::ipow(g.p(), static_cast<unsigned>(j - i));
  return AbHom::make(src, dst, {dst.unit_vector(0), dst.scale(dst.unit_vector(1), step), dst.unit_vector(2)});
}
/// G_i^{ab} -> G_{i-1}^{ab} induced by the inclusion G_i in G_{i-1}.
inline AbHom level_inclusion(const MetabelianGroup& g, int i) {
  const FinAbGroup src = g.level_ab(i), dst = g.level_ab(i - 1);
  std::vector<Vec> images;
  for (std::size_t k = 0; k < src.rank(); ++k) images.push_back(g.ab_project(g.ab_lift(src.unit_vector(k), i), i - 1));
  return AbHom::make(src, dst, images);
}

}  // namespace epsilon0
