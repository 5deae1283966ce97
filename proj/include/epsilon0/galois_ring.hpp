#pragma once

// Galois rings O_K / (l^a) for K unramified over Q_l of degree d, with the
// uniformiser pi = l.  Elements are polynomials of degree < d over Z/l^a,
// reduced modulo a monic lift f of an irreducible polynomial over F_l.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "epsilon0/errors.hpp"
#include "epsilon0/number_theory.hpp"

namespace epsilon0 {

using nt::i64;

/// Default cap on enumerations (units, tables).  Overridable per call.
inline constexpr i64 kDefaultEnumerationCap = 10'000'000;

struct LocalFieldParams {
  i64 l = 3;
  int d = 1;
  int a = 1;

  [[nodiscard]] i64 q() const { return nt::ipow(l, static_cast<unsigned>(d)); }
  [[nodiscard]] i64 la() const { return nt::ipow(l, static_cast<unsigned>(a)); }
  bool operator==(const LocalFieldParams&) const = default;
};

namespace detail {

/// Polynomials over Z/mod as coefficient vectors, low degree first.
using Poly = std::vector<i64>;

inline void poly_trim(Poly& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

/// a*b mod (f, mod), f monic of degree d; a, b of length d.
inline Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& f, i64 mod) {
  const std::size_t d = f.size() - 1;
  std::vector<nt::i128> prod(2 * d, 0);
  for (std::size_t i = 0; i < d; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < d; ++j) prod[i + j] += static_cast<nt::i128>(a[i]) * b[j];
  }
  for (auto& c : prod) c %= mod;
  for (std::size_t t = 2 * d; t-- > d;) {
    nt::i128 c = prod[t] % mod;
    if (c == 0) continue;
    for (std::size_t s = 0; s < d; ++s) prod[t - d + s] = (prod[t - d + s] - c * f[s]) % mod;
    prod[t] = 0;
  }
  Poly out(d);
  for (std::size_t i = 0; i < d; ++i) out[i] = nt::mod(static_cast<i64>(prod[i] % mod), mod);
  return out;
}

inline Poly poly_powmod(Poly base, std::uint64_t e, const Poly& f, i64 mod) {
  const std::size_t d = f.size() - 1;
  Poly r(d, 0);
  r[0] = 1 % mod;
  while (e > 0) {
    if (e & 1U) r = poly_mulmod(r, base, f, mod);
    e >>= 1U;
    if (e > 0) base = poly_mulmod(base, base, f, mod);
  }
  return r;
}

/// gcd over F_l (l prime), monic result.
inline Poly poly_gcd_field(Poly a, Poly b, i64 l) {
  poly_trim(a);
  poly_trim(b);
  while (!b.empty()) {
    // a mod b
    const i64 inv = nt::invmod(b.back(), l);
    while (a.size() >= b.size()) {
      const i64 c = nt::mulmod(a.back(), inv, l);
      const std::size_t shift = a.size() - b.size();
      for (std::size_t s = 0; s < b.size(); ++s) a[shift + s] = nt::mod(a[shift + s] - c * b[s], l);
      poly_trim(a);
      if (a.empty()) break;
    }
    std::swap(a, b);
  }
  if (!a.empty()) {
    const i64 inv = nt::invmod(a.back(), l);
    for (auto& c : a) c = nt::mulmod(c, inv, l);
  }
  return a;
}

/// Rabin irreducibility test for monic f of degree d over F_l.
inline bool is_irreducible_mod_l(const Poly& f, i64 l) {
  const std::size_t d = f.size() - 1;
  if (d == 1) return true;
  Poly x(d, 0);
  x[1] = 1;
  auto x_pow_l_k = [&](unsigned k) {
    Poly r = x;
    for (unsigned t = 0; t < k; ++t) r = poly_powmod(r, static_cast<std::uint64_t>(l), f, l);
    return r;
  };
  Poly full = x_pow_l_k(static_cast<unsigned>(d));
  if (full != x) return false;
  for (auto [r, e] : nt::factor(static_cast<i64>(d))) {
    (void)e;
    Poly h = x_pow_l_k(static_cast<unsigned>(static_cast<i64>(d) / r));
    h[1] = nt::mod(h[1] - 1, l);
    Poly fcopy = f;
    Poly g = poly_gcd_field(fcopy, h, l);
    if (g.size() != 1) return false;
  }
  return true;
}

/// Whether the class of x generates (F_l[x]/f)^x, i.e. has order l^d - 1.
inline bool x_is_primitive(const Poly& f, i64 l) {
  const std::size_t d = f.size() - 1;
  if (f[0] == 0) return false;
  const i64 order = nt::ipow(l, static_cast<unsigned>(d)) - 1;
  Poly x(d, 0);
  if (d == 1) {
    x[0] = nt::mod(-f[0], l);
  } else {
    x[1] = 1;
  }
  Poly one(d, 0);
  one[0] = 1;
  if (poly_powmod(x, static_cast<std::uint64_t>(order), f, l) != one) return false;
  for (auto [r, e] : nt::factor(order)) {
    (void)e;
    if (poly_powmod(x, static_cast<std::uint64_t>(order / r), f, l) == one) return false;
  }
  return true;
}

}  // namespace detail

/// The reproducible defining polynomial for (l, d): the monic f = x^d + sum c_j x^j whose
/// base-l code sum c_j l^j is least among polynomials with a primitive root.
inline std::vector<i64> default_defining_polynomial(i64 l, int d) {
  const i64 count = nt::ipow(l, static_cast<unsigned>(d));
  for (i64 code = 0; code < count; ++code) {
    detail::Poly f(static_cast<std::size_t>(d) + 1, 0);
    i64 t = code;
    for (int j = 0; j < d; ++j) {
      f[static_cast<std::size_t>(j)] = t % l;
      t /= l;
    }
    f[static_cast<std::size_t>(d)] = 1;
    if (detail::x_is_primitive(f, l)) return f;
  }
  throw MathCheckError("no primitive polynomial found");  // unreachable for prime l
}

class GaloisRing;
using GaloisRingPtr = std::shared_ptr<const GaloisRing>;

struct GaloisRingElem {
  GaloisRingPtr ring;
  std::vector<i64> c;  // length d, entries in [0, l^a)

  bool operator==(const GaloisRingElem& o) const { return c == o.c; }
};

class GaloisRing : public std::enable_shared_from_this<GaloisRing> {
 public:
  static GaloisRingPtr make(const LocalFieldParams& params) {
    return make(params, default_defining_polynomial(params.l, params.d));
  }

  static GaloisRingPtr make(const LocalFieldParams& params, std::vector<i64> f) {
    if (!nt::is_prime(params.l)) throw ValidationError("GaloisRing: l must be prime");
    if (params.d < 1 || params.a < 1) throw ValidationError("GaloisRing: need d >= 1 and a >= 1");
    if (f.size() != static_cast<std::size_t>(params.d) + 1 || f.back() != 1) {
      throw ValidationError("GaloisRing: defining polynomial must be monic of degree d");
    }
    for (auto& x : f) x = nt::mod(x, params.l);
    if (!detail::is_irreducible_mod_l(f, params.l)) {
      throw ValidationError("GaloisRing: defining polynomial is reducible mod l");
    }
    auto ring = std::shared_ptr<GaloisRing>(new GaloisRing(params, std::move(f)));
    ring->init_frobenius();
    return ring;
  }

  [[nodiscard]] const LocalFieldParams& params() const { return params_; }
  [[nodiscard]] const std::vector<i64>& defining_polynomial() const { return f_; }
  [[nodiscard]] i64 l() const { return params_.l; }
  [[nodiscard]] int d() const { return params_.d; }
  [[nodiscard]] int a() const { return params_.a; }
  [[nodiscard]] i64 modulus() const { return mod_; }
  [[nodiscard]] i64 q() const { return params_.q(); }
  /// |(O/l^a)^x| = q^{a-1}(q-1).
  [[nodiscard]] i64 unit_count() const { return unit_count_at(params_.a); }
  [[nodiscard]] i64 unit_count_at(int t) const {
    return nt::ipow(q(), static_cast<unsigned>(t - 1)) * (q() - 1);
  }

  [[nodiscard]] GaloisRingElem zero() const { return {self(), std::vector<i64>(static_cast<std::size_t>(d()), 0)}; }
  [[nodiscard]] GaloisRingElem from_int(i64 v) const {
    auto z = zero();
    z.c[0] = nt::mod(v, mod_);
    return z;
  }
  [[nodiscard]] GaloisRingElem one() const { return from_int(1); }
  [[nodiscard]] GaloisRingElem from_coeffs(std::vector<i64> coeffs) const {
    if (coeffs.size() > static_cast<std::size_t>(d())) throw ValidationError("GaloisRing: too many coefficients");
    coeffs.resize(static_cast<std::size_t>(d()), 0);
    for (auto& x : coeffs) x = nt::mod(x, mod_);
    return {self(), std::move(coeffs)};
  }
  /// The class of x (a root of f).
  [[nodiscard]] GaloisRingElem generator_x() const {
    if (d() == 1) return from_int(-f_[0]);
    auto z = zero();
    z.c[1] = 1;
    return z;
  }

  [[nodiscard]] GaloisRingElem add(const GaloisRingElem& x, const GaloisRingElem& y) const {
    auto r = zero();
    for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] = nt::mod(x.c[i] + y.c[i], mod_);
    return r;
  }
  [[nodiscard]] GaloisRingElem sub(const GaloisRingElem& x, const GaloisRingElem& y) const {
    auto r = zero();
    for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] = nt::mod(x.c[i] - y.c[i], mod_);
    return r;
  }
  [[nodiscard]] GaloisRingElem neg(const GaloisRingElem& x) const { return sub(zero(), x); }
  [[nodiscard]] GaloisRingElem scale(const GaloisRingElem& x, i64 s) const {
    auto r = zero();
    for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] = nt::mulmod(x.c[i], nt::mod(s, mod_), mod_);
    return r;
  }
  [[nodiscard]] GaloisRingElem mul(const GaloisRingElem& x, const GaloisRingElem& y) const {
    if (d() == 1) return from_int(nt::mulmod(x.c[0], y.c[0], mod_));
    return {self(), detail::poly_mulmod(x.c, y.c, f_, mod_)};
  }
  [[nodiscard]] GaloisRingElem pow(const GaloisRingElem& x, std::uint64_t e) const {
    if (d() == 1) return from_int(nt::powmod(x.c[0], e, mod_));
    return {self(), detail::poly_powmod(x.c, e, f_, mod_)};
  }

  [[nodiscard]] bool is_unit(const GaloisRingElem& x) const {
    for (i64 v : x.c) {
      if (v % params_.l != 0) return true;
    }
    return false;
  }

  [[nodiscard]] GaloisRingElem inverse(const GaloisRingElem& x) const {
    if (!is_unit(x)) throw ValidationError("GaloisRing::inverse: not a unit");
    return pow(x, static_cast<std::uint64_t>(unit_count() - 1));
  }

  /// The lifted Frobenius automorphism (x -> the root of f congruent to x^l).
  [[nodiscard]] GaloisRingElem frobenius(const GaloisRingElem& x) const {
    auto r = zero();
    for (std::size_t j = 0; j < x.c.size(); ++j) {
      if (x.c[j] == 0) continue;
      r = add(r, scale(frob_powers_[j], x.c[j]));
    }
    return r;
  }

  /// Trace to Z/l^a as the Frobenius orbit sum.
  [[nodiscard]] i64 trace(const GaloisRingElem& x) const {
    auto acc = x;
    auto cur = x;
    for (int j = 1; j < d(); ++j) {
      cur = frobenius(cur);
      acc = add(acc, cur);
    }
    for (std::size_t j = 1; j < acc.c.size(); ++j) {
      if (acc.c[j] != 0) throw MathCheckError("GaloisRing::trace: orbit sum left the prime ring");
    }
    return acc.c[0];
  }

  /// Reduction to level t <= a (coefficients mod l^t), kept in this ring as canonical lift.
  [[nodiscard]] GaloisRingElem reduce_to_level(const GaloisRingElem& x, int t) const {
    const i64 lt = nt::ipow(params_.l, static_cast<unsigned>(t));
    auto r = zero();
    for (std::size_t i = 0; i < r.c.size(); ++i) r.c[i] = nt::mod(x.c[i], lt);
    return r;
  }

  /// Integer code sum c_j (l^a)^j, used for tables.
  [[nodiscard]] i64 encode(const GaloisRingElem& x) const {
    i64 code = 0;
    for (std::size_t j = x.c.size(); j-- > 0;) code = code * mod_ + x.c[j];
    return code;
  }
  [[nodiscard]] GaloisRingElem decode(i64 code) const {
    auto r = zero();
    for (std::size_t j = 0; j < r.c.size(); ++j) {
      r.c[j] = code % mod_;
      code /= mod_;
    }
    return r;
  }

  /// Visits every unit of O/pi^t (as canonical lifts with coefficients < l^t).
  void for_each_unit(int t, const std::function<void(const GaloisRingElem&)>& visit,
                     i64 cap = kDefaultEnumerationCap) const {
    if (t < 1 || t > a()) throw ValidationError("units_enumerate: level t must satisfy 1 <= t <= a");
    const i64 lt = nt::ipow(params_.l, static_cast<unsigned>(t));
    const i64 total = nt::ipow(lt, static_cast<unsigned>(d()));
    if (total > cap) {
      throw ResourceError("units_enumerate: " + std::to_string(total) + " residues exceed the enumeration cap " +
                          std::to_string(cap));
    }
    auto cur = zero();
    for (i64 code = 0; code < total; ++code) {
      i64 t2 = code;
      bool unit = false;
      for (std::size_t j = 0; j < cur.c.size(); ++j) {
        cur.c[j] = t2 % lt;
        t2 /= lt;
        if (cur.c[j] % params_.l != 0) unit = true;
      }
      if (unit) visit(cur);
    }
  }

  [[nodiscard]] std::vector<GaloisRingElem> units(int t, i64 cap = kDefaultEnumerationCap) const {
    std::vector<GaloisRingElem> out;
    for_each_unit(t, [&](const GaloisRingElem& u) { out.push_back(u); }, cap);
    return out;
  }

  [[nodiscard]] std::string to_string(const GaloisRingElem& x) const {
    std::string s = "[";
    for (std::size_t j = 0; j < x.c.size(); ++j) s += (j ? "," : "") + std::to_string(x.c[j]);
    return s + "]";
  }

 private:
  GaloisRing(LocalFieldParams params, std::vector<i64> f)
      : params_(params), f_(std::move(f)), mod_(params.la()) {
    f_lift_ = f_;
  }

  [[nodiscard]] GaloisRingPtr self() const { return shared_from_this(); }

  void init_frobenius() {
    // Newton-lift the root x^l of f from level 1 to level a.
    const auto x = generator_x();
    if (d() == 1) {
      frob_powers_ = {one()};
      return;
    }
    auto r = pow(x, static_cast<std::uint64_t>(params_.l));
    auto eval = [&](const std::vector<i64>& poly, const GaloisRingElem& at) {
      auto acc = zero();
      for (std::size_t j = poly.size(); j-- > 0;) acc = add(mul(acc, at), from_int(poly[j]));
      return acc;
    };
    std::vector<i64> deriv;
    for (std::size_t j = 1; j < f_lift_.size(); ++j) deriv.push_back(static_cast<i64>(j) * f_lift_[j]);
    for (int it = 0; it < params_.a + 1; ++it) {
      auto fr = eval(f_lift_, r);
      auto dfr = eval(deriv, r);
      r = sub(r, mul(fr, inverse(dfr)));
    }
    if (eval(f_lift_, r) != zero()) throw MathCheckError("GaloisRing: Frobenius lift failed");
    frob_powers_.clear();
    auto cur = one();
    for (int j = 0; j < d(); ++j) {
      frob_powers_.push_back(cur);
      cur = mul(cur, r);
    }
  }

  LocalFieldParams params_;
  std::vector<i64> f_;
  std::vector<i64> f_lift_;
  i64 mod_;
  std::vector<GaloisRingElem> frob_powers_;
};

/// Free-function spelling of trace_to_prime_ring.
inline i64 trace_to_prime_ring(const GaloisRingElem& x) { return x.ring->trace(x); }

}  // namespace epsilon0
