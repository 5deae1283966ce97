#pragma once

// Exact arithmetic in Z[1/l][zeta_N], N = l^alpha * p^beta * m.
//
// Elements are stored in the tensor power basis
//   zeta_{l^alpha}^i (x) zeta_{p^beta}^j (x) zeta_m^k,
//   0 <= i < phi(l^alpha), 0 <= j < phi(p^beta), 0 <= k < phi(m),
// with integer numerators over a shared denominator l^den_exp.  The shared
// exponent is kept minimal, which makes the representation canonical.
//
// Roots of unity follow one compatible system: zeta_{l^x} = zeta_{l^alpha}^{l^(alpha-x)},
// zeta_r = zeta_m^{m/r}, and zeta_o^e for general o is split by partial fractions
// e/o = e1/l^x + e2/p^y + e3/r (mod 1).  Enlarging the modulus never changes the
// meaning of an element.

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "epsilon0/errors.hpp"
#include "epsilon0/number_theory.hpp"

namespace epsilon0 {

using nt::i64;

struct CycloModulus {
  i64 l = 2;
  int alpha = 0;
  i64 p = 3;
  int beta = 0;
  i64 m = 1;

  static CycloModulus make(i64 l, int alpha, i64 p, int beta, i64 m) {
    if (!nt::is_prime(l) || !nt::is_prime(p)) throw ValidationError("CycloModulus: l and p must be prime");
    if (l == p) throw ValidationError("CycloModulus: l and p must be distinct");
    if (alpha < 0 || beta < 0 || m < 1) throw ValidationError("CycloModulus: bad exponents");
    if (nt::gcd(m, l * p) != 1) throw ValidationError("CycloModulus: m must be coprime to l*p");
    return CycloModulus{l, alpha, p, beta, m};
  }

  /// Smallest modulus (for the given l, p) containing the o-th roots of unity.
  static CycloModulus for_order(i64 l, i64 p, i64 order) {
    auto [a, rest] = nt::split_prime(order, l);
    auto [b, m] = nt::split_prime(rest, p);
    return make(l, a, p, b, m);
  }

  [[nodiscard]] i64 L() const { return nt::ipow(l, static_cast<unsigned>(alpha)); }
  [[nodiscard]] i64 P() const { return nt::ipow(p, static_cast<unsigned>(beta)); }
  [[nodiscard]] i64 N() const { return L() * P() * m; }
  [[nodiscard]] i64 phi_L() const { return nt::euler_phi(L()); }
  [[nodiscard]] i64 phi_P() const { return nt::euler_phi(P()); }
  [[nodiscard]] i64 phi_m() const { return nt::euler_phi(m); }
  [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(phi_L() * phi_P() * phi_m()); }

  [[nodiscard]] bool contains_order(i64 order) const { return N() % order == 0; }

  /// Least common modulus; l and p must agree.
  [[nodiscard]] CycloModulus join(const CycloModulus& other) const {
    if (l != other.l || p != other.p) throw ValidationError("CycloModulus::join: mismatched primes");
    return CycloModulus{l, std::max(alpha, other.alpha), p, std::max(beta, other.beta), nt::lcm(m, other.m)};
  }

  [[nodiscard]] CycloModulus with_order(i64 order) const { return join(for_order(l, p, order)); }

  bool operator==(const CycloModulus&) const = default;
};

namespace detail {

/// Rows e = 0..n-1: coefficients of x^e modulo Phi_n(x) in the basis 1..x^{phi(n)-1}.
inline const std::vector<std::vector<i64>>& power_table(i64 n) {
  static std::mutex mu;
  static std::map<i64, std::vector<std::vector<i64>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  // Phi_n = (x^n - 1) / prod_{d | n, d < n} Phi_d, computed by exact division.
  std::map<i64, std::vector<i64>> cyclo;
  auto compute = [&](i64 k) {
    std::vector<i64> num(static_cast<std::size_t>(k + 1), 0);
    num[0] = -1;
    num[static_cast<std::size_t>(k)] = 1;
    for (auto& [d, phid] : cyclo) {
      if (d >= k || k % d != 0) continue;
      std::size_t dn = num.size() - 1, dd = phid.size() - 1;
      std::vector<i64> quot(dn - dd + 1, 0);
      for (std::size_t t = dn + 1; t-- > dd;) {
        i64 c = num[t];
        quot[t - dd] = c;
        for (std::size_t s = 0; s <= dd; ++s) num[t - dd + s] -= c * phid[s];
      }
      num = quot;
    }
    cyclo[k] = num;
  };
  for (i64 k = 1; k <= n; ++k) {
    if (n % k == 0) compute(k);
  }
  const auto& phi = cyclo[n];
  const std::size_t deg = phi.size() - 1;
  std::vector<std::vector<i64>> table;
  std::vector<i64> cur(deg, 0);
  if (deg > 0) cur[0] = 1;
  for (i64 e = 0; e < n; ++e) {
    table.push_back(deg > 0 ? cur : std::vector<i64>{1});
    if (deg == 0) continue;
    // multiply by x and reduce by the monic Phi_n
    i64 top = cur[deg - 1];
    for (std::size_t s = deg - 1; s > 0; --s) cur[s] = cur[s - 1];
    cur[0] = 0;
    for (std::size_t s = 0; s < deg; ++s) cur[s] -= top * phi[s];
  }
  if (deg == 0) {
    // n == 1: Phi_1 = x - 1, so every power of zeta_1 is 1 in the 1-dim basis.
    table.assign(1, std::vector<i64>{1});
  }
  return cache.emplace(n, std::move(table)).first->second;
}

inline mpz_class mpz_pow(i64 base, unsigned e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base), e);
  return r;
}

inline bool mpz_divisible(const mpz_class& a, const mpz_class& d) {
  return mpz_divisible_p(a.get_mpz_t(), d.get_mpz_t()) != 0;
}

/// Accumulator over exponent triples (e1 mod L, e2 mod P, e3 mod m).
class ExponentSpace {
 public:
  explicit ExponentSpace(const CycloModulus& mod)
      : mod_(mod), L_(mod.L()), P_(mod.P()), m_(mod.m), acc_(static_cast<std::size_t>(L_ * P_ * m_)) {}

  void add(i64 e1, i64 e2, i64 e3, const mpz_class& c) {
    if (c == 0) return;
    acc_[static_cast<std::size_t>((nt::mod(e1, L_) * P_ + nt::mod(e2, P_)) * m_ + nt::mod(e3, m_))] += c;
  }

  /// Reduce into the tensor basis of the modulus.
  [[nodiscard]] std::vector<mpz_class> reduce() const {
    const auto& tl = power_table(L_);
    const auto& tp = power_table(P_);
    const auto& tm = power_table(m_);
    const i64 fl = mod_.phi_L(), fp = mod_.phi_P(), fm = mod_.phi_m();
    std::vector<mpz_class> out(static_cast<std::size_t>(fl * fp * fm));
    mpz_class tmp;
    for (i64 e1 = 0; e1 < L_; ++e1) {
      for (i64 e2 = 0; e2 < P_; ++e2) {
        for (i64 e3 = 0; e3 < m_; ++e3) {
          const mpz_class& c = acc_[static_cast<std::size_t>((e1 * P_ + e2) * m_ + e3)];
          if (c == 0) continue;
          const auto& rl = tl[static_cast<std::size_t>(e1)];
          const auto& rp = tp[static_cast<std::size_t>(e2)];
          const auto& rm = tm[static_cast<std::size_t>(e3)];
          for (i64 i = 0; i < fl; ++i) {
            if (rl[static_cast<std::size_t>(i)] == 0) continue;
            for (i64 j = 0; j < fp; ++j) {
              i64 cij = rl[static_cast<std::size_t>(i)] * rp[static_cast<std::size_t>(j)];
              if (cij == 0) continue;
              for (i64 k = 0; k < fm; ++k) {
                i64 cijk = cij * rm[static_cast<std::size_t>(k)];
                if (cijk == 0) continue;
                tmp = c;
                tmp *= static_cast<long>(cijk);
                out[static_cast<std::size_t>((i * fp + j) * fm + k)] += tmp;
              }
            }
          }
        }
      }
    }
    return out;
  }

 private:
  CycloModulus mod_;
  i64 L_, P_, m_;
  std::vector<mpz_class> acc_;
};

}  // namespace detail

class CycloElem {
 public:
  CycloElem() : CycloElem(CycloModulus{}) {}
  explicit CycloElem(const CycloModulus& mod) : mod_(mod), num_(mod.dim()) {}

  static CycloElem from_integer(const CycloModulus& mod, const mpz_class& n) {
    CycloElem x(mod);
    x.num_[0] = n;
    return x;
  }

  /// n / l^den_exp; den_exp may be negative (meaning multiplication by l^{-den_exp}).
  static CycloElem from_lpow_rational(const CycloModulus& mod, const mpz_class& n, int den_exp) {
    CycloElem x = from_integer(mod, n);
    return x.scale_lpow(-den_exp);
  }

  /// Integer numerators in the tensor basis (length mod.dim()).
  static CycloElem from_numerators(const CycloModulus& mod, std::vector<mpz_class> nums, int den_exp = 0) {
    if (nums.size() != mod.dim()) throw ValidationError("CycloElem::from_numerators: wrong length");
    if (den_exp < 0) throw ValidationError("CycloElem::from_numerators: negative denominator exponent");
    CycloElem x(mod);
    x.num_ = std::move(nums);
    x.den_exp_ = den_exp;
    x.normalize();
    return x;
  }

  /// The root of unity zeta_order^exponent in the compatible system.
  static CycloElem root(const CycloModulus& mod, i64 order, i64 exponent) {
    const auto [e1, e2, e3] = root_coords(mod, order, exponent);
    detail::ExponentSpace acc(mod);
    acc.add(e1, e2, e3, mpz_class(1));
    CycloElem out(mod);
    out.num_ = acc.reduce();
    return out;
  }

  /// Sum of c * zeta_order^exponent over the entries, reduced once.
  struct RootTerm {
    i64 order;
    i64 exponent;
  };
  static CycloElem sum_of_root_products(const CycloModulus& mod,
                                        const std::vector<std::pair<std::vector<RootTerm>, mpz_class>>& terms) {
    detail::ExponentSpace acc(mod);
    for (const auto& [factors, c] : terms) {
      i64 s1 = 0, s2 = 0, s3 = 0;
      for (const auto& f : factors) {
        const auto [e1, e2, e3] = root_coords(mod, f.order, f.exponent);
        s1 += e1;
        s2 += e2;
        s3 += e3;
      }
      acc.add(s1, s2, s3, c);
    }
    CycloElem out(mod);
    out.num_ = acc.reduce();
    return out;
  }

  /// Exponents (mod L, mod P, mod m) of zeta_order^exponent.
  static std::array<i64, 3> root_coords(const CycloModulus& mod, i64 order, i64 exponent) {
    if (!mod.contains_order(order)) {
      throw ValidationError("CycloElem::root: modulus lacks roots of order " + std::to_string(order));
    }
    auto [x, rest] = nt::split_prime(order, mod.l);
    auto [y, r] = nt::split_prime(rest, mod.p);
    const i64 lx = nt::ipow(mod.l, static_cast<unsigned>(x));
    const i64 py = nt::ipow(mod.p, static_cast<unsigned>(y));
    const i64 e = nt::mod(exponent, order);
    const i64 e1 = lx == 1 ? 0 : nt::mulmod(e, nt::invmod(order / lx, lx), lx);
    const i64 e2 = py == 1 ? 0 : nt::mulmod(e, nt::invmod(order / py, py), py);
    const i64 e3 = r == 1 ? 0 : nt::mulmod(e, nt::invmod(order / r, r), r);
    return {e1 * (mod.L() / lx), e2 * (mod.P() / py), e3 * (mod.m / r)};
  }

  [[nodiscard]] const CycloModulus& modulus() const { return mod_; }
  [[nodiscard]] const std::vector<mpz_class>& numerators() const { return num_; }
  [[nodiscard]] int den_exp() const { return den_exp_; }

  [[nodiscard]] bool is_zero() const {
    return std::all_of(num_.begin(), num_.end(), [](const mpz_class& c) { return c == 0; });
  }
  [[nodiscard]] bool is_rational() const {
    return std::all_of(num_.begin() + 1, num_.end(), [](const mpz_class& c) { return c == 0; });
  }

  /// Same element over a larger modulus.
  [[nodiscard]] CycloElem promote(const CycloModulus& target) const {
    if (target == mod_) return *this;
    if (target.join(mod_) != target) throw ValidationError("CycloElem::promote: target does not contain modulus");
    const i64 sl = target.L() / mod_.L(), sp = target.P() / mod_.P(), sm = target.m / mod_.m;
    detail::ExponentSpace acc(target);
    for_each_term([&](i64 i, i64 j, i64 k, const mpz_class& c) { acc.add(i * sl, j * sp, k * sm, c); });
    CycloElem out(target);
    out.num_ = acc.reduce();
    out.den_exp_ = den_exp_;
    return out;
  }

  CycloElem& operator+=(const CycloElem& o) { return add_scaled(o, 1); }
  CycloElem& operator-=(const CycloElem& o) { return add_scaled(o, -1); }

  CycloElem& operator*=(const CycloElem& o) {
    if (o.mod_ != mod_) {
      const CycloModulus j = mod_.join(o.mod_);
      *this = promote(j) * o.promote(j);
      return *this;
    }
    if (is_zero() || o.is_zero()) {
      *this = CycloElem(mod_);
      return *this;
    }
    detail::ExponentSpace acc(mod_);
    mpz_class prod;
    for_each_term([&](i64 i1, i64 j1, i64 k1, const mpz_class& a) {
      o.for_each_term([&](i64 i2, i64 j2, i64 k2, const mpz_class& b) {
        prod = a * b;
        acc.add(i1 + i2, j1 + j2, k1 + k2, prod);
      });
    });
    num_ = acc.reduce();
    den_exp_ += o.den_exp_;
    normalize();
    return *this;
  }

  CycloElem& operator*=(const mpz_class& s) {
    for (auto& c : num_) c *= s;
    normalize();
    return *this;
  }

  friend CycloElem operator+(CycloElem a, const CycloElem& b) { return a += b; }
  friend CycloElem operator-(CycloElem a, const CycloElem& b) { return a -= b; }
  friend CycloElem operator*(CycloElem a, const CycloElem& b) { return a *= b; }
  friend CycloElem operator*(CycloElem a, const mpz_class& s) { return a *= s; }
  friend CycloElem operator*(const mpz_class& s, CycloElem a) { return a *= s; }
  CycloElem operator-() const {
    CycloElem r = *this;
    for (auto& c : r.num_) c = -c;
    return r;
  }

  /// Multiply by l^e (e of either sign).
  [[nodiscard]] CycloElem scale_lpow(int e) const {
    CycloElem r = *this;
    if (e >= 0) {
      const mpz_class f = detail::mpz_pow(mod_.l, static_cast<unsigned>(e));
      for (auto& c : r.num_) c *= f;
    } else {
      r.den_exp_ += -e;
    }
    r.normalize();
    return r;
  }

  /// Exact division by an integer; throws unless every numerator is divisible.
  [[nodiscard]] CycloElem divide_exact(const mpz_class& d) const {
    CycloElem r = *this;
    for (auto& c : r.num_) {
      if (!detail::mpz_divisible(c, d)) throw MathCheckError("CycloElem::divide_exact: not divisible");
      mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), d.get_mpz_t());
    }
    r.normalize();
    return r;
  }

  [[nodiscard]] CycloElem pow(unsigned long e) const {
    CycloElem result = from_integer(mod_, 1);
    CycloElem base = *this;
    while (e > 0) {
      if (e & 1UL) result *= base;
      e >>= 1UL;
      if (e > 0) base *= base;
    }
    return result;
  }

  /// Automorphism zeta_N -> zeta_N^t.
  [[nodiscard]] CycloElem galois(i64 t) const {
    if (nt::gcd(nt::mod(t, mod_.N()), mod_.N()) != 1) {
      throw ValidationError("galois_apply: t = " + std::to_string(t) + " is not coprime to N");
    }
    return map_exponents(t, t, t);
  }

  /// Coefficient Frobenius: zeta -> zeta^p on the l- and m-parts, identity on p-power roots.
  [[nodiscard]] CycloElem frobenius_p() const { return map_exponents(mod_.p, 1, mod_.p); }

  /// True iff x = p^k * y with y in Z[1/l][zeta_N].
  [[nodiscard]] bool p_divisible(int k) const {
    if (k <= 0) return true;
    const mpz_class pk = detail::mpz_pow(mod_.p, static_cast<unsigned>(k));
    return std::all_of(num_.begin(), num_.end(), [&](const mpz_class& c) { return detail::mpz_divisible(c, pk); });
  }

  /// Largest k with p^k | x (capped at `cap` for zero).
  [[nodiscard]] int p_valuation(int cap = 1 << 20) const {
    int best = cap;
    for (const auto& c : num_) {
      if (c == 0) continue;
      best = std::min(best, static_cast<int>(mpz_remove(mpz_class().get_mpz_t(), c.get_mpz_t(), mpz_class(mod_.p).get_mpz_t())));
    }
    return best;
  }

  /// Rational value (numerator, den_exp) when is_rational().
  [[nodiscard]] std::pair<mpz_class, int> rational_value() const {
    if (!is_rational()) throw ValidationError("CycloElem::rational_value: not rational");
    return {num_[0], den_exp_};
  }

  /// Calls f(i, j, k, numerator) for each nonzero tensor coordinate.
  template <class F>
  void for_each_term(F&& f) const {
    const i64 fp = mod_.phi_P(), fm = mod_.phi_m();
    for (std::size_t idx = 0; idx < num_.size(); ++idx) {
      if (num_[idx] == 0) continue;
      const i64 s = static_cast<i64>(idx);
      f(s / (fp * fm), (s / fm) % fp, s % fm, num_[idx]);
    }
  }

  friend bool operator==(const CycloElem& a, const CycloElem& b) {
    if (a.mod_ != b.mod_) {
      const CycloModulus j = a.mod_.join(b.mod_);
      return a.promote(j) == b.promote(j);
    }
    return a.den_exp_ == b.den_exp_ && a.num_ == b.num_;
  }

  [[nodiscard]] std::string to_string() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for_each_term([&](i64 i, i64 j, i64 k, const mpz_class& c) {
      if (!first) os << (c < 0 ? " - " : " + ");
      else if (c < 0) os << "-";
      first = false;
      mpz_class a = abs(c);
      bool mono = (i || j || k);
      if (!mono || a != 1) os << a.get_str();
      if (den_exp_ > 0) os << "/" << mod_.l << "^" << den_exp_;
      auto term = [&](const char* name, i64 base, i64 e) {
        if (e == 0) return;
        os << (mono && (a != 1 || den_exp_ > 0) ? "*" : "") << name << base;
        if (e > 1) os << "^" << e;
        mono = true;
        a = 1;
      };
      term("z", mod_.L(), i);
      term("z", mod_.P(), j);
      term("z", mod_.m, k);
    });
    return os.str();
  }

 private:
  CycloElem& add_scaled(const CycloElem& o, int sign) {
    if (o.mod_ != mod_) {
      const CycloModulus j = mod_.join(o.mod_);
      *this = promote(j);
      return add_scaled(o.promote(j), sign);
    }
    const int common = std::max(den_exp_, o.den_exp_);
    const mpz_class fa = detail::mpz_pow(mod_.l, static_cast<unsigned>(common - den_exp_));
    const mpz_class fb = detail::mpz_pow(mod_.l, static_cast<unsigned>(common - o.den_exp_));
    for (std::size_t t = 0; t < num_.size(); ++t) {
      if (fa != 1) num_[t] *= fa;
      if (sign > 0) num_[t] += o.num_[t] * fb;
      else num_[t] -= o.num_[t] * fb;
    }
    den_exp_ = common;
    normalize();
    return *this;
  }

  [[nodiscard]] CycloElem map_exponents(i64 tl, i64 tp, i64 tm) const {
    detail::ExponentSpace acc(mod_);
    for_each_term([&](i64 i, i64 j, i64 k, const mpz_class& c) { acc.add(i * tl, j * tp, k * tm, c); });
    CycloElem out(mod_);
    out.num_ = acc.reduce();
    out.den_exp_ = den_exp_;
    return out;
  }

  void normalize() {
    if (is_zero()) {
      den_exp_ = 0;
      return;
    }
    const mpz_class l(mod_.l);
    while (den_exp_ > 0 &&
           std::all_of(num_.begin(), num_.end(), [&](const mpz_class& c) { return detail::mpz_divisible(c, l); })) {
      for (auto& c : num_) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), l.get_mpz_t());
      --den_exp_;
    }
  }

  CycloModulus mod_;
  std::vector<mpz_class> num_;
  int den_exp_ = 0;
};

/// Free-function spellings of the module operations.
inline CycloElem galois_apply(const CycloElem& x, i64 t) { return x.galois(t); }
inline CycloElem frobenius_p(const CycloElem& x) { return x.frobenius_p(); }
inline bool p_divisibility(const CycloElem& x, int k) { return x.p_divisible(k); }

}  // namespace epsilon0
