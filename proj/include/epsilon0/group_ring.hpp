#pragma once

// Sparse elements of J[A] for finite abelian A with CycloElem coefficients,
// a division-free determinant for matrices over commutative rings, unit
// certificates, and reduction of coefficients modulo p^W.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "epsilon0/abelian_group.hpp"
#include "epsilon0/cyclotomic.hpp"

namespace epsilon0 {

class GroupRingElem {
 public:
  GroupRingElem() = default;
  GroupRingElem(FinAbGroup group, CycloModulus base) : group_(std::move(group)), base_(base) {}

  static GroupRingElem zero(const FinAbGroup& g, const CycloModulus& base) { return {g, base}; }
  static GroupRingElem one(const FinAbGroup& g, const CycloModulus& base) {
    return basis(g, base, g.zero(), CycloElem::from_integer(base, 1));
  }
  static GroupRingElem basis(const FinAbGroup& g, const CycloModulus& base, const Vec& elem, const CycloElem& coeff) {
    GroupRingElem x(g, base);
    x.add_term(g.index(g.reduce(elem)), coeff);
    return x;
  }
  static GroupRingElem scalar(const FinAbGroup& g, const CycloElem& c) { return basis(g, c.modulus(), g.zero(), c); }

  [[nodiscard]] const FinAbGroup& group() const { return group_; }
  [[nodiscard]] const CycloModulus& base() const { return base_; }
  [[nodiscard]] const std::map<std::size_t, CycloElem>& terms() const { return c_; }
  [[nodiscard]] bool is_zero() const { return c_.empty(); }

  [[nodiscard]] CycloElem coeff(const Vec& g) const {
    auto it = c_.find(group_.index(group_.reduce(g)));
    return it == c_.end() ? CycloElem(base_) : it->second;
  }

  void add_term(std::size_t idx, const CycloElem& v) {
    if (v.is_zero()) return;
    base_ = base_.join(v.modulus());
    auto it = c_.find(idx);
    if (it == c_.end()) {
      c_.emplace(idx, v);
    } else {
      it->second += v;
      if (it->second.is_zero()) c_.erase(it);
    }
  }

  GroupRingElem& operator+=(const GroupRingElem& o) {
    check_group(o);
    for (const auto& [k, v] : o.c_) add_term(k, v);
    return *this;
  }
  GroupRingElem& operator-=(const GroupRingElem& o) {
    check_group(o);
    for (const auto& [k, v] : o.c_) add_term(k, -v);
    return *this;
  }
  friend GroupRingElem operator+(GroupRingElem a, const GroupRingElem& b) { return a += b; }
  friend GroupRingElem operator-(GroupRingElem a, const GroupRingElem& b) { return a -= b; }
  GroupRingElem operator-() const {
    GroupRingElem r(group_, base_);
    for (const auto& [k, v] : c_) r.c_.emplace(k, -v);
    return r;
  }
  friend GroupRingElem operator*(const GroupRingElem& a, const GroupRingElem& b) {
    a.check_group(b);
    GroupRingElem r(a.group_, a.base_.join(b.base_));
    std::vector<std::pair<Vec, const CycloElem*>> bt;
    for (const auto& [k, v] : b.c_) bt.emplace_back(b.group_.element(k), &v);
    for (const auto& [k, v] : a.c_) {
      const Vec g = a.group_.element(k);
      for (const auto& [h, w] : bt) {
        CycloElem prod = v;
        prod *= *w;
        r.add_term(a.group_.index(a.group_.add(g, h)), prod);
      }
    }
    return r;
  }
  GroupRingElem& operator*=(const GroupRingElem& o) { return *this = *this * o; }
  [[nodiscard]] GroupRingElem scaled(const CycloElem& s) const {
    GroupRingElem r(group_, base_.join(s.modulus()));
    for (const auto& [k, v] : c_) {
      CycloElem t = v;
      t *= s;
      r.add_term(k, t);
    }
    return r;
  }
  [[nodiscard]] GroupRingElem scaled(const mpz_class& s) const {
    GroupRingElem r(group_, base_);
    for (const auto& [k, v] : c_) {
      CycloElem t = v;
      t *= s;
      r.add_term(k, t);
    }
    return r;
  }
  [[nodiscard]] GroupRingElem pow(unsigned long e) const {
    GroupRingElem r = one(group_, base_), b = *this;
    while (e) {
      if (e & 1) r = r * b;
      e >>= 1;
      if (e) b = b * b;
    }
    return r;
  }

  /// Push-forward along a group homomorphism (a ring map when hom is a homomorphism).
  [[nodiscard]] GroupRingElem push_forward(const AbHom& hom) const {
    if (!(hom.src == group_)) throw ValidationError("GroupRingElem::push_forward: source group mismatch");
    GroupRingElem r(hom.dst, base_);
    for (const auto& [k, v] : c_) r.add_term(hom.dst.index(hom.apply(group_.element(k))), v);
    return r;
  }
  /// Applies a map to the group-element basis within the same group.
  [[nodiscard]] GroupRingElem map_basis(const std::function<Vec(const Vec&)>& f) const {
    GroupRingElem r(group_, base_);
    for (const auto& [k, v] : c_) r.add_term(group_.index(group_.reduce(f(group_.element(k)))), v);
    return r;
  }
  [[nodiscard]] GroupRingElem map_coeffs(const std::function<CycloElem(const CycloElem&)>& f) const {
    GroupRingElem r(group_, base_);
    for (const auto& [k, v] : c_) r.add_term(k, f(v));
    return r;
  }

  /// chi(x) = sum_g c_g chi(g).
  [[nodiscard]] CycloElem evaluate(const Character& chi) const {
    if (!(chi.group == group_)) throw ValidationError("GroupRingElem::evaluate: character of another group");
    const CycloModulus m = base_.with_order(group_.exponent());
    CycloElem s(m);
    for (const auto& [k, v] : c_) {
      CycloElem t = v;
      t *= chi.value(group_.element(k), m);
      s += t;
    }
    return s;
  }
  [[nodiscard]] CycloElem augmentation() const {
    CycloElem s(base_);
    for (const auto& [k, v] : c_) s += v;
    return s;
  }
  /// True iff every coefficient is divisible by p^k.
  [[nodiscard]] bool p_divisible(int k) const {
    for (const auto& [idx, v] : c_) {
      if (!v.p_divisible(k)) return false;
    }
    return true;
  }
  [[nodiscard]] GroupRingElem divide_exact(const mpz_class& d) const {
    GroupRingElem r(group_, base_);
    for (const auto& [k, v] : c_) r.add_term(k, v.divide_exact(d));
    return r;
  }

  friend bool operator==(const GroupRingElem& a, const GroupRingElem& b) {
    if (!(a.group_ == b.group_) || a.c_.size() != b.c_.size()) return false;
    auto it = b.c_.begin();
    for (const auto& [k, v] : a.c_) {
      if (k != it->first || !(v == it->second)) return false;
      ++it;
    }
    return true;
  }

  [[nodiscard]] std::string to_string() const {
    if (c_.empty()) return "0";
    std::string s;
    for (const auto& [k, v] : c_) {
      if (!s.empty()) s += " + ";
      const Vec g = group_.element(k);
      std::string gs = "[";
      for (std::size_t j = 0; j < g.size(); ++j) gs += (j ? "," : "") + std::to_string(g[j]);
      gs += "]";
      s += (group_.is_zero(g) ? "(" + v.to_string() + ")" : "(" + v.to_string() + ")*g" + gs);
    }
    return s;
  }

 private:
  void check_group(const GroupRingElem& o) const {
    if (!(o.group_ == group_)) throw ValidationError("GroupRingElem: group mismatch");
  }

  FinAbGroup group_;
  CycloModulus base_;
  std::map<std::size_t, CycloElem> c_;
};

/// Division-free determinant (Berkowitz) over a commutative ring.
template <class R>
R berkowitz_det(const std::vector<std::vector<R>>& a, const R& one, const R& zero) {
  const std::size_t n = a.size();
  if (n == 0) return one;
  // vect holds the characteristic polynomial coefficients of the leading r x r block
  std::vector<R> vect{one, R(zero - a[0][0])};
  for (std::size_t r = 1; r < n; ++r) {
    // C = row r, entries 0..r-1; S = column r, rows 0..r-1; A = leading block
    std::vector<R> col(r), row(r);
    for (std::size_t k = 0; k < r; ++k) {
      col[k] = a[k][r];
      row[k] = a[r][k];
    }
    // Toeplitz first column: 1, -a_rr, -R S, -R A S, -R A^2 S, ...
    std::vector<R> t{one, R(zero - a[r][r])};
    std::vector<R> cur = col;
    for (std::size_t k = 0; k < r; ++k) {
      R dot = zero;
      for (std::size_t m = 0; m < r; ++m) dot = dot + row[m] * cur[m];
      t.push_back(R(zero - dot));
      if (k + 1 < r) {
        std::vector<R> nxt(r, zero);
        for (std::size_t x = 0; x < r; ++x) {
          for (std::size_t y = 0; y < r; ++y) nxt[x] = nxt[x] + a[x][y] * cur[y];
        }
        cur = std::move(nxt);
      }
    }
    std::vector<R> nv(r + 2, zero);
    for (std::size_t x = 0; x < r + 2; ++x) {
      for (std::size_t y = 0; y <= x && y < vect.size(); ++y) {
        if (x - y < t.size()) nv[x] = nv[x] + t[x - y] * vect[y];
      }
    }
    vect = std::move(nv);
  }
  // det = (-1)^n * constant term of the characteristic polynomial
  return (n % 2 == 0) ? vect[n] : R(zero - vect[n]);
}

// ---------------------------------------------------------------------------
// Unit certificates

struct UnitCertificate {
  bool certified = false;
  std::string method;                  // "inverse" or "character-norms"
  std::vector<std::string> norms;      // rational norms of each character value
  std::optional<GroupRingElem> scaled_inverse;  // w with x w = D
  mpz_class scale = 1;                  // D
  int scale_p_valuation = 0;
};

namespace detail {

/// Product of all Galois conjugates of x in Q(zeta_M), M = the modulus order, as (numerator, den_exp).
inline std::pair<mpz_class, int> field_norm(const CycloElem& x) {
  const i64 M = x.modulus().N();
  CycloElem prod = CycloElem::from_integer(x.modulus(), 1);
  for (i64 t = 1; t <= std::max<i64>(M, 1); ++t) {
    if (nt::gcd(t, M) != 1) continue;
    prod *= x.galois(t);
  }
  return prod.rational_value();
}

/// Product of the Galois conjugates other than the identity (the adjugate of x).
inline CycloElem adjugate(const CycloElem& x) {
  const i64 M = x.modulus().N();
  CycloElem prod = CycloElem::from_integer(x.modulus(), 1);
  for (i64 t = 2; t < M; ++t) {
    if (nt::gcd(t, M) != 1) continue;
    prod *= x.galois(t);
  }
  return prod;
}

}  // namespace detail

/// Certifies x in J[A]^x.  Character values are checked to have p-adic unit norms;
/// when the size budget allows, an explicit scaled inverse w (x w = D) is also built.
inline UnitCertificate certify_unit(const GroupRingElem& x, i64 p, bool want_inverse = true,
                                    i64 inverse_budget = 4096) {
  UnitCertificate cert;
  const FinAbGroup& g = x.group();
  const auto chars = characters(g);
  const CycloModulus m = x.base().with_order(g.exponent());
  std::vector<CycloElem> values;
  std::vector<std::pair<mpz_class, int>> norms;
  bool all_units = true;
  for (const auto& chi : chars) {
    CycloElem v = x.evaluate(chi).promote(m);
    auto nrm = detail::field_norm(v);
    cert.norms.push_back(nrm.first.get_str() + (nrm.second ? "/" + std::to_string(m.l) + "^" + std::to_string(nrm.second) : ""));
    if (nrm.first == 0 || mpz_divisible_ui_p(nrm.first.get_mpz_t(), static_cast<unsigned long>(p))) all_units = false;
    values.push_back(v);
    norms.push_back(nrm);
  }
  if (!all_units) return cert;
  cert.certified = true;
  cert.method = "character-norms";
  if (!want_inverse || static_cast<i64>(m.dim()) * g.order() > inverse_budget) return cert;
  // x^{-1} = |A|^{-1} sum_chi e'_chi adj(chi(x)) / N(chi(x)),  e'_chi = sum_g chi(g^{-1}) g
  mpz_class L = 1;
  int max_den = 0;
  for (const auto& nrm : norms) {
    L = lcm(L, abs(nrm.first));
    max_den = std::max(max_den, nrm.second);
  }
  const mpz_class D = L * g.order();
  GroupRingElem w(g, m);
  for (std::size_t c = 0; c < chars.size(); ++c) {
    // adj / N = adj * l^{den} / num ; scale by L / num (integer)
    CycloElem coeff = detail::adjugate(values[c]);
    coeff = coeff.scale_lpow(norms[c].second);
    const mpz_class k = L / norms[c].first;
    coeff *= k;
    const auto inv_chi = chars[c].inverse();
    for (const auto& h : g.elements()) {
      CycloElem t = coeff;
      t *= inv_chi.value(h, m);
      w.add_term(g.index(h), t);
    }
  }
  (void)max_den;
  const GroupRingElem check = x * w;
  if (!(check == GroupRingElem::scalar(g, CycloElem::from_integer(m, D)))) {
    throw MathCheckError("certify_unit: scaled inverse does not verify");
  }
  cert.method = "inverse";
  cert.scaled_inverse = w;
  cert.scale = D;
  mpz_class tmp = D;
  cert.scale_p_valuation = static_cast<int>(mpz_remove(tmp.get_mpz_t(), D.get_mpz_t(), mpz_class(p).get_mpz_t()));
  if (!w.p_divisible(cert.scale_p_valuation)) throw MathCheckError("certify_unit: inverse is not p-integral");
  return cert;
}

// ---------------------------------------------------------------------------
// Reduction modulo p^W (l is invertible there)

inline CycloElem reduce_mod_pw(const CycloElem& x, i64 p, int W) {
  const mpz_class pw = detail::mpz_pow(p, static_cast<unsigned>(W));
  const CycloModulus& m = x.modulus();
  mpz_class linv;
  mpz_class lpow = detail::mpz_pow(m.l, static_cast<unsigned>(x.den_exp()));
  if (mpz_invert(linv.get_mpz_t(), lpow.get_mpz_t(), pw.get_mpz_t()) == 0) {
    throw MathCheckError("reduce_mod_pw: l not invertible mod p");
  }
  CycloElem r = x.scale_lpow(x.den_exp());  // clear the denominator
  CycloElem out(m);
  std::vector<mpz_class> nums = r.numerators();
  for (auto& c : nums) {
    c = c * linv;
    mpz_fdiv_r(c.get_mpz_t(), c.get_mpz_t(), pw.get_mpz_t());
  }
  return CycloElem::from_numerators(m, nums);
}

inline GroupRingElem reduce_mod_pw(const GroupRingElem& x, i64 p, int W) {
  return x.map_coeffs([&](const CycloElem& c) { return reduce_mod_pw(c, p, W); });
}

}  // namespace epsilon0
