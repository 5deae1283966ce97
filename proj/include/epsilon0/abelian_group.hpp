#pragma once

// Finite abelian groups presented as products of cyclic groups Z/n_1 x ... x Z/n_r,
// homomorphisms between them, Smith normal form, subgroup enumeration, and
// characters with values in the compatible root-of-unity system of CycloElem.

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "epsilon0/cyclotomic.hpp"
#include "epsilon0/errors.hpp"
#include "epsilon0/number_theory.hpp"

namespace epsilon0 {

using Vec = std::vector<i64>;
using IntMatrix = std::vector<std::vector<i64>>;

/// Smith normal form D = U * A * V of an integer matrix (rows x cols).
/// Only V (column transform) and the diagonal are returned; that is all the
/// quotient constructions need.
struct SmithForm {
  Vec diagonal;  // length min(rows, cols), nonnegative, each divides the next (zeros last)
  IntMatrix V;   // cols x cols, unimodular
};

inline SmithForm smith_normal_form(IntMatrix A, std::size_t cols) {
  const std::size_t rows = A.size();
  IntMatrix V(cols, Vec(cols, 0));
  for (std::size_t i = 0; i < cols; ++i) V[i][i] = 1;
  auto col_op = [&](std::size_t dst, std::size_t src, i64 k) {  // col dst += k * col src
    if (k == 0) return;
    for (auto& row : A) row[dst] += k * row[src];
    for (auto& row : V) row[dst] += k * row[src];
  };
  auto col_swap = [&](std::size_t x, std::size_t y) {
    for (auto& row : A) std::swap(row[x], row[y]);
    for (auto& row : V) std::swap(row[x], row[y]);
  };
  auto row_op = [&](std::size_t dst, std::size_t src, i64 k) {
    if (k == 0) return;
    for (std::size_t c = 0; c < cols; ++c) A[dst][c] += k * A[src][c];
  };
  const std::size_t n = std::min(rows, cols);
  for (std::size_t t = 0; t < n; ++t) {
    while (true) {
      // pivot: smallest nonzero |entry| in the remaining block
      std::size_t pr = rows, pc = cols;
      for (std::size_t r = t; r < rows; ++r) {
        for (std::size_t c = t; c < cols; ++c) {
          if (A[r][c] != 0 && (pr == rows || std::abs(A[r][c]) < std::abs(A[pr][pc]))) {
            pr = r;
            pc = c;
          }
        }
      }
      if (pr == rows) return {[&] {
                                Vec d(n, 0);
                                for (std::size_t k = 0; k < t; ++k) d[k] = std::abs(A[k][k]);
                                return d;
                              }(),
                              V};
      std::swap(A[t], A[pr]);
      col_swap(t, pc);
      bool clean = true;
      for (std::size_t r = t + 1; r < rows; ++r) {
        row_op(r, t, -(A[r][t] / A[t][t]));
        if (A[r][t] != 0) clean = false;
      }
      for (std::size_t c = t + 1; c < cols; ++c) {
        col_op(c, t, -(A[t][c] / A[t][t]));
        if (A[t][c] != 0) clean = false;
      }
      if (!clean) continue;
      // divisibility condition
      bool divides = true;
      for (std::size_t r = t + 1; r < rows && divides; ++r) {
        for (std::size_t c = t + 1; c < cols; ++c) {
          if (A[r][c] % A[t][t] != 0) {
            row_op(t, r, 1);
            divides = false;
            break;
          }
        }
      }
      if (divides) break;
    }
    if (A[t][t] < 0) {
      for (auto& row : A) row[t] = -row[t];
      for (auto& row : V) row[t] = -row[t];
    }
  }
  Vec d(n, 0);
  for (std::size_t k = 0; k < n; ++k) d[k] = std::abs(A[k][k]);
  return {d, V};
}

class FinAbGroup {
 public:
  FinAbGroup() = default;
  explicit FinAbGroup(Vec moduli) : moduli_(std::move(moduli)) {
    for (i64 n : moduli_) {
      if (n < 1) throw ValidationError("FinAbGroup: cyclic factor orders must be >= 1");
    }
  }

  [[nodiscard]] const Vec& moduli() const { return moduli_; }
  [[nodiscard]] std::size_t rank() const { return moduli_.size(); }
  [[nodiscard]] i64 order() const {
    i64 s = 1;
    for (i64 n : moduli_) s *= n;
    return s;
  }
  [[nodiscard]] i64 exponent() const {
    i64 e = 1;
    for (i64 n : moduli_) e = nt::lcm(e, n);
    return e;
  }

  [[nodiscard]] Vec zero() const { return Vec(moduli_.size(), 0); }
  [[nodiscard]] Vec reduce(Vec v) const {
    check_len(v);
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = nt::mod(v[j], moduli_[j]);
    return v;
  }
  [[nodiscard]] Vec add(const Vec& x, const Vec& y) const {
    Vec r(x.size());
    for (std::size_t j = 0; j < r.size(); ++j) r[j] = nt::mod(x[j] + y[j], moduli_[j]);
    return r;
  }
  [[nodiscard]] Vec sub(const Vec& x, const Vec& y) const {
    Vec r(x.size());
    for (std::size_t j = 0; j < r.size(); ++j) r[j] = nt::mod(x[j] - y[j], moduli_[j]);
    return r;
  }
  [[nodiscard]] Vec neg(const Vec& x) const { return sub(zero(), x); }
  [[nodiscard]] Vec scale(const Vec& x, i64 k) const {
    Vec r(x.size());
    for (std::size_t j = 0; j < r.size(); ++j) r[j] = nt::mulmod(x[j], nt::mod(k, moduli_[j]), moduli_[j]);
    return r;
  }
  [[nodiscard]] bool is_zero(const Vec& x) const {
    return std::all_of(x.begin(), x.end(), [](i64 v) { return v == 0; });
  }
  [[nodiscard]] i64 order_of(const Vec& x) const {
    i64 o = 1;
    for (std::size_t j = 0; j < x.size(); ++j) o = nt::lcm(o, moduli_[j] / nt::gcd(nt::mod(x[j], moduli_[j]), moduli_[j]));
    return o;
  }

  /// Mixed-radix index in [0, order()).
  [[nodiscard]] std::size_t index(const Vec& x) const {
    std::size_t idx = 0;
    for (std::size_t j = 0; j < x.size(); ++j) idx = idx * static_cast<std::size_t>(moduli_[j]) + static_cast<std::size_t>(nt::mod(x[j], moduli_[j]));
    return idx;
  }
  [[nodiscard]] Vec element(std::size_t idx) const {
    Vec v(moduli_.size());
    for (std::size_t j = moduli_.size(); j-- > 0;) {
      v[j] = static_cast<i64>(idx % static_cast<std::size_t>(moduli_[j]));
      idx /= static_cast<std::size_t>(moduli_[j]);
    }
    return v;
  }
  [[nodiscard]] std::vector<Vec> elements() const {
    std::vector<Vec> out;
    const auto n = static_cast<std::size_t>(order());
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) out.push_back(element(k));
    return out;
  }
  [[nodiscard]] Vec unit_vector(std::size_t j) const {
    Vec v = zero();
    v[j] = 1 % moduli_[j];
    return v;
  }

  /// Invariant factors (each >= 2, each dividing the next).
  [[nodiscard]] Vec invariant_factors() const {
    IntMatrix A;
    for (std::size_t j = 0; j < moduli_.size(); ++j) {
      Vec row(moduli_.size(), 0);
      row[j] = moduli_[j];
      A.push_back(row);
    }
    auto snf = smith_normal_form(A, moduli_.size());
    Vec out;
    for (i64 dv : snf.diagonal) {
      if (dv > 1) out.push_back(dv);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  [[nodiscard]] std::string to_string() const {
    if (moduli_.empty()) return "1";
    std::string s;
    for (std::size_t j = 0; j < moduli_.size(); ++j) s += (j ? " x Z/" : "Z/") + std::to_string(moduli_[j]);
    return s;
  }

  bool operator==(const FinAbGroup&) const = default;

 private:
  void check_len(const Vec& v) const {
    if (v.size() != moduli_.size()) throw ValidationError("FinAbGroup: element has wrong length");
  }
  Vec moduli_;
};

/// Homomorphism given by images of the standard generators.
struct AbHom {
  FinAbGroup src;
  FinAbGroup dst;
  std::vector<Vec> images;

  static AbHom make(FinAbGroup src, FinAbGroup dst, std::vector<Vec> images) {
    if (images.size() != src.rank()) throw ValidationError("AbHom: need one image per generator");
    for (std::size_t j = 0; j < images.size(); ++j) {
      images[j] = dst.reduce(images[j]);
      if (!dst.is_zero(dst.scale(images[j], src.moduli()[j]))) {
        throw ValidationError("AbHom: image order does not divide generator order");
      }
    }
    return {std::move(src), std::move(dst), std::move(images)};
  }

  static AbHom identity(const FinAbGroup& g) {
    std::vector<Vec> im;
    for (std::size_t j = 0; j < g.rank(); ++j) im.push_back(g.unit_vector(j));
    return {g, g, im};
  }

  [[nodiscard]] Vec apply(const Vec& x) const {
    Vec r = dst.zero();
    for (std::size_t j = 0; j < x.size(); ++j) r = dst.add(r, dst.scale(images[j], x[j]));
    return r;
  }

  [[nodiscard]] AbHom compose_after(const AbHom& first) const {  // this o first
    std::vector<Vec> im;
    for (const auto& v : first.images) im.push_back(apply(v));
    return {first.src, dst, im};
  }

  [[nodiscard]] bool is_surjective() const;
};

/// Subgroup generated by `gens`, as the set of element indices.
inline std::set<std::size_t> generated_subgroup(const FinAbGroup& g, const std::vector<Vec>& gens) {
  std::set<std::size_t> seen{g.index(g.zero())};
  std::vector<Vec> frontier{g.zero()};
  while (!frontier.empty()) {
    Vec x = frontier.back();
    frontier.pop_back();
    for (const auto& s : gens) {
      Vec y = g.add(x, s);
      if (seen.insert(g.index(y)).second) frontier.push_back(y);
    }
  }
  return seen;
}

inline bool AbHom::is_surjective() const {
  return static_cast<i64>(generated_subgroup(dst, images).size()) == dst.order();
}

/// Quotient A / <gens> with the projection, via SNF of the relation matrix.
inline AbHom quotient_map(const FinAbGroup& a, const std::vector<Vec>& gens) {
  IntMatrix rel;
  for (std::size_t j = 0; j < a.rank(); ++j) {
    Vec row(a.rank(), 0);
    row[j] = a.moduli()[j];
    rel.push_back(row);
  }
  for (const auto& v : gens) rel.push_back(a.reduce(v));
  auto snf = smith_normal_form(rel, a.rank());
  Vec mods;
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < snf.diagonal.size(); ++k) {
    if (snf.diagonal[k] != 1) {
      if (snf.diagonal[k] == 0) throw MathCheckError("quotient_map: infinite quotient");
      mods.push_back(snf.diagonal[k]);
      keep.push_back(k);
    }
  }
  FinAbGroup q(mods);
  std::vector<Vec> images;
  for (std::size_t j = 0; j < a.rank(); ++j) {
    Vec im;
    for (std::size_t t = 0; t < keep.size(); ++t) im.push_back(snf.V[j][keep[t]]);
    images.push_back(q.reduce(im));
  }
  return AbHom::make(a, q, images);
}

/// Every subgroup of g, each as a sorted list of generators (a minimal-ish generating set)
/// together with its element set.  Deterministic order.
struct Subgroup {
  std::vector<Vec> generators;
  std::set<std::size_t> elements;
};

inline std::vector<Subgroup> all_subgroups(const FinAbGroup& g, i64 cap = 4096) {
  if (g.order() > cap) throw ResourceError("all_subgroups: group too large");
  std::vector<Subgroup> out{{{}, {g.index(g.zero())}}};
  std::set<std::set<std::size_t>> seen{out[0].elements};
  const auto elems = g.elements();
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    for (const auto& x : elems) {
      if (out[idx].elements.count(g.index(x))) continue;
      auto gens = out[idx].generators;
      gens.push_back(x);
      auto set = generated_subgroup(g, gens);
      if (seen.insert(set).second) out.push_back({gens, set});
    }
  }
  return out;
}

/// Whether B is a quotient of A (equivalently a subgroup): compare primary invariants.
inline bool is_quotient_of(const FinAbGroup& b, const FinAbGroup& a) {
  std::map<i64, std::vector<int>> pa, pb;
  auto primary = [](const FinAbGroup& g, std::map<i64, std::vector<int>>& out) {
    for (i64 n : g.moduli()) {
      for (auto [r, e] : nt::factor(n)) out[r].push_back(e);
    }
    for (auto& [r, v] : out) std::sort(v.rbegin(), v.rend());
  };
  primary(a, pa);
  primary(b, pb);
  for (auto& [r, eb] : pb) {
    auto& ea = pa[r];
    if (eb.size() > ea.size()) return false;
    for (std::size_t k = 0; k < eb.size(); ++k) {
      if (eb[k] > ea[k]) return false;
    }
  }
  return true;
}

/// A character chi(x) = zeta^{sum_j k_j x_j E / n_j}, E = exponent of the group.
struct Character {
  FinAbGroup group;
  Vec exps;

  /// chi(x) as a fraction num / group.exponent() modulo 1.
  [[nodiscard]] i64 value_numerator(const Vec& x) const {
    const i64 e = group.exponent();
    i64 s = 0;
    for (std::size_t j = 0; j < exps.size(); ++j) {
      s = nt::mod(s + nt::mulmod(nt::mulmod(exps[j], x[j], e), e / group.moduli()[j], e), e);
    }
    return s;
  }
  [[nodiscard]] CycloElem value(const Vec& x, const CycloModulus& base) const {
    const i64 e = group.exponent();
    return CycloElem::root(base.with_order(e), e, value_numerator(x));
  }
  [[nodiscard]] bool is_trivial() const {
    return std::all_of(exps.begin(), exps.end(), [](i64 v) { return v == 0; });
  }
  [[nodiscard]] Character inverse() const { return {group, group.neg(exps)}; }
  [[nodiscard]] Character operator*(const Character& o) const { return {group, group.add(exps, o.exps)}; }
  [[nodiscard]] i64 order() const { return group.order_of(exps); }
  /// chi o hom, a character of hom.src.
  [[nodiscard]] Character pullback(const AbHom& hom) const {
    Vec k;
    const i64 e = group.exponent();
    const i64 es = hom.src.exponent();
    for (std::size_t j = 0; j < hom.src.rank(); ++j) {
      // chi(image_j) = zeta_e^{v}; as a character of Z/n_j: zeta_{n_j}^{k_j}, k_j = v * n_j / e
      const i64 v = value_numerator(hom.images[j]);
      const i64 nj = hom.src.moduli()[j];
      const nt::i128 num = static_cast<nt::i128>(v) * nj;
      if (num % e != 0) throw MathCheckError("Character::pullback: ill-defined");
      k.push_back(nt::mod(static_cast<i64>(num / e), nj));
    }
    (void)es;
    return {hom.src, k};
  }
  bool operator==(const Character&) const = default;
};

inline std::vector<Character> characters(const FinAbGroup& g) {
  std::vector<Character> out;
  for (const auto& x : g.elements()) out.push_back({g, x});
  return out;
}

/// Direct product A x B with the coordinates of A first.
inline FinAbGroup direct_product(const FinAbGroup& a, const FinAbGroup& b) {
  Vec m = a.moduli();
  m.insert(m.end(), b.moduli().begin(), b.moduli().end());
  return FinAbGroup(m);
}

}  // namespace epsilon0
