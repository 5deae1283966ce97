#pragma once

// Reciprocity data: a surjection K^x -> A that kills 1 + pi^a O_K, described by
// the images of the unit-group generators and of pi = l.  Synthetic data stand in
// for the Artin map of an abelian extension; TameTower builds the explicit tame
// reciprocity maps for the levels K_i of a metabelian tower and checks their
// compatibility with transfer and norm.

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "epsilon0/abelian_group.hpp"
#include "epsilon0/galois_ring.hpp"
#include "epsilon0/metabelian.hpp"
#include "epsilon0/unit_group.hpp"

namespace epsilon0 {

struct RecDatum {
  GaloisRingPtr ring;
  UnitGroupPtr units;
  FinAbGroup target;
  std::vector<Vec> unit_images;  // one per unit-group generator
  Vec pi_image;

  [[nodiscard]] const LocalFieldParams& params() const { return ring->params(); }
  [[nodiscard]] int level() const { return ring->a(); }

  [[nodiscard]] FinAbGroup unit_group_abstract() const { return FinAbGroup(units->orders()); }
  [[nodiscard]] AbHom unit_hom() const { return AbHom::make(unit_group_abstract(), target, unit_images); }

  /// Checks the homomorphism relations and surjectivity; throws ValidationError.
  void validate() const {
    if (!ring || !units) throw ValidationError("RecDatum: missing ring");
    if (unit_images.size() != units->generators().size()) throw ValidationError("RecDatum: wrong number of unit images");
    (void)unit_hom();
    if (pi_image.size() != target.rank()) throw ValidationError("RecDatum: pi image has wrong length");
    auto gens = unit_images;
    gens.push_back(target.reduce(pi_image));
    if (static_cast<i64>(generated_subgroup(target, gens).size()) != target.order()) {
      throw ValidationError("RecDatum: reciprocity map is not surjective");
    }
  }

  [[nodiscard]] Vec rec_unit(const GaloisRingElem& u) const {
    const auto coords = units->coordinates(u);
    Vec r = target.zero();
    for (std::size_t j = 0; j < coords.size(); ++j) r = target.add(r, target.scale(unit_images[j], coords[j]));
    return r;
  }
  /// rec(u * pi^k).
  [[nodiscard]] Vec rec(const GaloisRingElem& u, i64 pi_exponent) const {
    return target.add(rec_unit(u), target.scale(pi_image, pi_exponent));
  }

  /// a(chi): least t >= 0 with chi o rec trivial on 1 + pi^t (t = 0 meaning all units).
  [[nodiscard]] int conductor(const Character& chi) const {
    auto kills = [&](const Vec& g) { return chi.value_numerator(g) == 0; };
    bool unramified = true;
    for (const auto& img : unit_images) unramified = unramified && kills(img);
    if (unramified) return 0;
    const int a = level();
    const i64 l = params().l;
    for (int t = 1; t <= a; ++t) {
      bool ok = true;
      // U^{(t)} is generated by the l^{t-1}-th powers of the 1-unit generators.
      for (std::size_t j = 1; j < unit_images.size() && ok; ++j) {
        ok = kills(target.scale(unit_images[j], nt::ipow(l, static_cast<unsigned>(t - 1))));
      }
      if (ok) return t;
    }
    throw MathCheckError("RecDatum::conductor: character does not factor through level a");
  }

  /// The datum seen through a quotient map target -> target'.
  [[nodiscard]] RecDatum push_forward(const AbHom& q) const {
    if (!(q.src == target)) throw ValidationError("RecDatum::push_forward: quotient source mismatch");
    RecDatum out{ring, units, q.dst, {}, q.apply(pi_image)};
    for (const auto& img : unit_images) out.unit_images.push_back(q.apply(img));
    return out;
  }

  /// The same datum truncated to level b (requires the unit map to kill 1 + pi^b).
  [[nodiscard]] RecDatum at_level(int b) const;
};

namespace detail {

inline std::shared_ptr<UnitGroup> make_units(const GaloisRingPtr& ring, std::optional<std::vector<i64>> gen = std::nullopt,
                                             i64 cap = kDefaultEnumerationCap) {
  return std::make_shared<UnitGroup>(ring, std::move(gen), cap);
}

}  // namespace detail

inline RecDatum RecDatum::at_level(int b) const {
  const int a = level();
  if (b < 1 || b > a) throw ValidationError("RecDatum::at_level: need 1 <= b <= a");
  if (b == a) return *this;
  const i64 l = params().l;
  for (std::size_t j = 1; j < unit_images.size(); ++j) {
    if (!target.is_zero(target.scale(unit_images[j], nt::ipow(l, static_cast<unsigned>(b - 1))))) {
      throw ValidationError("RecDatum::at_level: unit map does not factor through level " + std::to_string(b));
    }
  }
  auto small = GaloisRing::make({l, params().d, b}, ring->defining_polynomial());
  // generators of the smaller unit group are the reductions of ours (same residue generator)
  auto u_small = detail::make_units(small, units->residue_log().generator().c);
  RecDatum out{small, u_small, target, {unit_images[0]}, pi_image};
  if (b > 1) {
    for (std::size_t j = 1; j < unit_images.size(); ++j) out.unit_images.push_back(unit_images[j]);
  }
  // the Teichmueller generator of the small ring is the reduction of ours; 1 + l x^j reduce likewise
  out.validate();
  return out;
}

/// Canonical full datum: A = U x Z/f with rec the identity on units and pi -> (0, 1).
inline RecDatum full_unit_datum(const LocalFieldParams& params, i64 unramified_order = 1,
                                i64 cap = kDefaultEnumerationCap) {
  auto ring = GaloisRing::make(params);
  auto units = detail::make_units(ring, std::nullopt, cap);
  Vec mods = units->orders();
  mods.push_back(unramified_order);
  FinAbGroup target(mods);
  RecDatum d{ring, units, target, {}, target.unit_vector(mods.size() - 1)};
  for (std::size_t j = 0; j < units->orders().size(); ++j) d.unit_images.push_back(target.unit_vector(j));
  d.validate();
  return d;
}

/// Deterministic random surjection (O/pi^a)^x x <pi> -> target.
inline RecDatum synthetic_rec(const LocalFieldParams& params, const FinAbGroup& target, std::uint64_t seed,
                              i64 cap = kDefaultEnumerationCap) {
  auto ring = GaloisRing::make(params);
  auto units = detail::make_units(ring, std::nullopt, cap);
  const FinAbGroup u_abs(units->orders());
  // existence: some c with target/<c> a quotient of the unit group
  std::vector<Vec> pi_candidates;
  for (const auto& c : target.elements()) {
    if (is_quotient_of(quotient_map(target, {c}).dst, u_abs)) pi_candidates.push_back(c);
  }
  if (pi_candidates.empty()) {
    throw ValidationError("synthetic_rec: " + target.to_string() + " is not a quotient of K^x / (1 + pi^" +
                          std::to_string(params.a) + ")");
  }
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  // admissible images of each generator: elements whose order divides the generator order
  std::vector<std::vector<Vec>> admissible;
  for (i64 o : units->orders()) {
    std::vector<Vec> ok;
    for (const auto& x : target.elements()) {
      if (o % target.order_of(x) == 0) ok.push_back(x);
    }
    admissible.push_back(ok);
  }
  for (int attempt = 0; attempt < 20000; ++attempt) {
    RecDatum d{ring, units, target, {}, pi_candidates[pick(pi_candidates.size())]};
    for (const auto& ok : admissible) d.unit_images.push_back(ok[pick(ok.size())]);
    auto gens = d.unit_images;
    gens.push_back(d.pi_image);
    if (static_cast<i64>(generated_subgroup(target, gens).size()) == target.order()) {
      d.validate();
      return d;
    }
  }
  throw ResourceError("synthetic_rec: no surjection found after 20000 random draws");
}

inline Vec rec_evaluate(const RecDatum& d, const GaloisRingElem& u, i64 pi_exponent) { return d.rec(u, pi_exponent); }

// ---------------------------------------------------------------------------
// Tame towers

struct TowerSpec {
  i64 l = 13;
  int d0 = 1;
  i64 p = 3;
  int s = 2;
  int n = 1;
  i64 e = 4;
  i64 m_delta = 1;
};

/// Realizability conditions; returns an empty string when they hold.
inline std::string tower_realizability_error(const TowerSpec& t) {
  if (!nt::is_prime(t.l) || !nt::is_prime(t.p) || t.l == t.p) return "l and p must be distinct primes";
  if (t.d0 < 1 || t.s < 0 || t.n < 0) return "need d0 >= 1, s >= 0, n >= 0";
  if (t.m_delta < 1 || nt::gcd(t.m_delta, t.p) != 1) return "m_delta must be positive and coprime to p";
  const i64 ps = nt::ipow(t.p, static_cast<unsigned>(t.s));
  const i64 q0 = nt::powmod(t.l, static_cast<nt::u64>(t.d0), ps);
  if (nt::powmod(nt::mod(t.e, ps), static_cast<nt::u64>(nt::ipow(t.p, static_cast<unsigned>(t.n))), ps) != 1 % ps) {
    return "e^{p^n} = 1 mod p^s fails";
  }
  if (nt::mod(t.e - q0, ps) != 0) return "e = l^{d0} mod p^s fails";
  if (nt::powmod(t.l, static_cast<nt::u64>(t.d0 * nt::ipow(t.p, static_cast<unsigned>(t.n))), ps) != 1 % ps) {
    return "p^s | l^{d0 p^n} - 1 fails";
  }
  return {};
}

struct CoherenceReport {
  std::string name;
  int level = 0;
  i64 checked = 0;
  bool passed = true;
  std::string counterexample;
};

class TameTower {
 public:
  /// `unit_sign` = +1 gives the unit part u -> -dlog(u); -1 the opposite normalization.
  explicit TameTower(const TowerSpec& spec, int unit_sign = 1, i64 cap = kDefaultEnumerationCap)
      : spec_(spec), unit_sign_(unit_sign) {
    if (auto err = tower_realizability_error(spec); !err.empty()) throw ValidationError("tame_tower: " + err);
    if (unit_sign != 1 && unit_sign != -1) throw ValidationError("tame_tower: unit_sign must be +1 or -1");
    group_ = MetabelianGroup(spec.p, spec.s, spec.n, spec.e, spec.m_delta);
    build_fields(cap);
    for (int i = 0; i <= spec.n; ++i) data_.push_back(make_level(i));
    run_coherence();
    for (const auto& r : coherence_) {
      if (!r.passed) throw MathCheckError("tame_tower: coherence check " + r.name + " failed: " + r.counterexample);
    }
  }

  [[nodiscard]] const TowerSpec& spec() const { return spec_; }
  [[nodiscard]] int unit_sign() const { return unit_sign_; }
  [[nodiscard]] const MetabelianGroup& group() const { return group_; }
  [[nodiscard]] int n() const { return spec_.n; }
  [[nodiscard]] const RecDatum& datum(int i) const { return data_.at(static_cast<std::size_t>(i)); }
  [[nodiscard]] const std::vector<CoherenceReport>& coherence() const { return coherence_; }
  /// [K_i : K] = p^i.
  [[nodiscard]] i64 degree(int i) const { return nt::ipow(spec_.p, static_cast<unsigned>(i)); }

  /// Embedding of the residue field of K_j into that of K_i (j <= i), on level-1 elements.
  [[nodiscard]] GaloisRingElem embed(const GaloisRingElem& u, int j, int i) const {
    const auto top = to_top(u, j);
    return from_top(top, i);
  }
  /// Norm from K_i to K_j on residue units.
  [[nodiscard]] GaloisRingElem norm(const GaloisRingElem& v, int i, int j) const {
    const auto& F = *fields_.back();
    const auto top = to_top(v, i);
    const i64 qi = fields_[static_cast<std::size_t>(i)]->q(), qj = fields_[static_cast<std::size_t>(j)]->q();
    return from_top(F.pow(top, static_cast<std::uint64_t>((qi - 1) / (qj - 1))), j);
  }

 private:
  void build_fields(i64 cap) {
    for (int i = 0; i <= spec_.n; ++i) {
      const int d = spec_.d0 * static_cast<int>(degree(i));
      if (nt::ipow(spec_.l, static_cast<unsigned>(d)) > cap) {
        throw ResourceError("tame_tower: residue field of size " + std::to_string(spec_.l) + "^" + std::to_string(d) +
                            " exceeds the enumeration cap");
      }
      fields_.push_back(GaloisRing::make({spec_.l, d, 1}));
    }
    const auto& top = fields_.back();
    const i64 qn = top->q();
    // embedding of each F_{q_i} into F_{q_n}: x_i -> least root of f_i
    for (int i = 0; i <= spec_.n; ++i) {
      const auto& Fi = fields_[static_cast<std::size_t>(i)];
      const auto& f = Fi->defining_polynomial();
      GaloisRingElem root;
      bool found = false;
      for (i64 code = 0; code < qn && !found; ++code) {
        auto r = top->decode(code);
        auto acc = top->zero();
        for (std::size_t k = f.size(); k-- > 0;) acc = top->add(top->mul(acc, r), top->from_int(f[k]));
        if (acc == top->zero()) {
          root = r;
          found = true;
        }
      }
      if (!found) throw MathCheckError("tame_tower: no root of the level polynomial in the top field");
      std::vector<GaloisRingElem> powers;
      auto cur = top->one();
      for (int k = 0; k < Fi->d(); ++k) {
        powers.push_back(cur);
        cur = top->mul(cur, root);
      }
      root_powers_.push_back(powers);
      std::unordered_map<i64, i64> inv;
      for (i64 code = 0; code < Fi->q(); ++code) inv.emplace(top->encode(to_top(Fi->decode(code), i)), code);
      from_top_.push_back(std::move(inv));
    }
  }

  [[nodiscard]] GaloisRingElem to_top(const GaloisRingElem& u, int i) const {
    const auto& top = fields_.back();
    auto acc = top->zero();
    const auto& pw = root_powers_[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < u.c.size(); ++k) acc = top->add(acc, top->scale(pw[k], u.c[k]));
    return acc;
  }
  [[nodiscard]] GaloisRingElem from_top(const GaloisRingElem& x, int i) const {
    const auto& tbl = from_top_[static_cast<std::size_t>(i)];
    auto it = tbl.find(fields_.back()->encode(x));
    if (it == tbl.end()) throw MathCheckError("tame_tower: element not in the level subfield");
    return fields_[static_cast<std::size_t>(i)]->decode(it->second);
  }

  RecDatum make_level(int i) {
    const auto& Fi = fields_[static_cast<std::size_t>(i)];
    const auto& top = fields_.back();
    if (!g_top_) g_top_ = least_primitive_element(top);
    const i64 qn = top->q(), qi = Fi->q();
    // norm-compatible generator g_i = N(g_n)
    const auto gi = from_top(top->pow(*g_top_, static_cast<std::uint64_t>((qn - 1) / (qi - 1))), i);
    auto units = detail::make_units(Fi, gi.c);
    const FinAbGroup target = group_.level_ab(i);
    const i64 psi = group_.commutator_index(i);
    RecDatum d{Fi, units, target, {}, {}};
    d.unit_images.push_back(target.reduce({-unit_sign_, 0, 0}));
    // pi = l: inverse Frobenius on the unramified part, and on the Kummer part the
    // unit (-1)^{m+1} with m = p^{s_i}, since (-1)^{m+1} l is a norm from K_i(l^{1/m}).
    const i64 minus_one_exp = (psi % 2 == 1) ? 0 : 1;  // (-1)^{m+1} = 1 or -1
    Vec pi_img = target.reduce({0, -1, -degree(i)});
    if (minus_one_exp == 1) pi_img = target.add(pi_img, d.rec_unit(Fi->from_int(-1)));
    d.pi_image = pi_img;
    d.validate();
    return d;
  }

  void run_coherence() {
    for (int i = 1; i <= spec_.n; ++i) {
      const auto& lo = datum(i - 1);
      const auto& hi = datum(i);
      const AbHom ver = tower_transfer(group_, i);
      const AbHom ver2 = tower_transfer(group_, i, 1);
      const AbHom incl = level_inclusion(group_, i);
      CoherenceReport schreier{"transfer-transversal-independence", i, 0, true, {}};
      for (const auto& x : lo.target.elements()) {
        ++schreier.checked;
        if (ver.apply(x) != ver2.apply(x)) {
          schreier.passed = false;
          schreier.counterexample = "element " + vec_str(x);
          break;
        }
      }
      coherence_.push_back(schreier);
      CoherenceReport a{"ver-compatibility", i, 0, true, {}};
      auto check_a = [&](const GaloisRingElem& u, i64 k, const std::string& label) {
        ++a.checked;
        const Vec lhs = hi.rec(embed(u, i - 1, i), k);
        const Vec rhs = ver.apply(lo.rec(u, k));
        if (lhs != rhs && a.passed) {
          a.passed = false;
          a.counterexample = label + ": rec_i = " + vec_str(lhs) + ", ver(rec_{i-1}) = " + vec_str(rhs);
        }
      };
      lo.ring->for_each_unit(1, [&](const GaloisRingElem& u) { check_a(u, 0, "unit " + lo.ring->to_string(u)); });
      check_a(lo.ring->one(), 1, "pi");
      coherence_.push_back(a);
      CoherenceReport b{"norm-compatibility", i, 0, true, {}};
      auto check_b = [&](const GaloisRingElem& v, i64 k, const std::string& label) {
        ++b.checked;
        // N(v pi^k) = N(v) pi^{p k}
        const Vec lhs = lo.rec(norm(v, i, i - 1), k * spec_.p);
        const Vec rhs = incl.apply(hi.rec(v, k));
        if (lhs != rhs && b.passed) {
          b.passed = false;
          b.counterexample = label + ": rec_{i-1}(N v) = " + vec_str(lhs) + ", image of rec_i(v) = " + vec_str(rhs);
        }
      };
      hi.ring->for_each_unit(1, [&](const GaloisRingElem& v) { check_b(v, 0, "unit " + hi.ring->to_string(v)); });
      check_b(hi.ring->one(), 1, "pi");
      coherence_.push_back(b);
    }
  }

  static std::string vec_str(const Vec& v) {
    std::string s = "(";
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + std::to_string(v[k]);
    return s + ")";
  }

  TowerSpec spec_;
  int unit_sign_;
  MetabelianGroup group_;
  std::vector<GaloisRingPtr> fields_;
  std::vector<std::vector<GaloisRingElem>> root_powers_;
  std::vector<std::unordered_map<i64, i64>> from_top_;
  std::optional<GaloisRingElem> g_top_;
  std::vector<RecDatum> data_;
  std::vector<CoherenceReport> coherence_;
};

}  // namespace epsilon0
