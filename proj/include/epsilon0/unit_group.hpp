#pragma once

// Explicit coordinates on (O/l^a)^x  =  <omega(g)>  x  prod_j <1 + l x^j>
// where g generates the residue field's multiplicative group, omega is the
// Teichmueller lift, and the 1-unit factors (l odd) have order l^{a-1}.

#include <cmath>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "epsilon0/galois_ring.hpp"

namespace epsilon0 {

/// Baby-step/giant-step discrete logarithm in the residue field F_q^x.
class ResidueDiscreteLog {
 public:
  /// `field` must be the level-1 ring (a = 1); `generator` must be primitive.
  ResidueDiscreteLog(GaloisRingPtr field, GaloisRingElem generator)
      : field_(std::move(field)), g_(std::move(generator)), order_(field_->q() - 1) {
    if (field_->a() != 1) throw ValidationError("ResidueDiscreteLog: needs the residue field");
    step_ = static_cast<i64>(std::ceil(std::sqrt(static_cast<double>(order_))));
    auto cur = field_->one();
    for (i64 j = 0; j < step_; ++j) {
      baby_.emplace(field_->encode(cur), j);
      cur = field_->mul(cur, g_);
    }
    giant_ = field_->inverse(field_->pow(g_, static_cast<std::uint64_t>(step_)));
    if (!is_primitive()) throw ValidationError("ResidueDiscreteLog: generator is not primitive");
  }

  [[nodiscard]] i64 order() const { return order_; }
  [[nodiscard]] const GaloisRingElem& generator() const { return g_; }
  [[nodiscard]] const GaloisRingPtr& field() const { return field_; }

  /// k in [0, q-1) with g^k = x.
  [[nodiscard]] i64 log(const GaloisRingElem& x) const {
    if (!field_->is_unit(x)) throw ValidationError("discrete log of a non-unit");
    auto cur = x;
    for (i64 i = 0; i <= step_; ++i) {
      auto it = baby_.find(field_->encode(cur));
      if (it != baby_.end()) return nt::mod(i * step_ + it->second, order_);
      cur = field_->mul(cur, giant_);
    }
    throw MathCheckError("discrete log not found");
  }

 private:
  [[nodiscard]] bool is_primitive() const {
    for (auto [r, e] : nt::factor(order_)) {
      (void)e;
      if (field_->pow(g_, static_cast<std::uint64_t>(order_ / r)) == field_->one()) return false;
    }
    return true;
  }

  GaloisRingPtr field_;
  GaloisRingElem g_;
  i64 order_;
  i64 step_ = 1;
  std::unordered_map<i64, i64> baby_;
  GaloisRingElem giant_;
};

/// The least primitive element of F_q^x in code order.
inline GaloisRingElem least_primitive_element(const GaloisRingPtr& field) {
  const i64 order = field->q() - 1;
  const auto factors = nt::factor(order);
  for (i64 code = 1; code < field->q(); ++code) {
    auto x = field->decode(code);
    bool ok = true;
    for (auto [r, e] : factors) {
      (void)e;
      if (field->pow(x, static_cast<std::uint64_t>(order / r)) == field->one()) {
        ok = false;
        break;
      }
    }
    if (ok) return x;
  }
  throw MathCheckError("no primitive element");
}

class UnitGroup {
 public:
  /// `residue_generator` (coefficients mod l) defaults to the least primitive element.
  explicit UnitGroup(GaloisRingPtr ring, std::optional<std::vector<i64>> residue_generator = std::nullopt,
                     i64 cap = kDefaultEnumerationCap)
      : ring_(std::move(ring)) {
    const auto& prm = ring_->params();
    if (prm.l == 2 && prm.a > 1) {
      throw ValidationError("UnitGroup: l = 2 is supported only at level a = 1");
    }
    if (ring_->unit_count() > cap) {
      throw ResourceError("UnitGroup: " + std::to_string(ring_->unit_count()) + " units exceed the cap");
    }
    field_ = ring_->a() == 1 ? ring_ : GaloisRing::make({prm.l, prm.d, 1}, ring_->defining_polynomial());
    GaloisRingElem g = residue_generator ? field_->from_coeffs(*residue_generator) : least_primitive_element(field_);
    dlog_.emplace(field_, g);

    teich_pow_ = static_cast<std::uint64_t>(nt::ipow(ring_->q(), static_cast<unsigned>(prm.a - 1)));
    orders_.push_back(ring_->q() - 1);
    generators_.push_back(ring_->pow(ring_->from_coeffs(g.c), teich_pow_));
    if (prm.a > 1) {
      const i64 ord1 = nt::ipow(prm.l, static_cast<unsigned>(prm.a - 1));
      for (int j = 0; j < prm.d; ++j) {
        auto b = ring_->zero();
        b.c[static_cast<std::size_t>(j)] = prm.l;
        b = ring_->add(b, ring_->one());
        generators_.push_back(b);
        orders_.push_back(ord1);
      }
      build_one_unit_table(ord1);
    }
  }

  [[nodiscard]] const GaloisRingPtr& ring() const { return ring_; }
  [[nodiscard]] const GaloisRingPtr& residue_field() const { return field_; }
  [[nodiscard]] const ResidueDiscreteLog& residue_log() const { return *dlog_; }
  /// Generators: Teichmueller lift of g, then 1 + l x^j.
  [[nodiscard]] const std::vector<GaloisRingElem>& generators() const { return generators_; }
  [[nodiscard]] const std::vector<i64>& orders() const { return orders_; }

  [[nodiscard]] GaloisRingElem teichmuller(const GaloisRingElem& u) const { return ring_->pow(u, teich_pow_); }

  /// Exponents of u in the generator basis.
  [[nodiscard]] std::vector<i64> coordinates(const GaloisRingElem& u) const {
    if (!ring_->is_unit(u)) throw ValidationError("UnitGroup::coordinates: not a unit");
    std::vector<i64> out;
    auto residue = field_->from_coeffs(u.c);
    out.push_back(dlog_->log(residue));
    if (ring_->a() > 1) {
      auto one_unit = ring_->mul(u, ring_->inverse(teichmuller(u)));
      auto it = one_unit_table_.find(ring_->encode(one_unit));
      if (it == one_unit_table_.end()) throw MathCheckError("UnitGroup: 1-unit not in table");
      for (i64 c : it->second) out.push_back(c);
    }
    return out;
  }

  [[nodiscard]] GaloisRingElem from_coordinates(const std::vector<i64>& coords) const {
    auto r = ring_->one();
    for (std::size_t j = 0; j < generators_.size(); ++j) {
      r = ring_->mul(r, ring_->pow(generators_[j], static_cast<std::uint64_t>(nt::mod(coords[j], orders_[j]))));
    }
    return r;
  }

 private:
  void build_one_unit_table(i64 ord1) {
    const std::size_t d = static_cast<std::size_t>(ring_->d());
    std::vector<i64> digits(d, 0);
    const i64 total = nt::ipow(ord1, static_cast<unsigned>(d));
    for (i64 code = 0; code < total; ++code) {
      i64 t = code;
      for (std::size_t j = 0; j < d; ++j) {
        digits[j] = t % ord1;
        t /= ord1;
      }
      auto r = ring_->one();
      for (std::size_t j = 0; j < d; ++j) {
        r = ring_->mul(r, ring_->pow(generators_[j + 1], static_cast<std::uint64_t>(digits[j])));
      }
      auto [it, inserted] = one_unit_table_.emplace(ring_->encode(r), digits);
      if (!inserted) throw MathCheckError("UnitGroup: 1-unit generators are dependent");
    }
  }

  GaloisRingPtr ring_;
  GaloisRingPtr field_;
  std::optional<ResidueDiscreteLog> dlog_;
  std::uint64_t teich_pow_ = 1;
  std::vector<GaloisRingElem> generators_;
  std::vector<i64> orders_;
  std::unordered_map<i64, std::vector<i64>> one_unit_table_;
};

using UnitGroupPtr = std::shared_ptr<const UnitGroup>;

}  // namespace epsilon0
