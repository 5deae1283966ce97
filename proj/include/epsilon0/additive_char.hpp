#pragma once

// Additive characters psi(x) = psi_std(twist * pi^level * x), where psi_std is
// the canonical character of Q_l (trivial on Z_l, x/l^t -> zeta_{l^t}^x)
// composed with the trace of K.  n(psi) = level.

#include <optional>

#include "epsilon0/cyclotomic.hpp"
#include "epsilon0/galois_ring.hpp"

namespace epsilon0 {

struct AdditiveCharSpec {
  int level = 0;
  std::optional<GaloisRingElem> unit_twist;  // empty means twist 1

  [[nodiscard]] GaloisRingElem twist(const GaloisRingPtr& ring) const {
    if (!unit_twist) return ring->one();
    auto t = ring->from_coeffs(unit_twist->c);
    if (!ring->is_unit(t)) throw ValidationError("AdditiveCharSpec: twist is not a unit");
    return t;
  }
};

/// psi(u * pi^{-t - level}) = zeta_{l^t}^{Tr(twist * u) mod l^t}, as an element of `into`.
inline CycloElem psi_value(const AdditiveCharSpec& spec, const GaloisRingElem& u, int pole,
                           const CycloModulus& into) {
  const auto& ring = u.ring;
  if (pole < 0) throw ValidationError("psi_value: negative pole order");
  if (pole > ring->a()) throw ValidationError("psi_value: pole order exceeds the truncation level a");
  if (pole == 0) return CycloElem::from_integer(into, 1);
  const i64 lt = nt::ipow(ring->l(), static_cast<unsigned>(pole));
  const i64 tr = nt::mod(ring->trace(ring->mul(spec.twist(ring), u)), lt);
  return CycloElem::root(into, lt, tr);
}

}  // namespace epsilon0
