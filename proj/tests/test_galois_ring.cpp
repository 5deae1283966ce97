#include <gtest/gtest.h>

#include <set>

#include "epsilon0/additive_char.hpp"
#include "epsilon0/galois_ring.hpp"
#include "epsilon0/unit_group.hpp"

using namespace epsilon0;

namespace {

// Independent oracle for the trace: trace of the Z/l^a-linear multiplication matrix.
i64 matrix_trace(const GaloisRingPtr& R, const GaloisRingElem& x) {
  i64 t = 0;
  auto basis = R->one();
  for (int j = 0; j < R->d(); ++j) {
    auto col = R->mul(x, basis);
    t += col.c[static_cast<std::size_t>(j)];
    basis = R->mul(basis, R->generator_x());
  }
  return nt::mod(t, R->modulus());
}

}  // namespace

TEST(GaloisRing, DefiningPolynomialIrreducibleAndPrimitive) {
  for (auto [l, d] : std::vector<std::pair<i64, int>>{{2, 1}, {2, 3}, {3, 2}, {5, 2}, {13, 1}, {13, 3}, {7, 2}}) {
    auto f = default_defining_polynomial(l, d);
    EXPECT_EQ(static_cast<int>(f.size()), d + 1);
    EXPECT_TRUE(detail::is_irreducible_mod_l(f, l));
    EXPECT_TRUE(detail::x_is_primitive(f, l));
  }
}

TEST(GaloisRing, TraceMatchesMatrixTrace) {
  for (auto prm : std::vector<LocalFieldParams>{{3, 2, 3}, {5, 3, 2}, {13, 3, 1}, {2, 3, 1}, {7, 1, 3}}) {
    auto R = GaloisRing::make(prm);
    const i64 total = nt::ipow(R->modulus(), static_cast<unsigned>(R->d()));
    for (i64 code = 0; code < std::min<i64>(total, 400); ++code) {
      auto x = R->decode(code * 7919 % total);
      ASSERT_EQ(R->trace(x), matrix_trace(R, x));
    }
  }
}

TEST(GaloisRing, FrobeniusIsRingAutomorphismOfOrderD) {
  auto R = GaloisRing::make({3, 4, 2});
  auto x = R->decode(1234), y = R->decode(5678);
  EXPECT_EQ(R->frobenius(R->mul(x, y)), R->mul(R->frobenius(x), R->frobenius(y)));
  EXPECT_EQ(R->frobenius(R->add(x, y)), R->add(R->frobenius(x), R->frobenius(y)));
  auto z = x;
  for (int k = 0; k < 4; ++k) z = R->frobenius(z);
  EXPECT_EQ(z, x);
  // lifts the l-th power on the residue field
  auto F = GaloisRing::make({3, 4, 1}, R->defining_polynomial());
  auto xr = F->from_coeffs(x.c);
  EXPECT_EQ(F->from_coeffs(R->frobenius(x).c), F->pow(xr, 3));
}

TEST(GaloisRing, UnitCountsAndInverse) {
  auto R = GaloisRing::make({5, 2, 2});
  EXPECT_EQ(R->unit_count(), 24 * 25);
  EXPECT_EQ(R->unit_count_at(1), 24);
  auto us = R->units(2);
  EXPECT_EQ(static_cast<i64>(us.size()), 600);
  for (std::size_t k = 0; k < us.size(); k += 37) EXPECT_EQ(R->mul(us[k], R->inverse(us[k])), R->one());
  EXPECT_THROW((void)R->units(2, 100), ResourceError);
}

TEST(UnitGroupTest, CoordinatesRoundTrip) {
  for (auto prm : std::vector<LocalFieldParams>{{13, 3, 1}, {3, 2, 3}, {5, 2, 2}, {2, 3, 1}}) {
    auto R = GaloisRing::make(prm);
    UnitGroup U(R);
    std::set<std::vector<i64>> seen;
    for (const auto& u : R->units(prm.a)) {
      auto c = U.coordinates(u);
      ASSERT_EQ(U.from_coordinates(c), u);
      seen.insert(c);
    }
    EXPECT_EQ(static_cast<i64>(seen.size()), R->unit_count());
    i64 prod = 1;
    for (i64 o : U.orders()) prod *= o;
    EXPECT_EQ(prod, R->unit_count());
  }
}

TEST(UnitGroupTest, CoordinatesAreHomomorphic) {
  auto R = GaloisRing::make({3, 2, 3});
  UnitGroup U(R);
  auto us = R->units(3);
  for (std::size_t k = 0; k + 5 < us.size(); k += 29) {
    auto a = U.coordinates(us[k]), b = U.coordinates(us[k + 5]), c = U.coordinates(R->mul(us[k], us[k + 5]));
    for (std::size_t j = 0; j < a.size(); ++j) EXPECT_EQ(nt::mod(a[j] + b[j] - c[j], U.orders()[j]), 0);
  }
}

TEST(UnitGroupTest, RejectsLTwoAboveLevelOne) {
  EXPECT_THROW(UnitGroup(GaloisRing::make({2, 2, 2})), ValidationError);
}

TEST(AdditiveChar, TrivialOnIntegersAndAdditive) {
  auto R = GaloisRing::make({3, 2, 2});
  const auto mod = CycloModulus::make(3, 2, 2, 0, 1);
  AdditiveCharSpec spec{0, std::nullopt};
  EXPECT_EQ(psi_value(spec, R->from_int(5), 0, mod), CycloElem::from_integer(mod, 1));
  // psi(x/9) psi(y/9) = psi((x+y)/9)
  auto x = R->decode(17), y = R->decode(40);
  auto lhs = psi_value(spec, x, 2, mod);
  lhs *= psi_value(spec, y, 2, mod);
  EXPECT_EQ(lhs, psi_value(spec, R->add(x, y), 2, mod));
  // psi(3u/9) = psi(u/3)
  EXPECT_EQ(psi_value(spec, R->scale(x, 3), 2, mod), psi_value(spec, R->reduce_to_level(x, 1), 1, mod));
  EXPECT_THROW((void)psi_value(spec, x, 3, mod), ValidationError);
}
