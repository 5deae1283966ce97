#include <gtest/gtest.h>

#include "epsilon0/reciprocity.hpp"

using namespace epsilon0;

namespace {

RecDatum legendre_datum() {
  auto ring = GaloisRing::make({3, 1, 1});
  auto units = std::make_shared<UnitGroup>(ring);
  RecDatum d{ring, units, FinAbGroup({2}), {{1}}, {0}};
  d.validate();
  return d;
}

}  // namespace

TEST(RecDatumTest, LegendreSymbol) {
  auto d = legendre_datum();
  EXPECT_EQ(d.rec(d.ring->from_int(1), 0), (Vec{0}));
  EXPECT_EQ(d.rec(d.ring->from_int(2), 0), (Vec{1}));  // 2 is a non-residue mod 3
  Character sign{d.target, {1}};
  EXPECT_EQ(d.conductor(sign), 1);
  EXPECT_EQ(d.conductor(Character{d.target, {0}}), 0);
}

TEST(RecDatumTest, HomomorphismOnRandomPairs) {
  auto d = synthetic_rec({3, 2, 2}, FinAbGroup({3, 8}), 42);
  auto us = d.ring->units(2);
  for (std::size_t k = 0; k < 50; ++k) {
    const auto& u = us[(k * 37) % us.size()];
    const auto& v = us[(k * 101 + 5) % us.size()];
    EXPECT_EQ(d.rec(d.ring->mul(u, v), 0), d.target.add(d.rec(u, 0), d.rec(v, 0)));
  }
}

TEST(RecDatumTest, SyntheticIsDeterministicAndSurjective) {
  auto a = synthetic_rec({13, 1, 1}, FinAbGroup({3, 3}), 7);
  auto b = synthetic_rec({13, 1, 1}, FinAbGroup({3, 3}), 7);
  EXPECT_EQ(a.unit_images, b.unit_images);
  EXPECT_EQ(a.pi_image, b.pi_image);
  EXPECT_NO_THROW(a.validate());
  auto triv = synthetic_rec({5, 1, 1}, FinAbGroup(Vec{}), 1);
  EXPECT_EQ(triv.target.order(), 1);
  // (Z/9)^x = Z/6: Z/3 through the 1-unit part
  auto z3 = synthetic_rec({3, 1, 2}, FinAbGroup({3}), 3);
  EXPECT_EQ(z3.conductor(Character{z3.target, {1}}) >= 0, true);
}

TEST(RecDatumTest, SyntheticRejectsImpossibleTargets) {
  // l = 3, a = 1: K^x / (1 + pi) = Z/2 x Z, which has no Z/3 x Z/3 quotient
  EXPECT_THROW(synthetic_rec({3, 1, 1}, FinAbGroup({3, 3}), 1), ValidationError);
}

TEST(RecDatumTest, ConductorOfFullDatum) {
  auto d = full_unit_datum({3, 1, 3});
  // target Z/2 x Z/9 x Z/1
  EXPECT_EQ(d.conductor(Character{d.target, {1, 0, 0}}), 1);
  EXPECT_EQ(d.conductor(Character{d.target, {0, 3, 0}}), 2);
  EXPECT_EQ(d.conductor(Character{d.target, {0, 1, 0}}), 3);
  auto d2 = d.push_forward(quotient_map(d.target, {{0, 3, 0}})).at_level(2);
  EXPECT_EQ(d2.level(), 2);
}

TEST(TameTowerTest, RealizabilityErrors) {
  TowerSpec bad{13, 1, 3, 2, 1, 2, 1};
  EXPECT_THROW(TameTower{bad}, ValidationError);
  TowerSpec bad2{13, 1, 3, 2, 1, 7, 1};  // 7^3 = 1 mod 9 but 7 != 13 mod 9
  EXPECT_THROW(TameTower{bad2}, ValidationError);
}

TEST(TameTowerTest, FlagshipCoherence) {
  for (int sign : {1, -1}) {
    TameTower t(TowerSpec{13, 1, 3, 2, 1, 4, 1}, sign);
    EXPECT_EQ(t.datum(0).target.invariant_factors(), (Vec{3, 3}));
    EXPECT_EQ(t.datum(1).target.invariant_factors(), (Vec{9}));
    EXPECT_EQ(t.datum(1).ring->unit_count(), 2196);
    for (const auto& r : t.coherence()) EXPECT_TRUE(r.passed) << r.name << " " << r.counterexample;
    // tame: the unit map kills 1 + pi, i.e. level 1
    EXPECT_EQ(t.datum(1).level(), 1);
  }
}

TEST(TameTowerTest, PTwoAndDeltaTowers) {
  for (auto spec : {TowerSpec{3, 1, 2, 2, 1, 3, 1}, TowerSpec{13, 1, 3, 2, 1, 4, 2}, TowerSpec{13, 1, 3, 1, 1, 1, 1},
                    TowerSpec{5, 1, 2, 2, 1, 1, 3}, TowerSpec{3, 1, 2, 3, 2, 3, 1}, TowerSpec{2, 2, 3, 1, 1, 1, 5}}) {
    for (int sign : {1, -1}) {
      TameTower t(spec, sign);
      for (const auto& r : t.coherence()) EXPECT_TRUE(r.passed) << r.name << " " << r.counterexample;
    }
  }
  TameTower p2(TowerSpec{3, 1, 2, 2, 1, 3, 1});
  EXPECT_EQ(p2.datum(0).target.invariant_factors(), (Vec{2, 2}));
  EXPECT_EQ(p2.datum(1).target.invariant_factors(), (Vec{4}));
}
