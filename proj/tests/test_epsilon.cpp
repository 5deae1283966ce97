#include <gtest/gtest.h>

#include "epsilon0/epsilon.hpp"

using namespace epsilon0;

namespace {

RecDatum legendre_datum() {
  auto ring = GaloisRing::make({3, 1, 1});
  auto units = std::make_shared<UnitGroup>(ring);
  RecDatum d{ring, units, FinAbGroup({2}), {{1}}, {0}};
  d.validate();
  return d;
}

CycloModulus m3() { return CycloModulus::make(3, 1, 2, 0, 1); }

}  // namespace

TEST(GaussSum, LegendreValues) {
  auto d = legendre_datum();
  Character sign{d.target, {1}};
  const AdditiveCharSpec psi{0, std::nullopt};
  auto expect = CycloElem::root(m3(), 3, 1);
  expect -= CycloElem::root(m3(), 3, 2);
  EXPECT_EQ(gauss_sum(d, sign, psi, 2), expect);
  // psi twisted by 2: chi(rec(2)) = -1 times the previous value
  const AdditiveCharSpec psi2{0, d.ring->from_int(2)};
  EXPECT_EQ(gauss_sum(d, sign, psi2, 2), -expect);
  EXPECT_THROW(gauss_sum(d, Character{d.target, {0}}, psi, 2), ValidationError);
}

TEST(EpsUnramified, ClosedForms) {
  auto ring = GaloisRing::make({3, 1, 1});
  auto units = std::make_shared<UnitGroup>(ring);
  RecDatum d{ring, units, FinAbGroup({3}), {{0}}, {1}};
  d.validate();
  const auto m = CycloModulus::for_order(3, 2, 3);
  EXPECT_EQ(eps_unramified(d, Character{d.target, {0}}, {0, std::nullopt}, 2), CycloElem::from_integer(m, -1));
  EXPECT_EQ(eps_unramified(d, Character{d.target, {0}}, {2, std::nullopt}, 2), CycloElem::from_integer(m, -9));
  // chi(pi) = zeta_3, n = 0: -zeta_3^{1}
  EXPECT_EQ(eps_unramified(d, Character{d.target, {1}}, {0, std::nullopt}, 2), -CycloElem::root(m, 3, 1));
}

TEST(EpsAbelian, TrivialAndLegendre) {
  auto triv = synthetic_rec({3, 1, 1}, FinAbGroup(Vec{}), 1);
  auto e = eps_abelian(triv, {0, std::nullopt}, 2);
  EXPECT_EQ(e.element, GroupRingElem::scalar(triv.target, CycloElem::from_integer(m3(), -1)));
  auto d = legendre_datum();
  auto el = eps_abelian(d, {0, std::nullopt}, 2);
  EXPECT_EQ(eps_evaluate(el, Character{d.target, {0}}), CycloElem::from_integer(m3(), -1));
  auto expect = CycloElem::root(m3(), 3, 1);
  expect -= CycloElem::root(m3(), 3, 2);
  EXPECT_EQ(eps_evaluate(el, Character{d.target, {1}}), expect);
  EXPECT_TRUE(el.certificate.certified);
}

TEST(EpsAbelian, AugmentationIsMinusOneAtLevelOne) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto d = synthetic_rec({13, 1, 1}, FinAbGroup({3, 3}), seed);
    auto e = eps_abelian(d, {0, std::nullopt}, 3);
    EXPECT_EQ(e.element.augmentation(), CycloElem::from_integer(e.element.base(), -1));
  }
}

TEST(EpsAbelian, EvaluationLemmaAllCharacters) {
  struct Case {
    LocalFieldParams prm;
    FinAbGroup target;
    i64 p;
  };
  for (const auto& c : {Case{{3, 1, 1}, FinAbGroup({2, 3}), 2}, Case{{3, 1, 2}, FinAbGroup({6, 2}), 2},
                        Case{{3, 1, 3}, FinAbGroup({2, 9}), 2}, Case{{13, 1, 1}, FinAbGroup({3, 3}), 3},
                        Case{{5, 2, 1}, FinAbGroup({8}), 2}}) {
    for (int level : {0, 1, -1}) {
      auto d = synthetic_rec(c.prm, c.target, 11);
      const AdditiveCharSpec psi{level, std::nullopt};
      auto e = eps_abelian(d, psi, c.p);
      for (const auto& chi : characters(d.target)) {
        ASSERT_EQ(eps_evaluate(e, chi), eps_closed_form(d, chi, psi, c.p))
            << c.prm.l << " " << c.prm.a << " level " << level;
      }
    }
  }
}

TEST(EpsAbelian, CIndependence) {
  auto d = synthetic_rec({3, 1, 3}, FinAbGroup({2, 9}), 5);
  const AdditiveCharSpec psi{0, std::nullopt};
  auto base = eps_abelian(d, psi, 2);
  auto us = d.ring->units(3);
  for (std::size_t k = 0; k < 10; ++k) {
    std::vector<GaloisRingElem> parts{us[(k * 5) % us.size()], us[(k * 7 + 3) % us.size()], us[(k * 11 + 1) % us.size()]};
    EXPECT_EQ(eps_abelian(d, psi, 2, parts).element, base.element);
  }
}

TEST(EpsAbelian, ProjectionLemmaOnLattice) {
  auto d = full_unit_datum({3, 1, 2}, 1);  // target (Z/9)^x = Z/2 x Z/3 (x Z/1)
  const AdditiveCharSpec psi{0, std::nullopt};
  auto e = eps_abelian(d, psi, 2);
  for (const auto& sub : all_subgroups(d.target)) {
    auto q = quotient_map(d.target, sub.generators);
    auto qd = quotient_datum(d, q);
    EXPECT_EQ(eps_project(e, q), eps_abelian(qd, psi, 2).element);
  }
}

TEST(PropertySuite, LawsOnSyntheticData) {
  for (auto [prm, tgt, p] : std::vector<std::tuple<LocalFieldParams, FinAbGroup, i64>>{
           {{3, 1, 2}, FinAbGroup({6, 2}), 2}, {{13, 1, 1}, FinAbGroup({3, 3}), 3}, {{3, 1, 1}, FinAbGroup({2, 4}), 2}}) {
    auto d = synthetic_rec(prm, tgt, 3);
    for (const auto& r : property_suite(d, {0, std::nullopt}, p)) {
      if (!r.informational) {
        EXPECT_TRUE(r.passed) << r.law << " " << r.counterexample;
      }
    }
  }
}

TEST(PropertySuite, UnramifiedDatum) {
  auto ring = GaloisRing::make({3, 1, 1});
  auto units = std::make_shared<UnitGroup>(ring);
  RecDatum d{ring, units, FinAbGroup({4}), {{0}}, {1}};
  for (int n : {0, 2}) {
    auto rep = property_suite(d, {n, std::nullopt}, 2);
    for (const auto& r : rep) {
      if (!r.informational) {
        EXPECT_TRUE(r.passed) << r.law;
      }
    }
  }
}

namespace {

// Naive double sum for l^{2dn} g(chi, psi) g(chi^-1, psi_{-1}), computed term by term.
CycloElem gauss_product_oracle(const RecDatum& d, const Character& chi, int level, const CycloModulus& m) {
  const auto& R = d.ring;
  const int ac = d.conductor(chi);
  const int vc = level + ac;
  const AdditiveCharSpec psi{level, std::nullopt};
  const AdditiveCharSpec psi_neg{level, R->from_int(-1)};
  const auto units = R->units(ac);
  CycloElem s(m);
  for (const auto& u : units) {
    for (const auto& v : units) {
      CycloElem t = chi.inverse().value(d.rec(u, -vc), m);
      t *= chi.value(d.rec(v, -vc), m);
      t *= psi_value(psi, u, ac, m);
      t *= psi_value(psi_neg, v, ac, m);
      s += t;
    }
  }
  const mpz_class q = d.params().q();
  mpz_class scale = 1;
  for (int k = 0; k < 2 * level; ++k) scale *= q;
  if (level >= 0) s *= scale;
  return s;
}

}  // namespace

TEST(GaussSum, FunctionalEquationAgainstDoubleSum) {
  for (const LocalFieldParams params : {LocalFieldParams{5, 1, 2}, LocalFieldParams{3, 2, 1}, LocalFieldParams{3, 1, 2}}) {
    auto d = full_unit_datum(params, 1);
    for (int level : {0, 1}) {
      for (const auto& chi : characters(d.target)) {
        const int ac = d.conductor(chi);
        if (ac == 0) continue;
        const auto g1 = gauss_sum(d, chi, {level, std::nullopt}, 2);
        const auto g2 = gauss_sum(d, chi.inverse(), {level, d.ring->from_int(-1)}, 2);
        const auto m = g1.modulus().join(g2.modulus());
        CycloElem prod = g1.promote(m);
        prod *= g2.promote(m);
        const auto oracle = gauss_product_oracle(d, chi, level, m);
        EXPECT_EQ(prod, oracle);
        // frozen closed form: l^{2dn} q^{a(chi)}
        mpz_class expect = 1;
        for (int k = 0; k < 2 * level + ac; ++k) expect *= d.params().q();
        EXPECT_EQ(prod, CycloElem::from_integer(m, expect));
      }
    }
  }
}
