#include <gtest/gtest.h>

#include "epsilon0/number_theory.hpp"

using namespace epsilon0::nt;

TEST(NumberTheory, ModAndInverse) {
  EXPECT_EQ(mod(-7, 5), 3);
  EXPECT_EQ(invmod(3, 7), 5);
  EXPECT_EQ(powmod(3, 6, 7), 1);
  for (i64 a = 1; a < 29; ++a) EXPECT_EQ(mulmod(a, invmod(a, 29), 29), 1);
}

TEST(NumberTheory, FactorAndPhi) {
  auto f = factor(360);
  i64 prod = 1;
  for (auto [r, e] : f) prod *= ipow(r, static_cast<unsigned>(e));
  EXPECT_EQ(prod, 360);
  EXPECT_EQ(euler_phi(117), 72);
  EXPECT_EQ(euler_phi(1), 1);
  // brute-force phi
  for (i64 n = 1; n < 60; ++n) {
    i64 c = 0;
    for (i64 k = 1; k <= n; ++k) c += gcd(k, n) == 1;
    EXPECT_EQ(euler_phi(n), c) << n;
  }
}

TEST(NumberTheory, ValuationAndOrder) {
  EXPECT_EQ(valuation(72, 2), 3);
  EXPECT_EQ(valuation(72, 3), 2);
  auto [v, rest] = split_prime(96, 2);
  EXPECT_EQ(v, 5);
  EXPECT_EQ(rest, 3);
  EXPECT_EQ(mult_order(2, 13), 12);
  EXPECT_EQ(mult_order(3, 13), 3);
}

TEST(NumberTheory, IpowOverflowThrows) {
  EXPECT_THROW((void)ipow(10, 40), epsilon0::ResourceError);
}
