#pragma once

// Small-integer number theory used throughout: gcd/lcm, modular powers and
// inverses, factorization by trial division, p-adic valuations.

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "epsilon0/errors.hpp"

namespace epsilon0::nt {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;

inline i64 mod(i64 a, i64 m) {
  i64 r = a % m;
  return r < 0 ? r + m : r;
}

inline i64 mulmod(i64 a, i64 b, i64 m) {
  return static_cast<i64>(mod(static_cast<i64>((static_cast<i128>(a) * b) % m), m));
}

inline i64 powmod(i64 base, u64 exp, i64 m) {
  if (m == 1) return 0;
  i64 result = 1;
  base = mod(base, m);
  while (exp > 0) {
    if (exp & 1U) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1U;
  }
  return result;
}

/// Exact integer power; throws on overflow of int64.
inline i64 ipow(i64 base, unsigned exp) {
  i128 result = 1;
  for (unsigned k = 0; k < exp; ++k) {
    result *= base;
    if (result > static_cast<i128>(INT64_MAX) || result < static_cast<i128>(INT64_MIN)) {
      throw ResourceError("integer power overflows 64 bits");
    }
  }
  return static_cast<i64>(result);
}

inline i64 gcd(i64 a, i64 b) { return std::gcd(a, b); }
inline i64 lcm(i64 a, i64 b) { return (a == 0 || b == 0) ? 0 : std::lcm(a, b); }

/// Extended Euclid: returns (g, x, y) with a*x + b*y = g.
inline std::tuple<i64, i64, i64> ext_gcd(i64 a, i64 b) {
  i64 old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    i64 q = old_r / r;
    std::tie(old_r, r) = std::make_pair(r, old_r - q * r);
    std::tie(old_s, s) = std::make_pair(s, old_s - q * s);
    std::tie(old_t, t) = std::make_pair(t, old_t - q * t);
  }
  if (old_r < 0) return {-old_r, -old_s, -old_t};
  return {old_r, old_s, old_t};
}

inline i64 invmod(i64 a, i64 m) {
  if (m == 1) return 0;
  auto [g, x, y] = ext_gcd(mod(a, m), m);
  (void)y;
  if (g != 1) throw std::domain_error("invmod: argument not invertible");
  return mod(x, m);
}

inline bool is_prime(i64 n) {
  if (n < 2) return false;
  for (i64 q = 2; q * q <= n; ++q) {
    if (n % q == 0) return false;
  }
  return true;
}

/// Prime factorization as (prime, exponent) pairs in increasing order.
inline std::vector<std::pair<i64, int>> factor(i64 n) {
  std::vector<std::pair<i64, int>> out;
  for (i64 q = 2; q * q <= n; ++q) {
    if (n % q != 0) continue;
    int e = 0;
    while (n % q == 0) {
      n /= q;
      ++e;
    }
    out.emplace_back(q, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

inline i64 euler_phi(i64 n) {
  i64 result = n;
  for (auto [q, e] : factor(n)) {
    (void)e;
    result = result / q * (q - 1);
  }
  return result;
}

/// v_q(n) for n != 0.
inline int valuation(i64 n, i64 q) {
  if (n == 0) throw std::domain_error("valuation of zero");
  int v = 0;
  while (n % q == 0) {
    n /= q;
    ++v;
  }
  return v;
}

/// Splits n = q^v * rest with gcd(rest, q) = 1.
inline std::pair<int, i64> split_prime(i64 n, i64 q) {
  int v = 0;
  while (n % q == 0) {
    n /= q;
    ++v;
  }
  return {v, n};
}

/// Multiplicative order of a modulo m (gcd(a, m) = 1).
inline i64 mult_order(i64 a, i64 m) {
  if (m == 1) return 1;
  if (gcd(mod(a, m), m) != 1) throw std::domain_error("mult_order: not a unit");
  i64 order = euler_phi(m);
  for (auto [q, e] : factor(order)) {
    for (int k = 0; k < e; ++k) {
      if (powmod(a, static_cast<u64>(order / q), m) == 1) {
        order /= q;
      } else {
        break;
      }
    }
  }
  return order;
}

}  // namespace epsilon0::nt
