#pragma once

// Brute-force modular arithmetic: every answer comes from exhaustive search.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

namespace oracle {

inline std::int64_t mod(std::int64_t a, std::int64_t p) { return ((a % p) + p) % p; }

/// (a|p) from the set of squares.
inline int legendre(std::int64_t a, std::int64_t p) {
  const std::int64_t r = mod(a, p);
  if (r == 0) return 0;
  for (std::int64_t y = 1; y < p; ++y) {
    if (y * y % p == r) return 1;
  }
  return -1;
}

/// Smallest root in [1, (p-1)/2], if any.
inline std::optional<std::int64_t> sqrt_small(std::int64_t a, std::int64_t p) {
  const std::int64_t r = mod(a, p);
  for (std::int64_t y = 1; 2 * y <= p - 1; ++y) {
    if (y * y % p == r) return y;
  }
  return std::nullopt;
}

inline std::int64_t inverse(std::int64_t b, std::int64_t p) {
  for (std::int64_t c = 1; c < p; ++c) {
    if (mod(b * c, p) == 1) return c;
  }
  return 0;
}

inline std::complex<double> e_p(std::int64_t a, std::int64_t p) {
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(mod(a, p)) / static_cast<double>(p));
}

/// (1/sqrt p) sum_{b=1}^{p-1} (b|p) e_p(u b + v b^{-1}).
inline std::complex<double> salie(std::int64_t u, std::int64_t v, std::int64_t p) {
  std::complex<double> s = 0.0;
  for (std::int64_t b = 1; b < p; ++b) {
    s += static_cast<double>(legendre(b, p)) * e_p(u * b + v * inverse(b, p), p);
  }
  return s / std::sqrt(static_cast<double>(p));
}

/// Number of e in {+-1}^4 with sum e_i sqrt(mu m_i) = 0 mod p (roots by search).
inline int quadruple(const std::array<std::int64_t, 4>& m, std::int64_t mu, std::int64_t p) {
  std::array<std::int64_t, 4> r{};
  for (int i = 0; i < 4; ++i) {
    const auto s = sqrt_small(mu * m[i], p);
    if (!s) return 0;
    r[i] = *s;
  }
  int count = 0;
  for (int mask = 0; mask < 16; ++mask) {
    std::int64_t t = 0;
    for (int i = 0; i < 4; ++i) t += (mask >> i & 1) ? r[i] : -r[i];
    if (mod(t, p) == 0) ++count;
  }
  return count;
}

inline bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

inline std::vector<std::int64_t> odd_primes_below(std::int64_t n) {
  std::vector<std::int64_t> out;
  for (std::int64_t p = 3; p < n; p += 2) {
    if (is_prime(p)) out.push_back(p);
  }
  return out;
}

}  // namespace oracle
