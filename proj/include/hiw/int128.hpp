#pragma once

#include <gmpxx.h>

#include <cstdint>

namespace hiw {

__extension__ using i128 = __int128;
__extension__ using u128 = unsigned __int128;

/// Exact conversion; the caller guarantees |v| < 2^127.
inline i128 to_i128(const mpz_class& v) {
  mpz_class mag = abs(v);
  const u128 lo = mpz_getlimbn(mag.get_mpz_t(), 0);
  const u128 hi = mpz_size(mag.get_mpz_t()) > 1 ? mpz_getlimbn(mag.get_mpz_t(), 1) : 0;
  const auto m = static_cast<i128>((hi << 64) | lo);
  return sgn(v) < 0 ? -m : m;
}

inline mpz_class from_i128(i128 v) {
  const bool neg = v < 0;
  u128 m = neg ? -static_cast<u128>(v) : static_cast<u128>(v);
  mpz_class out(static_cast<unsigned long>(m >> 64));
  out <<= 64;
  out += static_cast<unsigned long>(m & ~std::uint64_t{0});
  return neg ? mpz_class(-out) : out;
}

}  // namespace hiw
