#include "hiw/modarith.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <tuple>

#include "hiw/error.hpp"
#include "hiw/int128.hpp"

namespace hiw {

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp != 0) {
    if (exp & 1U) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1U;
  }
  return result;
}

std::uint64_t reduce_mod(std::int64_t a, std::uint64_t m) {
  if (m == 0) throw InvalidArgument("reduce_mod: zero modulus");
  const auto r = static_cast<i128>(a) % static_cast<i128>(m);
  return static_cast<std::uint64_t>(r < 0 ? r + static_cast<i128>(m) : r);
}

std::uint64_t inverse_mod(std::int64_t a, std::uint64_t m) {
  i128 r0 = m;
  i128 r1 = reduce_mod(a, m);
  i128 t0 = 0;
  i128 t1 = 1;
  while (r1 != 0) {
    const i128 q = r0 / r1;
    std::tie(r0, r1) = std::pair{r1, r0 - q * r1};
    std::tie(t0, t1) = std::pair{t1, t0 - q * t1};
  }
  if (r0 != 1) {
    throw InvalidArgument(std::to_string(a) + " is not invertible modulo " + std::to_string(m));
  }
  if (t0 < 0) t0 += m;
  return static_cast<std::uint64_t>(t0);
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t small : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % small == 0) return n == small;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1U) == 0) {
    d >>= 1U;
    ++s;
  }
  // These twelve bases are a deterministic witness set below 3.3e24.
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::uint64_t next_prime(std::uint64_t n) {
  if (n <= 2) return 2;
  for (std::uint64_t c = n;; ++c) {
    if (is_prime(c)) return c;
  }
}

std::uint64_t prev_prime(std::uint64_t n) {
  for (std::uint64_t c = n; c >= 2; --c) {
    if (is_prime(c)) return c;
  }
  return 0;
}

std::uint64_t nearest_prime(double target) {
  if (!(target >= 0.0) || target > 1.8e19) throw InvalidArgument("nearest_prime: target out of range");
  const auto floor_t = static_cast<std::uint64_t>(std::floor(target));
  const std::uint64_t below = prev_prime(floor_t);
  const std::uint64_t above = next_prime(floor_t + 1);
  if (below == 0) return above;
  const double d_below = target - static_cast<double>(below);
  const double d_above = static_cast<double>(above) - target;
  return d_below <= d_above ? below : above;
}

PrimeCtx::PrimeCtx(std::uint64_t p, bool with_table) : p_(p) {
  if (p < 3 || !is_prime(p)) throw InvalidArgument(std::to_string(p) + " is not an odd prime");
  if (with_table) {
    is_residue_.assign(p, -1);
    is_residue_[0] = 0;
    for (std::uint64_t y = 1; y <= (p - 1) / 2; ++y) is_residue_[mul_mod(y, y, p)] = 1;
    residues_.reserve((p - 1) / 2);
    for (std::uint64_t a = 1; a < p; ++a) {
      if (is_residue_[a] == 1) residues_.push_back(a);
    }
  }
  for (std::uint64_t a = 2; a < p; ++a) {
    if (legendre(static_cast<std::int64_t>(a), *this) == -1) {
      smallest_nonresidue_ = a;
      break;
    }
  }
}

int legendre(std::int64_t a, const PrimeCtx& ctx) {
  const std::uint64_t r = reduce_mod(a, ctx.p_);
  if (!ctx.is_residue_.empty()) return ctx.is_residue_[r];
  if (r == 0) return 0;
  return pow_mod(r, (ctx.p_ - 1) / 2, ctx.p_) == 1 ? 1 : -1;
}

int legendre(std::int64_t a, std::uint64_t p) { return legendre(a, PrimeCtx(p)); }

int jacobi(std::int64_t a, std::int64_t n) {
  if (n <= 0 || n % 2 == 0) throw InvalidArgument("jacobi: modulus must be odd and positive");
  std::uint64_t aa = reduce_mod(a, static_cast<std::uint64_t>(n));
  std::uint64_t nn = static_cast<std::uint64_t>(n);
  int result = 1;
  while (aa != 0) {
    while (aa % 2 == 0) {
      aa /= 2;
      const std::uint64_t r = nn % 8;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(aa, nn);
    if (aa % 4 == 3 && nn % 4 == 3) result = -result;
    aa %= nn;
  }
  return nn == 1 ? result : 0;
}

int kronecker(std::int64_t a, std::int64_t n) {
  if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
  int result = 1;
  if (n < 0) {
    n = -n;
    if (a < 0) result = -result;
  }
  while (n % 2 == 0) {
    n /= 2;
    if (a % 2 == 0) return 0;
    const std::int64_t r = ((a % 8) + 8) % 8;
    if (r == 3 || r == 5) result = -result;
  }
  return result * jacobi(a, n);
}

std::pair<std::int64_t, std::int64_t> squarefree_decomposition(std::int64_t n) {
  if (n == 0) throw InvalidArgument("squarefree_decomposition: n must be nonzero");
  std::int64_t s = n < 0 ? -1 : 1;
  std::int64_t m = 1;
  std::int64_t rest = n < 0 ? -n : n;
  for (std::int64_t q = 2; q * q <= rest; ++q) {
    while (rest % (q * q) == 0) {
      rest /= q * q;
      m *= q;
    }
    if (rest % q == 0) {
      rest /= q;
      s *= q;
    }
  }
  return {s * rest, m};
}

int extended_symbol(std::int64_t n, std::int64_t d) {
  if (n == 0) return (d == 1 || d == -1) ? 1 : 0;
  const auto [s, m] = squarefree_decomposition(n);
  const std::int64_t disc = ((s % 4) + 4) % 4 == 1 ? s : 4 * s;
  const std::int64_t n_mod4 = ((n % 4) + 4) % 4;
  const std::int64_t modulus = (n_mod4 == 0 || n_mod4 == 1) ? std::abs(n) : 4 * std::abs(n);
  if (std::gcd(d, modulus) != 1) return 0;
  return kronecker(disc, d);
}

cdouble eps(std::int64_t d) {
  if (d <= 0 || d % 2 == 0) throw InvalidArgument("eps: d must be odd and positive");
  return d % 4 == 1 ? cdouble(1.0, 0.0) : cdouble(0.0, 1.0);
}

cdouble ep(std::int64_t a, std::uint64_t p) {
  const std::uint64_t r = reduce_mod(a, p);
  if (r == 0) return {1.0, 0.0};
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(p);
  return {std::cos(angle), std::sin(angle)};
}

std::uint64_t sqrt_mod(std::int64_t x, const PrimeCtx& ctx) {
  const std::uint64_t p = ctx.p();
  const std::uint64_t a = reduce_mod(x, p);
  if (a == 0) throw ZeroResidue("sqrt_mod: " + std::to_string(x) + " is divisible by " + std::to_string(p));
  if (legendre(static_cast<std::int64_t>(a), ctx) != 1) {
    throw NotAResidue("sqrt_mod: " + std::to_string(x) + " is not a square modulo " + std::to_string(p));
  }
  std::uint64_t root = 0;
  if (p % 4 == 3) {
    root = pow_mod(a, (p + 1) / 4, p);
  } else {
    // Tonelli-Shanks with p - 1 = q 2^s.
    std::uint64_t q = p - 1;
    unsigned s = 0;
    while (q % 2 == 0) {
      q /= 2;
      ++s;
    }
    std::uint64_t z = ctx.smallest_nonresidue();
    std::uint64_t m = s;
    std::uint64_t c = pow_mod(z, q, p);
    std::uint64_t t = pow_mod(a, q, p);
    root = pow_mod(a, (q + 1) / 2, p);
    while (t != 1) {
      std::uint64_t i = 0;
      std::uint64_t t2 = t;
      while (t2 != 1) {
        t2 = mul_mod(t2, t2, p);
        ++i;
      }
      std::uint64_t b = c;
      for (std::uint64_t k = 0; k + 1 < m - i; ++k) b = mul_mod(b, b, p);
      m = i;
      c = mul_mod(b, b, p);
      t = mul_mod(t, c, p);
      root = mul_mod(root, b, p);
    }
  }
  return root <= (p - 1) / 2 ? root : p - root;
}

cdouble salie_direct(std::int64_t u, std::int64_t v, std::uint64_t p) {
  const PrimeCtx ctx(p, true);
  const std::uint64_t ur = reduce_mod(u, p);
  const std::uint64_t vr = reduce_mod(v, p);
  std::vector<std::uint64_t> inv(p, 0);
  inv[1] = 1;
  for (std::uint64_t b = 2; b < p; ++b) inv[b] = mul_mod(p - p / b, inv[p % b], p);
  std::vector<cdouble> roots(p);
  for (std::uint64_t r = 0; r < p; ++r) roots[r] = ep(static_cast<std::int64_t>(r), p);
  double re = 0.0;
  double im = 0.0;
  for (std::uint64_t b = 1; b < p; ++b) {
    const int chi = legendre(static_cast<std::int64_t>(b), ctx);
    const std::uint64_t arg = (mul_mod(ur, b, p) + mul_mod(vr, inv[b], p)) % p;
    re += chi * roots[arg].real();
    im += chi * roots[arg].imag();
  }
  return cdouble(re, im) / std::sqrt(static_cast<double>(p));
}

cdouble salie_closed(std::int64_t u, std::int64_t v, std::uint64_t p) {
  const PrimeCtx ctx(p);
  const std::uint64_t uv = mul_mod(reduce_mod(u, p), reduce_mod(v, p), p);
  if (uv == 0) {
    throw InvalidArgument("salie_closed: p divides uv; use salie_direct for degenerate arguments");
  }
  const cdouble prefactor = static_cast<double>(legendre(v, ctx)) * eps(static_cast<std::int64_t>(p));
  if (legendre(static_cast<std::int64_t>(uv), ctx) != 1) return {0.0, 0.0};
  const auto y = static_cast<std::int64_t>(sqrt_mod(static_cast<std::int64_t>(uv), ctx));
  return prefactor * (ep(2 * y, p) + ep(-2 * y, p));
}

cdouble sa(std::int64_t y, std::uint64_t p) {
  const PrimeCtx ctx(p);
  if (legendre(y, ctx) != 1) return {0.0, 0.0};
  const auto r = static_cast<std::int64_t>(sqrt_mod(y, ctx));
  return ep(r, p) + ep(-r, p);
}

bool sa_is_degenerate(std::int64_t y, std::uint64_t p) { return reduce_mod(y, p) == 0; }

int delta_p(std::int64_t x, std::uint64_t p) { return reduce_mod(x, p) == 0 ? 1 : 0; }

int quadruple_delta_count(const std::array<std::int64_t, 4>& m, std::int64_t mu, const PrimeCtx& ctx) {
  const std::uint64_t p = ctx.p();
  std::array<std::uint64_t, 4> roots{};
  for (std::size_t i = 0; i < 4; ++i) {
    const std::uint64_t prod = mul_mod(reduce_mod(mu, p), reduce_mod(m[i], p), p);
    if (legendre(static_cast<std::int64_t>(prod), ctx) != 1) {
      throw InvalidArgument("quadruple_delta_count: mu*m_" + std::to_string(i + 1) +
                            " is not a quadratic residue");
    }
    roots[i] = sqrt_mod(static_cast<std::int64_t>(prod), ctx);
  }
  int count = 0;
  for (unsigned mask = 0; mask < 16; ++mask) {
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < 4; ++i) {
      const std::uint64_t term = (mask >> i) & 1U ? p - roots[i] : roots[i];
      total = (total + term) % p;
    }
    if (total == 0) ++count;
  }
  return count;
}

}  // namespace hiw
