#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace hiw {

using cdouble = std::complex<double>;

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m);
/// Representative of a mod m in [0, m).
std::uint64_t reduce_mod(std::int64_t a, std::uint64_t m);
/// Inverse of a modulo m; throws InvalidArgument when gcd(a, m) != 1.
std::uint64_t inverse_mod(std::int64_t a, std::uint64_t m);

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
bool is_prime(std::uint64_t n);
/// Prime nearest to target; ties go to the smaller prime.
std::uint64_t nearest_prime(double target);
/// Smallest prime >= n.
std::uint64_t next_prime(std::uint64_t n);
/// Largest prime <= n, or 0 when there is none.
std::uint64_t prev_prime(std::uint64_t n);

/// An odd prime, optionally with its table of quadratic residues.
class PrimeCtx {
 public:
  explicit PrimeCtx(std::uint64_t p, bool with_table = false);

  [[nodiscard]] std::uint64_t p() const { return p_; }
  [[nodiscard]] bool has_table() const { return !is_residue_.empty(); }
  /// The (p-1)/2 nonzero residues in increasing order; requires the table.
  [[nodiscard]] std::span<const std::uint64_t> residues() const { return residues_; }
  [[nodiscard]] std::uint64_t smallest_nonresidue() const { return smallest_nonresidue_; }

 private:
  friend int legendre(std::int64_t a, const PrimeCtx& ctx);

  std::uint64_t p_;
  std::uint64_t smallest_nonresidue_ = 0;
  std::vector<std::uint64_t> residues_;
  std::vector<std::int8_t> is_residue_;
};

/// (a|p) in {-1, 0, 1}; table lookup when present, Euler's criterion otherwise.
int legendre(std::int64_t a, const PrimeCtx& ctx);
int legendre(std::int64_t a, std::uint64_t p);
/// Jacobi symbol (a|n) for odd n > 0.
int jacobi(std::int64_t a, std::int64_t n);
/// Kronecker symbol (a|n) for any integer n.
int kronecker(std::int64_t a, std::int64_t n);

/// n = s * m^2 with s squarefree (carrying the sign of n) and m > 0; n != 0.
std::pair<std::int64_t, std::int64_t> squarefree_decomposition(std::int64_t n);

/// The quadratic symbol (n|d) for arbitrary nonzero n: the character modulo
/// |n| (n = 0,1 mod 4) or 4|n| (n = 2,3 mod 4) induced by the fundamental
/// discriminant D with n = D m^2 (resp. 4n = D m^2). (0|+-1) = 1.
int extended_symbol(std::int64_t n, std::int64_t d);

/// epsilon_d = 1 for d = 1 mod 4 and i for d = 3 mod 4; d odd and positive.
cdouble eps(std::int64_t d);
/// e_p(a) = exp(2 pi i a / p) with a reduced mod p first.
cdouble ep(std::int64_t a, std::uint64_t p);

/// The square root of x mod p in [1, (p-1)/2]. Throws NotAResidue or
/// ZeroResidue.
std::uint64_t sqrt_mod(std::int64_t x, const PrimeCtx& ctx);

/// (1/sqrt p) sum_{b mod p}^* (b|p) e_p(u b + v b^{-1}).
cdouble salie_direct(std::int64_t u, std::int64_t v, std::uint64_t p);
/// (v|p) eps_p sum_{y^2 = uv} e_p(2y); requires p not dividing uv.
cdouble salie_closed(std::int64_t u, std::int64_t v, std::uint64_t p);
/// e_p(r) + e_p(-r) with r = sqrt_mod(y) when (y|p) = 1, else 0. The value
/// at y = 0 mod p is undefined in the source formula and returned as 0;
/// see sa_is_degenerate.
cdouble sa(std::int64_t y, std::uint64_t p);
bool sa_is_degenerate(std::int64_t y, std::uint64_t p);

/// 1 if p | x, else 0.
int delta_p(std::int64_t x, std::uint64_t p);

/// Number of sign vectors e in {+-1}^4 with sum e_i sqrt(mu m_i) = 0 mod p.
int quadruple_delta_count(const std::array<std::int64_t, 4>& m, std::int64_t mu,
                          const PrimeCtx& ctx);

}  // namespace hiw
