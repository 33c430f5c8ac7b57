#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hiw/error.hpp"
#include "hiw/modarith.hpp"
#include "oracles/modarith_oracle.hpp"

using namespace hiw;

TEST_SUITE("modarith") {
  TEST_CASE("primality and prime search") {
    for (std::int64_t n = 0; n < 5000; ++n) CHECK(is_prime(static_cast<std::uint64_t>(n)) == oracle::is_prime(n));
    CHECK(is_prime(18446744073709551557ULL));
    CHECK_FALSE(is_prime(3215031751ULL));  // strong pseudoprime to bases 2, 3, 5, 7
    CHECK(nearest_prime(std::pow(1e4, 0.55)) == 157);
    CHECK(nearest_prime(std::pow(1e5, 0.55)) == 563);
    CHECK(nearest_prime(std::pow(1e6, 0.55)) == 1997);
    CHECK(nearest_prime(9.0) == 7);  // 7 and 11 are equidistant; ties go down
    CHECK(next_prime(90) == 97);
    CHECK(prev_prime(100) == 97);
  }

  TEST_CASE("Legendre symbol") {
    CHECK(legendre(2, 7) == 1);
    CHECK(legendre(3, 7) == -1);
    CHECK(legendre(14, 7) == 0);
    for (std::int64_t p : oracle::odd_primes_below(500)) {
      const PrimeCtx ctx(static_cast<std::uint64_t>(p), true);
      CHECK(legendre(1, ctx) == 1);
      for (std::int64_t a = -3; a < p + 3; ++a) {
        const int want = oracle::legendre(a, p);
        CHECK(legendre(a, ctx) == want);
        CHECK(legendre(a, static_cast<std::uint64_t>(p)) == want);
      }
      CHECK(ctx.residues().size() == static_cast<std::size_t>((p - 1) / 2));
    }
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::int64_t> draw(-100000, 100000);
    for (int i = 0; i < 2000; ++i) {
      const std::int64_t a = draw(rng);
      const std::int64_t b = draw(rng);
      CHECK(legendre(a * b, 1009) == legendre(a, 1009) * legendre(b, 1009));
    }
  }

  TEST_CASE("Jacobi and Kronecker symbols") {
    CHECK(jacobi(2, 15) == 1);
    CHECK(jacobi(7, 15) == -1);
    CHECK(kronecker(5, 2) == -1);
    CHECK(kronecker(1, 8) == 1);
    CHECK(kronecker(-4, 3) == -1);
    CHECK(kronecker(-4, 5) == 1);
    for (std::int64_t p : oracle::odd_primes_below(60)) {
      for (std::int64_t a = 0; a < 50; ++a) CHECK(jacobi(a, p) == oracle::legendre(a, p));
    }
  }

  TEST_CASE("squarefree decomposition and the extended symbol") {
    CHECK(squarefree_decomposition(12) == std::pair<std::int64_t, std::int64_t>{3, 2});
    CHECK(squarefree_decomposition(-50) == std::pair<std::int64_t, std::int64_t>{-2, 5});
    CHECK(squarefree_decomposition(1) == std::pair<std::int64_t, std::int64_t>{1, 1});
    CHECK_THROWS_AS(squarefree_decomposition(0), InvalidArgument);
    // (-1 | d) is the character of Q(i): chi_{-4}.
    CHECK(extended_symbol(-1, 3) == -1);
    CHECK(extended_symbol(-1, 5) == 1);
    CHECK(extended_symbol(-4, 7) == -1);
    CHECK(extended_symbol(1, 9) == 1);
    CHECK(extended_symbol(-1, 2) == 0);
    // n = D m^2 is insensitive to m coprime to d.
    for (std::int64_t d = 1; d < 40; d += 2) CHECK(extended_symbol(-3, d) == extended_symbol(-12, d));
  }

  TEST_CASE("eps and e_p") {
    CHECK(eps(5) == cdouble(1.0, 0.0));
    CHECK(eps(7) == cdouble(0.0, 1.0));
    CHECK_THROWS_AS(eps(-3), InvalidArgument);
    CHECK_THROWS_AS(eps(4), InvalidArgument);
    CHECK(std::abs(ep(0, 13) - 1.0) < 1e-15);
    CHECK(std::abs(ep(13, 13) - 1.0) < 1e-15);
    for (std::int64_t a = -20; a < 20; ++a) CHECK(std::abs(std::abs(ep(a, 31)) - 1.0) < 1e-15);
  }

  TEST_CASE("square roots") {
    CHECK(sqrt_mod(2, PrimeCtx(7)) == 3);
    CHECK(sqrt_mod(1, PrimeCtx(101)) == 1);
    CHECK_THROWS_AS(sqrt_mod(3, PrimeCtx(7)), NotAResidue);
    CHECK_THROWS_AS(sqrt_mod(14, PrimeCtx(7)), ZeroResidue);
    for (std::int64_t p : oracle::odd_primes_below(10000)) {
      const PrimeCtx ctx(static_cast<std::uint64_t>(p));
      const auto up = static_cast<std::uint64_t>(p);
      // Exhaustive below 600, sampled above.
      const std::int64_t step = p < 600 ? 1 : p / 97;
      for (std::int64_t y = 1; y < p; y += step) {
        const std::int64_t x = y * y % p;
        const std::uint64_t r = sqrt_mod(x, ctx);
        CHECK(mul_mod(r, r, up) == static_cast<std::uint64_t>(x));
        CHECK(r >= 1);
        CHECK(2 * r <= up - 1);
        if (p < 600) CHECK(static_cast<std::int64_t>(r) == *oracle::sqrt_small(x, p));
      }
    }
  }

  TEST_CASE("Salie sums") {
    CHECK(std::abs(salie_direct(1, 1, 3) - cdouble(0.0, -1.0)) < 1e-12);
    CHECK(std::abs(salie_closed(1, 1, 3) - cdouble(0.0, -1.0)) < 1e-12);
    CHECK(std::abs(salie_direct(0, 0, 11)) < 1e-12);
    CHECK(std::abs(salie_closed(1, 1, 5) - 2.0 * std::cos(4.0 * std::numbers::pi / 5.0)) < 1e-12);
    CHECK(std::abs(salie_closed(1, 2, 5)) < 1e-15);
    CHECK_THROWS_AS(salie_closed(0, 1, 5), InvalidArgument);
    for (std::int64_t p : {3, 7, 13, 31}) {
      for (std::int64_t u = -p; u <= p; u += 3) {
        for (std::int64_t v = -p; v <= p; v += 2) {
          const cdouble s = salie_direct(u, v, static_cast<std::uint64_t>(p));
          CHECK(std::abs(salie_direct(-u, -v, static_cast<std::uint64_t>(p)) - std::conj(s)) < 1e-12);
          CHECK(std::abs(s - oracle::salie(u, v, p)) < 1e-11);
        }
      }
    }
    for (std::int64_t p : {47, 101, 199}) {
      double worst = 0.0;
      for (std::int64_t u = 1; u < p; ++u) {
        for (std::int64_t v = 1; v < p; ++v) {
          const cdouble d = salie_direct(u, v, static_cast<std::uint64_t>(p));
          worst = std::max(worst, std::abs(d - salie_closed(u, v, static_cast<std::uint64_t>(p))));
          CHECK(std::abs(d) <= 2.0 + 1e-12);
        }
      }
      CHECK(worst < 1e-9);
    }
  }

  TEST_CASE("Sa and delta_p") {
    CHECK(std::abs(sa(1, 5) - 2.0 * std::cos(2.0 * std::numbers::pi / 5.0)) < 1e-12);
    CHECK(std::abs(sa(2, 5)) < 1e-15);
    CHECK(std::abs(sa(4, 5) - 2.0 * std::cos(4.0 * std::numbers::pi / 5.0)) < 1e-12);
    CHECK(std::abs(sa(0, 5)) == 0.0);
    CHECK(sa_is_degenerate(10, 5));
    CHECK_FALSE(sa_is_degenerate(3, 5));
    CHECK(delta_p(0, 7) == 1);
    CHECK(delta_p(7, 7) == 1);
    CHECK(delta_p(1, 7) == 0);
  }

  TEST_CASE("quadruple delta count") {
    const PrimeCtx p97(97, true);
    CHECK(quadruple_delta_count({1, 1, 2, 2}, 1, p97) == 4);
    CHECK(quadruple_delta_count({1, 1, 1, 1}, 1, p97) == 6);
    CHECK(quadruple_delta_count({1, 4, 9, 25}, 1, PrimeCtx(101, true)) == 0);
    CHECK_THROWS_AS(quadruple_delta_count({1, 1, 5, 1}, 1, p97), InvalidArgument);
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::int64_t> draw(1, 96);
    for (int i = 0; i < 300; ++i) {
      // mu m_i must be a nonzero square for the roots to exist.
      const std::int64_t mu = draw(rng);
      const std::int64_t mu_inv = oracle::inverse(mu, 97);
      std::array<std::int64_t, 4> m{};
      for (auto& v : m) {
        const std::int64_t y = draw(rng);
        v = oracle::mod(mu_inv * y * y, 97);
      }
      if (i % 3 == 0) m[1] = m[0];
      if (i % 5 == 0) m[3] = m[2];
      const int c = quadruple_delta_count(m, mu, p97);
      CHECK(c == oracle::quadruple(m, mu, 97));
      std::array<std::int64_t, 4> shuffled{m[2], m[0], m[3], m[1] + 97};
      CHECK(quadruple_delta_count(shuffled, mu, p97) == c);
    }
  }

  TEST_CASE("modular helpers") {
    CHECK(inverse_mod(3, 7) == 5);
    CHECK(inverse_mod(-3, 7) == 2);
    CHECK_THROWS_AS(inverse_mod(14, 7), InvalidArgument);
    CHECK(reduce_mod(-1, 7) == 6);
    CHECK(pow_mod(2, 10, 1000) == 24);
    CHECK(mul_mod(18446744073709551557ULL - 1, 2, 18446744073709551557ULL) == 18446744073709551557ULL - 2);
  }
}
