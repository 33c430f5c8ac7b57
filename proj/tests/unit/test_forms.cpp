#include <doctest.h>

#include "hiw/error.hpp"
#include "hiw/forms.hpp"
#include "oracles/series_oracle.hpp"

using namespace hiw;

TEST_SUITE("forms") {
  TEST_CASE("eta8_cubed sits on odd squares") {
    const QSeries f = builtin_form("eta8_cubed", 100);
    CHECK(f.coeff(1) == 1);
    CHECK(f.coeff(9) == -3);
    CHECK(f.coeff(25) == 5);
    CHECK(f.coeff(49) == -7);
    for (std::size_t n = 0; n < 81; ++n) {
      if (n != 1 && n != 9 && n != 25 && n != 49) CHECK(f.coeff(n) == 0);
    }
    CHECK(f.weight().twice == 3);
    CHECK(f.level() == 64);
    const QSeries big = builtin_form("eta8_cubed", 200000);
    const auto want = oracle::eta8_cubed(200000);
    CHECK(std::equal(want.begin(), want.end(), big.coeffs().begin()));
  }

  TEST_CASE("Delta is q times eta^24") {
    const QSeries d = delta_expansion(300);
    const auto tau = oracle::ramanujan_tau(300);
    for (std::size_t n = 0; n <= 300; ++n) CHECK(d.coeff(n) == tau[n]);
    CHECK(d.weight().twice == 24);
  }

  TEST_CASE("tau is multiplicative and satisfies the prime-square recursion") {
    const QSeries d = delta_expansion(2000);
    auto tau = [&](std::size_t n) { return d.coeff(n); };
    CHECK(tau(6) == tau(2) * tau(3));
    CHECK(tau(35) == tau(5) * tau(7));
    CHECK(tau(1001) == tau(7) * tau(11) * tau(13));
    for (std::size_t p : {2, 3, 5, 7, 11, 13}) {
      const BigInt p11 = [&] {
        BigInt r;
        mpz_ui_pow_ui(r.get_mpz_t(), p, 11);
        return r;
      }();
      CHECK(tau(p * p) == tau(p) * tau(p) - p11);
    }
  }

  TEST_CASE("Jacobi closed form for eta cubed") {
    const QSeries e = eta_cubed_closed_form(5000);
    const auto want = oracle::jacobi_eta_cubed(5000);
    CHECK(std::equal(want.begin(), want.end(), e.coeffs().begin()));
  }

  TEST_CASE("eta quotients") {
    const EtaQuotientSpec spec({{8, 3}});
    CHECK(spec.q_prefactor() == 1);
    CHECK(spec.twice_weight() == 3);
    const QSeries f = eta_quotient(spec, 200, {{3}, 64, CharacterTag::trivial});
    CHECK(f == builtin_form("eta8_cubed", 200));

    // eta(z)^2 / eta(2z) = sum (-1)^n q^{n^2}: needs negative exponents.
    const EtaQuotientSpec theta_like({{1, 2}, {2, -1}});
    CHECK(theta_like.q_prefactor() == 0);
    const QSeries t = eta_quotient(theta_like, 100, {{1}, 16, CharacterTag::trivial});
    for (std::size_t n = 0; n <= 100; ++n) {
      long want = 0;
      for (long k = -10; k <= 10; ++k) {
        if (static_cast<std::size_t>(k * k) == n) want += (k % 2 == 0) ? 1 : -1;
      }
      CHECK(t.coeff(n) == want);
    }
    CHECK_THROWS_AS(EtaQuotientSpec({{1, 1}}), InvalidArgument);
    CHECK_THROWS_AS(EtaQuotientSpec({{0, 24}}), InvalidArgument);
  }

  TEST_CASE("built-in cache returns truncations of one build") {
    const QSeries big = builtin_form("theta_delta", 3000);
    const QSeries small = builtin_form("theta_delta", 500);
    CHECK(small.truncation() == 500);
    CHECK(small == big.truncated(500));
    CHECK_THROWS_AS(builtin_form("no_such_form", 10), InvalidArgument);
    CHECK_THROWS_AS(builtin_form("theta_delta", 0), InvalidArgument);
    const auto names = builtin_form_names();
    CHECK(names.size() == 3);
  }

  TEST_CASE("Fricke image of theta_delta") {
    const QSeries f0 = builtin_form("theta_delta_fricke", 400);
    const QSeries f = builtin_form("theta_delta", 100);
    // kappa theta(z) Delta(4z): first term at q^4 with coefficient kappa.
    CHECK(f0.coeff(0) == 0);
    CHECK(f0.coeff(1) == 0);
    CHECK(f0.coeff(4) == 4096);
    CHECK(f0.coeff(5) == 2 * 4096);
    CHECK(f0.coeff(8) == -22 * 4096);
    CHECK(f0.coeff(9) == -48 * 4096);
    CHECK(f0.weight() == f.weight());
  }
}
