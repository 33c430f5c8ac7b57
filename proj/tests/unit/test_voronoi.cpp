#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "hiw/error.hpp"
#include "hiw/forms.hpp"
#include "hiw/voronoi.hpp"
#include "oracles/bessel_kernel.hpp"

using namespace hiw;

namespace {

const FrickePair& pair() {
  static const FrickePair p = theta_delta_pair(100, 40000);
  return p;
}

BKernel& kernel() {
  static BKernel k(12, Window::standard_bump());
  return k;
}

}  // namespace

TEST_SUITE("voronoi") {
  TEST_CASE("Fricke scalar") {
    const FrickeRatios r = fricke_ratios(builtin_form("theta_delta", kFrickeTruncation));
    CHECK(std::abs(r.ratios[0] - r.ratios[1]) / std::abs(r.ratios[0]) < 1e-8);
    CHECK(r.spread < 1e-8);
    CHECK(std::abs(r.kappa.imag()) < 1e-6 * std::abs(r.kappa));
    CHECK(r.kappa.real() > 0.0);
    CHECK(r.kappa.real() == doctest::Approx(4096.0).epsilon(1e-9));
    CHECK(std::abs(pair().scalar.real() - 4096.0) < 1e-6);
    // The leading coefficient of f0 sits at q^4 and equals kappa.
    CHECK(pair().f0.coeff(4).get_d() == doctest::Approx(std::abs(pair().scalar)).epsilon(1e-9));
  }

  TEST_CASE("series evaluation") {
    const QSeries e = eta_expansion(400);
    const cdouble z(0.1, 0.5);
    const cdouble q = std::exp(cdouble(0.0, 2.0 * M_PI) * z);
    cdouble prod = 1.0;
    for (int n = 1; n < 400; ++n) prod *= 1.0 - std::pow(q, n);
    CHECK(std::abs(eval_series(e, z) - prod) < 1e-12);
  }

  TEST_CASE("omega") {
    CHECK(std::abs(omega(1, 3, 12) - cdouble(0.0, 1.0)) < 1e-15);
    for (std::uint64_t q : {5, 13, 17}) {
      CHECK(std::abs(omega(1, q, 12) - static_cast<double>(jacobi(-1, static_cast<std::int64_t>(q)))) < 1e-15);
    }
    for (std::int64_t u = 1; u < 11; ++u) {
      for (std::uint64_t q : {3, 7, 11}) {
        if (u % static_cast<std::int64_t>(q) == 0) continue;
        CHECK(std::abs(std::abs(omega(u, q, 12)) - 1.0) < 1e-12);
      }
    }
  }

  TEST_CASE("log gamma") {
    for (double x : {0.5, 1.0, 3.7, 12.5, 40.0}) CHECK(log_gamma({x, 0.0}).real() == doctest::Approx(std::lgamma(x)).epsilon(1e-13));
    // |Gamma(1/2 + i t)|^2 = pi / cosh(pi t)
    for (double t : {1.0, 10.0, 150.0}) {
      CHECK(2.0 * log_gamma({0.5, t}).real() == doctest::Approx(std::log(M_PI) - std::log(std::cosh(M_PI * t))).epsilon(1e-12));
    }
  }

  TEST_CASE("twisted L-series") {
    const QSeries f = builtin_form("theta_delta", 20000);
    const auto a = f.normalized();
    double plain = 0.0;
    for (std::size_t n = 1; n <= 5000; ++n) plain += a[n] / (static_cast<double>(n) * n);
    CHECK(std::abs(twisted_l(f, 1, 1, {2.0, 0.0}, 5000).value - plain) < 1e-12);
    const cdouble s(2.0, 3.0);
    const TwistedL l = twisted_l(f, 2, 7, s, 5000);
    CHECK(std::abs(twisted_l(f, -2, 7, std::conj(s), 5000).value - std::conj(l.value)) < 1e-12);
    const TwistedL l2 = twisted_l(f, 2, 7, s, 10000);
    CHECK(std::abs(l2.value - l.value) <= l.tail_bound);
    CHECK_THROWS_AS(twisted_l(f, 1, 7, {1.0, 0.0}, 100), InvalidArgument);
    CHECK_THROWS_AS(twisted_l(f, 7, 7, {2.0, 0.0}, 100), InvalidArgument);
    CHECK_THROWS_AS(twisted_l(f, 1, 6, {2.0, 0.0}, 100), InvalidArgument);
  }

  TEST_CASE("kernel against the Bessel integral") {
    const Window w = Window::standard_bump();
    for (double y : {0.01, 0.3, 1.0, 7.5, 30.0, 100.0, 500.0}) {
      const double want = oracle::bessel_b(12, [&](double t) { return w(t); }, 0.0, 1.0, y);
      CHECK(std::abs(kernel()(y) - want) < 1e-12);
    }
    const Window s = Window::scaled_bump(0.2, 0.9);
    BKernel ks(3, s);
    for (double y : {0.5, 4.0, 40.0}) {
      const double want = oracle::bessel_b(3, [&](double t) { return s(t); }, 0.2, 0.9, y);
      CHECK(std::abs(ks(y) - want) < 1e-12);
    }
  }

  TEST_CASE("kernel is real and stable in t_max") {
    for (double y : {0.5, 3.0, 50.0}) {
      const BKernel::Eval half = kernel().evaluate(y);
      const BKernel::Eval full = kernel().evaluate_full(y, half.t_max);
      CHECK(std::abs(full.imag_residual) < 1e-8);
      CHECK(std::abs(full.value - half.value) < 1e-12);
      const BKernel::Eval wider = kernel().evaluate_full(y, 2.0 * half.t_max);
      CHECK(std::abs(wider.value - half.value) < 1e-9);
    }
  }

  TEST_CASE("kernel decay") {
    // B is of rapid decay, though slower than a fixed 1e-6 drop by y = 100.
    const double b1 = std::abs(kernel()(1.0));
    CHECK(std::abs(kernel()(100.0)) < 1e-3 * b1);
    CHECK(std::abs(kernel()(1000.0)) < 1e-5 * b1);
    CHECK(std::abs(kernel()(3000.0)) < 2e-8 * b1);
  }

  TEST_CASE("Voronoi identity") {
    const Window w = Window::standard_bump();
    const VoronoiReport r = voronoi_check(pair(), kernel(), w, 1, 3, 50.0);
    CHECK(r.rel_residual < 1e-6);
    const auto steps = voronoi_refinement(pair(), kernel(), w, 3, 7, 50.0, 2500, 4);
    REQUIRE(steps.size() == 4);
    for (std::size_t i = 1; i < steps.size(); ++i) {
      CHECK(steps[i].m_max == 2 * steps[i - 1].m_max);
      CHECK(steps[i].abs_residual <= 0.5 * steps[i - 1].abs_residual);
    }
    // q = 1: both sides are the (tiny) untwisted sum.
    const VoronoiReport plain = voronoi_check(pair(), kernel(), w, 1, 1, 50.0);
    CHECK(std::abs(plain.lhs) < 1e-2);
    CHECK(plain.abs_residual < 1e-7);
  }

  TEST_CASE("Voronoi sides are linear in the form") {
    const Window w = Window::standard_bump();
    FrickePair scaled = pair();
    scaled.f = scaled.f.scaled(7);
    scaled.f0 = scaled.f0.scaled(7);
    const VoronoiReport r = voronoi_check(pair(), kernel(), w, 2, 5, 60.0, 20000);
    const VoronoiReport s = voronoi_check(scaled, kernel(), w, 2, 5, 60.0, 20000);
    CHECK(std::abs(s.lhs - 7.0 * r.lhs) < 1e-12 * std::abs(s.lhs));
    CHECK(std::abs(s.rhs - 7.0 * r.rhs) < 1e-12 * std::abs(s.rhs));
    CHECK(s.abs_residual == doctest::Approx(7.0 * r.abs_residual).epsilon(1e-3));
  }

  TEST_CASE("conjugate twists") {
    const Window w = Window::standard_bump();
    const VoronoiReport a = voronoi_check(pair(), kernel(), w, 2, 7, 80.0);
    const VoronoiReport b = voronoi_check(pair(), kernel(), w, -2, 7, 80.0);
    CHECK(std::abs((a.rhs + b.rhs).imag()) < 1e-8);
    CHECK(std::abs(a.lhs - std::conj(b.lhs)) < 1e-12);
  }

  TEST_CASE("Salie rearrangement") {
    const Window w = Window::standard_bump();
    const FrickePair big = theta_delta_pair(10000, 40000);
    int checked = 0;
    for (std::uint64_t a : {1, 2, 3, 5, 7, 100, 210}) {
      const RearrangeReport r = rearranged_e_check(big, kernel(), w, 1e4, 211, a, 0.1);
      CHECK(r.residual < 1e-4);
      CHECK(r.y_param == doctest::Approx(4.0 * 211 * 211 / 1e4));
      CHECK(r.m_cut == static_cast<std::size_t>(std::floor(std::pow(r.y_param, 1.1))));
      ++checked;
    }
    CHECK(checked == 7);
    CHECK_THROWS_AS(rearranged_e_check(big, kernel(), w, 1e4, 211, 0, 0.1), InvalidArgument);
    CHECK_THROWS_AS(rearranged_e_check(big, kernel(), w, 1e4, 4999, 1, 0.1), InvalidArgument);
  }
}
