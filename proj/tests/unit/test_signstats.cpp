#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "hiw/error.hpp"
#include "hiw/forms.hpp"
#include "hiw/signstats.hpp"
#include "hiw/windows.hpp"

using namespace hiw;

namespace {

std::vector<double> synthetic(std::size_t x, double scale, double alpha) {
  std::vector<double> a(x + 1, 0.0);
  for (std::size_t n = 1; n <= x; ++n) a[n] = scale * std::pow(static_cast<double>(n), -alpha);
  return a;
}

std::span<const double> theta_delta(std::size_t x) {
  static const QSeries f = builtin_form("theta_delta", 100000);
  return f.normalized().first(x + 1);
}

constexpr double kCf = 0.23759988422436915;

}  // namespace

TEST_SUITE("signstats") {
  TEST_CASE("counts on trivial inputs") {
    const std::vector<double> zero(1001, 0.0);
    for (std::uint64_t q : {1, 3, 7}) {
      for (std::uint64_t c = 0; c < q; ++c) {
        CHECK(count_t(zero, 1000, 0.2, c, q, +1) == 0);
        CHECK(count_t(zero, 1000, 0.2, c, q, -1) == 0);
      }
    }
    const auto two = synthetic(1000, 2.0, 0.22);
    CHECK(count_t(two, 1000, 0.22, 0, 1, +1) == 1000);
    CHECK(count_t(two, 1000, 0.22, 0, 1, -1) == 0);
    CHECK(count_t(two, 1000, 0.22, 3, 7, +1) == 143);  // 3, 10, ..., 997
    const auto edge = synthetic(1000, 1.0, 0.22);  // a(n) = n^{-alpha} is not > n^{-alpha}
    CHECK(count_t(edge, 1000, 0.22, 0, 1, +1) == 0);
    CHECK_THROWS_AS(count_t(two, 1000, 0.0, 0, 1, +1), InvalidArgument);
    CHECK_THROWS_AS(count_t(two, 1000, 0.2, 7, 7, +1), InvalidArgument);
    CHECK_THROWS_AS(count_t(two, 1000, 0.2, 0, 1, 0), InvalidArgument);
    CHECK_THROWS_AS(count_t(two, 2000, 0.2, 0, 1, +1), InvalidArgument);
  }

  TEST_CASE("counts agree with a direct scan") {
    const auto a = theta_delta(20000);
    const Window w = Window::standard_bump();
    for (std::uint64_t q : {1, 5, 101}) {
      const SignCountReport rep = sign_counts(a, 20000, 0.22, q, &w);
      const SignCountReport plain = sign_counts(a, 20000, 0.22, q);
      for (std::uint64_t c = 0; c < q; ++c) {
        std::size_t plus = 0, minus = 0, plus_w = 0;
        for (std::size_t n = 1; n <= 20000; ++n) {
          if (n % q != c) continue;
          const double thr = std::pow(static_cast<double>(n), -0.22);
          plus += a[n] > thr;
          minus += a[n] < -thr;
          plus_w += a[n] > thr && w(n / 20000.0) != 0.0;
        }
        CHECK(plain.per_class_plus[c] == plus);
        CHECK(plain.per_class_minus[c] == minus);
        CHECK(rep.per_class_plus[c] == plus_w);
        CHECK(count_t(a, 20000, 0.22, c, q, +1) == plus);
        CHECK(count_t(a, 20000, 0.22, c, q, -1, &w) == rep.per_class_minus[c]);
      }
    }
  }

  TEST_CASE("sign symmetry under negation") {
    const auto a = theta_delta(10000);
    std::vector<double> neg(a.begin(), a.end());
    for (double& v : neg) v = -v;
    const SignCountReport r = sign_counts(a, 10000, 0.23, 13);
    const SignCountReport s = sign_counts(neg, 10000, 0.23, 13);
    CHECK(r.per_class_plus == s.per_class_minus);
    CHECK(r.per_class_minus == s.per_class_plus);
  }

  TEST_CASE("sign balance") {
    const std::vector<double> pm = {1.0, -1.0};
    const SignBalance b = sign_balance(pm);
    CHECK(b.sum_plus == 1.0);
    CHECK(b.sum_minus == 1.0);
    CHECK(b.total_abs == 2.0);
    CHECK(b.total == 0.0);

    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    std::vector<double> v(100000);
    for (double& x : v) x = g(rng);
    const SignBalance s = sign_balance(v);
    CHECK(s.sum_plus / s.sum_minus > 0.9);
    CHECK(s.sum_plus / s.sum_minus < 1.1);
    CHECK(s.total_abs == doctest::Approx(s.sum_plus + s.sum_minus).epsilon(1e-14));
    CHECK(s.total == doctest::Approx(s.sum_plus - s.sum_minus).epsilon(1e-12));
  }

  TEST_CASE("second-moment lower bound") {
    CHECK(elmt2_bound(10, 36, 4) == 1.0);
    CHECK(elmt2_bound(5, 1, 5) == 0.0);
    CHECK_THROWS_AS(elmt2_bound(1, 0, 0), InvalidArgument);
    CHECK_THROWS_AS(elmt2_bound(1, 1, 2), InvalidArgument);

    // #{n : b(n) > c(n)} >= (M - sum c)^2 / V for c >= 0 and sum c <= M = sum b.
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> len(1, 40);
    for (int trial = 0; trial < 10000; ++trial) {
      const int n = len(rng);
      std::vector<double> b(n), c(n);
      double m = 0.0, v = 0.0, cs = 0.0;
      for (int i = 0; i < n; ++i) {
        b[i] = u(rng);
        c[i] = 0.3 * std::abs(u(rng));
        m += b[i];
        v += b[i] * b[i];
        cs += c[i];
      }
      if (cs > m || m <= 0.0) continue;
      std::size_t count = 0;
      for (int i = 0; i < n; ++i) count += b[i] > c[i];
      CHECK(static_cast<double>(count) >= elmt2_bound(m, v, cs) * (1.0 - 1e-12));
    }
  }

  TEST_CASE("default thresholds") {
    const Window w = Window::standard_bump();
    const SurveyThresholds th = default_survey_thresholds(kCf, w, 0.01);
    const double scale = std::sqrt(w.l2_norm_sq() * kCf);
    CHECK(th.m1 > 0.0);
    CHECK(th.m1 / scale < 1.0 / (4.0 * std::sqrt(3.0)) - 0.1);
    const double gap = 1.0 / (4.0 * std::sqrt(3.0)) - th.m1 / scale;
    CHECK(th.m2 > kCf * w.l2_norm_sq() / (gap * gap - 0.01));
    CHECK_THROWS_AS(default_survey_thresholds(kCf, w, 0.05), InvalidArgument);
    CHECK_THROWS_AS(default_survey_thresholds(0.0, w, 0.01), InvalidArgument);
  }

  TEST_CASE("class survey recount") {
    const auto a = theta_delta(10000);
    const Window w = Window::standard_bump();
    const SurveyThresholds th = default_survey_thresholds(kCf, w);
    const double alpha = 0.23;
    const std::uint64_t p = 157;
    const SurveyVerdict v = class_survey(a, w, 10000, p, alpha, th);
    CHECK_FALSE(v.out_of_range);
    CHECK(v.p_exponent_window.first == doctest::Approx(1.0 - 2.0 * alpha));
    REQUIRE(v.classes.size() == p);
    std::size_t hit = 0;
    for (std::uint64_t c = 0; c < p; ++c) {
      double s1 = 0.0, s2 = 0.0;
      std::size_t tp = 0;
      for (std::size_t n = c == 0 ? p : c; n <= 10000; n += p) {
        const double wt = w(n / 10000.0);
        if (wt == 0.0) continue;
        s1 += a[n] * wt;
        s2 += a[n] * a[n] * wt * wt;
        tp += a[n] > std::pow(static_cast<double>(n), -alpha);
      }
      CHECK(v.classes[c].t_plus == tp);
      CHECK(v.classes[c].e == doctest::Approx(s1 / std::sqrt(10000.0 / p)).epsilon(1e-9));
      CHECK(v.classes[c].s2 == doctest::Approx(s2).epsilon(1e-11));
      hit += tp >= 1;
    }
    CHECK(v.fraction_classes_hit == doctest::Approx(static_cast<double>(hit) / p));
    CHECK(v.fraction_both <= v.fraction_conditions);
    CHECK(v.pass);

    const SurveyVerdict far = class_survey(a, w, 10000, 3, alpha, th);
    CHECK(far.out_of_range);
    CHECK_FALSE(far.pass);
    CHECK_THROWS_AS(class_survey(a, w, 10000, p, 0.2, th), InvalidArgument);
    CHECK_THROWS_AS(class_survey(a, w, 10000, p, 0.26, th), InvalidArgument);
    CHECK_THROWS_AS(class_survey(a, w, 10000, 155, alpha, th), InvalidArgument);
  }

  TEST_CASE("eigen survey classification") {
    const auto a = theta_delta(10000);
    const Window w = Window::standard_bump();
    const EigenSurveyReport r = eigen_survey(a, w, 10000, 157, 0.14, 0.1 * kCf, 0.05);
    CHECK_FALSE(r.out_of_range);
    std::size_t ca = 0, cb = 0, cab = 0;
    for (const auto& row : r.classes) {
      ca += row.in_a;
      cb += row.in_b;
      cab += row.in_a && !row.in_b;
      CHECK(row.s_abs >= std::abs(row.s1) * (1.0 - 1e-12));
      CHECK(row.s2 * row.s2 <= row.s4 * 10000.0 * (1.0 + 1e-9));  // Cauchy-Schwarz, at most x terms
    }
    CHECK(r.count_a == ca);
    CHECK(r.count_b == cb);
    CHECK(r.count_a_not_b == cab);
    CHECK(r.count_min_above_target <= r.count_a_not_b);
    CHECK(r.holder_all);
    CHECK(eigen_survey(a, w, 10000, 53, 0.14, 0.02, 0.05).out_of_range);
    CHECK_THROWS_AS(eigen_survey(a, w, 10000, 157, 0.15, 0.02, 0.05), InvalidArgument);
    CHECK_THROWS_AS(eigen_survey(a, w, 10000, 157, 0.14, 0.0, 0.05), InvalidArgument);
  }

  TEST_CASE("Markov count") {
    const auto a = theta_delta(10000);
    const Window w = Window::standard_bump();
    for (double m : {0.01, 0.1, 0.5}) {
      const MarkovCount mc = markov_class_count(a, w, 10000, 157, m);
      CHECK(static_cast<double>(mc.count) <= mc.bound);
      CHECK(mc.ratio <= 1.0);
    }
  }

  TEST_CASE("corollary count") {
    const auto a = theta_delta(10000);
    const Window w = Window::standard_bump();
    const SurveyThresholds th = default_survey_thresholds(kCf, w);
    const CorollaryResult c = corollary_count(a, w, 10000, 0.02, th);
    CHECK(c.alpha == doctest::Approx(3.0 / 14.0 + 0.02));
    const double lo = std::pow(10000.0, 4.0 / 7.0 - 0.04);
    const double hi = std::pow(10000.0, 4.0 / 7.0 - 0.02);
    CHECK(static_cast<double>(c.p) >= lo);
    CHECK(static_cast<double>(c.p) <= hi);
    CHECK(c.count >= c.classes_hit);
    CHECK(c.count == count_t(a, 10000, c.alpha, 0, 1, +1));
    CHECK(c.pass);
    CHECK_THROWS_AS(corollary_count(a, w, 10000, 0.04, th), InvalidArgument);
  }
}
