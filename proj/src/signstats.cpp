#include "hiw/signstats.hpp"

#include <cmath>
#include <string>

#include "hiw/compensated.hpp"
#include "hiw/error.hpp"
#include "hiw/modarith.hpp"

namespace hiw {

namespace {

constexpr double kQuarterRootThree = 0.14433756729740643;  // 1 / (4 sqrt 3)

std::size_t last_index(std::span<const double> a, double x) {
  const auto hi = static_cast<std::size_t>(std::floor(x));
  if (hi >= a.size()) {
    throw InvalidArgument("truncation " + std::to_string(a.empty() ? 0 : a.size() - 1) +
                          " below x = " + std::to_string(hi));
  }
  return hi;
}

void check_prime(std::uint64_t p) {
  if (p < 3 || !is_prime(p)) throw InvalidArgument("p must be an odd prime");
}

}  // namespace

std::size_t count_t(std::span<const double> a, double x, double alpha, std::uint64_t cls,
                    std::uint64_t q, int sign, const Window* w) {
  if (!(alpha > 0.0)) throw InvalidArgument("count_t: alpha must be positive");
  if (q == 0 || cls >= q) throw InvalidArgument("count_t: need 0 <= a < q");
  if (sign != 1 && sign != -1) throw InvalidArgument("count_t: sign must be +1 or -1");
  const std::size_t hi = last_index(a, x);
  std::size_t count = 0;
  for (std::size_t n = cls == 0 ? q : cls; n <= hi; n += q) {
    if (w != nullptr && (*w)(static_cast<double>(n) / x) == 0.0) continue;
    if (sign * a[n] > std::pow(static_cast<double>(n), -alpha)) ++count;
  }
  return count;
}

SignCountReport sign_counts(std::span<const double> a, double x, double alpha, std::uint64_t q,
                            const Window* w) {
  if (!(alpha > 0.0)) throw InvalidArgument("sign_counts: alpha must be positive");
  if (q == 0) throw InvalidArgument("sign_counts: q must be positive");
  const std::size_t hi = last_index(a, x);
  SignCountReport rep;
  rep.x = x;
  rep.q = q;
  rep.alpha = alpha;
  rep.smooth = w != nullptr;
  rep.per_class_plus.assign(q, 0);
  rep.per_class_minus.assign(q, 0);
  for (std::size_t n = 1; n <= hi; ++n) {
    if (w != nullptr && (*w)(static_cast<double>(n) / x) == 0.0) continue;
    const double thr = std::pow(static_cast<double>(n), -alpha);
    if (a[n] > thr) ++rep.per_class_plus[n % q];
    if (-a[n] > thr) ++rep.per_class_minus[n % q];
  }
  return rep;
}

SignBalance sign_balance(std::span<const double> b) {
  CompensatedSum plus;
  CompensatedSum minus;
  for (double v : b) {
    if (v > 0.0) plus.add(v);
    if (v < 0.0) minus.add(-v);
  }
  SignBalance out;
  out.sum_plus = plus.value();
  out.sum_minus = minus.value();
  CompensatedSum abs_sum = plus;
  abs_sum.merge(minus);
  out.total_abs = abs_sum.value();
  CompensatedSum total = plus;
  total.merge(CompensatedSum(-minus.value()));
  out.total = total.value();
  return out;
}

double elmt2_bound(double m, double v, double c_sum) {
  if (!(v > 0.0)) throw InvalidArgument("elmt2_bound: V must be positive");
  if (c_sum > m) throw InvalidArgument("elmt2_bound: need sum c(n) <= M");
  const double d = m - c_sum;
  return d * d / v;
}

SurveyThresholds default_survey_thresholds(double cf, const Window& w, double r) {
  if (!(cf > 0.0)) throw InvalidArgument("survey thresholds: cf must be positive");
  if (!(r > 0.0 && r < 1.0 / 48.0)) throw InvalidArgument("survey thresholds: need 0 < r < 1/48");
  const double scale = std::sqrt(w.l2_norm_sq() * cf);  // |w| sqrt(cf)
  SurveyThresholds th;
  th.r = r;
  th.m1 = 0.5 * (kQuarterRootThree - std::sqrt(r)) * scale;
  const double gap = kQuarterRootThree - th.m1 / scale;
  th.m2 = 1.1 * cf * w.l2_norm_sq() / (gap * gap - r);
  return th;
}

SurveyVerdict class_survey(std::span<const double> a, const Window& w, double x, std::uint64_t p,
                           double alpha, const SurveyThresholds& th) {
  if (!(alpha > 3.0 / 14.0 && alpha <= 0.25)) {
    throw InvalidArgument("class_survey: alpha must lie in (3/14, 1/4]");
  }
  check_prime(p);
  const std::size_t hi = last_index(a, x);
  SurveyVerdict v;
  v.x = x;
  v.p = p;
  v.alpha = alpha;
  v.threshold_r = th.r;
  v.m1 = th.m1;
  v.m2 = th.m2;
  v.p_exponent_window = {1.0 - 2.0 * alpha, 4.0 / 7.0};
  v.p_exponent = std::log(static_cast<double>(p)) / std::log(x);
  v.out_of_range = !(v.p_exponent > v.p_exponent_window.first && v.p_exponent < v.p_exponent_window.second);

  std::vector<CompensatedSum> s1(p);
  std::vector<CompensatedSum> s2(p);
  v.classes.assign(p, ClassRow{});
  for (std::size_t n = 1; n <= hi; ++n) {
    const double wt = w(static_cast<double>(n) / x);
    if (wt == 0.0) continue;
    const std::size_t c = n % p;
    const double b = a[n] * wt;
    s1[c].add(b);
    s2[c].add(b * b);
    const double thr = std::pow(static_cast<double>(n), -alpha);
    if (a[n] > thr) ++v.classes[c].t_plus;
    if (-a[n] > thr) ++v.classes[c].t_minus;
  }
  const double root = std::sqrt(x / static_cast<double>(p));
  const double s2_cap = th.m2 * x / static_cast<double>(p);
  std::size_t hit = 0, cond = 0, both = 0;
  for (std::size_t c = 0; c < p; ++c) {
    auto& row = v.classes[c];
    row.e = s1[c].value() / root;
    row.s2 = s2[c].value();
    row.conditions = c != 0 && row.e >= th.m1 && row.s2 <= s2_cap;
    hit += row.t_plus >= 1 ? 1 : 0;
    cond += row.conditions ? 1 : 0;
    both += (row.conditions && row.t_plus >= 1) ? 1 : 0;
  }
  const double dp = static_cast<double>(p);
  v.fraction_classes_hit = static_cast<double>(hit) / dp;
  v.fraction_conditions = static_cast<double>(cond) / dp;
  v.fraction_both = static_cast<double>(both) / dp;
  v.pass = !v.out_of_range && v.fraction_classes_hit >= th.r;
  return v;
}

EigenSurveyReport eigen_survey(std::span<const double> a, const Window& w, double x,
                               std::uint64_t p, double alpha, double m, double delta) {
  if (!(alpha > 0.125 && alpha <= 1.0 / 7.0)) {
    throw InvalidArgument("eigen_survey: alpha must lie in (1/8, 1/7]");
  }
  if (!(m > 0.0) || !(delta > 0.0)) throw InvalidArgument("eigen_survey: m and delta must be positive");
  check_prime(p);
  const std::size_t hi = last_index(a, x);
  const double dp = static_cast<double>(p);
  EigenSurveyReport rep;
  rep.x = x;
  rep.p = p;
  rep.alpha = alpha;
  rep.m = m;
  rep.delta = delta;
  rep.out_of_range = !(dp > std::sqrt(x) && dp < std::pow(x, 4.0 * alpha));
  rep.min_target = std::pow(x, 1.0 - 2.0 * delta) / std::pow(dp, 1.75);
  rep.a_size_reference = std::pow(dp, 0.75) / std::pow(x, delta / 2.0);

  std::vector<CompensatedSum> s1(p), s2(p), s4(p), sa(p);
  rep.classes.assign(p, EigenClassRow{});
  for (std::size_t n = 1; n <= hi; ++n) {
    const double wt = w(static_cast<double>(n) / x);
    if (wt == 0.0) continue;
    const std::size_t c = n % p;
    const double b = a[n] * wt;
    s1[c].add(b);
    s2[c].add(b * b);
    s4[c].add(b * b * b * b);
    sa[c].add(std::abs(b));
    const double thr = std::pow(static_cast<double>(n), -alpha);
    if (a[n] > thr) ++rep.classes[c].t_plus;
    if (-a[n] > thr) ++rep.classes[c].t_minus;
  }
  const double a2_floor = m * x / dp;
  const double a4_cap = std::pow(x, 1.0 + delta) / std::sqrt(dp);
  const double b1_cap = std::pow(x, 1.0 - delta) / std::pow(dp, 1.25);
  const double b2_cap = std::pow(x, 1.0 + delta) / std::pow(dp, 0.75);
  const double holder_floor = std::pow(m, 1.5) * std::pow(x, 1.0 - delta / 2.0) / std::pow(dp, 1.25);
  for (std::size_t c = 0; c < p; ++c) {
    auto& row = rep.classes[c];
    row.s1 = s1[c].value();
    row.s2 = s2[c].value();
    row.s4 = s4[c].value();
    row.s_abs = sa[c].value();
    row.in_a = row.s2 > a2_floor && row.s4 <= a4_cap;
    row.in_b = std::abs(row.s1) > b1_cap || row.s2 > b2_cap;
    if (row.in_a) {
      row.holder_ok = row.s_abs >= holder_floor * (1.0 - 1e-12);
      rep.holder_all = rep.holder_all && row.holder_ok;
    }
    rep.count_a += row.in_a ? 1 : 0;
    rep.count_b += row.in_b ? 1 : 0;
    if (row.in_a && !row.in_b) {
      ++rep.count_a_not_b;
      if (static_cast<double>(std::min(row.t_plus, row.t_minus)) >= rep.min_target) {
        ++rep.count_min_above_target;
      }
    }
  }
  return rep;
}

MarkovCount markov_class_count(std::span<const double> a, const Window& w, double x,
                               std::uint64_t p, double m) {
  if (!(m > 0.0)) throw InvalidArgument("markov_class_count: m must be positive");
  if (p == 0) throw InvalidArgument("markov_class_count: p must be positive");
  const std::size_t hi = last_index(a, x);
  std::vector<CompensatedSum> s2(p);
  for (std::size_t n = 1; n <= hi; ++n) {
    const double b = a[n] * w(static_cast<double>(n) / x);
    if (b != 0.0) s2[n % p].add(b * b);
  }
  const double level = m * x / static_cast<double>(p);
  MarkovCount out;
  CompensatedSum total;
  for (const auto& s : s2) {
    total.add(s.value());
    if (s.value() > level) ++out.count;
  }
  out.bound = total.value() / level;
  out.ratio = out.bound > 0.0 ? static_cast<double>(out.count) / out.bound : 0.0;
  return out;
}

CorollaryResult corollary_count(std::span<const double> a, const Window& w, double x,
                                double epsilon, const SurveyThresholds& th) {
  if (!(epsilon > 0.0 && epsilon < 1.0 / 28.0)) {
    throw InvalidArgument("corollary_count: epsilon must lie in (0, 1/28)");
  }
  CorollaryResult res;
  res.x = x;
  res.epsilon = epsilon;
  res.alpha = 3.0 / 14.0 + epsilon;
  const double lo = std::pow(x, 4.0 / 7.0 - 2.0 * epsilon);
  const double hi = std::pow(x, 4.0 / 7.0 - epsilon);
  std::uint64_t p = nearest_prime(std::pow(x, 4.0 / 7.0 - 1.5 * epsilon));
  if (static_cast<double>(p) < lo || static_cast<double>(p) > hi) {
    p = next_prime(static_cast<std::uint64_t>(std::ceil(lo)));
    if (static_cast<double>(p) > hi) throw InvalidArgument("corollary_count: no prime in the interval");
  }
  if (p == 2) p = 3;
  res.p = p;
  const SurveyVerdict survey = class_survey(a, w, x, p, res.alpha, th);
  for (const auto& row : survey.classes) res.classes_hit += row.t_plus >= 1 ? 1 : 0;
  res.count = count_t(a, x, res.alpha, 0, 1, +1);
  res.count_minus = count_t(a, x, res.alpha, 0, 1, -1);
  res.target = th.r * lo;
  res.pass = static_cast<double>(res.count) >= res.target;
  return res;
}

}  // namespace hiw
