#include "hiw/progsums.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hiw/compensated.hpp"
#include "hiw/error.hpp"
#include "hiw/modarith.hpp"
#include "hiw/parallel.hpp"

namespace hiw {

namespace {

constexpr std::size_t kChunk = 1 << 16;

struct Range {
  std::size_t lo = 1;
  std::size_t hi = 0;  // inclusive; empty when hi < lo
};

Range support_range(const Window& w, double x) {
  const double lo = std::max(1.0, std::floor(w.lo() * x) + 1.0);
  const double hi = std::ceil(w.hi() * x) - 1.0;
  return {static_cast<std::size_t>(lo), hi < lo ? 0 : static_cast<std::size_t>(hi)};
}

void check_length(std::span<const double> a, const Range& r) {
  if (r.hi >= a.size()) {
    throw InvalidArgument("coefficient array too short: need index " + std::to_string(r.hi) +
                          ", have " + std::to_string(a.size() == 0 ? 0 : a.size() - 1));
  }
}

// Least-squares slope of log(y) against log(x).
double log_log_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(ys[i] > 0.0)) continue;
    const double lx = std::log(xs[i]);
    const double ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return 0.0;
  const double dn = static_cast<double>(n);
  const double denom = dn * sxx - sx * sx;
  return denom == 0.0 ? 0.0 : (dn * sxy - sx * sy) / denom;
}

}  // namespace

std::int64_t level_n_of(std::int64_t level) { return level % 4 == 0 ? level / 4 : level; }

std::uint64_t prime_near_power(double x, double e) {
  std::uint64_t p = nearest_prime(std::pow(x, e));
  if (p == 2) p = 3;
  return p;
}

ProgressionReport progression_e(std::span<const double> a, const Window& w, double x,
                                std::uint64_t p, std::int64_t level_n) {
  if (!(x > 0.0)) throw InvalidArgument("progression_e: x must be positive");
  if (p < 3 || !is_prime(p)) throw InvalidArgument("progression_e: p must be an odd prime");
  if (level_n % static_cast<std::int64_t>(p) == 0) {
    throw InvalidArgument("progression_e: p divides the level");
  }
  const Range r = support_range(w, x);
  if (r.hi >= r.lo) check_length(a, r);

  const std::size_t n_chunks = r.hi >= r.lo ? (r.hi - r.lo) / kChunk + 1 : 0;
  std::vector<std::vector<CompensatedSum>> partial(n_chunks);
  parallel_chunks(n_chunks, [&](std::size_t c) {
    std::vector<CompensatedSum> buckets(p);
    const std::size_t lo = r.lo + c * kChunk;
    const std::size_t hi = std::min(r.hi, lo + kChunk - 1);
    std::size_t cls = lo % p;
    for (std::size_t n = lo; n <= hi; ++n) {
      const double term = a[n] * w(static_cast<double>(n) / x);
      if (term != 0.0) buckets[cls].add(term);
      if (++cls == p) cls = 0;
    }
    partial[c] = std::move(buckets);
  });

  std::vector<CompensatedSum> buckets(p);
  for (const auto& part : partial) {
    for (std::size_t k = 0; k < p; ++k) buckets[k].merge(part[k]);
  }

  ProgressionReport report;
  report.x = x;
  report.p = p;
  report.level_n = level_n;
  report.e_values.resize(p);
  const double scale = 1.0 / std::sqrt(x / static_cast<double>(p));
  CompensatedSum total;
  for (std::size_t k = 0; k < p; ++k) {
    const double v = buckets[k].value();
    total.add(v);
    report.e_values[k] = v * scale;
  }
  report.total_sum = total.value();
  report.class0_sum = buckets[0].value();
  fill_moments(report);
  return report;
}

ProgressionReport progression_e(const QSeries& f, const Window& w, double x, std::uint64_t p) {
  const Range r = support_range(w, x);
  if (r.hi > f.truncation()) {
    throw InvalidArgument("progression_e: truncation " + std::to_string(f.truncation()) +
                          " below required " + std::to_string(r.hi));
  }
  if (f.level() % static_cast<std::int64_t>(p) == 0) {
    throw InvalidArgument("progression_e: p divides the level");
  }
  return progression_e(f.normalized(), w, x, p, level_n_of(f.level()));
}

double m4_with_multiplier(const ProgressionReport& report, std::uint64_t mu) {
  const std::uint64_t p = report.p;
  const PrimeCtx ctx(p);
  const std::uint64_t mult =
      mul_mod(reduce_mod(report.level_n, p), reduce_mod(static_cast<std::int64_t>(mu), p), p);
  CompensatedSum sum;
  for (std::uint64_t a = 1; a < p; ++a) {
    if (legendre(static_cast<std::int64_t>(a), ctx) != 1) continue;
    const double e = report.e_values[mul_mod(mult, a, p)];
    sum.add(e * e * e * e);
  }
  return 2.0 * sum.value() / static_cast<double>(p);
}

void fill_moments(ProgressionReport& report) {
  const std::uint64_t p = report.p;
  if (report.e_values.size() != p) throw InvalidArgument("fill_moments: e_values length != p");
  const PrimeCtx ctx(p);
  if (report.mu_plus == 0) report.mu_plus = 1;
  if (report.mu_minus == 0) report.mu_minus = ctx.smallest_nonresidue();
  CompensatedSum s1;
  CompensatedSum s2;
  for (std::uint64_t k = 1; k < p; ++k) {
    const double e = report.e_values[k];
    s1.add(std::abs(e));
    s2.add(e * e);
  }
  const double dp = static_cast<double>(p);
  report.abs_m1 = s1.value() / dp;
  report.m2 = s2.value() / dp;
  report.m4_plus = m4_with_multiplier(report, report.mu_plus);
  report.m4_minus = m4_with_multiplier(report, report.mu_minus);
}

CfEstimate estimate_cf(std::span<const double> a, const Window& w, const std::vector<double>& xs) {
  if (xs.empty()) throw InvalidArgument("estimate_cf: empty x list");
  CfEstimate out;
  out.xs = xs;
  for (double x : xs) {
    const Range r = support_range(w, x);
    if (r.hi >= r.lo) check_length(a, r);
    CompensatedSum sum;
    for (std::size_t n = r.lo; n <= r.hi && r.hi >= r.lo; ++n) {
      const double t = a[n] * w(static_cast<double>(n) / x);
      sum.add(t * t);
    }
    out.estimates.push_back(sum.value() / (w.l2_norm_sq() * x));
  }
  const std::size_t k = xs.size();
  if (k == 1) {
    out.extrapolated = out.estimates[0];
  } else {
    const double u1 = 1.0 / std::log(xs[k - 2]);
    const double u2 = 1.0 / std::log(xs[k - 1]);
    const double e1 = out.estimates[k - 2];
    const double e2 = out.estimates[k - 1];
    out.extrapolated = u1 == u2 ? e2 : e2 - u2 * (e1 - e2) / (u1 - u2);
  }
  out.log_slope = log_log_slope(out.xs, out.estimates);
  out.convergent = std::abs(out.log_slope) <= 0.1;
  return out;
}

CfEstimate estimate_cf(const QSeries& f, const Window& w, const std::vector<double>& xs) {
  return estimate_cf(f.normalized(), w, xs);
}

DecayReport total_sum_decay(std::span<const double> a, const Window& w,
                            const std::vector<double>& xs) {
  DecayReport out;
  std::vector<double> vx;
  std::vector<double> vy;
  for (double x : xs) {
    const Range r = support_range(w, x);
    CompensatedSum sum;
    if (r.hi >= r.lo) {
      check_length(a, r);
      for (std::size_t n = r.lo; n <= r.hi; ++n) sum.add(a[n] * w(static_cast<double>(n) / x));
    }
    out.points.push_back({x, std::abs(sum.value())});
    vx.push_back(x);
    vy.push_back(std::abs(sum.value()));
  }
  out.slope = log_log_slope(vx, vy);
  return out;
}

DecayReport total_sum_decay(const QSeries& f, const Window& w, const std::vector<double>& xs) {
  return total_sum_decay(f.normalized(), w, xs);
}

ClassSumResidual class_sum_residual(const QSeries& f, const Window& w, double x, std::uint64_t p,
                                    std::uint64_t a) {
  if (a >= p) throw InvalidArgument("class_sum_residual: class must lie in [0, p)");
  const ProgressionReport rep = progression_e(f, w, x, p);
  const double value = rep.e_values[a] * std::sqrt(x / static_cast<double>(p));
  return {value, value / static_cast<double>(p)};
}

MomentVerdict moment_verdict(const ProgressionReport& report, double cf, const Window& w,
                             const MomentTolerances& tol) {
  if (!(cf > 0.0)) throw InvalidArgument("moment_verdict: cf must be positive");
  const double base = cf * w.l2_norm_sq();
  MomentVerdict v;
  v.m2_ratio = report.m2 / base;
  v.m4_plus_ratio = report.m4_plus / (12.0 * base * base);
  v.m4_minus_ratio = report.m4_minus / (12.0 * base * base);
  const double dp = static_cast<double>(report.p);
  v.in_range = dp > std::sqrt(report.x) && dp < std::pow(report.x, 4.0 / 7.0);
  v.m2_pass = v.in_range && std::abs(v.m2_ratio - 1.0) <= tol.m2_rel;
  v.m4_pass = v.in_range && v.m4_plus_ratio <= tol.m4_max && v.m4_minus_ratio <= tol.m4_max;
  return v;
}

namespace {

HolderReport holder_from(double abs_m1, double m2, double m4) {
  if (!(m4 > 0.0)) throw InvalidArgument("holder_abs_first_moment: fourth moment is zero");
  HolderReport h;
  h.abs_m1 = abs_m1;
  h.lower_bound = std::pow(m2, 1.5) / std::sqrt(m4);
  h.gap = h.abs_m1 - h.lower_bound;
  h.holds = h.gap >= -1e-12 * std::max(1.0, h.lower_bound);
  return h;
}

}  // namespace

HolderReport holder_abs_first_moment(const ProgressionReport& report) {
  return holder_from(report.abs_m1, report.m2, report.m4());
}

HolderReport holder_abs_first_moment(std::span<const double> values) {
  CompensatedSum s1, s2, s4;
  for (double v : values) {
    s1.add(std::abs(v));
    s2.add(v * v);
    s4.add(v * v * v * v);
  }
  const double n = static_cast<double>(values.size());
  return holder_from(s1.value() / n, s2.value() / n, s4.value() / n);
}

}  // namespace hiw
