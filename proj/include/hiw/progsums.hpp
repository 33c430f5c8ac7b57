#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hiw/qseries.hpp"
#include "hiw/windows.hpp"

namespace hiw {

/// E(x,p,a) = (x/p)^{-1/2} sum_{n = a mod p} a(n) w(n/x) for every class a,
/// together with the moments built from it.
struct ProgressionReport {
  double x = 0.0;
  std::uint64_t p = 0;
  std::int64_t level_n = 1;  // N in level 4N
  std::uint64_t mu_plus = 1;
  std::uint64_t mu_minus = 0;
  std::vector<double> e_values;  // indexed by a = 0..p-1
  double m2 = 0.0;               // (1/p) sum^* E^2
  double m4_plus = 0.0;          // (2/p) sum_{(a|p)=1} E(N mu+ a)^4
  double m4_minus = 0.0;         // same with mu-
  double abs_m1 = 0.0;           // (1/p) sum^* |E|
  double total_sum = 0.0;        // sum_n a(n) w(n/x)
  double class0_sum = 0.0;       // sum_{n = 0 mod p} a(n) w(n/x)

  /// (1/p) sum^* E^4, the average of m4_plus and m4_minus.
  [[nodiscard]] double m4() const { return 0.5 * (m4_plus + m4_minus); }
};

/// N from a level 4N; levels not divisible by 4 are taken as N itself.
std::int64_t level_n_of(std::int64_t level);

/// Prime nearest to x^e (ties downward).
std::uint64_t prime_near_power(double x, double e);

/// Single O(x) bucketing pass over the normalized coefficients a[n]
/// (a[0] ignored). The pass is split into fixed-size chunks whose partial
/// sums are merged in chunk order, so the result does not depend on the
/// number of worker threads.
ProgressionReport progression_e(std::span<const double> a, const Window& w, double x,
                                std::uint64_t p, std::int64_t level_n = 1);
ProgressionReport progression_e(const QSeries& f, const Window& w, double x, std::uint64_t p);

/// Fills m2, m4_plus, m4_minus and abs_m1 from e_values (and mu_plus,
/// mu_minus when they are zero).
void fill_moments(ProgressionReport& report);

/// M4 over the classes N mu a with (a|p) = 1, for an arbitrary multiplier mu.
double m4_with_multiplier(const ProgressionReport& report, std::uint64_t mu);

struct CfEstimate {
  std::vector<double> xs;
  std::vector<double> estimates;  // sum a(n)^2 w(n/x)^2 / (|w|^2 x)
  double extrapolated = 0.0;      // linear in 1/log x through the last two points
  double log_slope = 0.0;         // least-squares slope of log estimate vs log x
  bool convergent = true;         // false when |log_slope| > 0.1
};

CfEstimate estimate_cf(std::span<const double> a, const Window& w, const std::vector<double>& xs);
CfEstimate estimate_cf(const QSeries& f, const Window& w, const std::vector<double>& xs);

struct DecayPoint {
  double x = 0.0;
  double abs_sum = 0.0;
};

struct DecayReport {
  std::vector<DecayPoint> points;
  double slope = 0.0;  // log-log least squares over points with nonzero sums
};

DecayReport total_sum_decay(std::span<const double> a, const Window& w,
                            const std::vector<double>& xs);
DecayReport total_sum_decay(const QSeries& f, const Window& w, const std::vector<double>& xs);

struct ClassSumResidual {
  double value = 0.0;        // sum_{n = a mod p} a(n) w(n/x)
  double bound_ratio = 0.0;  // value / p
};

ClassSumResidual class_sum_residual(const QSeries& f, const Window& w, double x, std::uint64_t p,
                                    std::uint64_t a);

struct MomentTolerances {
  double m2_rel = 0.25;
  double m4_max = 1.3;
};

struct MomentVerdict {
  double m2_ratio = 0.0;        // m2 / (cf |w|^2)
  double m4_plus_ratio = 0.0;   // m4+ / (12 (cf |w|^2)^2)
  double m4_minus_ratio = 0.0;
  bool in_range = false;        // x^{1/2} < p < x^{4/7}
  bool m2_pass = false;
  bool m4_pass = false;
};

MomentVerdict moment_verdict(const ProgressionReport& report, double cf, const Window& w,
                             const MomentTolerances& tol = {});

struct HolderReport {
  double abs_m1 = 0.0;
  double lower_bound = 0.0;  // m2^{3/2} / m4^{1/2}
  double gap = 0.0;          // abs_m1 - lower_bound
  bool holds = false;        // gap >= -1e-12 max(1, lower_bound)
};

HolderReport holder_abs_first_moment(const ProgressionReport& report);
/// The same inequality for an arbitrary real vector, averaged over its length.
HolderReport holder_abs_first_moment(std::span<const double> values);

}  // namespace hiw
