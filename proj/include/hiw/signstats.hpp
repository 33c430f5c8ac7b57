#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "hiw/qseries.hpp"
#include "hiw/windows.hpp"

namespace hiw {

/// Number of n <= x with n = a mod q and sign * a(n) > n^{-alpha}. With a
/// window, only n with w(n/x) != 0 are eligible.
std::size_t count_t(std::span<const double> a, double x, double alpha, std::uint64_t cls,
                    std::uint64_t q, int sign, const Window* w = nullptr);

struct SignCountReport {
  double x = 0.0;
  std::uint64_t q = 1;
  double alpha = 0.0;
  bool smooth = false;
  std::vector<std::size_t> per_class_plus;
  std::vector<std::size_t> per_class_minus;
};

/// T+ and T- for every class mod q in one pass.
SignCountReport sign_counts(std::span<const double> a, double x, double alpha, std::uint64_t q,
                            const Window* w = nullptr);

struct SignBalance {
  double sum_plus = 0.0;   // sum of positive entries
  double sum_minus = 0.0;  // minus the sum of negative entries
  double total_abs = 0.0;
  double total = 0.0;
};

SignBalance sign_balance(std::span<const double> b);

/// (M - c_sum)^2 / V; requires c_sum <= M and V > 0.
double elmt2_bound(double m, double v, double c_sum);

struct SurveyThresholds {
  double r = 0.01;
  double m1 = 0.0;
  double m2 = 0.0;
};

/// m1 halfway below the admissible limit 1/(4 sqrt 3) - sqrt r (in units of
/// |w| sqrt(cf)), and m2 10% above its smallest admissible value.
SurveyThresholds default_survey_thresholds(double cf, const Window& w, double r = 0.01);

struct ClassRow {
  double e = 0.0;       // E(x,p,a)
  double s2 = 0.0;      // sum a(n)^2 w(n/x)^2
  std::size_t t_plus = 0;
  std::size_t t_minus = 0;
  bool conditions = false;  // E >= m1 and s2 <= m2 x/p
};

struct SurveyVerdict {
  double x = 0.0;
  std::uint64_t p = 0;
  double alpha = 0.0;
  double threshold_r = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  std::pair<double, double> p_exponent_window{0.0, 0.0};  // (1 - 2 alpha, 4/7)
  double p_exponent = 0.0;                                 // log p / log x
  bool out_of_range = false;
  double fraction_classes_hit = 0.0;   // |{a : T+_{a,p} >= 1}| / p
  double fraction_conditions = 0.0;    // |{a : conditions}| / p
  double fraction_both = 0.0;          // conditions hold and T+ >= 1
  bool pass = false;
  std::vector<ClassRow> classes;
};

/// Sign survey over the classes mod p with the windowed counts. alpha must
/// lie in (3/14, 1/4].
SurveyVerdict class_survey(std::span<const double> a, const Window& w, double x, std::uint64_t p,
                           double alpha, const SurveyThresholds& th);

struct EigenClassRow {
  double s1 = 0.0;     // sum a w
  double s2 = 0.0;     // sum a^2 w^2
  double s4 = 0.0;     // sum a^4 w^4
  double s_abs = 0.0;  // sum |a| w
  bool in_a = false;
  bool in_b = false;
  std::size_t t_plus = 0;
  std::size_t t_minus = 0;
  bool holder_ok = true;  // s_abs >= m^{3/2} x^{1-delta/2} / p^{5/4} (checked on A)
};

struct EigenSurveyReport {
  double x = 0.0;
  std::uint64_t p = 0;
  double alpha = 0.0;
  double m = 0.0;
  double delta = 0.0;
  bool out_of_range = false;           // outside x^{1/2} < p < x^{4 alpha}
  std::size_t count_a = 0;
  std::size_t count_b = 0;
  std::size_t count_a_not_b = 0;
  std::size_t count_min_above_target = 0;  // A\B classes with min(T+,T-) >= target
  double min_target = 0.0;                 // x^{1-2 delta} / p^{7/4}
  double a_size_reference = 0.0;           // p^{3/4} / x^{delta/2}
  bool holder_all = true;
  std::vector<EigenClassRow> classes;
};

/// Classification into A(x,p,m,delta) and B(x,p,delta); alpha in (1/8, 1/7].
EigenSurveyReport eigen_survey(std::span<const double> a, const Window& w, double x,
                               std::uint64_t p, double alpha, double m, double delta);

struct MarkovCount {
  std::size_t count = 0;     // classes with sum a^2 w^2 > m x / p
  double bound = 0.0;        // sum over classes of that quantity, divided by m x / p
  double ratio = 0.0;        // count / bound, at most 1
};

MarkovCount markov_class_count(std::span<const double> a, const Window& w, double x,
                               std::uint64_t p, double m);

struct CorollaryResult {
  double x = 0.0;
  double epsilon = 0.0;
  double alpha = 0.0;        // 3/14 + epsilon
  std::uint64_t p = 0;
  std::size_t count = 0;     // T+(x; alpha), all n <= x
  std::size_t count_minus = 0;
  double target = 0.0;       // r x^{4/7 - 2 epsilon}
  std::size_t classes_hit = 0;
  bool pass = false;
};

/// p is the prime nearest x^{4/7 - 1.5 epsilon} inside [x^{4/7-2eps}, x^{4/7-eps}].
CorollaryResult corollary_count(std::span<const double> a, const Window& w, double x,
                                double epsilon, const SurveyThresholds& th);

}  // namespace hiw
