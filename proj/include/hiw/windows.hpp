#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace hiw {

/// Smooth [0,1]-valued weight supported in (lo, hi) with 0 <= lo < hi <= 1.
///
/// standard_bump is w0(t) = exp(1 - 1/(4t(1-t))) on (0,1); scaled_bump(a,b)
/// is w0((t-a)/(b-a)). The squared L2 norm is computed once at construction.
class Window {
 public:
  enum class Kind { standard_bump, scaled_bump };

  static Window standard_bump();
  static Window scaled_bump(double a, double b);

  [[nodiscard]] double operator()(double t) const {
    if (t <= lo_ || t >= hi_) return 0.0;
    const double u = (t - lo_) / (hi_ - lo_);
    return std::exp(1.0 - 1.0 / (4.0 * u * (1.0 - u)));
  }

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] double lo() const { return lo_; }
  [[nodiscard]] double hi() const { return hi_; }
  [[nodiscard]] double l2_norm_sq() const { return l2sq_; }
  /// "standard" or "a,b"; accepted back by parse_window.
  [[nodiscard]] std::string describe() const;

 private:
  Window(Kind kind, double lo, double hi);

  Kind kind_;
  double lo_;
  double hi_;
  double l2sq_ = 0.0;
};

/// "standard" or "a,b" with 0 <= a < b <= 1.
Window parse_window(std::string_view spec);

/// Adaptive Simpson on [lo, hi] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                        double tol, int max_depth = 48);

/// int_0^1 w(t)^2 dt to absolute tolerance 1e-10.
double l2_norm_sq(const Window& w);

/// int_0^1 w(t) t^{s-1} dt, by the trapezoid rule in v = -log t (the
/// integrand is flat at both ends, so the rule converges spectrally).
std::complex<double> mellin(const Window& w, std::complex<double> s);

struct PowerSum {
  double value = 0.0;
  /// value / (x^{1-alpha} / p)
  double ratio = 0.0;
};

/// sum_{n >= 1, n = a mod p} n^{-alpha} w(n/x).
PowerSum power_sum(double alpha, double x, std::uint64_t p, std::uint64_t a, const Window& w);

}  // namespace hiw
