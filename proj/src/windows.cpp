#include "hiw/windows.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hiw/compensated.hpp"
#include "hiw/error.hpp"

namespace hiw {

Window::Window(Kind kind, double lo, double hi) : kind_(kind), lo_(lo), hi_(hi) {
  if (!(lo >= 0.0 && lo < hi && hi <= 1.0)) {
    throw InvalidArgument("window support must satisfy 0 <= a < b <= 1");
  }
  l2sq_ = hiw::l2_norm_sq(*this);
}

Window Window::standard_bump() { return Window(Kind::standard_bump, 0.0, 1.0); }

Window Window::scaled_bump(double a, double b) { return Window(Kind::scaled_bump, a, b); }

std::string Window::describe() const {
  if (kind_ == Kind::standard_bump) return "standard";
  std::ostringstream out;
  out.precision(17);
  out << lo_ << ',' << hi_;
  return out.str();
}

namespace {

double parse_double(std::string_view text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw InvalidArgument("window: cannot parse '" + std::string(text) + "' as a number");
  }
  return v;
}

}  // namespace

Window parse_window(std::string_view spec) {
  if (spec == "standard") return Window::standard_bump();
  const auto comma = spec.find(',');
  if (comma == std::string_view::npos) {
    throw InvalidArgument("window must be 'standard' or 'a,b', got '" + std::string(spec) + "'");
  }
  return Window::scaled_bump(parse_double(spec.substr(0, comma)), parse_double(spec.substr(comma + 1)));
}

namespace {

struct SimpsonState {
  const std::function<double(double)>& f;
  int max_depth;
};

double simpson_step(const SimpsonState& st, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = st.f(lm);
  const double frm = st.f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth >= st.max_depth) {
    throw NumericalError("adaptive Simpson did not converge on [" + std::to_string(a) + ", " +
                         std::to_string(b) + "]");
  }
  return simpson_step(st, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
         simpson_step(st, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi, double tol,
                        int max_depth) {
  // A few fixed panels first so a narrow feature cannot hide between the
  // initial three sample points.
  constexpr int kPanels = 16;
  const SimpsonState st{f, max_depth};
  CompensatedSum total;
  const double width = (hi - lo) / kPanels;
  for (int i = 0; i < kPanels; ++i) {
    const double a = lo + i * width;
    const double b = (i + 1 == kPanels) ? hi : a + width;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    total.add(simpson_step(st, a, b, fa, fm, fb, whole, tol / kPanels, 0));
  }
  return total.value();
}

double l2_norm_sq(const Window& w) {
  return adaptive_simpson([&w](double t) { return w(t) * w(t); }, w.lo(), w.hi(), 1e-10);
}

std::complex<double> mellin(const Window& w, std::complex<double> s) {
  // In v = -log t the integrand is g(v) = w(e^{-v}) e^{-s v}. Below v_lo the
  // window vanishes; above v_hi it is below 1e-30 relative to its peak.
  const double sigma = s.real();
  const double tau = s.imag();
  const double v_lo = -std::log(w.hi());
  double v_hi = 0.0;
  if (w.lo() > 0.0) {
    v_hi = -std::log(w.lo());
  } else {
    v_hi = v_lo + 0.5;
    while (true) {
      const double t = std::exp(-v_hi);
      if (w(t) * std::exp(-sigma * v_hi) < 1e-30 || v_hi > 700.0) break;
      v_hi += 0.25;
    }
  }
  // Band limit of the window in v plus the oscillation frequency |tau|.
  const double omega = 3500.0 / (w.hi() - w.lo());
  const double max_step = 2.0 * std::numbers::pi / (std::abs(tau) + omega);
  const auto n = static_cast<std::size_t>(std::ceil((v_hi - v_lo) / max_step));
  const double h = (v_hi - v_lo) / static_cast<double>(n);
  CompensatedSum re;
  CompensatedSum im;
  for (std::size_t i = 1; i < n; ++i) {
    const double v = v_lo + h * static_cast<double>(i);
    const double g = w(std::exp(-v));
    if (g == 0.0) continue;
    const double mag = g * std::exp(-sigma * v);
    re.add(mag * std::cos(tau * v));
    im.add(-mag * std::sin(tau * v));
  }
  return {h * re.value(), h * im.value()};
}

PowerSum power_sum(double alpha, double x, std::uint64_t p, std::uint64_t a, const Window& w) {
  if (!(alpha > 0.0 && alpha < 0.5)) throw InvalidArgument("power_sum: alpha must lie in (0, 1/2)");
  if (p == 0 || a >= p) throw InvalidArgument("power_sum: need 0 <= a < p");
  if (!(x > 0.0)) throw InvalidArgument("power_sum: x must be positive");
  CompensatedSum sum;
  const double n_max = std::floor(w.hi() * x);
  std::uint64_t n = a == 0 ? p : a;
  for (; static_cast<double>(n) <= n_max; n += p) {
    const double wt = w(static_cast<double>(n) / x);
    if (wt != 0.0) sum.add(std::pow(static_cast<double>(n), -alpha) * wt);
  }
  const double value = sum.value();
  return {value, value / (std::pow(x, 1.0 - alpha) / static_cast<double>(p))};
}

}  // namespace hiw
