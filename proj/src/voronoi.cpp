#include "hiw/voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "hiw/compensated.hpp"
#include "hiw/error.hpp"
#include "hiw/forms.hpp"
#include "hiw/progsums.hpp"

namespace hiw {

namespace {

constexpr double kPi = std::numbers::pi;

struct ComplexSum {
  CompensatedSum re;
  CompensatedSum im;
  void add(cdouble v) {
    re.add(v.real());
    im.add(v.imag());
  }
  [[nodiscard]] cdouble value() const { return {re.value(), im.value()}; }
};

}  // namespace

cdouble eval_series(const QSeries& f, cdouble z) {
  if (!(z.imag() > 0.0)) throw InvalidArgument("eval_series: need Im z > 0");
  const cdouble q = std::exp(cdouble(0.0, 2.0 * kPi) * z);
  const double qabs = std::abs(q);
  ComplexSum sum;
  cdouble qn(1.0, 0.0);
  double peak = 0.0;
  for (std::size_t n = 0; n <= f.truncation(); ++n) {
    const double c = f.coeff(n).get_d();
    if (c != 0.0) {
      const cdouble term = c * qn;
      sum.add(term);
      peak = std::max(peak, std::abs(term));
      // Coefficients grow polynomially, so once the geometric factor has
      // pushed terms far below the peak the rest is negligible.
      if (n > 50 && std::abs(term) < 1e-20 * peak && std::pow(qabs, 10.0) < 0.5) break;
    }
    qn *= q;
  }
  return sum.value();
}

FrickeRatios fricke_ratios(const QSeries& theta_delta) {
  if (theta_delta.weight().twice != 25 || theta_delta.level() != 4) {
    throw InvalidArgument("fricke_ratios: expects the built-in theta_delta (weight 25/2, level 4)");
  }
  const std::size_t x = theta_delta.truncation();
  const QSeries image = multiply(theta_expansion(x), dilate(delta_expansion(x), 4), x,
                                 SeriesMeta{Weight{25}, 4, CharacterTag::trivial});
  FrickeRatios out;
  out.points = {cdouble(0.0, 0.5), cdouble(0.25, 0.5), cdouble(-0.25, 0.5)};
  for (std::size_t k = 0; k < 3; ++k) {
    const cdouble z = out.points[k];
    const cdouble phi = std::sqrt(cdouble(0.0, -2.0) * z);
    const cdouble f0 = std::pow(phi, -25) * eval_series(theta_delta, -1.0 / (4.0 * z));
    out.ratios[k] = f0 / eval_series(image, z);
  }
  out.kappa = (out.ratios[0] + out.ratios[1] + out.ratios[2]) / 3.0;
  for (const auto& r : out.ratios) {
    out.spread = std::max(out.spread, std::abs(r - out.kappa) / std::abs(out.kappa));
  }
  return out;
}

cdouble fricke_scalar(const QSeries& theta_delta) {
  const FrickeRatios r = fricke_ratios(theta_delta);
  if (!(r.spread <= 1e-8)) {
    throw NumericalError("fricke_scalar: ratios disagree (spread " + std::to_string(r.spread) +
                         "); f0 is not a multiple of theta(z)Delta(4z)");
  }
  return r.kappa;
}

FrickePair theta_delta_pair(std::size_t f_truncation, std::size_t f0_truncation) {
  FrickePair pair{builtin_form("theta_delta", f_truncation),
                  builtin_form("theta_delta_fricke", f0_truncation), 1, 12, {}};
  pair.scalar = fricke_scalar(builtin_form("theta_delta", kFrickeTruncation));
  return pair;
}

TwistedL twisted_l(const QSeries& f, std::int64_t u, std::uint64_t q, cdouble s,
                   std::size_t n_max) {
  if (s.real() < 1.5) throw InvalidArgument("twisted_l: need Re s >= 3/2 for absolute convergence");
  if (q == 0) throw InvalidArgument("twisted_l: q must be positive");
  if (std::gcd(reduce_mod(u, q), q) != 1 && q != 1) {
    throw InvalidArgument("twisted_l: gcd(u, q) != 1");
  }
  if (std::gcd(static_cast<std::uint64_t>(4 * level_n_of(f.level())), q) != 1) {
    throw InvalidArgument("twisted_l: gcd(q, 4N) != 1");
  }
  if (n_max < 4 || n_max > f.truncation()) {
    throw InvalidArgument("twisted_l: n_max must lie in [4, truncation]");
  }
  const auto a = f.normalized();
  ComplexSum sum;
  double block_last = 0.0;
  double block_prev = 0.0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    if (a[n] == 0.0) continue;
    const double logn = std::log(static_cast<double>(n));
    const cdouble term = a[n] * ep(u * static_cast<std::int64_t>(n % q), q) * std::exp(-s * logn);
    sum.add(term);
    const double mag = std::abs(a[n]) * std::exp(-s.real() * logn);
    if (2 * n > n_max) {
      block_last += mag;
    } else if (4 * n > n_max) {
      block_prev += mag;
    }
  }
  double tail = 0.0;
  if (block_last > 0.0) {
    const double r = block_prev > 0.0 ? block_last / block_prev : 1.0;
    tail = r < 1.0 ? block_last * r / (1.0 - r) : block_last * 64.0;
  }
  return {sum.value(), tail, n_max};
}

cdouble omega(std::int64_t u, std::uint64_t q, int ell) {
  if (q % 2 == 0) throw InvalidArgument("omega: q must be odd");
  const std::uint64_t ubar = inverse_mod(u, q);
  const int sym = jacobi(-static_cast<std::int64_t>(ubar), static_cast<std::int64_t>(q));
  if (q % 4 == 1) return {static_cast<double>(sym), 0.0};
  // eps_q = i, so eps_q^{-(2l+1)} = i^{-(2l+1)} = i^{(3(2l+1)) mod 4}.
  static constexpr std::array<cdouble, 4> kPowers{cdouble(1, 0), cdouble(0, 1), cdouble(-1, 0),
                                                  cdouble(0, -1)};
  const int e = (3 * (2 * ell + 1)) % 4;
  return kPowers[static_cast<std::size_t>(e)] * static_cast<double>(sym);
}

cdouble log_gamma(cdouble z) {
  cdouble shift_log(0.0, 0.0);
  cdouble prod(1.0, 0.0);
  int factors = 0;
  while (z.real() < 12.0) {
    prod *= z;
    z += 1.0;
    if (++factors == 8) {
      shift_log += std::log(prod);
      prod = 1.0;
      factors = 0;
    }
  }
  shift_log += std::log(prod);
  static constexpr std::array<double, 7> kCoeff{1.0 / 12.0,     -1.0 / 360.0,       1.0 / 1260.0,
                                                -1.0 / 1680.0,  1.0 / 1188.0,       -691.0 / 360360.0,
                                                1.0 / 156.0};
  const cdouble inv = 1.0 / z;
  const cdouble inv2 = inv * inv;
  cdouble series(0.0, 0.0);
  cdouble pw = inv;
  for (double c : kCoeff) {
    series += c * pw;
    pw *= inv2;
  }
  return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * kPi) + series - shift_log;
}

BKernel::BKernel(int ell, const Window& w, double sigma, double h, double tol)
    : ell_(ell), w_(w), sigma_(sigma), h_(h), tol_(tol), kappa_((ell - 0.5) / 2.0) {
  if (ell < 1) throw InvalidArgument("BKernel: ell must be >= 1");
  if (!(h > 0.0 && h <= 0.5)) throw InvalidArgument("BKernel: step must lie in (0, 1/2]");
  if (!(sigma > 0.0 && sigma < 1.0 + kappa_)) {
    throw InvalidArgument("BKernel: abscissa must lie between 0 and the first pole 1 + k");
  }
  // Trapezoid aliasing decays like exp(-2 pi d / h), d the distance to the pole at 1 + k.
  h_ = std::min(h_, 2.0 * kPi * (1.0 + kappa_ - sigma_) / 60.0);
}

cdouble BKernel::gamma_ratio(cdouble s) const {
  return std::exp(log_gamma(1.0 - s + kappa_) - log_gamma(s + kappa_));
}

void BKernel::ensure_nodes(std::size_t count) {
  const std::size_t old = wtab_.size();
  if (count <= old) return;
  const std::size_t target = std::max({count, 2 * old, std::size_t{1024}});
  const double tau_max = h_ * static_cast<double>(target);

  // Fixed v-grid resolving every tau up to tau_max (see mellin()).
  const double v_lo = -std::log(w_.hi());
  double v_hi = 0.0;
  if (w_.lo() > 0.0) {
    v_hi = -std::log(w_.lo());
  } else {
    v_hi = v_lo + 0.5;
    while (w_(std::exp(-v_hi)) * std::exp(-sigma_ * v_hi) >= 1e-30 && v_hi <= 700.0) v_hi += 0.25;
  }
  const double omega_band = 3500.0 / (w_.hi() - w_.lo());
  const double max_step = 2.0 * kPi / (tau_max + omega_band);
  const auto nv = static_cast<std::size_t>(std::ceil((v_hi - v_lo) / max_step));
  const double dv = (v_hi - v_lo) / static_cast<double>(nv);
  std::vector<double> vs;
  std::vector<double> gs;
  for (std::size_t j = 1; j < nv; ++j) {
    const double v = v_lo + dv * static_cast<double>(j);
    const double g = w_(std::exp(-v)) * std::exp(-sigma_ * v);
    if (g == 0.0) continue;
    vs.push_back(v);
    gs.push_back(g * dv);
  }

  wtab_.resize(target);
  gtab_.resize(target);
  std::vector<cdouble> phase(vs.size());
  std::vector<cdouble> step(vs.size());
  for (std::size_t j = 0; j < vs.size(); ++j) step[j] = std::polar(1.0, -h_ * vs[j]);
  constexpr std::size_t kResync = 64;
  for (std::size_t k = old; k < target; ++k) {
    const double tau = h_ * static_cast<double>(k);
    if ((k - old) % kResync == 0) {
      for (std::size_t j = 0; j < vs.size(); ++j) phase[j] = std::polar(1.0, -tau * vs[j]);
    } else {
      for (std::size_t j = 0; j < vs.size(); ++j) phase[j] *= step[j];
    }
    double re = 0.0;
    double im = 0.0;
    for (std::size_t j = 0; j < vs.size(); ++j) {
      re += gs[j] * phase[j].real();
      im += gs[j] * phase[j].imag();
    }
    wtab_[k] = {re, im};
    gtab_[k] = gamma_ratio(cdouble(sigma_, tau));
  }
}

BKernel::Eval BKernel::evaluate(double y) {
  if (!(y > 0.0)) throw InvalidArgument("BKernel: y must be positive");
  std::lock_guard lock(mutex_);
  const double log_scale = std::log(4.0 * kPi * kPi * y);
  const double amplitude = std::exp(sigma_ * log_scale) / (2.0 * kPi * y) / kPi * h_;
  const double t_start = 1.2 * 2.0 * kPi * std::sqrt(y) + 40.0;
  constexpr std::size_t kBlock = 256;
  constexpr std::size_t kResync = 64;

  const cdouble rot = std::polar(1.0, h_ * log_scale);
  cdouble phase(1.0, 0.0);
  CompensatedSum total;
  int quiet_blocks = 0;
  std::size_t k = 0;
  while (true) {
    const std::size_t end = k + kBlock;
    if (static_cast<double>(end) * h_ > kMaxT) {
      throw NumericalError("BKernel: t_max exceeded " + std::to_string(kMaxT) + " at y = " +
                           std::to_string(y));
    }
    ensure_nodes(end);
    double block = 0.0;
    for (; k < end; ++k) {
      if (k % kResync == 0) phase = std::polar(1.0, static_cast<double>(k) * h_ * log_scale);
      const double term = (gtab_[k] * wtab_[k] * phase).real();
      block += k == 0 ? 0.5 * term : term;
      phase *= rot;
    }
    block *= amplitude;
    total.add(block);
    if (static_cast<double>(k) * h_ >= t_start && std::abs(block) < tol_) {
      if (++quiet_blocks == 2) break;
    } else {
      quiet_blocks = 0;
    }
  }
  return {total.value(), 0.0, static_cast<double>(k) * h_};
}

double BKernel::operator()(double y) {
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(y); it != cache_.end()) return it->second;
  }
  const double v = evaluate(y).value;
  std::lock_guard lock(mutex_);
  cache_.emplace(y, v);
  return v;
}

BKernel::Eval BKernel::evaluate_full(double y, double t_max) {
  if (!(y > 0.0)) throw InvalidArgument("BKernel: y must be positive");
  const double log_scale = std::log(4.0 * kPi * kPi * y);
  const auto n = static_cast<std::int64_t>(std::ceil(t_max / h_));
  ComplexSum sum;
  for (std::int64_t k = -n; k <= n; ++k) {
    const cdouble s(sigma_, h_ * static_cast<double>(k));
    const double weight = (k == -n || k == n) ? 0.5 : 1.0;
    sum.add(weight * gamma_ratio(s) * mellin(w_, s) * std::exp(s * log_scale));
  }
  // (1/2 pi i) ds = (1/2 pi) dt on the vertical line.
  const cdouble b = sum.value() * h_ / (2.0 * kPi) / (2.0 * kPi * y);
  return {b.real(), b.imag(), static_cast<double>(n) * h_};
}

namespace {

std::uint64_t checked_q(std::int64_t u, std::uint64_t q, std::int64_t level_n) {
  if (q == 0 || q % 2 == 0) throw InvalidArgument("voronoi_check: q must be odd and positive");
  if (std::gcd(static_cast<std::uint64_t>(4 * level_n) * reduce_mod(u, q), q) != 1 && q != 1) {
    throw InvalidArgument("voronoi_check: need gcd(q, 4Nu) = 1");
  }
  return q;
}

// Dual sum sum_{m} coef(m) a0(m) B(m / y_scale) with the shared stopping rule.
struct DualSum {
  cdouble value{};
  std::size_t m_used = 0;
  std::size_t m_needed = 0;
  bool limited = false;
};

template <typename Coef>
DualSum dual_sum(std::span<const double> a0, BKernel& kernel, double y_scale,
                       std::size_t m_fixed, double tol, Coef coef) {
  DualSum out;
  const std::size_t available = a0.size() - 1;
  ComplexSum sum;
  constexpr double kPastPeak = 50.0;
  std::size_t m = 1;
  int quiet = 0;
  for (std::size_t block_end = 1;; block_end *= 2) {
    double block_abs = 0.0;
    const std::size_t stop = m_fixed != 0 ? std::min(block_end, m_fixed) : block_end;
    for (; m <= stop && m <= available; ++m) {
      if (a0[m] == 0.0) continue;
      const double y = static_cast<double>(m) / y_scale;
      const double b = kernel(y);
      const cdouble term = coef(m) * (a0[m] * b);
      sum.add(term);
      block_abs += std::abs(a0[m] * b);
    }
    out.m_used = std::min(m - 1, available);
    if (m_fixed != 0) {
      if (m > m_fixed) break;
      if (m > available) {
        out.limited = true;
        break;
      }
      continue;
    }
    if (static_cast<double>(block_end) / y_scale >= kPastPeak && block_abs < tol) {
      if (++quiet == 2) {
        out.m_needed = block_end;
        break;
      }
    } else {
      quiet = 0;
    }
    if (m > available) {
      out.limited = true;
      out.m_needed = 2 * block_end;
      break;
    }
  }
  if (m_fixed != 0) out.m_needed = m_fixed;
  out.value = sum.value();
  return out;
}

}  // namespace

VoronoiReport voronoi_check(const FrickePair& ctx, BKernel& kernel, const Window& w,
                            std::int64_t u, std::uint64_t q, double x, std::size_t m_max,
                            double dual_tol) {
  checked_q(u, q, ctx.level_n);
  if (kernel.ell() != ctx.ell) throw InvalidArgument("voronoi_check: kernel weight mismatch");
  const std::size_t n_hi = static_cast<std::size_t>(std::ceil(w.hi() * x));
  if (n_hi > ctx.f.truncation()) {
    throw InvalidArgument("voronoi_check: f truncation below x");
  }
  VoronoiReport rep;
  rep.q = q;
  rep.u = u;
  rep.x = x;

  const auto a = ctx.f.normalized();
  ComplexSum lhs;
  for (std::size_t n = 1; n < n_hi && n <= ctx.f.truncation(); ++n) {
    const double wt = w(static_cast<double>(n) / x);
    if (wt == 0.0 || a[n] == 0.0) continue;
    lhs.add(a[n] * wt * ep(u * static_cast<std::int64_t>(n % q), q));
  }
  rep.lhs = lhs.value();

  const auto four_n = static_cast<std::int64_t>(4 * ctx.level_n);
  const std::uint64_t twist =
      q == 1 ? 0 : inverse_mod(static_cast<std::int64_t>(mul_mod(reduce_mod(four_n, q), reduce_mod(u, q), q)), q);
  const double y_scale = static_cast<double>(four_n) * static_cast<double>(q * q) / x;
  const double tol = dual_tol * std::max(1.0, std::abs(rep.lhs));
  const double pref_abs = x / (std::sqrt(static_cast<double>(four_n)) * static_cast<double>(q));
  auto dual = dual_sum(ctx.f0.normalized(), kernel, y_scale, m_max, tol / pref_abs,
                       [&](std::size_t m) {
                         return ep(-static_cast<std::int64_t>(mul_mod(twist, m % q, q)), q);
                       });
  rep.rhs = omega(u, q, ctx.ell) * pref_abs * dual.value;
  rep.m_max = dual.m_used;
  rep.m_needed = dual.m_needed;
  rep.truncation_limited = dual.limited;
  rep.abs_residual = std::abs(rep.lhs - rep.rhs);
  rep.rel_residual = rep.abs_residual / std::max(std::abs(rep.lhs), 1e-300);
  return rep;
}

std::vector<VoronoiReport> voronoi_refinement(const FrickePair& ctx, BKernel& kernel,
                                              const Window& w, std::int64_t u, std::uint64_t q,
                                              double x, std::size_t m_start, int steps) {
  if (m_start == 0 || steps < 1) throw InvalidArgument("voronoi_refinement: bad schedule");
  std::vector<VoronoiReport> out;
  std::size_t m = m_start;
  for (int i = 0; i < steps; ++i, m *= 2) out.push_back(voronoi_check(ctx, kernel, w, u, q, x, m));
  return out;
}

RearrangeReport rearranged_e_check(const FrickePair& ctx, BKernel& kernel, const Window& w,
                                   double x, std::uint64_t p, std::uint64_t a, double eta,
                                   double dual_tol) {
  const PrimeCtx pc(p);
  const auto four_n = static_cast<std::int64_t>(4 * ctx.level_n);
  if (delta_p(four_n * static_cast<std::int64_t>(a % p), p) == 1) {
    throw InvalidArgument("rearranged_e_check: p must not divide 4Na");
  }
  if (!(eta > 0.0)) throw InvalidArgument("rearranged_e_check: eta must be positive");
  if (kernel.ell() != ctx.ell) throw InvalidArgument("rearranged_e_check: kernel weight mismatch");
  RearrangeReport rep;
  rep.x = x;
  rep.p = p;
  rep.a = a % p;
  rep.eta = eta;
  rep.y_param = static_cast<double>(four_n) * static_cast<double>(p) * static_cast<double>(p) / x;
  const double cut = std::pow(rep.y_param, 1.0 + eta);
  if (!(cut < static_cast<double>(p))) {
    throw InvalidArgument("rearranged_e_check: need Y^{1+eta} < p (Y^{1+eta} = " +
                          std::to_string(cut) + ", p = " + std::to_string(p) + ")");
  }
  rep.m_cut = static_cast<std::size_t>(std::floor(cut));

  const ProgressionReport prog = progression_e(ctx.f, w, x, p);
  rep.e_direct = prog.e_values[rep.a];
  rep.zero_class_term = prog.total_sum / std::sqrt(x * static_cast<double>(p));

  // Sa_p(N^{-1} m a) depends on m only through m mod p.
  const std::uint64_t nbar_a =
      mul_mod(inverse_mod(ctx.level_n, p), rep.a, p);
  std::vector<double> sa_table(p);
  for (std::uint64_t r = 1; r < p; ++r) {
    sa_table[r] = sa(static_cast<std::int64_t>(mul_mod(nbar_a, r, p)), p).real();
  }
  sa_table[0] = 1.0;  // exact Salie value (a|p) eps_p once (a|p) eps_p^{-2l} is factored out
  const double eps_pow = (p % 4 == 3 && ctx.ell % 2 == 1) ? -1.0 : 1.0;  // eps_p^{-2l}
  const double outer = eps_pow * legendre(static_cast<std::int64_t>(rep.a), pc) /
                       std::sqrt(rep.y_param);

  std::size_t degenerate = 0;
  auto coef_main = [&](std::size_t m) -> cdouble { return m <= rep.m_cut ? sa_table[m % p] : 0.0; };
  auto coef_rest = [&](std::size_t m) -> cdouble {
    if (m <= rep.m_cut) return 0.0;
    if (m % p == 0) ++degenerate;
    return sa_table[m % p];
  };
  const auto a0 = ctx.f0.normalized();
  auto main = dual_sum(a0, kernel, rep.y_param, rep.m_cut, 0.0, coef_main);
  auto rest = dual_sum(a0, kernel, rep.y_param, 0, dual_tol / std::abs(outer), coef_rest);
  rep.main_term = outer * main.value.real();
  rep.remainder = outer * rest.value.real();
  rep.degenerate_terms = degenerate;
  rep.m_max = rest.m_used;
  rep.truncation_limited = rest.limited;
  rep.e_salie = rep.zero_class_term + rep.main_term + rep.remainder;
  rep.residual = std::abs(rep.e_direct - rep.e_salie);
  rep.residual_main_only = std::abs(rep.e_direct - rep.main_term);
  return rep;
}

}  // namespace hiw
