#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <mutex>
#include <vector>

#include "hiw/modarith.hpp"
#include "hiw/qseries.hpp"
#include "hiw/windows.hpp"

namespace hiw {

/// Truncation used when evaluating theta_delta numerically near the cusp.
inline constexpr std::size_t kFrickeTruncation = 2000;

/// sum_n c(n) e(n z) for Im z > 0, in double precision.
cdouble eval_series(const QSeries& f, cdouble z);

struct FrickeRatios {
  std::array<cdouble, 3> points{};
  std::array<cdouble, 3> ratios{};  // f0(z) / (theta(z) Delta(4z)) at each point
  cdouble kappa{};                  // mean ratio
  double spread = 0.0;              // max |ratio - kappa| / |kappa|
};

/// f0(z) = phi(z)^{-25} f(-1/(4z)) with phi(z) = sqrt(-2iz), compared with
/// theta(z)Delta(4z) at z = i/2, (1+2i)/4, (-1+2i)/4.
FrickeRatios fricke_ratios(const QSeries& theta_delta);

/// kappa with f0 = kappa theta(z)Delta(4z); throws NumericalError when the
/// three ratios disagree by more than 1e-8.
cdouble fricke_scalar(const QSeries& theta_delta);

/// A form of weight l + 1/2 and level 4N together with its Fricke image.
struct FrickePair {
  QSeries f;
  QSeries f0;
  std::int64_t level_n = 1;
  int ell = 0;
  cdouble scalar{1.0, 0.0};
};

/// theta_delta and theta_delta_fricke with the given truncations.
FrickePair theta_delta_pair(std::size_t f_truncation, std::size_t f0_truncation);

struct TwistedL {
  cdouble value{};
  double tail_bound = 0.0;
  std::size_t n_max = 0;
};

/// sum_{n <= n_max} a(n) e_q(u n) n^{-s}, with a tail estimate extrapolated
/// from the last two dyadic blocks of |a(n)| n^{-Re s}.
TwistedL twisted_l(const QSeries& f, std::int64_t u, std::uint64_t q, cdouble s,
                   std::size_t n_max);

/// omega_q(u) = eps_q^{-(2l+1)} (-u^{-1} | q).
cdouble omega(std::int64_t u, std::uint64_t q, int ell);

/// log Gamma(z) up to a multiple of 2 pi i (Stirling series after an upward
/// shift to Re z >= 12).
cdouble log_gamma(cdouble z);

/// Dual kernel of the Voronoi formula,
///   B(y) = 1/(2 pi y) (1/2 pi i) int_(sigma) G(s) w^(s) (4 pi^2 y)^s ds,
///   G(s) = Gamma(1 - s + k) / Gamma(s + k),  k = (l - 1/2)/2,
/// evaluated by the trapezoid rule in t = Im s with step h. The range of t
/// grows in blocks until a block changes B by less than the tolerance.
class BKernel {
 public:
  struct Eval {
    double value = 0.0;
    double imag_residual = 0.0;
    double t_max = 0.0;
  };

  BKernel(int ell, const Window& w, double sigma = 2.0, double h = 0.1, double tol = 1e-13);

  /// B(y) for y > 0 (memoized).
  double operator()(double y);
  /// Half-line evaluation using conjugate symmetry, with adaptive t_max.
  Eval evaluate(double y);
  /// Full-line evaluation over [-t_max, t_max]; the imaginary part of the
  /// result is returned as imag_residual.
  Eval evaluate_full(double y, double t_max);

  [[nodiscard]] int ell() const { return ell_; }
  [[nodiscard]] double sigma() const { return sigma_; }
  [[nodiscard]] double step() const { return h_; }
  [[nodiscard]] std::size_t nodes() const { return wtab_.size(); }

  static constexpr double kMaxT = 32768.0;

 private:
  void ensure_nodes(std::size_t count);
  [[nodiscard]] cdouble gamma_ratio(cdouble s) const;

  int ell_;
  Window w_;
  double sigma_;
  double h_;
  double tol_;
  double kappa_;
  std::vector<cdouble> wtab_;   // w^(sigma + i k h)
  std::vector<cdouble> gtab_;   // G(sigma + i k h)
  std::map<double, double> cache_;
  std::mutex mutex_;
};

struct VoronoiReport {
  std::uint64_t q = 1;
  std::int64_t u = 1;
  double x = 0.0;
  std::size_t m_max = 0;         // dual terms used
  std::size_t m_needed = 0;      // dual terms the kernel decay asks for
  bool truncation_limited = false;
  cdouble lhs{};
  cdouble rhs{};
  double abs_residual = 0.0;
  double rel_residual = 0.0;
};

/// Both sides of
///   sum a(n) e_q(un) w(n/x)
///     = omega_q(u) x/(sqrt(4N) q) sum a0(m) e_q(-(4Nu)^{-1} m) B(m x/(4N q^2)).
/// m_max = 0 lets the dual sum run until, past the kernel peak, two
/// consecutive dyadic blocks of sum |a0(m) B| fall below dual_tol (relative
/// to max(1, |lhs|)); the f0 truncation caps it either way.
VoronoiReport voronoi_check(const FrickePair& ctx, BKernel& kernel, const Window& w,
                            std::int64_t u, std::uint64_t q, double x, std::size_t m_max = 0,
                            double dual_tol = 1e-10);

/// Residuals for m_max = m_start, 2 m_start, ..., `steps` values.
std::vector<VoronoiReport> voronoi_refinement(const FrickePair& ctx, BKernel& kernel,
                                              const Window& w, std::int64_t u, std::uint64_t q,
                                              double x, std::size_t m_start, int steps);

struct RearrangeReport {
  double x = 0.0;
  std::uint64_t p = 0;
  std::uint64_t a = 0;
  double eta = 0.0;
  double y_param = 0.0;          // Y = 4Np^2/x
  std::size_t m_cut = 0;         // floor(Y^{1+eta})
  std::size_t m_max = 0;         // end of the complete dual sum
  bool truncation_limited = false;
  double e_direct = 0.0;         // from progression_e
  double main_term = 0.0;        // m <= Y^{1+eta}
  double remainder = 0.0;        // Y^{1+eta} < m <= m_max
  double zero_class_term = 0.0;  // total / sqrt(xp), the b = 0 character
  std::size_t degenerate_terms = 0;  // m = 0 mod p, where the Salie value is (a|p) eps_p
  double e_salie = 0.0;          // zero_class_term + main_term + remainder
  double residual = 0.0;         // |e_direct - e_salie|
  double residual_main_only = 0.0;  // |e_direct - main_term|
};

/// E(x,p,a) from the bucketing pass against its Salie-sum expansion
///   eps_p^{-2l} (a|p) Y^{-1/2} sum_m a0(m) Sa_p(N^{-1} m a) B(m/Y).
/// Requires Y^{1+eta} < p and p not dividing 4Na. The dual sum is continued
/// past Y^{1+eta} (same stopping rule as voronoi_check, absolute dual_tol)
/// and the b = 0 character term total/sqrt(xp) is added back, so e_salie is
/// the complete expansion; main_term alone is the truncated sum.
RearrangeReport rearranged_e_check(const FrickePair& ctx, BKernel& kernel, const Window& w,
                                   double x, std::uint64_t p, std::uint64_t a, double eta = 0.1,
                                   double dual_tol = 1e-9);

}  // namespace hiw
