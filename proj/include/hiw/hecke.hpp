#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "hiw/qseries.hpp"

namespace hiw {

using Rational = mpq_class;

/// chi(d) for the character attached to a form: trivial gives 1 when d is
/// coprime to the level and 0 otherwise.
int character_value(const SeriesMeta& meta, std::int64_t d);

/// T_{p^2} on raw coefficients:
///   c'(n) = c(p^2 n) + chi(p) ((-1)^l n | p) p^{l-1} c(n) + chi(p^2) p^{2l-1} c(n/p^2).
/// The output truncation is floor(X / p^2). For p dividing the level chi(p) = 0,
/// which leaves c'(n) = c(p^2 n).
QSeries apply_tp2(const QSeries& f, std::uint64_t p);

struct HeckeResult {
  std::uint64_t p = 0;
  Rational lambda;
  double residual = 0.0;      // max |c'(n) - lambda c(n)| over n <= n_probe
  bool is_eigen = false;
  std::size_t probes = 0;     // indices with c(n) != 0 that were compared
  bool level_prime = false;   // p divides the level
};

/// lambda from the first nonzero c(n); every n <= n_probe is then checked
/// exactly. is_eigen needs a zero residual on at least 3 nonzero probes.
/// n_probe = 0 uses the full output truncation.
HeckeResult extract_eigenvalue(const QSeries& f, std::uint64_t p, std::size_t n_probe = 0);

struct ShimuraCoeffs {
  std::map<std::uint64_t, Rational> lambdas;
  std::vector<Rational> lambda_n;  // index 0 unused
};

/// lambda(n) for n <= n_max from the Euler factors
///   (1 - lambda(p) p^{-s} + chi^2(p) p^{2l-1-2s})^{-1}.
ShimuraCoeffs shimura_lambda_n(const std::map<std::uint64_t, Rational>& lambdas,
                               std::size_t n_max, int ell, const SeriesMeta& meta);

struct ShimuraCheck {
  double max_residual = 0.0;
  std::size_t checked = 0;
  std::vector<Rational> lhs;  // c(t n^2), n = 1..n_max (index 0 unused)
  std::vector<Rational> rhs;
};

/// Exact check of
///   c(t n^2) = c(t) sum_{d | n} mu(d) ((-1)^l t | d) chi(d) d^{l-1} lambda(n/d)
/// for 1 <= n <= n_max. Throws when some supplied lambda(p) is contradicted
/// by T_{p^2} on the available truncation.
ShimuraCheck shimura_relation_check(const QSeries& f, const std::map<std::uint64_t, Rational>& lambdas,
                                    std::int64_t t, std::size_t n_max);

struct DeligneRow {
  std::size_t n = 0;
  double ratio = 0.0;  // |a(t n^2)| / |a(t)|
  std::optional<double> predicted;
};

struct DeligneReport {
  bool degenerate = false;  // a(t) = 0; no ratios formed
  std::vector<DeligneRow> rows;
  double exponent = 0.0;     // fitted growth of the ratio in n; -inf when all vanish
  bool exceeds_epsilon = false;  // exponent > 0.25
};

DeligneReport deligne_ratio_report(const QSeries& f, std::int64_t t, std::size_t n_max,
                                   const std::map<std::uint64_t, Rational>* lambdas = nullptr);

struct MomentFit {
  std::vector<double> xs;
  std::vector<double> sums;  // sum_{n <= x} |a(n)|^4
  double exponent = 0.0;
};

MomentFit fourth_moment_exponent(std::span<const double> a, const std::vector<double>& xs);
MomentFit fourth_moment_exponent(const QSeries& f, const std::vector<double>& xs);

struct BoundRow {
  double x = 0.0;
  double max_ratio = 0.0;    // max |a(n)| / n^{3/14} over qualifying n <= x
  std::size_t argmax = 0;
};

struct BoundReport {
  std::vector<BoundRow> rows;
  double growth_slope = 0.0;
};

/// Running maximum of |a(n)| / n^{3/14} over n = t m^2 with t squarefree and
/// m dividing 4N.
BoundReport coeff_bound_report(const QSeries& f, const std::vector<double>& xs);

}  // namespace hiw
