#include "hiw/hecke.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hiw/error.hpp"
#include "hiw/modarith.hpp"
#include "hiw/progsums.hpp"

namespace hiw {

namespace {

BigInt power(std::uint64_t base, unsigned long exp) {
  BigInt out;
  mpz_ui_pow_ui(out.get_mpz_t(), base, exp);
  return out;
}

int require_ell(const QSeries& f) {
  if (!f.weight().is_half_integral() || f.weight().twice < 3) {
    throw InvalidArgument("Hecke operators here need half-integral weight l + 1/2 with l >= 1");
  }
  return f.weight().ell();
}

// Smallest-prime-factor table for 0..n.
std::vector<std::uint32_t> spf_sieve(std::size_t n) {
  std::vector<std::uint32_t> spf(n + 1, 0);
  for (std::size_t i = 2; i <= n; ++i) {
    if (spf[i] != 0) continue;
    for (std::size_t j = i; j <= n; j += i) {
      if (spf[j] == 0) spf[j] = static_cast<std::uint32_t>(i);
    }
  }
  return spf;
}

std::vector<std::pair<std::uint64_t, int>> factorize(std::uint64_t n) {
  std::vector<std::pair<std::uint64_t, int>> out;
  for (std::uint64_t q = 2; q * q <= n; ++q) {
    int e = 0;
    while (n % q == 0) {
      n /= q;
      ++e;
    }
    if (e > 0) out.emplace_back(q, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

int mobius(std::uint64_t n) {
  int mu = 1;
  for (const auto& [q, e] : factorize(n)) {
    if (e > 1) return 0;
    mu = -mu;
  }
  return mu;
}

double abs_to_double(const Rational& r) { return std::abs(r.get_d()); }

}  // namespace

int character_value(const SeriesMeta& meta, std::int64_t d) {
  switch (meta.character) {
    case CharacterTag::trivial:
      return std::gcd(d, meta.level) == 1 ? 1 : 0;
    case CharacterTag::four_n_symbol:
      return std::gcd(d, meta.level) == 1 ? kronecker(meta.level, d) : 0;
    case CharacterTag::user:
      break;
  }
  throw InvalidArgument("character values are unknown for forms tagged 'user'");
}

QSeries apply_tp2(const QSeries& f, std::uint64_t p) {
  const int ell = require_ell(f);
  if (!is_prime(p)) throw InvalidArgument("apply_tp2: p must be prime");
  const std::size_t p2 = p * p;
  const std::size_t out_trunc = f.truncation() / p2;
  if (out_trunc < 1) {
    throw InvalidArgument("apply_tp2: truncation " + std::to_string(f.truncation()) +
                          " gives no output coefficients for p = " + std::to_string(p));
  }
  const auto pi = static_cast<std::int64_t>(p);
  const int chi_p = character_value(f.meta(), pi);
  const int chi_p2 = character_value(f.meta(), pi * pi);
  const BigInt mid_scale = power(p, static_cast<unsigned long>(ell - 1)) * chi_p;
  const BigInt low_scale = power(p, static_cast<unsigned long>(2 * ell - 1)) * chi_p2;
  const std::int64_t sign = ell % 2 == 0 ? 1 : -1;

  std::vector<BigInt> out(out_trunc + 1);
  for (std::size_t n = 0; n <= out_trunc; ++n) {
    BigInt v = f.coeff(p2 * n);
    if (chi_p != 0 && n != 0) {
      const int sym = extended_symbol(sign * static_cast<std::int64_t>(n), pi);
      if (sym != 0) v += sym * mid_scale * f.coeff(n);
    }
    if (chi_p2 != 0 && n % p2 == 0) v += low_scale * f.coeff(n / p2);
    out[n] = std::move(v);
  }
  return QSeries(f.meta(), std::move(out));
}

HeckeResult extract_eigenvalue(const QSeries& f, std::uint64_t p, std::size_t n_probe) {
  const QSeries image = apply_tp2(f, p);
  const std::size_t limit = n_probe == 0 ? image.truncation() : std::min(n_probe, image.truncation());
  HeckeResult res;
  res.p = p;
  res.level_prime = f.level() % static_cast<std::int64_t>(p) == 0;
  bool have_lambda = false;
  Rational worst = 0;
  for (std::size_t n = 1; n <= limit; ++n) {
    const BigInt& c = f.coeff(n);
    if (!have_lambda) {
      if (sgn(c) == 0) {
        if (sgn(image.coeff(n)) != 0) worst = std::max(worst, Rational(abs(image.coeff(n))));
        continue;
      }
      res.lambda = Rational(image.coeff(n), c);
      res.lambda.canonicalize();
      have_lambda = true;
    }
    if (sgn(c) != 0) ++res.probes;
    Rational diff = Rational(image.coeff(n)) - res.lambda * c;
    worst = std::max(worst, Rational(abs(diff)));
  }
  if (!have_lambda) {
    throw InvalidArgument("extract_eigenvalue: every probed coefficient vanishes");
  }
  res.residual = worst.get_d();
  res.is_eigen = sgn(worst) == 0 && res.probes >= 3;
  return res;
}

ShimuraCoeffs shimura_lambda_n(const std::map<std::uint64_t, Rational>& lambdas, std::size_t n_max,
                               int ell, const SeriesMeta& meta) {
  ShimuraCoeffs out;
  out.lambdas = lambdas;
  out.lambda_n.assign(n_max + 1, Rational(0));
  if (n_max >= 1) out.lambda_n[1] = 1;
  // lambda(p^k) for every prime power <= n_max.
  std::map<std::uint64_t, std::vector<Rational>> prime_powers;
  for (std::uint64_t p = 2; p <= n_max; ++p) {
    if (!is_prime(p)) continue;
    const auto it = lambdas.find(p);
    if (it == lambdas.end()) {
      throw InvalidArgument("shimura_lambda_n: missing lambda(" + std::to_string(p) + ")");
    }
    const int chi = character_value(meta, static_cast<std::int64_t>(p));
    const Rational c2 = Rational(power(p, static_cast<unsigned long>(2 * ell - 1)) * chi * chi);
    std::vector<Rational> seq{Rational(1), it->second};
    for (std::uint64_t pk = p * p; pk <= n_max; pk *= p) {
      const std::size_t k = seq.size() - 1;
      seq.push_back(it->second * seq[k] - c2 * seq[k - 1]);
    }
    prime_powers.emplace(p, std::move(seq));
  }
  for (std::size_t n = 2; n <= n_max; ++n) {
    Rational v = 1;
    for (const auto& [q, e] : factorize(n)) v *= prime_powers.at(q)[static_cast<std::size_t>(e)];
    out.lambda_n[n] = v;
  }
  return out;
}

ShimuraCheck shimura_relation_check(const QSeries& f, const std::map<std::uint64_t, Rational>& lambdas,
                                    std::int64_t t, std::size_t n_max) {
  const int ell = require_ell(f);
  if (t < 1 || squarefree_decomposition(t).second != 1) {
    throw InvalidArgument("shimura_relation_check: t must be a positive squarefree integer");
  }
  const auto tu = static_cast<std::size_t>(t);
  if (tu * n_max * n_max > f.truncation()) {
    throw InvalidArgument("shimura_relation_check: truncation below t n_max^2");
  }
  for (const auto& [p, lam] : lambdas) {
    if (f.truncation() / (p * p) < 1) continue;
    const QSeries image = apply_tp2(f, p);
    for (std::size_t n = 0; n <= image.truncation(); ++n) {
      if (Rational(image.coeff(n)) != lam * f.coeff(n)) {
        throw InvalidArgument("shimura_relation_check: the form is not a T_{" + std::to_string(p) +
                              "^2} eigenform with lambda = " + lam.get_str());
      }
    }
  }
  const ShimuraCoeffs sc = shimura_lambda_n(lambdas, n_max, ell, f.meta());
  const std::int64_t twisted_t = (ell % 2 == 0 ? 1 : -1) * t;
  ShimuraCheck out;
  out.lhs.assign(n_max + 1, Rational(0));
  out.rhs.assign(n_max + 1, Rational(0));
  Rational worst = 0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    Rational sum = 0;
    for (std::size_t d = 1; d <= n; ++d) {
      if (n % d != 0) continue;
      const int mu = mobius(d);
      if (mu == 0) continue;
      const auto di = static_cast<std::int64_t>(d);
      const int term_sign = mu * extended_symbol(twisted_t, di) * character_value(f.meta(), di);
      if (term_sign == 0) continue;
      sum += Rational(power(d, static_cast<unsigned long>(ell - 1)) * term_sign) * sc.lambda_n[n / d];
    }
    out.lhs[n] = Rational(f.coeff(tu * n * n));
    out.rhs[n] = Rational(f.coeff(tu)) * sum;
    worst = std::max(worst, Rational(abs(out.lhs[n] - out.rhs[n])));
    ++out.checked;
  }
  out.max_residual = worst.get_d();
  return out;
}

DeligneReport deligne_ratio_report(const QSeries& f, std::int64_t t, std::size_t n_max,
                                   const std::map<std::uint64_t, Rational>* lambdas) {
  const int ell = require_ell(f);
  if (t < 1) throw InvalidArgument("deligne_ratio_report: t must be positive");
  const auto tu = static_cast<std::size_t>(t);
  if (tu * n_max * n_max > f.truncation()) {
    throw InvalidArgument("deligne_ratio_report: truncation below t n_max^2");
  }
  DeligneReport rep;
  const auto a = f.normalized();
  if (a[tu] == 0.0) {
    rep.degenerate = true;
    return rep;
  }
  std::optional<ShimuraCoeffs> sc;
  if (lambdas != nullptr) sc = shimura_lambda_n(*lambdas, n_max, ell, f.meta());
  const std::int64_t twisted_t = (ell % 2 == 0 ? 1 : -1) * t;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t used = 0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    DeligneRow row;
    row.n = n;
    row.ratio = std::abs(a[tu * n * n]) / std::abs(a[tu]);
    if (sc) {
      Rational sum = 0;
      for (std::size_t d = 1; d <= n; ++d) {
        if (n % d != 0 || mobius(d) == 0) continue;
        const auto di = static_cast<std::int64_t>(d);
        const int s = mobius(d) * extended_symbol(twisted_t, di) * character_value(f.meta(), di);
        if (s != 0) sum += Rational(power(d, static_cast<unsigned long>(ell - 1)) * s) * sc->lambda_n[n / d];
      }
      row.predicted = abs_to_double(sum) / std::pow(static_cast<double>(n), ell - 0.5);
    }
    if (n >= 2 && row.ratio > 0.0) {
      const double lx = std::log(static_cast<double>(n));
      const double ly = std::log(row.ratio);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++used;
    }
    rep.rows.push_back(row);
  }
  if (used == 0) {
    rep.exponent = -std::numeric_limits<double>::infinity();
  } else if (used == 1) {
    rep.exponent = sy / sx;
  } else {
    const double k = static_cast<double>(used);
    rep.exponent = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  }
  rep.exceeds_epsilon = rep.exponent > 0.25;
  return rep;
}

MomentFit fourth_moment_exponent(std::span<const double> a, const std::vector<double>& xs) {
  if (xs.empty()) throw InvalidArgument("fourth_moment_exponent: empty x list");
  MomentFit fit;
  fit.xs = xs;
  for (double x : xs) {
    const auto hi = static_cast<std::size_t>(std::floor(x));
    if (hi >= a.size()) throw InvalidArgument("fourth_moment_exponent: truncation below x");
    double s = 0.0;
    for (std::size_t n = 1; n <= hi; ++n) {
      const double v = a[n] * a[n];
      s += v * v;
    }
    fit.sums.push_back(s);
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(fit.sums[i] > 0.0)) continue;
    const double lx = std::log(xs[i]);
    const double ly = std::log(fit.sums[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++k;
  }
  if (k >= 2) {
    const double dk = static_cast<double>(k);
    fit.exponent = (dk * sxy - sx * sy) / (dk * sxx - sx * sx);
  }
  return fit;
}

MomentFit fourth_moment_exponent(const QSeries& f, const std::vector<double>& xs) {
  return fourth_moment_exponent(f.normalized(), xs);
}

BoundReport coeff_bound_report(const QSeries& f, const std::vector<double>& xs) {
  if (xs.empty()) throw InvalidArgument("coeff_bound_report: empty x list");
  std::vector<double> sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  const auto top = static_cast<std::size_t>(std::floor(sorted.back()));
  if (top > f.truncation()) throw InvalidArgument("coeff_bound_report: truncation below x");
  const std::int64_t four_n = 4 * level_n_of(f.level());
  const auto spf = spf_sieve(top);
  const auto a = f.normalized();

  BoundReport rep;
  double best = 0.0;
  std::size_t arg = 0;
  std::size_t n = 1;
  for (double x : sorted) {
    const auto hi = static_cast<std::size_t>(std::floor(x));
    for (; n <= hi; ++n) {
      // m with n = t m^2, t squarefree.
      std::size_t rest = n;
      std::int64_t m = 1;
      while (rest > 1) {
        const std::uint32_t q = spf[rest];
        int e = 0;
        while (rest % q == 0) {
          rest /= q;
          ++e;
        }
        for (int i = 0; i < e / 2; ++i) m *= q;
      }
      if (four_n % m != 0) continue;
      const double r = std::abs(a[n]) / std::pow(static_cast<double>(n), 3.0 / 14.0);
      if (r > best) {
        best = r;
        arg = n;
      }
    }
    rep.rows.push_back({x, best, arg});
  }
  if (rep.rows.size() >= 2 && rep.rows.front().max_ratio > 0.0) {
    const double dx = std::log(rep.rows.back().x / rep.rows.front().x);
    rep.growth_slope = dx == 0.0 ? 0.0 : std::log(rep.rows.back().max_ratio / rep.rows.front().max_ratio) / dx;
  }
  return rep;
}

}  // namespace hiw
