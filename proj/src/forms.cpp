#include "hiw/forms.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "hiw/error.hpp"
#include "hiw/voronoi.hpp"

namespace hiw {

EtaQuotientSpec::EtaQuotientSpec(std::vector<EtaFactor> factors) : factors_(std::move(factors)) {
  std::int64_t num = 0;
  for (const auto& f : factors_) {
    if (f.d < 1) throw InvalidArgument("eta quotient: dilation must be positive");
    num += f.d * f.r;
  }
  if (num < 0 || num % 24 != 0) {
    throw InvalidArgument("eta quotient: q-prefactor sum(d*r)/24 = " + std::to_string(num) +
                          "/24 is not a non-negative integer");
  }
  prefactor_ = num / 24;
}

int EtaQuotientSpec::twice_weight() const {
  int total = 0;
  for (const auto& f : factors_) total += f.r;
  return total;
}

QSeries eta_cubed_closed_form(std::size_t truncation) {
  std::vector<BigInt> c(truncation + 1, 0);
  for (std::size_t k = 0; k * (k + 1) / 2 <= truncation; ++k) {
    const auto v = static_cast<long>(2 * k + 1);
    c[k * (k + 1) / 2] = (k % 2 == 0) ? v : -v;
  }
  return QSeries({Weight{3}, 1, CharacterTag::user}, std::move(c));
}

namespace {

// g = f / s for a series s with constant term +-1, by forward substitution.
QSeries divide_unit(const QSeries& f, const QSeries& s) {
  const std::size_t x = f.truncation();
  std::vector<std::pair<std::size_t, BigInt>> terms;
  for (std::size_t i = 1; i <= x; ++i) {
    if (sgn(s.coeff(i)) != 0) terms.emplace_back(i, s.coeff(i));
  }
  const BigInt& lead = s.coeff(0);
  if (abs(lead) != 1) throw InvalidArgument("divide_unit: constant term must be +-1");
  std::vector<BigInt> g(x + 1, 0);
  BigInt acc;
  for (std::size_t n = 0; n <= x; ++n) {
    acc = f.coeff(n);
    for (const auto& [i, v] : terms) {
      if (i > n) break;
      acc -= v * g[n - i];
    }
    g[n] = lead * acc;
  }
  return QSeries(f.meta(), std::move(g));
}

}  // namespace

QSeries eta_quotient(const EtaQuotientSpec& spec, std::size_t truncation, SeriesMeta meta) {
  if (truncation < 1) throw InvalidArgument("eta_quotient: truncation must be >= 1");
  const std::size_t x = truncation;
  std::vector<BigInt> one(x + 1, 0);
  one[0] = 1;
  QSeries acc(meta, std::move(one));
  const QSeries eta = eta_expansion(x);
  const QSeries eta3 = eta_cubed_closed_form(x);
  for (const auto& f : spec.factors()) {
    const QSeries e1 = dilate(eta, f.d);
    const QSeries e3 = dilate(eta3, f.d);
    const int mag = std::abs(f.r);
    for (int i = 0; i < mag / 3; ++i) {
      acc = f.r > 0 ? multiply(acc, e3, x, meta) : divide_unit(acc, e3);
    }
    for (int i = 0; i < mag % 3; ++i) {
      acc = f.r > 0 ? multiply(acc, e1, x, meta) : divide_unit(acc, e1);
    }
  }
  return shift(acc, static_cast<std::size_t>(spec.q_prefactor())).with_meta(meta);
}

QSeries delta_expansion(std::size_t truncation) {
  return eta_quotient(EtaQuotientSpec({{1, 24}}), truncation,
                      {Weight{24}, 1, CharacterTag::trivial});
}

namespace {

QSeries build_theta_delta(std::size_t x) {
  return multiply(theta_expansion(x), delta_expansion(x), x,
                  SeriesMeta{Weight{25}, 4, CharacterTag::trivial});
}

QSeries build_eta8_cubed(std::size_t x) {
  return eta_quotient(EtaQuotientSpec({{8, 3}}), x, {Weight{3}, 64, CharacterTag::trivial});
}

QSeries build_theta_delta_fricke(std::size_t x) {
  const std::complex<double> kappa = fricke_scalar(builtin_form("theta_delta", kFrickeTruncation));
  const double rounded = std::round(kappa.real());
  if (std::abs(kappa.imag()) > 1e-6 * std::abs(kappa) || std::abs(kappa.real() - rounded) > 1e-6 * rounded) {
    throw NumericalError("theta_delta_fricke: Fricke scalar is not a real integer");
  }
  const QSeries base = multiply(theta_expansion(x), dilate(delta_expansion(x), 4), x,
                                SeriesMeta{Weight{25}, 4, CharacterTag::trivial});
  return base.scaled(BigInt(static_cast<long>(rounded)));
}

struct FormCache {
  std::mutex mutex;
  std::map<std::string, QSeries, std::less<>> forms;
};

FormCache& form_cache() {
  static FormCache cache;
  return cache;
}

}  // namespace

std::vector<std::string> builtin_form_names() {
  return {"theta_delta", "eta8_cubed", "theta_delta_fricke"};
}

QSeries builtin_form(std::string_view name, std::size_t truncation) {
  if (truncation < 1) throw InvalidArgument("builtin_form: truncation must be >= 1");
  if (name != "theta_delta" && name != "eta8_cubed" && name != "theta_delta_fricke") {
    throw InvalidArgument("unknown built-in form '" + std::string(name) + "'");
  }
  auto& cache = form_cache();
  {
    std::lock_guard lock(cache.mutex);
    if (auto it = cache.forms.find(name);
        it != cache.forms.end() && it->second.truncation() >= truncation) {
      return it->second.truncation() == truncation ? it->second
                                                   : it->second.truncated(truncation);
    }
  }
  QSeries built = name == "theta_delta"  ? build_theta_delta(truncation)
                  : name == "eta8_cubed" ? build_eta8_cubed(truncation)
                                         : build_theta_delta_fricke(truncation);
  std::lock_guard lock(cache.mutex);
  auto [it, inserted] = cache.forms.try_emplace(std::string(name), built);
  if (!inserted && it->second.truncation() < truncation) it->second = built;
  return built;
}

}  // namespace hiw
