#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hiw/qseries.hpp"

namespace hiw {

/// One factor eta(d z)^r of an eta quotient.
struct EtaFactor {
  std::int64_t d = 1;
  int r = 0;
};

/// prod eta(d z)^r. The implied q-prefactor sum(d r)/24 must be a
/// non-negative integer.
class EtaQuotientSpec {
 public:
  explicit EtaQuotientSpec(std::vector<EtaFactor> factors);

  [[nodiscard]] const std::vector<EtaFactor>& factors() const { return factors_; }
  [[nodiscard]] std::int64_t q_prefactor() const { return prefactor_; }
  /// Sum of exponents, i.e. twice the weight.
  [[nodiscard]] int twice_weight() const;

 private:
  std::vector<EtaFactor> factors_;
  std::int64_t prefactor_ = 0;
};

/// Exact q-expansion of the eta quotient up to q^truncation.
QSeries eta_quotient(const EtaQuotientSpec& spec, std::size_t truncation, SeriesMeta meta);

/// Ramanujan's Delta = q prod (1 - q^n)^24.
QSeries delta_expansion(std::size_t truncation);

/// Sum_k (-1)^k (2k+1) q^{k(k+1)/2}, the Jacobi closed form of eta^3 without prefactor.
QSeries eta_cubed_closed_form(std::size_t truncation);

/// Built-in test forms: "theta_delta" (theta(z)Delta(z), weight 25/2, level 4),
/// "eta8_cubed" (eta(8z)^3, weight 3/2, level 64) and "theta_delta_fricke"
/// (kappa theta(z)Delta(4z), the Fricke image of theta_delta).
///
/// Results are memoized per process; a request below a cached truncation is
/// served by truncating the cached series.
QSeries builtin_form(std::string_view name, std::size_t truncation);

std::vector<std::string> builtin_form_names();

}  // namespace hiw
