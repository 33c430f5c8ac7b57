#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hiw {

using BigInt = mpz_class;

/// Weight of a modular form, stored doubled so that 25/2 is {25} and 12 is {24}.
struct Weight {
  int twice = 0;

  [[nodiscard]] constexpr bool is_half_integral() const { return twice % 2 != 0; }
  /// ell in "weight ell + 1/2"; only meaningful for half-integral weights.
  [[nodiscard]] constexpr int ell() const { return (twice - 1) / 2; }
  /// Exponent e in a(n) = c(n) / n^e, i.e. (k - 1)/2 for weight k.
  [[nodiscard]] constexpr double normalization_exponent() const { return (twice - 2) / 4.0; }

  friend constexpr Weight operator+(Weight a, Weight b) { return {a.twice + b.twice}; }
  friend constexpr bool operator==(Weight, Weight) = default;
};

/// Half-integral weight (2l+1)/2 with l >= 1: the weights that carry the
/// cusp-form statistics.
class HalfWeight {
 public:
  explicit HalfWeight(int two_k);
  [[nodiscard]] int two_k() const { return two_k_; }
  [[nodiscard]] int ell() const { return (two_k_ - 1) / 2; }
  [[nodiscard]] Weight weight() const { return {two_k_}; }

 private:
  int two_k_;
};

enum class CharacterTag { trivial, four_n_symbol, user };

std::string_view to_string(CharacterTag tag);
CharacterTag parse_character_tag(std::string_view text);

/// Series metadata carried alongside the coefficients.
struct SeriesMeta {
  Weight weight{};
  std::int64_t level = 1;
  CharacterTag character = CharacterTag::trivial;
};

/// Truncated q-expansion sum_{0 <= n <= X} c(n) q^n with exact coefficients.
///
/// Immutable after construction. The normalized double array
/// a(n) = c(n) / n^{(k-1)/2} is derived lazily on first use and shared between
/// copies; index 0 of that array is always 0 (statistics exclude n = 0).
class QSeries {
 public:
  QSeries(SeriesMeta meta, std::vector<BigInt> coeffs);

  [[nodiscard]] const SeriesMeta& meta() const { return meta_; }
  [[nodiscard]] Weight weight() const { return meta_.weight; }
  [[nodiscard]] std::int64_t level() const { return meta_.level; }
  [[nodiscard]] CharacterTag character() const { return meta_.character; }
  [[nodiscard]] std::size_t truncation() const { return coeffs_.size() - 1; }

  /// c(n) for 0 <= n <= truncation().
  [[nodiscard]] const BigInt& coeff(std::size_t n) const;
  [[nodiscard]] std::span<const BigInt> coeffs() const { return coeffs_; }
  [[nodiscard]] std::size_t nonzero_count() const;

  /// Normalized coefficients a(n), n = 0..truncation(), with a(0) := 0.
  [[nodiscard]] std::span<const double> normalized() const;

  [[nodiscard]] QSeries with_meta(SeriesMeta meta) const;
  [[nodiscard]] QSeries scaled(const BigInt& factor) const;
  [[nodiscard]] QSeries negated() const { return scaled(-1); }
  [[nodiscard]] QSeries truncated(std::size_t x) const;

  friend bool operator==(const QSeries& a, const QSeries& b);

 private:
  struct NormalizedCache;

  SeriesMeta meta_;
  std::vector<BigInt> coeffs_;
  std::shared_ptr<NormalizedCache> cache_;
};

/// prod_{n>=1} (1 - q^n) up to q^truncation (Euler's pentagonal expansion,
/// no q^{1/24} prefactor).
QSeries eta_expansion(std::size_t truncation);

/// theta(z) = 1 + 2 sum_{m>=1} q^{m^2}, weight 1/2, level 4.
QSeries theta_expansion(std::size_t truncation);

/// z -> dz: coefficient at d*n becomes c(n). Truncation is preserved.
QSeries dilate(const QSeries& s, std::int64_t d);

/// Exact truncated convolution. Weights add; the level is the lcm of the
/// inputs unless the caller supplies metadata.
QSeries multiply(const QSeries& a, const QSeries& b, std::size_t truncation,
                 std::optional<SeriesMeta> meta = std::nullopt);

/// Multiplies by q^shift, keeping the truncation.
QSeries shift(const QSeries& s, std::size_t shift);

/// Fourier coefficient normalized by n^{(k-1)/2}; n must lie in [1, truncation].
double normalized_coeff(const QSeries& s, std::size_t n);

// Text format:
//   QEXP v1
//   weight <two_k>/2 level <L> char <tag> trunc <X>
//   <n> <c(n)>            (strictly increasing n, missing n means 0)
struct ReadResult {
  QSeries series;
  std::size_t gap_count = 0;  // indices in [1, X] absent from the file
};

ReadResult read_qexp(std::istream& in);
ReadResult read_qexp(const std::filesystem::path& path);
void write_qexp(const QSeries& s, std::ostream& out);
void write_qexp(const QSeries& s, const std::filesystem::path& path);

}  // namespace hiw
