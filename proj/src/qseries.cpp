#include "hiw/qseries.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>

#include "hiw/error.hpp"
#include "hiw/int128.hpp"
#include "hiw/parallel.hpp"

namespace hiw {

HalfWeight::HalfWeight(int two_k) : two_k_(two_k) {
  if (two_k % 2 == 0 || two_k < 3) {
    throw InvalidArgument("half-integral weight needs odd two_k >= 3, got " +
                          std::to_string(two_k));
  }
}

std::string_view to_string(CharacterTag tag) {
  switch (tag) {
    case CharacterTag::trivial:
      return "trivial";
    case CharacterTag::four_n_symbol:
      return "four_n_symbol";
    case CharacterTag::user:
      return "user";
  }
  return "user";
}

CharacterTag parse_character_tag(std::string_view text) {
  if (text == "trivial") return CharacterTag::trivial;
  if (text == "four_n_symbol") return CharacterTag::four_n_symbol;
  if (text == "user") return CharacterTag::user;
  throw FormatError("unknown character tag '" + std::string(text) + "'");
}

struct QSeries::NormalizedCache {
  std::once_flag once;
  std::vector<double> values;
};

QSeries::QSeries(SeriesMeta meta, std::vector<BigInt> coeffs)
    : meta_(meta), coeffs_(std::move(coeffs)), cache_(std::make_shared<NormalizedCache>()) {
  if (coeffs_.empty()) throw InvalidArgument("q-series needs at least the constant term");
  if (meta_.level < 1) throw InvalidArgument("level must be positive");
}

const BigInt& QSeries::coeff(std::size_t n) const {
  if (n >= coeffs_.size()) {
    throw InvalidArgument("coefficient index " + std::to_string(n) + " beyond truncation " +
                          std::to_string(truncation()));
  }
  return coeffs_[n];
}

std::size_t QSeries::nonzero_count() const {
  return static_cast<std::size_t>(
      std::count_if(coeffs_.begin(), coeffs_.end(), [](const BigInt& c) { return sgn(c) != 0; }));
}

namespace {

// Correctly scaled double for c / n^e even when c exceeds the double range
// of intermediate products.
double normalize_one(const BigInt& c, std::size_t n, double exponent) {
  if (sgn(c) == 0) return 0.0;
  long exp2 = 0;
  const double mant = mpz_get_d_2exp(&exp2, c.get_mpz_t());
  const double log2_scale = static_cast<double>(exp2) - exponent * std::log2(static_cast<double>(n));
  // Split the power of two so std::ldexp never overflows on the way.
  const double whole = std::floor(log2_scale);
  return std::ldexp(mant * std::exp2(log2_scale - whole), static_cast<int>(whole));
}

}  // namespace

std::span<const double> QSeries::normalized() const {
  std::call_once(cache_->once, [this] {
    const double e = meta_.weight.normalization_exponent();
    std::vector<double> out(coeffs_.size(), 0.0);
    for (std::size_t n = 1; n < coeffs_.size(); ++n) out[n] = normalize_one(coeffs_[n], n, e);
    cache_->values = std::move(out);
  });
  return cache_->values;
}

QSeries QSeries::with_meta(SeriesMeta meta) const { return QSeries(meta, coeffs_); }

QSeries QSeries::scaled(const BigInt& factor) const {
  std::vector<BigInt> out(coeffs_.size());
  for (std::size_t n = 0; n < coeffs_.size(); ++n) out[n] = coeffs_[n] * factor;
  return QSeries(meta_, std::move(out));
}

QSeries QSeries::truncated(std::size_t x) const {
  if (x > truncation()) throw InvalidArgument("cannot extend a truncated series");
  return QSeries(meta_, std::vector<BigInt>(coeffs_.begin(), coeffs_.begin() + x + 1));
}

bool operator==(const QSeries& a, const QSeries& b) {
  return a.meta_.weight == b.meta_.weight && a.meta_.level == b.meta_.level &&
         a.meta_.character == b.meta_.character && a.coeffs_ == b.coeffs_;
}

QSeries eta_expansion(std::size_t truncation) {
  if (truncation < 1) throw InvalidArgument("eta_expansion: truncation must be >= 1");
  std::vector<BigInt> c(truncation + 1, 0);
  // Generalized pentagonal numbers k(3k-1)/2 for k = 0, +-1, +-2, ...
  c[0] = 1;
  for (std::int64_t k = 1;; ++k) {
    const auto p1 = static_cast<std::size_t>(k * (3 * k - 1) / 2);
    const auto p2 = static_cast<std::size_t>(k * (3 * k + 1) / 2);
    if (p1 > truncation) break;
    const int sign = (k % 2 == 0) ? 1 : -1;
    c[p1] = sign;
    if (p2 <= truncation) c[p2] = sign;
  }
  return QSeries({Weight{1}, 1, CharacterTag::user}, std::move(c));
}

QSeries theta_expansion(std::size_t truncation) {
  if (truncation < 1) throw InvalidArgument("theta_expansion: truncation must be >= 1");
  std::vector<BigInt> c(truncation + 1, 0);
  c[0] = 1;
  for (std::size_t m = 1; m * m <= truncation; ++m) c[m * m] = 2;
  return QSeries({Weight{1}, 4, CharacterTag::trivial}, std::move(c));
}

QSeries dilate(const QSeries& s, std::int64_t d) {
  if (d < 1) throw InvalidArgument("dilate: factor must be >= 1");
  const std::size_t x = s.truncation();
  const auto du = static_cast<std::size_t>(d);
  std::vector<BigInt> c(x + 1, 0);
  for (std::size_t n = 0; n * du <= x; ++n) c[n * du] = s.coeff(n);
  SeriesMeta meta = s.meta();
  meta.level *= d;
  return QSeries(meta, std::move(c));
}

QSeries shift(const QSeries& s, std::size_t k) {
  const std::size_t x = s.truncation();
  std::vector<BigInt> c(x + 1, 0);
  for (std::size_t n = k; n <= x; ++n) c[n] = s.coeff(n - k);
  return QSeries(s.meta(), std::move(c));
}

namespace {

struct SparseTerm {
  std::size_t index;
  BigInt value;
};

std::vector<SparseTerm> sparse_terms(std::span<const BigInt> c, std::size_t limit) {
  std::vector<SparseTerm> out;
  for (std::size_t i = 0; i <= limit && i < c.size(); ++i) {
    if (sgn(c[i]) != 0) out.push_back({i, c[i]});
  }
  return out;
}

std::size_t max_bits(std::span<const BigInt> c, std::size_t limit) {
  std::size_t bits = 0;
  for (std::size_t i = 0; i <= limit && i < c.size(); ++i) {
    if (sgn(c[i]) != 0) bits = std::max(bits, mpz_sizeinbase(c[i].get_mpz_t(), 2));
  }
  return bits;
}

std::size_t bit_length(std::size_t v) {
  std::size_t b = 0;
  while (v != 0) {
    ++b;
    v >>= 1;
  }
  return b;
}

constexpr std::size_t kConvChunk = 1 << 15;
constexpr unsigned kLimbBits = 60;

// out[n] = sum_t t.value * limb[n - t.index] in 128-bit arithmetic.
void convolve_limb(const std::vector<std::pair<std::size_t, std::int64_t>>& sparse,
                   const std::vector<i128>& limb, std::vector<i128>& out) {
  const std::size_t size = out.size();
  const std::size_t n_chunks = (size + kConvChunk - 1) / kConvChunk;
  parallel_chunks(n_chunks, [&](std::size_t chunk) {
    const std::size_t lo = chunk * kConvChunk;
    const std::size_t hi = std::min(size, lo + kConvChunk);
    i128* dst = out.data();
    for (const auto& [index, value] : sparse) {
      if (index >= hi) break;
      const std::size_t start = std::max(lo, index);
      const i128* src = limb.data() - index;
      if (value == 1) {
        for (std::size_t n = start; n < hi; ++n) dst[n] += src[n];
      } else if (value == -1) {
        for (std::size_t n = start; n < hi; ++n) dst[n] -= src[n];
      } else {
        const i128 v = value;
        for (std::size_t n = start; n < hi; ++n) dst[n] += v * src[n];
      }
    }
  });
}

// The dense operand is split into signed 60-bit limbs so every partial sum
// stays inside 128 bits; the limb results are recombined exactly.
std::vector<BigInt> convolve_limbs(const std::vector<SparseTerm>& sparse,
                                   std::span<const BigInt> dense, std::size_t x,
                                   std::size_t dense_bits) {
  std::vector<std::pair<std::size_t, std::int64_t>> small;
  small.reserve(sparse.size());
  for (const auto& t : sparse) small.emplace_back(t.index, t.value.get_si());

  const std::size_t n_limbs = std::max<std::size_t>(1, (dense_bits + kLimbBits - 1) / kLimbBits);
  std::vector<BigInt> result(x + 1, 0);
  std::vector<i128> limb(x + 1);
  std::vector<i128> out(x + 1);
  mpz_class mag;
  mpz_class part;
  for (std::size_t j = 0; j < n_limbs; ++j) {
    for (std::size_t i = 0; i <= x; ++i) {
      const BigInt& d = dense[i];
      if (sgn(d) == 0) {
        limb[i] = 0;
        continue;
      }
      mpz_abs(mag.get_mpz_t(), d.get_mpz_t());
      mpz_fdiv_q_2exp(mag.get_mpz_t(), mag.get_mpz_t(), j * kLimbBits);
      mpz_fdiv_r_2exp(mag.get_mpz_t(), mag.get_mpz_t(), kLimbBits);
      const auto v = static_cast<i128>(mpz_get_ui(mag.get_mpz_t()));
      limb[i] = sgn(d) < 0 ? -v : v;
    }
    std::fill(out.begin(), out.end(), 0);
    convolve_limb(small, limb, out);
    for (std::size_t n = 0; n <= x; ++n) {
      if (out[n] == 0) continue;
      part = from_i128(out[n]);
      mpz_mul_2exp(part.get_mpz_t(), part.get_mpz_t(), j * kLimbBits);
      result[n] += part;
    }
  }
  return result;
}

std::vector<BigInt> convolve_big(const std::vector<SparseTerm>& sparse,
                                 std::span<const BigInt> dense, std::size_t x) {
  std::vector<BigInt> out(x + 1, 0);
  for (const auto& t : sparse) {
    for (std::size_t n = t.index; n <= x; ++n) {
      const BigInt& d = dense[n - t.index];
      if (sgn(d) != 0) mpz_addmul(out[n].get_mpz_t(), t.value.get_mpz_t(), d.get_mpz_t());
    }
  }
  return out;
}

std::int64_t lcm64(std::int64_t a, std::int64_t b) { return std::lcm(a, b); }

}  // namespace

QSeries multiply(const QSeries& a, const QSeries& b, std::size_t truncation,
                 std::optional<SeriesMeta> meta) {
  if (truncation > a.truncation() || truncation > b.truncation()) {
    throw InvalidArgument("multiply: requested truncation " + std::to_string(truncation) +
                          " exceeds an input truncation");
  }
  const std::size_t x = truncation;
  auto ta = sparse_terms(a.coeffs(), x);
  auto tb = sparse_terms(b.coeffs(), x);
  const bool a_sparse = ta.size() <= tb.size();
  const auto& sparse = a_sparse ? ta : tb;
  const QSeries& dense = a_sparse ? b : a;

  SeriesMeta out_meta;
  if (meta) {
    out_meta = *meta;
  } else {
    out_meta.weight = a.weight() + b.weight();
    out_meta.level = lcm64(a.level(), b.level());
    out_meta.character = (a.character() == CharacterTag::trivial &&
                          b.character() == CharacterTag::trivial)
                             ? CharacterTag::trivial
                             : CharacterTag::user;
  }

  const std::size_t sparse_bits = max_bits(a_sparse ? a.coeffs() : b.coeffs(), x);
  const std::size_t dense_bits = max_bits(dense.coeffs(), x);
  const bool fits = sparse_bits <= 62 && kLimbBits + sparse_bits + bit_length(sparse.size()) <= 126;
  auto coeffs = fits ? convolve_limbs(sparse, dense.coeffs(), x, dense_bits)
                     : convolve_big(sparse, dense.coeffs(), x);
  return QSeries(out_meta, std::move(coeffs));
}

double normalized_coeff(const QSeries& s, std::size_t n) {
  if (n < 1 || n > s.truncation()) {
    throw InvalidArgument("normalized_coeff: index " + std::to_string(n) + " outside [1, " +
                          std::to_string(s.truncation()) + "]");
  }
  return s.normalized()[n];
}

// ---------------------------------------------------------------------------
// File format

namespace {

std::string next_content_line(std::istream& in, std::size_t& line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) return line;
  }
  return {};
}

[[noreturn]] void bad(std::size_t line_no, const std::string& what) {
  throw FormatError("qexp line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

ReadResult read_qexp(std::istream& in) {
  std::size_t line_no = 0;
  if (next_content_line(in, line_no) != "QEXP v1") bad(line_no, "expected 'QEXP v1' header");

  const std::string header = next_content_line(in, line_no);
  std::istringstream hs(header);
  std::string kw_weight, weight_text, kw_level, kw_char, tag_text, kw_trunc;
  long long level = 0;
  long long trunc = 0;
  if (!(hs >> kw_weight >> weight_text >> kw_level >> level >> kw_char >> tag_text >> kw_trunc >>
        trunc) ||
      kw_weight != "weight" || kw_level != "level" || kw_char != "char" || kw_trunc != "trunc") {
    bad(line_no, "malformed header, expected 'weight <two_k>/2 level <L> char <tag> trunc <X>'");
  }
  std::string extra;
  if (hs >> extra) bad(line_no, "trailing text in header");
  const auto slash = weight_text.find('/');
  if (slash == std::string::npos || weight_text.substr(slash) != "/2") {
    bad(line_no, "weight must be written as <two_k>/2");
  }
  int two_k = 0;
  try {
    std::size_t used = 0;
    two_k = std::stoi(weight_text.substr(0, slash), &used);
    if (used != slash) bad(line_no, "non-integer weight numerator");
  } catch (const std::logic_error&) {
    bad(line_no, "non-integer weight numerator");
  }
  if (two_k % 2 == 0) bad(line_no, "weight parity violation: two_k must be odd");
  if (level < 1) bad(line_no, "level must be positive");
  if (trunc < 1) bad(line_no, "truncation must be positive");
  CharacterTag tag{};
  try {
    tag = parse_character_tag(tag_text);
  } catch (const FormatError& e) {
    bad(line_no, e.what());
  }

  std::vector<BigInt> coeffs(static_cast<std::size_t>(trunc) + 1, 0);
  std::vector<bool> seen(coeffs.size(), false);
  long long prev = -1;
  for (std::string line = next_content_line(in, line_no); !line.empty();
       line = next_content_line(in, line_no)) {
    std::istringstream ls(line);
    std::string n_text, c_text, rest;
    if (!(ls >> n_text >> c_text) || (ls >> rest)) bad(line_no, "expected '<n> <c(n)>'");
    long long n = 0;
    try {
      std::size_t used = 0;
      n = std::stoll(n_text, &used);
      if (used != n_text.size()) bad(line_no, "non-integer index");
    } catch (const std::logic_error&) {
      bad(line_no, "non-integer index");
    }
    if (n <= prev) bad(line_no, "indices must be strictly increasing");
    if (n > trunc) bad(line_no, "index beyond declared truncation");
    BigInt value;
    if (c_text.empty() || value.set_str(c_text, 10) != 0) {
      bad(line_no, "non-integer coefficient '" + c_text + "'");
    }
    coeffs[static_cast<std::size_t>(n)] = std::move(value);
    seen[static_cast<std::size_t>(n)] = true;
    prev = n;
  }
  const auto gaps = static_cast<std::size_t>(std::count(seen.begin() + 1, seen.end(), false));
  SeriesMeta meta{Weight{two_k}, level, tag};
  return {QSeries(meta, std::move(coeffs)), gaps};
}

ReadResult read_qexp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open q-expansion file " + path.string());
  return read_qexp(in);
}

void write_qexp(const QSeries& s, std::ostream& out) {
  const Weight w = s.weight();
  if (!w.is_half_integral()) {
    throw InvalidArgument("write_qexp: file format holds half-integral weights only");
  }
  out << "QEXP v1\n";
  out << "weight " << w.twice << "/2 level " << s.level() << " char " << to_string(s.character())
      << " trunc " << s.truncation() << '\n';
  for (std::size_t n = 0; n <= s.truncation(); ++n) out << n << ' ' << s.coeff(n).get_str() << '\n';
}

void write_qexp(const QSeries& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write q-expansion file " + path.string());
  write_qexp(s, out);
  if (!out) throw FormatError("write failed for " + path.string());
}

}  // namespace hiw
