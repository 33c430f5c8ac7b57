#pragma once

#include <doctest.h>

#include <vector>

#include "hiw/progsums.hpp"
#include "hiw/qseries.hpp"

namespace testing {

inline hiw::BigInt big(long v) { return hiw::BigInt(v); }

inline hiw::QSeries series(std::vector<long> c, int twice = 25, std::int64_t level = 4) {
  std::vector<hiw::BigInt> coeffs;
  coeffs.reserve(c.size());
  for (long v : c) coeffs.emplace_back(v);
  return hiw::QSeries({{twice}, level, hiw::CharacterTag::trivial}, std::move(coeffs));
}

/// progression_e plus the unconditional Holder chain, asserted on every report.
template <class... Args>
hiw::ProgressionReport checked_progression(Args&&... args) {
  hiw::ProgressionReport r = hiw::progression_e(std::forward<Args>(args)...);
  const hiw::HolderReport h = hiw::holder_abs_first_moment(r);
  CHECK_MESSAGE(h.holds, "Holder chain, gap = ", h.gap);
  return r;
}

}  // namespace testing
