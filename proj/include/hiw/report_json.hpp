#pragma once

#include <json.hpp>

#include "hiw/hecke.hpp"
#include "hiw/progsums.hpp"
#include "hiw/qseries.hpp"
#include "hiw/signstats.hpp"
#include "hiw/voronoi.hpp"

namespace hiw {

/// Reports keep their field order, so the same run always dumps the same bytes.
using Json = nlohmann::ordered_json;

Json to_json(const Window& w);
Json to_json(const SeriesMeta& meta);
Json to_json(const ProgressionReport& r);
Json to_json(const CfEstimate& r);
Json to_json(const DecayReport& r);
Json to_json(const MomentVerdict& r);
Json to_json(const HolderReport& r);
Json to_json(const VoronoiReport& r);
Json to_json(const RearrangeReport& r);
Json to_json(const HeckeResult& r);
Json to_json(const ShimuraCheck& r);
Json to_json(const DeligneReport& r);
Json to_json(const MomentFit& r);
Json to_json(const BoundReport& r);
Json to_json(const SignCountReport& r);
Json to_json(const SignBalance& r);
Json to_json(const SurveyThresholds& r);
Json to_json(const SurveyVerdict& r);
Json to_json(const EigenSurveyReport& r);
Json to_json(const MarkovCount& r);
Json to_json(const CorollaryResult& r);

Json complex_json(cdouble z);
/// Integers print as "n", other rationals as "n/d".
std::string rational_string(const Rational& q);

/// Two-space indented dump terminated by a newline.
std::string dump(const Json& j);

}  // namespace hiw
