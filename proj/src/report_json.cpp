#include "hiw/report_json.hpp"

#include <cmath>

namespace hiw {

namespace {

// JSON has no infinities or NaNs; they become null.
Json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

Json complex_json(cdouble z) { return Json::array({num(z.real()), num(z.imag())}); }

std::string rational_string(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  if (c.get_den() == 1) return c.get_num().get_str();
  return c.get_str();
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json to_json(const Window& w) {
  return {{"spec", w.describe()}, {"lo", w.lo()}, {"hi", w.hi()}, {"l2_norm_sq", w.l2_norm_sq()}};
}

Json to_json(const SeriesMeta& meta) {
  return {{"twice_weight", meta.weight.twice},
          {"level", meta.level},
          {"character", std::string(to_string(meta.character))}};
}

Json to_json(const ProgressionReport& r) {
  Json e = Json::array();
  for (double v : r.e_values) e.push_back(num(v));
  return {{"x", r.x},
          {"p", r.p},
          {"level_n", r.level_n},
          {"mu_plus", r.mu_plus},
          {"mu_minus", r.mu_minus},
          {"m2", num(r.m2)},
          {"m4_plus", num(r.m4_plus)},
          {"m4_minus", num(r.m4_minus)},
          {"m4", num(r.m4())},
          {"abs_m1", num(r.abs_m1)},
          {"total_sum", num(r.total_sum)},
          {"class0_sum", num(r.class0_sum)},
          {"e_values", std::move(e)}};
}

Json to_json(const CfEstimate& r) {
  return {{"xs", r.xs},
          {"estimates", r.estimates},
          {"extrapolated", num(r.extrapolated)},
          {"log_slope", num(r.log_slope)},
          {"convergent", r.convergent}};
}

Json to_json(const DecayReport& r) {
  Json pts = Json::array();
  for (const auto& p : r.points) pts.push_back({{"x", p.x}, {"abs_sum", num(p.abs_sum)}});
  return {{"points", std::move(pts)}, {"slope", num(r.slope)}};
}

Json to_json(const MomentVerdict& r) {
  return {{"m2_ratio", num(r.m2_ratio)},
          {"m4_plus_ratio", num(r.m4_plus_ratio)},
          {"m4_minus_ratio", num(r.m4_minus_ratio)},
          {"in_range", r.in_range},
          {"m2_pass", r.m2_pass},
          {"m4_pass", r.m4_pass}};
}

Json to_json(const HolderReport& r) {
  return {{"abs_m1", num(r.abs_m1)},
          {"lower_bound", num(r.lower_bound)},
          {"gap", num(r.gap)},
          {"holds", r.holds}};
}

Json to_json(const VoronoiReport& r) {
  return {{"q", r.q},
          {"u", r.u},
          {"x", r.x},
          {"m_max", r.m_max},
          {"m_needed", r.m_needed},
          {"truncation_limited", r.truncation_limited},
          {"lhs", complex_json(r.lhs)},
          {"rhs", complex_json(r.rhs)},
          {"abs_residual", num(r.abs_residual)},
          {"rel_residual", num(r.rel_residual)}};
}

Json to_json(const RearrangeReport& r) {
  return {{"x", r.x},
          {"p", r.p},
          {"a", r.a},
          {"eta", r.eta},
          {"y_param", r.y_param},
          {"m_cut", r.m_cut},
          {"m_max", r.m_max},
          {"truncation_limited", r.truncation_limited},
          {"e_direct", num(r.e_direct)},
          {"main_term", num(r.main_term)},
          {"remainder", num(r.remainder)},
          {"zero_class_term", num(r.zero_class_term)},
          {"degenerate_terms", r.degenerate_terms},
          {"e_salie", num(r.e_salie)},
          {"residual", num(r.residual)},
          {"residual_main_only", num(r.residual_main_only)}};
}

Json to_json(const HeckeResult& r) {
  return {{"p", r.p},
          {"lambda", rational_string(r.lambda)},
          {"residual", num(r.residual)},
          {"is_eigen", r.is_eigen},
          {"probes", r.probes},
          {"level_prime", r.level_prime}};
}

Json to_json(const ShimuraCheck& r) {
  Json rows = Json::array();
  for (std::size_t n = 1; n < r.lhs.size(); ++n) {
    rows.push_back({{"n", n}, {"lhs", rational_string(r.lhs[n])}, {"rhs", rational_string(r.rhs[n])}});
  }
  return {{"max_residual", num(r.max_residual)}, {"checked", r.checked}, {"rows", std::move(rows)}};
}

Json to_json(const DeligneReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json j = {{"n", row.n}, {"ratio", num(row.ratio)}};
    j["predicted"] = row.predicted ? num(*row.predicted) : Json(nullptr);
    rows.push_back(std::move(j));
  }
  return {{"degenerate", r.degenerate},
          {"exponent", num(r.exponent)},
          {"exceeds_epsilon", r.exceeds_epsilon},
          {"rows", std::move(rows)}};
}

Json to_json(const MomentFit& r) {
  return {{"xs", r.xs}, {"sums", r.sums}, {"exponent", num(r.exponent)}};
}

Json to_json(const BoundReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"x", row.x}, {"max_ratio", num(row.max_ratio)}, {"argmax", row.argmax}});
  }
  return {{"rows", std::move(rows)}, {"growth_slope", num(r.growth_slope)}};
}

Json to_json(const SignCountReport& r) {
  return {{"x", r.x},
          {"q", r.q},
          {"alpha", r.alpha},
          {"smooth", r.smooth},
          {"per_class_plus", r.per_class_plus},
          {"per_class_minus", r.per_class_minus}};
}

Json to_json(const SignBalance& r) {
  return {{"sum_plus", num(r.sum_plus)},
          {"sum_minus", num(r.sum_minus)},
          {"total_abs", num(r.total_abs)},
          {"total", num(r.total)}};
}

Json to_json(const SurveyThresholds& r) { return {{"r", r.r}, {"m1", r.m1}, {"m2", r.m2}}; }

Json to_json(const SurveyVerdict& r) {
  return {{"x", r.x},
          {"p", r.p},
          {"alpha", r.alpha},
          {"threshold_r", r.threshold_r},
          {"m1", r.m1},
          {"m2", r.m2},
          {"p_exponent_window", {r.p_exponent_window.first, r.p_exponent_window.second}},
          {"p_exponent", r.p_exponent},
          {"out_of_range", r.out_of_range},
          {"fraction_classes_hit", r.fraction_classes_hit},
          {"fraction_conditions", r.fraction_conditions},
          {"fraction_both", r.fraction_both},
          {"pass", r.pass}};
}

Json to_json(const EigenSurveyReport& r) {
  return {{"x", r.x},
          {"p", r.p},
          {"alpha", r.alpha},
          {"m", r.m},
          {"delta", r.delta},
          {"out_of_range", r.out_of_range},
          {"count_a", r.count_a},
          {"count_b", r.count_b},
          {"count_a_not_b", r.count_a_not_b},
          {"count_min_above_target", r.count_min_above_target},
          {"min_target", r.min_target},
          {"a_size_reference", r.a_size_reference},
          {"holder_all", r.holder_all}};
}

Json to_json(const MarkovCount& r) {
  return {{"count", r.count}, {"bound", num(r.bound)}, {"ratio", num(r.ratio)}};
}

Json to_json(const CorollaryResult& r) {
  return {{"x", r.x},
          {"epsilon", r.epsilon},
          {"alpha", r.alpha},
          {"p", r.p},
          {"count", r.count},
          {"count_minus", r.count_minus},
          {"target", r.target},
          {"classes_hit", r.classes_hit},
          {"pass", r.pass}};
}

}  // namespace hiw
