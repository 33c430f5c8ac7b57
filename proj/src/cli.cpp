#include "hiw/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "hiw/compensated.hpp"
#include "hiw/forms.hpp"
#include "hiw/hecke.hpp"
#include "hiw/modarith.hpp"
#include "hiw/progsums.hpp"
#include "hiw/report_json.hpp"
#include "hiw/signstats.hpp"
#include "hiw/voronoi.hpp"
#include "hiw/windows.hpp"

namespace hiw {

namespace {

const std::vector<std::string> kCommands = {"form",  "sums",    "moments", "voronoi", "rearrange",
                                            "hecke", "shimura", "signs",   "survey",  "corollary"};

class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  [[nodiscard]] bool ok() const { return failures_.empty(); }
  [[nodiscard]] const std::vector<std::string>& failures() const { return failures_; }

 private:
  std::vector<std::string> failures_;
};

struct Context {
  const ExperimentConfig& cfg;
  Checks checks;
};

Window resolve_window(const ExperimentConfig& cfg) {
  return parse_window(cfg.window.value_or("standard"));
}

std::size_t needed_truncation(double x, const Window& w) {
  return static_cast<std::size_t>(std::ceil(x * w.hi()));
}

double max_x(const ExperimentConfig& cfg) { return *std::max_element(cfg.xs.begin(), cfg.xs.end()); }

bool is_builtin(const std::string& name) {
  const auto names = builtin_form_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

QSeries load_form(const ExperimentConfig& cfg, std::size_t needed) {
  if (is_builtin(cfg.form)) return builtin_form(cfg.form, std::max(cfg.truncation, needed));
  if (!std::filesystem::exists(cfg.form)) {
    throw ConfigError("form", "'" + cfg.form + "' is neither a built-in form nor an existing file");
  }
  QSeries f = read_qexp(std::filesystem::path(cfg.form)).series;
  if (f.truncation() < needed) {
    throw ConfigError("form", "file truncation " + std::to_string(f.truncation()) +
                                  " is below the required " + std::to_string(needed));
  }
  return f;
}

std::uint64_t choose_p(const ExperimentConfig& cfg, double x) {
  return cfg.p ? *cfg.p : prime_near_power(x, cfg.p_exp);
}

Json xs_json(const std::vector<double>& xs) { return Json(xs); }

Json config_json(const ExperimentConfig& cfg) {
  Json j;
  j["command"] = cfg.command;
  j["form"] = cfg.form;
  j["truncation"] = cfg.truncation;
  j["window"] = cfg.window ? Json(*cfg.window) : Json(nullptr);
  j["x"] = xs_json(cfg.xs);
  j["p"] = cfg.p ? Json(*cfg.p) : Json(nullptr);
  j["p_exp"] = cfg.p_exp;
  j["alpha"] = cfg.alpha ? Json(*cfg.alpha) : Json(nullptr);
  j["seed"] = cfg.seed;
  return j;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error("cannot open '" + path + "' for writing");
  file << content;
  if (!file) throw Error("write to '" + path + "' failed");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string gnuplot_path(const ExperimentConfig& cfg, std::size_t index) {
  return cfg.gnuplot + "_" + std::to_string(index) + ".dat";
}

// form ---------------------------------------------------------------------

Json cmd_form(Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (!is_builtin(cfg.form)) throw ConfigError("name", "unknown form '" + cfg.form + "'");
  const QSeries f = builtin_form(cfg.form, cfg.truncation);
  std::ostringstream text;
  write_qexp(f, text);
  if (!cfg.out.empty()) write_file(cfg.out, text.str());

  Json first = Json::array();
  for (std::size_t n = 0; n <= std::min<std::size_t>(f.truncation(), 10); ++n) {
    first.push_back(f.coeff(n).get_str());
  }
  Json rep = {{"name", cfg.form},
              {"meta", to_json(f.meta())},
              {"truncation", f.truncation()},
              {"nonzero_count", f.nonzero_count()},
              {"first_coefficients", std::move(first)},
              {"path", cfg.out}};
  if (cfg.check) {
    std::istringstream in(text.str());
    const ReadResult back = read_qexp(in);
    ctx.checks.expect(back.series == f, "qexp round trip changed the series");
    std::ostringstream again;
    write_qexp(back.series, again);
    ctx.checks.expect(again.str() == text.str(), "qexp rewrite is not byte-identical");
  }
  if (!cfg.gnuplot.empty()) {
    std::string data;
    const auto a = f.normalized();
    for (std::size_t n = 1; n <= f.truncation(); ++n) data += std::to_string(n) + " " + fmt(a[n]) + "\n";
    write_file(gnuplot_path(cfg, 0), data);
  }
  return rep;
}

// sums ---------------------------------------------------------------------

Json cmd_sums(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const std::uint64_t p = *cfg.p;
  const auto pi = static_cast<std::int64_t>(p);
  const PrimeCtx pctx(p, true);

  double max_diff = 0.0;
  std::size_t pairs = 0;
  Json single = nullptr;
  if (cfg.salie_u) {
    const cdouble d = salie_direct(*cfg.salie_u, *cfg.salie_v, p);
    const cdouble c = salie_closed(*cfg.salie_u, *cfg.salie_v, p);
    max_diff = std::abs(d - c);
    pairs = 1;
    single = {{"u", *cfg.salie_u}, {"v", *cfg.salie_v}, {"direct", complex_json(d)}, {"closed", complex_json(c)}};
  } else {
    for (std::int64_t u = 1; u < pi; ++u) {
      for (std::int64_t v = 1; v < pi; ++v) {
        max_diff = std::max(max_diff, std::abs(salie_direct(u, v, p) - salie_closed(u, v, p)));
        ++pairs;
      }
    }
  }

  int legendre_sum = 0;
  std::size_t sqrt_ok = 0;
  std::size_t residues = 0;
  for (std::int64_t r = 1; r < pi; ++r) {
    const int l = legendre(r, pctx);
    legendre_sum += l;
    if (l == 1) {
      ++residues;
      const std::uint64_t s = sqrt_mod(r, pctx);
      if (mul_mod(s, s, p) == static_cast<std::uint64_t>(r) && 2 * s <= p - 1) ++sqrt_ok;
    }
  }

  Json rep = {{"p", p},
              {"salie_pairs", pairs},
              {"salie_max_difference", max_diff},
              {"legendre_sum", legendre_sum},
              {"residues", residues},
              {"sqrt_roundtrips", sqrt_ok},
              {"smallest_nonresidue", pctx.smallest_nonresidue()}};
  if (!single.is_null()) rep["salie"] = single;

  if (!cfg.xs.empty()) {
    const Window w = resolve_window(cfg);
    const double alpha = cfg.alpha.value_or(0.25);
    const std::uint64_t cls = cfg.classes.empty() ? 1 : cfg.classes.front() % p;
    Json runs = Json::array();
    for (double x : cfg.xs) {
      const PowerSum ps = power_sum(alpha, x, p, cls, w);
      runs.push_back({{"x", x}, {"a", cls}, {"alpha", alpha}, {"value", ps.value}, {"ratio", ps.ratio}});
    }
    rep["power_sums"] = std::move(runs);
  }
  if (cfg.check) {
    ctx.checks.expect(max_diff < 1e-9, "closed and direct Salie sums differ by " + fmt(max_diff));
    ctx.checks.expect(legendre_sum == 0, "Legendre symbols do not sum to zero");
    ctx.checks.expect(residues == (p - 1) / 2, "wrong number of quadratic residues");
    ctx.checks.expect(sqrt_ok == residues, "sqrt_mod failed a round trip");
  }
  return rep;
}

// moments ------------------------------------------------------------------

Json cmd_moments(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const Window w = resolve_window(cfg);
  const QSeries f = load_form(cfg, needed_truncation(max_x(cfg), w));
  const CfEstimate est = estimate_cf(f, w, cfg.xs);
  const double cf = cfg.cf.value_or(est.estimates.back());

  Json runs = Json::array();
  std::string csv = "x,p,a,E\n";
  for (std::size_t i = 0; i < cfg.xs.size(); ++i) {
    const double x = cfg.xs[i];
    const std::uint64_t p = choose_p(cfg, x);
    const ProgressionReport rep = progression_e(f, w, x, p);
    const HolderReport holder = holder_abs_first_moment(rep);
    const MomentVerdict verdict = moment_verdict(rep, cf, w);
    runs.push_back({{"report", to_json(rep)}, {"holder", to_json(holder)}, {"verdict", to_json(verdict)}});

    std::string plot;
    for (std::size_t a = 0; a < p; ++a) {
      csv += fmt(x) + "," + std::to_string(p) + "," + std::to_string(a) + "," + fmt(rep.e_values[a]) + "\n";
      plot += std::to_string(a) + " " + fmt(rep.e_values[a]) + "\n";
    }
    if (!cfg.gnuplot.empty()) write_file(gnuplot_path(cfg, i), plot);

    if (cfg.check) {
      const double root = std::sqrt(x / static_cast<double>(p));
      CompensatedSum back;
      double scale = 1.0;
      for (double e : rep.e_values) {
        back.add(e * root);
        scale += std::abs(e) * root;
      }
      ctx.checks.expect(holder.holds, "Holder chain fails at x = " + fmt(x));
      ctx.checks.expect(std::abs(back.value() - rep.total_sum) <= 1e-9 * scale,
                        "class sums do not add up to the total at x = " + fmt(x));
    }
  }
  if (!cfg.csv.empty()) write_file(cfg.csv, csv);
  return {{"cf", cf}, {"cf_estimate", to_json(est)}, {"window", to_json(w)}, {"runs", std::move(runs)}};
}

// voronoi / rearrange ------------------------------------------------------

FrickePair make_pair(const ExperimentConfig& cfg, const Window& w) {
  if (cfg.form != "theta_delta") {
    throw ConfigError("form", "the dual side is only available for theta_delta");
  }
  return theta_delta_pair(std::max(cfg.truncation, needed_truncation(max_x(cfg), w)), cfg.dual_truncation);
}

Json cmd_voronoi(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const Window w = resolve_window(cfg);
  const FrickePair pair = make_pair(cfg, w);
  BKernel kernel(pair.ell, w);
  const double tol = cfg.tol > 0.0 ? cfg.tol : 1e-6;

  Json runs = Json::array();
  std::string plot;
  for (double x : cfg.xs) {
    const VoronoiReport rep = voronoi_check(pair, kernel, w, cfg.u, cfg.q, x);
    runs.push_back(to_json(rep));
    plot += fmt(x) + " " + fmt(rep.rel_residual) + "\n";
    if (cfg.check) {
      ctx.checks.expect(rep.rel_residual < tol, "relative residual " + fmt(rep.rel_residual) +
                                                    " at x = " + fmt(x) + " exceeds " + fmt(tol));
    }
  }
  if (!cfg.gnuplot.empty()) write_file(gnuplot_path(cfg, 0), plot);
  return {{"kappa", complex_json(pair.scalar)}, {"tolerance", tol}, {"runs", std::move(runs)}};
}

Json cmd_rearrange(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const Window w = resolve_window(cfg);
  const FrickePair pair = make_pair(cfg, w);
  BKernel kernel(pair.ell, w);
  const double tol = cfg.tol > 0.0 ? cfg.tol : 1e-4;

  Json runs = Json::array();
  std::string csv = "x,p,a,e_direct,e_salie,residual\n";
  for (double x : cfg.xs) {
    const std::uint64_t p = choose_p(cfg, x);
    std::vector<std::uint64_t> classes = cfg.classes;
    if (classes.empty()) {
      for (std::uint64_t a = 1; a < p && classes.size() < 20; ++a) classes.push_back(a);
    }
    for (std::uint64_t a : classes) {
      const RearrangeReport rep = rearranged_e_check(pair, kernel, w, x, p, a, cfg.thresholds.eta);
      runs.push_back(to_json(rep));
      csv += fmt(x) + "," + std::to_string(p) + "," + std::to_string(a) + "," + fmt(rep.e_direct) + "," +
             fmt(rep.e_salie) + "," + fmt(rep.residual) + "\n";
      if (cfg.check) {
        ctx.checks.expect(rep.residual < tol, "residual " + fmt(rep.residual) + " for a = " +
                                                  std::to_string(a) + " exceeds " + fmt(tol));
      }
    }
  }
  if (!cfg.csv.empty()) write_file(cfg.csv, csv);
  return {{"tolerance", tol}, {"runs", std::move(runs)}};
}

// hecke / shimura ----------------------------------------------------------

std::size_t hecke_truncation(std::uint64_t p_max) { return static_cast<std::size_t>(49 * p_max * p_max); }

Json cmd_hecke(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const std::uint64_t p_max = *std::max_element(cfg.primes.begin(), cfg.primes.end());
  const QSeries f = load_form(cfg, std::max(cfg.truncation, hecke_truncation(p_max)));
  Json runs = Json::array();
  std::string plot;
  for (std::uint64_t p : cfg.primes) {
    const HeckeResult res = extract_eigenvalue(f, p);
    runs.push_back(to_json(res));
    plot += std::to_string(p) + " " + fmt(res.lambda.get_d()) + "\n";
    if (cfg.check) ctx.checks.expect(res.is_eigen, "not a T_{p^2} eigenform at p = " + std::to_string(p));
  }
  if (!cfg.gnuplot.empty()) write_file(gnuplot_path(cfg, 0), plot);
  return {{"meta", to_json(f.meta())}, {"truncation", f.truncation()}, {"results", std::move(runs)}};
}

Json cmd_shimura(Context& ctx) {
  const auto& cfg = ctx.cfg;
  std::vector<std::uint64_t> primes;
  for (std::uint64_t p = 2; p <= cfg.n_max; ++p) {
    if (is_prime(p)) primes.push_back(p);
  }
  const std::uint64_t p_max = primes.empty() ? 2 : primes.back();
  const auto t = static_cast<std::size_t>(cfg.t);
  const QSeries f = load_form(cfg, std::max({cfg.truncation, hecke_truncation(p_max), t * cfg.n_max * cfg.n_max}));

  std::map<std::uint64_t, Rational> lambdas;
  Json eigen = Json::array();
  bool all_eigen = true;
  for (std::uint64_t p : primes) {
    const HeckeResult res = extract_eigenvalue(f, p);
    eigen.push_back(to_json(res));
    all_eigen = all_eigen && res.is_eigen;
    lambdas.emplace(p, res.lambda);
  }
  Json rep = {{"meta", to_json(f.meta())}, {"t", cfg.t}, {"n_max", cfg.n_max}, {"eigenvalues", std::move(eigen)}};
  if (!all_eigen) {
    rep["relation"] = nullptr;
    if (cfg.check) ctx.checks.expect(false, "form is not a Hecke eigenform on the requested primes");
    return rep;
  }
  const ShimuraCheck sc = shimura_relation_check(f, lambdas, cfg.t, cfg.n_max);
  rep["relation"] = to_json(sc);
  rep["deligne"] = to_json(deligne_ratio_report(f, cfg.t, cfg.n_max, &lambdas));
  if (!cfg.gnuplot.empty()) {
    std::string plot;
    for (std::size_t n = 1; n < sc.lhs.size(); ++n) plot += std::to_string(n) + " " + fmt(sc.lhs[n].get_d()) + "\n";
    write_file(gnuplot_path(cfg, 0), plot);
  }
  if (cfg.check) ctx.checks.expect(sc.max_residual == 0.0, "Shimura relation residual " + fmt(sc.max_residual));
  return rep;
}

// signs / survey / corollary -----------------------------------------------

std::size_t elmt2_trials(std::uint64_t seed, std::size_t trials, std::size_t& violations) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.3, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t applicable = 0;
  violations = 0;
  for (std::size_t k = 0; k < trials; ++k) {
    const std::size_t n = 5 + rng() % 60;
    std::vector<double> b(n), c(n);
    double sb = 0.0, sc = 0.0, v = 0.0;
    const double c_scale = unit(rng);
    for (std::size_t i = 0; i < n; ++i) {
      b[i] = gauss(rng);
      c[i] = c_scale * unit(rng);
      sb += b[i];
      sc += c[i];
      v += b[i] * b[i];
    }
    if (sc > sb || v <= 0.0) continue;
    ++applicable;
    const double m = sc + unit(rng) * (sb - sc);
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) count += b[i] > c[i] ? 1 : 0;
    if (static_cast<double>(count) < elmt2_bound(m, v, sc)) ++violations;
  }
  return applicable;
}

Json cmd_signs(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const double x = cfg.xs.front();
  const bool smooth = cfg.window.has_value();
  const Window w = resolve_window(cfg);
  const QSeries f = load_form(cfg, static_cast<std::size_t>(std::floor(x)));
  const double alpha = cfg.alpha.value_or(0.25);
  const std::uint64_t q = cfg.p.value_or(1);
  const auto a = f.normalized();

  const SignCountReport plus = sign_counts(a, x, alpha, q, smooth ? &w : nullptr);
  std::vector<double> b;
  b.reserve(static_cast<std::size_t>(x));
  for (std::size_t n = 1; n <= static_cast<std::size_t>(std::floor(x)); ++n) {
    b.push_back(smooth ? a[n] * w(static_cast<double>(n) / x) : a[n]);
  }
  const SignBalance bal = sign_balance(b);
  std::size_t t_plus = 0, t_minus = 0;
  for (std::size_t c = 0; c < q; ++c) {
    t_plus += plus.per_class_plus[c];
    t_minus += plus.per_class_minus[c];
  }
  Json rep = {{"counts", to_json(plus)}, {"t_plus", t_plus}, {"t_minus", t_minus}, {"balance", to_json(bal)}};

  std::string csv = "a,T+,T-\n";
  std::string plot;
  for (std::size_t c = 0; c < q; ++c) {
    csv += std::to_string(c) + "," + std::to_string(plus.per_class_plus[c]) + "," +
           std::to_string(plus.per_class_minus[c]) + "\n";
    plot += std::to_string(c) + " " + std::to_string(plus.per_class_plus[c]) + "\n";
  }
  if (!cfg.csv.empty()) write_file(cfg.csv, csv);
  if (!cfg.gnuplot.empty()) write_file(gnuplot_path(cfg, 0), plot);

  if (cfg.check) {
    std::vector<double> neg(a.begin(), a.end());
    for (double& v : neg) v = -v;
    const SignCountReport minus = sign_counts(neg, x, alpha, q, smooth ? &w : nullptr);
    ctx.checks.expect(minus.per_class_plus == plus.per_class_minus && minus.per_class_minus == plus.per_class_plus,
                      "T+ and T- do not swap under f -> -f");
    const double tol = 1e-12 * std::max(1.0, bal.total_abs);
    ctx.checks.expect(std::abs(bal.sum_plus + bal.sum_minus - bal.total_abs) <= tol, "sum+ + sum- != sum |b|");
    ctx.checks.expect(std::abs(bal.sum_plus - bal.sum_minus - bal.total) <= tol, "sum+ - sum- != sum b");
    std::size_t violations = 0;
    const std::size_t applicable = elmt2_trials(cfg.seed, 1000, violations);
    rep["elmt2_trials"] = {{"seed", cfg.seed}, {"applicable", applicable}, {"violations", violations}};
    ctx.checks.expect(violations == 0, "counting lemma bound violated on a random instance");
  }
  return rep;
}

double resolve_cf(const ExperimentConfig& cfg, const QSeries& f, const Window& w, double x) {
  if (cfg.cf) return *cfg.cf;
  return estimate_cf(f, w, {x}).estimates.back();
}

SurveyThresholds resolve_thresholds(const ExperimentConfig& cfg, double cf, const Window& w) {
  SurveyThresholds th = default_survey_thresholds(cf, w, cfg.thresholds.r);
  if (cfg.thresholds.m1) th.m1 = *cfg.thresholds.m1;
  if (cfg.thresholds.m2) th.m2 = *cfg.thresholds.m2;
  return th;
}

Json cmd_survey(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const double x = cfg.xs.front();
  const Window w = resolve_window(cfg);
  const QSeries f = load_form(cfg, needed_truncation(x, w));
  const std::uint64_t p = choose_p(cfg, x);
  const double cf = resolve_cf(cfg, f, w, x);
  const double m = cfg.thresholds.m.value_or(0.1 * cf);
  const auto a = f.normalized();
  const double root = std::sqrt(x / static_cast<double>(p));

  const MarkovCount markov = markov_class_count(a, w, x, p, m);
  Json rep = {{"mode", cfg.mode}, {"cf", cf}, {"markov", to_json(markov)}};
  if (cfg.check) ctx.checks.expect(markov.ratio <= 1.0, "Markov count exceeds its bound");

  std::string csv = "a,E,T+,T-,inA,inB\n";
  std::string plot;
  if (cfg.mode == "plain") {
    const SurveyThresholds th = resolve_thresholds(cfg, cf, w);
    const SurveyVerdict v = class_survey(a, w, x, p, cfg.alpha.value_or(0.23), th);
    rep["verdict"] = to_json(v);
    for (std::size_t c = 0; c < p; ++c) {
      const auto& row = v.classes[c];
      csv += std::to_string(c) + "," + fmt(row.e) + "," + std::to_string(row.t_plus) + "," +
             std::to_string(row.t_minus) + "," + (row.conditions ? "1" : "0") + ",\n";
      plot += std::to_string(c) + " " + fmt(row.e) + "\n";
      if (cfg.check && row.t_plus >= 1) {
        ctx.checks.expect(count_t(a, x, v.alpha, c, p, +1, &w) == row.t_plus,
                          "T+ recount disagrees for class " + std::to_string(c));
      }
    }
  } else {
    const EigenSurveyReport r =
        eigen_survey(a, w, x, p, cfg.alpha.value_or(1.0 / 7.0), m, cfg.thresholds.delta);
    rep["report"] = to_json(r);
    for (std::size_t c = 0; c < p; ++c) {
      const auto& row = r.classes[c];
      csv += std::to_string(c) + "," + fmt(row.s1 / root) + "," + std::to_string(row.t_plus) + "," +
             std::to_string(row.t_minus) + "," + (row.in_a ? "1" : "0") + "," + (row.in_b ? "1" : "0") + "\n";
      plot += std::to_string(c) + " " + fmt(row.s1 / root) + "\n";
    }
    if (cfg.check) ctx.checks.expect(r.holder_all, "Holder bound fails on a class of A");
  }
  if (!cfg.csv.empty()) write_file(cfg.csv, csv);
  if (!cfg.gnuplot.empty()) write_file(gnuplot_path(cfg, 0), plot);
  return rep;
}

Json cmd_corollary(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const double x = cfg.xs.front();
  const Window w = resolve_window(cfg);
  const QSeries f = load_form(cfg, needed_truncation(x, w));
  const double cf = resolve_cf(cfg, f, w, x);
  const SurveyThresholds th = resolve_thresholds(cfg, cf, w);
  const CorollaryResult res = corollary_count(f.normalized(), w, x, cfg.thresholds.epsilon, th);
  if (cfg.check) ctx.checks.expect(res.count >= res.classes_hit, "count below the number of classes hit");
  return {{"cf", cf}, {"thresholds", to_json(th)}, {"result", to_json(res)}};
}

// validation ---------------------------------------------------------------

void require_xs(const ExperimentConfig& cfg) {
  if (cfg.xs.empty()) throw ConfigError("x", "at least one value is required");
  for (double x : cfg.xs) {
    if (!(x >= 2.0) || !std::isfinite(x)) throw ConfigError("x", "values must be finite and >= 2, got " + fmt(x));
  }
}

void require_odd_prime(const std::string& field, std::uint64_t p) {
  if (p < 3 || !is_prime(p)) throw ConfigError(field, std::to_string(p) + " is not an odd prime");
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
  if (std::find(kCommands.begin(), kCommands.end(), cfg.command) == kCommands.end()) {
    throw ConfigError("command", "unknown subcommand '" + cfg.command + "'");
  }
  if (cfg.window) {
    try {
      (void)parse_window(*cfg.window);
    } catch (const InvalidArgument& e) {
      throw ConfigError("window", e.what());
    }
  }
  if (!(cfg.p_exp > 0.0 && cfg.p_exp < 1.0)) throw ConfigError("p-exp", "must lie in (0, 1)");
  if (cfg.p && cfg.command != "signs") require_odd_prime("p", *cfg.p);
  if (cfg.p && cfg.command == "signs" && *cfg.p == 0) throw ConfigError("p", "modulus must be positive");
  if (cfg.alpha && !(*cfg.alpha > 0.0)) throw ConfigError("alpha", "must be positive");
  const auto& th = cfg.thresholds;
  if (!(th.r > 0.0 && th.r < 1.0 / 48.0)) throw ConfigError("r", "must lie in (0, 1/48)");
  if (!(th.delta > 0.0)) throw ConfigError("delta", "must be positive");
  if (!(th.eta > 0.0 && th.eta < 1.0)) throw ConfigError("eta", "must lie in (0, 1)");
  if (th.m && !(*th.m > 0.0)) throw ConfigError("m", "must be positive");
  if (cfg.cf && !(*cfg.cf > 0.0)) throw ConfigError("cf", "must be positive");

  const std::string& c = cfg.command;
  if (c == "form") {
    if (cfg.truncation == 0) throw ConfigError("trunc", "a positive truncation is required");
    if (cfg.out.empty()) throw ConfigError("out", "an output path for the q-expansion is required");
  } else if (c == "sums") {
    if (!cfg.p) throw ConfigError("p", "a prime is required");
    if (!cfg.salie_u && *cfg.p > 400) throw ConfigError("p", "all-pairs Salie check is limited to p <= 400; pass --u/--v");
    if (cfg.salie_u.has_value() != cfg.salie_v.has_value()) throw ConfigError("v", "--u and --v go together");
    if (!cfg.xs.empty()) require_xs(cfg);
    if (cfg.alpha && !(*cfg.alpha < 0.5)) throw ConfigError("alpha", "must lie in (0, 1/2)");
  } else if (c == "moments" || c == "voronoi" || c == "rearrange") {
    require_xs(cfg);
    if (c == "voronoi") {
      if (cfg.q < 1) throw ConfigError("q", "must be positive");
      if (std::gcd(cfg.q, std::uint64_t{4}) != 1) throw ConfigError("q", "must be coprime to 4N = 4");
      if (std::gcd(reduce_mod(cfg.u, cfg.q), cfg.q) != 1 && cfg.q != 1) {
        throw ConfigError("u", "must be coprime to q");
      }
    }
    if (c != "moments" && cfg.dual_truncation < 100) throw ConfigError("dual-trunc", "must be at least 100");
  } else if (c == "hecke") {
    if (cfg.primes.empty()) throw ConfigError("p", "at least one prime is required");
    for (std::uint64_t p : cfg.primes) {
      if (!is_prime(p)) throw ConfigError("p", std::to_string(p) + " is not prime");
      if (p > 1000) throw ConfigError("p", "primes above 1000 need an impractical truncation");
    }
  } else if (c == "shimura") {
    if (cfg.t < 1 || squarefree_decomposition(cfg.t).second != 1) {
      throw ConfigError("t", "must be a positive squarefree integer");
    }
    if (cfg.n_max < 1 || cfg.n_max > 200) throw ConfigError("nmax", "must lie in [1, 200]");
  } else if (c == "signs") {
    require_xs(cfg);
  } else if (c == "survey") {
    require_xs(cfg);
    if (cfg.mode == "plain") {
      if (cfg.alpha && !(*cfg.alpha > 3.0 / 14.0 && *cfg.alpha <= 0.25)) {
        throw ConfigError("alpha", "must lie in (3/14, 1/4] for the plain survey, got " + fmt(*cfg.alpha));
      }
    } else if (cfg.mode == "eigen") {
      if (cfg.alpha && !(*cfg.alpha > 0.125 && *cfg.alpha <= 1.0 / 7.0)) {
        throw ConfigError("alpha", "must lie in (1/8, 1/7] for the eigen survey, got " + fmt(*cfg.alpha));
      }
    } else {
      throw ConfigError("mode", "must be 'plain' or 'eigen'");
    }
  } else if (c == "corollary") {
    require_xs(cfg);
    if (!(th.epsilon > 0.0 && th.epsilon < 1.0 / 28.0)) throw ConfigError("epsilon", "must lie in (0, 1/28)");
  }
}

int run(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  validate(cfg);
  Context ctx{cfg, {}};
  Json body;
  const std::string& c = cfg.command;
  if (c == "form") body = cmd_form(ctx);
  else if (c == "sums") body = cmd_sums(ctx);
  else if (c == "moments") body = cmd_moments(ctx);
  else if (c == "voronoi") body = cmd_voronoi(ctx);
  else if (c == "rearrange") body = cmd_rearrange(ctx);
  else if (c == "hecke") body = cmd_hecke(ctx);
  else if (c == "shimura") body = cmd_shimura(ctx);
  else if (c == "signs") body = cmd_signs(ctx);
  else if (c == "survey") body = cmd_survey(ctx);
  else body = cmd_corollary(ctx);

  Json doc = {{"config", config_json(cfg)}, {"report", std::move(body)}};
  if (cfg.check) doc["check"] = {{"passed", ctx.checks.ok()}, {"failures", ctx.checks.failures()}};
  // form writes the q-expansion to --out; its summary goes to the stream.
  if (cfg.out.empty() || c == "form") {
    out << dump(doc);
  } else {
    write_file(cfg.out, dump(doc));
  }
  for (const auto& f : ctx.checks.failures()) err << "check failed: " << f << "\n";
  return ctx.checks.ok() ? kExitOk : kExitCheck;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  CLI::App app{"Experiments on sign changes of half-integral weight coefficients in progressions"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", "hiw 0.1.0");

  auto common = [&](CLI::App* sub, bool with_x) {
    sub->add_option("--form", cfg.form, "built-in form name or .qexp path")->capture_default_str();
    sub->add_option("--trunc", cfg.truncation, "truncation X (default: derived from x)");
    sub->add_option("--window", cfg.window, "smoothing window: standard | a,b");
    if (with_x) sub->add_option("--x", cfg.xs, "x values (repeat or comma separated)")->delimiter(',');
    sub->add_option("--out", cfg.out, "JSON report path (default: stdout)");
    sub->add_option("--csv", cfg.csv, "CSV table path");
    sub->add_option("--gnuplot", cfg.gnuplot, "prefix for two-column .dat files");
    sub->add_option("--seed", cfg.seed, "seed for randomized checks")->capture_default_str();
    sub->add_flag("--check", cfg.check, "exit 3 when a module assertion fails");
  };
  auto p_rule = [&](CLI::App* sub) {
    sub->add_option("--p", cfg.p, "explicit prime p");
    sub->add_option("--p-exp", cfg.p_exp, "p = nearest prime to x^e")->capture_default_str();
  };

  auto* form = app.add_subcommand("form", "build a built-in form and write its q-expansion");
  form->add_option("--name", cfg.form, "form name")->required();
  form->add_option("--trunc", cfg.truncation, "truncation X")->required();
  form->add_option("--out", cfg.out, "q-expansion output path")->required();
  form->add_option("--gnuplot", cfg.gnuplot, "prefix for a (n, a(n)) data file");
  form->add_flag("--check", cfg.check, "verify the file round trip");

  auto* sums = app.add_subcommand("sums", "Salie sums, square roots and power sums mod p");
  sums->add_option("--p", cfg.p, "odd prime")->required();
  sums->add_option("--u", cfg.salie_u, "first Salie argument");
  sums->add_option("--v", cfg.salie_v, "second Salie argument");
  sums->add_option("--x", cfg.xs, "x values for power sums")->delimiter(',');
  sums->add_option("--alpha", cfg.alpha, "power-sum exponent in (0, 1/2)");
  sums->add_option("--a", cfg.classes, "residue class for power sums");
  sums->add_option("--window", cfg.window, "smoothing window");
  sums->add_option("--out", cfg.out, "JSON report path");
  sums->add_flag("--check", cfg.check, "exit 3 when an identity fails");

  auto* moments = app.add_subcommand("moments", "progression sums E(x,p,a) and their moments");
  common(moments, true);
  p_rule(moments);
  moments->add_option("--cf", cfg.cf, "c_f (default: estimated at the largest x)");

  auto* voronoi = app.add_subcommand("voronoi", "numerical check of the Voronoi formula");
  common(voronoi, true);
  voronoi->add_option("--q", cfg.q, "modulus")->capture_default_str();
  voronoi->add_option("--u", cfg.u, "twist numerator")->capture_default_str();
  voronoi->add_option("--dual-trunc", cfg.dual_truncation, "truncation of the dual form")->capture_default_str();
  voronoi->add_option("--tol", cfg.tol, "relative residual tolerance for --check (default 1e-6)");

  auto* rearrange = app.add_subcommand("rearrange", "E(x,p,a) against its Salie-sum expansion");
  common(rearrange, true);
  p_rule(rearrange);
  rearrange->add_option("--a", cfg.classes, "classes (default: 1..20)")->delimiter(',');
  rearrange->add_option("--eta", cfg.thresholds.eta, "cut exponent eta")->capture_default_str();
  rearrange->add_option("--dual-trunc", cfg.dual_truncation, "truncation of the dual form")->capture_default_str();
  rearrange->add_option("--tol", cfg.tol, "absolute residual tolerance for --check (default 1e-4)");

  auto* hecke = app.add_subcommand("hecke", "T_{p^2} eigenvalues");
  common(hecke, false);
  hecke->add_option("--p", cfg.primes, "primes")->required()->delimiter(',');

  auto* shimura = app.add_subcommand("shimura", "exact check of the Shimura coefficient relation");
  common(shimura, false);
  shimura->add_option("--t", cfg.t, "squarefree t")->capture_default_str();
  shimura->add_option("--nmax", cfg.n_max, "largest n")->capture_default_str();

  auto* signs = app.add_subcommand("signs", "sign counts T+ and T- per class");
  common(signs, true);
  signs->add_option("--alpha", cfg.alpha, "threshold exponent (default 1/4)");
  signs->add_option("--p", cfg.p, "modulus (default 1)");

  auto* survey = app.add_subcommand("survey", "class survey (plain) or A/B classification (eigen)");
  common(survey, true);
  p_rule(survey);
  survey->add_option("--mode", cfg.mode, "plain | eigen")->capture_default_str();
  survey->add_option("--alpha", cfg.alpha, "alpha (plain: (3/14,1/4], default 0.23; eigen: (1/8,1/7], default 1/7)");
  survey->add_option("--r", cfg.thresholds.r, "target proportion r < 1/48")->capture_default_str();
  survey->add_option("--m", cfg.thresholds.m, "second moment floor m (default 0.1 c_f)");
  survey->add_option("--m1", cfg.thresholds.m1, "lower bound for E");
  survey->add_option("--m2", cfg.thresholds.m2, "upper bound for the class second moment");
  survey->add_option("--delta", cfg.thresholds.delta, "delta")->capture_default_str();
  survey->add_option("--cf", cfg.cf, "c_f (default: estimated at x)");

  auto* corollary = app.add_subcommand("corollary", "T+(x; 3/14 + eps) against r x^{4/7 - 2 eps}");
  common(corollary, true);
  corollary->add_option("--epsilon", cfg.thresholds.epsilon, "epsilon in (0, 1/28)")->capture_default_str();
  corollary->add_option("--r", cfg.thresholds.r, "target proportion r < 1/48")->capture_default_str();
  corollary->add_option("--m1", cfg.thresholds.m1, "lower bound for E");
  corollary->add_option("--m2", cfg.thresholds.m2, "upper bound for the class second moment");
  corollary->add_option("--cf", cfg.cf, "c_f (default: estimated at x)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << "hiw 0.1.0\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    return run(cfg, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace hiw
