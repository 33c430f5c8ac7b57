#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "hiw/cli.hpp"
#include "hiw/error.hpp"
#include "hiw/forms.hpp"
#include "hiw/hecke.hpp"
#include "hiw/modarith.hpp"
#include "hiw/progsums.hpp"
#include "hiw/qseries.hpp"
#include "hiw/report_json.hpp"
#include "hiw/signstats.hpp"
#include "hiw/voronoi.hpp"
#include "hiw/windows.hpp"

namespace py = pybind11;

namespace {

py::object to_python(const hiw::Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

py::object big_to_python(const hiw::BigInt& v) { return py::int_(py::str(v.get_str())); }

py::object rational_to_python(const hiw::Rational& q) {
  return py::module_::import("fractions").attr("Fraction")(big_to_python(q.get_num()),
                                                           big_to_python(q.get_den()));
}

hiw::Window window_of(const std::string& spec) { return hiw::parse_window(spec); }

hiw::QSeries series_from(const std::vector<py::int_>& coeffs, int twice_weight, std::int64_t level,
                         const std::string& character) {
  if (coeffs.empty()) throw hiw::InvalidArgument("Series: need at least the constant coefficient");
  std::vector<hiw::BigInt> c;
  c.reserve(coeffs.size());
  for (const auto& v : coeffs) c.emplace_back(py::str(v).cast<std::string>());
  return hiw::QSeries({{twice_weight}, level, hiw::parse_character_tag(character)}, std::move(c));
}

py::array_t<double> normalized_array(const hiw::QSeries& s) {
  const auto a = s.normalized();
  return py::array_t<double>(static_cast<py::ssize_t>(a.size()), a.data());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Half-integral weight coefficient experiments";

  // Translators run newest first, so the base class goes in first.
  py::register_exception<hiw::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<hiw::InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

  py::class_<hiw::QSeries>(m, "Series")
      .def(py::init(&series_from), py::arg("coeffs"), py::arg("twice_weight"), py::arg("level"),
           py::arg("character") = "trivial")
      .def_property_readonly("truncation", &hiw::QSeries::truncation)
      .def_property_readonly("twice_weight", [](const hiw::QSeries& s) { return s.weight().twice; })
      .def_property_readonly("level", &hiw::QSeries::level)
      .def_property_readonly("character", [](const hiw::QSeries& s) { return std::string(to_string(s.character())); })
      .def("coeff", [](const hiw::QSeries& s, std::size_t n) { return big_to_python(s.coeff(n)); }, py::arg("n"))
      .def("coeffs", [](const hiw::QSeries& s) {
        py::list out;
        for (const auto& c : s.coeffs()) out.append(big_to_python(c));
        return out;
      })
      .def("normalized", &normalized_array, "a(n) = c(n) / n^{(k-1)/2} with a(0) = 0")
      .def("nonzero_count", &hiw::QSeries::nonzero_count)
      .def("truncated", &hiw::QSeries::truncated, py::arg("x"))
      .def("write", [](const hiw::QSeries& s, const std::string& path) { hiw::write_qexp(s, std::filesystem::path(path)); },
           py::arg("path"))
      .def("__eq__", [](const hiw::QSeries& a, const hiw::QSeries& b) { return a == b; })
      .def("__len__", [](const hiw::QSeries& s) { return s.truncation() + 1; })
      .def("__repr__", [](const hiw::QSeries& s) {
        std::ostringstream os;
        os << "Series(weight=" << s.weight().twice << "/2, level=" << s.level() << ", trunc=" << s.truncation() << ")";
        return os.str();
      });

  m.def("builtin_form", &hiw::builtin_form, py::arg("name"), py::arg("truncation"));
  m.def("builtin_form_names", &hiw::builtin_form_names);
  m.def("read_qexp", [](const std::string& path) { return hiw::read_qexp(std::filesystem::path(path)).series; },
        py::arg("path"));

  m.def("legendre", py::overload_cast<std::int64_t, std::uint64_t>(&hiw::legendre), py::arg("a"), py::arg("p"));
  m.def("sqrt_mod", [](std::int64_t x, std::uint64_t p) { return hiw::sqrt_mod(x, hiw::PrimeCtx(p)); },
        py::arg("x"), py::arg("p"));
  m.def("salie_direct", &hiw::salie_direct, py::arg("u"), py::arg("v"), py::arg("p"));
  m.def("salie_closed", &hiw::salie_closed, py::arg("u"), py::arg("v"), py::arg("p"));

  m.def(
      "progression_e",
      [](const hiw::QSeries& f, double x, std::uint64_t p, const std::string& window) {
        return to_python(hiw::to_json(hiw::progression_e(f, window_of(window), x, p)));
      },
      py::arg("form"), py::arg("x"), py::arg("p"), py::arg("window") = "standard");
  m.def(
      "estimate_cf",
      [](const hiw::QSeries& f, const std::vector<double>& xs, const std::string& window) {
        return to_python(hiw::to_json(hiw::estimate_cf(f, window_of(window), xs)));
      },
      py::arg("form"), py::arg("xs"), py::arg("window") = "standard");

  m.def(
      "voronoi_check",
      [](std::int64_t u, std::uint64_t q, double x, std::size_t dual_truncation) {
        const hiw::Window w = hiw::Window::standard_bump();
        const hiw::FrickePair pair = hiw::theta_delta_pair(static_cast<std::size_t>(x), dual_truncation);
        hiw::BKernel kernel(pair.ell, w);
        return to_python(hiw::to_json(hiw::voronoi_check(pair, kernel, w, u, q, x, dual_truncation)));
      },
      py::arg("u"), py::arg("q"), py::arg("x"), py::arg("dual_truncation") = 40000,
      "Voronoi identity for theta_delta with the standard window");

  m.def("apply_tp2", &hiw::apply_tp2, py::arg("form"), py::arg("p"));
  m.def(
      "extract_eigenvalue",
      [](const hiw::QSeries& f, std::uint64_t p) {
        const hiw::HeckeResult r = hiw::extract_eigenvalue(f, p);
        py::dict out = to_python(hiw::to_json(r));
        out["lambda"] = rational_to_python(r.lambda);
        return out;
      },
      py::arg("form"), py::arg("p"));
  m.def(
      "shimura_relation_check",
      [](const hiw::QSeries& f, const std::vector<std::uint64_t>& primes, std::int64_t t, std::size_t n_max) {
        std::map<std::uint64_t, hiw::Rational> lambdas;
        for (std::uint64_t p : primes) lambdas.emplace(p, hiw::extract_eigenvalue(f, p).lambda);
        return to_python(hiw::to_json(hiw::shimura_relation_check(f, lambdas, t, n_max)));
      },
      py::arg("form"), py::arg("primes"), py::arg("t") = 1, py::arg("n_max") = 15,
      "Extracts lambda(p) for the given primes, then checks the relation exactly");
  m.def(
      "fourth_moment_exponent",
      [](const hiw::QSeries& f, const std::vector<double>& xs) {
        return to_python(hiw::to_json(hiw::fourth_moment_exponent(f, xs)));
      },
      py::arg("form"), py::arg("xs"));

  m.def(
      "sign_counts",
      [](const hiw::QSeries& f, double x, double alpha, std::uint64_t q) {
        return to_python(hiw::to_json(hiw::sign_counts(f.normalized(), x, alpha, q)));
      },
      py::arg("form"), py::arg("x"), py::arg("alpha"), py::arg("q") = 1);
  m.def(
      "class_survey",
      [](const hiw::QSeries& f, double x, std::uint64_t p, double alpha, double cf, double r) {
        const hiw::Window w = hiw::Window::standard_bump();
        const auto th = hiw::default_survey_thresholds(cf, w, r);
        return to_python(hiw::to_json(hiw::class_survey(f.normalized(), w, x, p, alpha, th)));
      },
      py::arg("form"), py::arg("x"), py::arg("p"), py::arg("alpha"), py::arg("cf"), py::arg("r") = 0.01);
  m.def(
      "corollary_count",
      [](const hiw::QSeries& f, double x, double epsilon, double cf, double r) {
        const hiw::Window w = hiw::Window::standard_bump();
        const auto th = hiw::default_survey_thresholds(cf, w, r);
        return to_python(hiw::to_json(hiw::corollary_count(f.normalized(), w, x, epsilon, th)));
      },
      py::arg("form"), py::arg("x"), py::arg("epsilon"), py::arg("cf"), py::arg("r") = 0.01);

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::vector<std::string> argv_store{"hiw"};
        argv_store.insert(argv_store.end(), args.begin(), args.end());
        std::vector<const char*> argv;
        for (const auto& a : argv_store) argv.push_back(a.c_str());
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = hiw::cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool in process; returns (exit_code, stdout, stderr)");
}
