#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hiw/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "hiw");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = hiw::cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("hiw_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("exit codes") {
    CHECK(run_cli({}).code == hiw::kExitConfig);
    CHECK(run_cli({"bogus"}).code == hiw::kExitConfig);
    CHECK(run_cli({"--help"}).code == hiw::kExitOk);

    const Run alpha = run_cli({"survey", "--x", "10000", "--alpha", "0.5"});
    CHECK(alpha.code == hiw::kExitConfig);
    CHECK(alpha.err.find("--alpha") != std::string::npos);
    CHECK(alpha.err.find("(3/14, 1/4]") != std::string::npos);

    CHECK(run_cli({"moments", "--form", "/nonexistent.qexp", "--x", "100"}).code == hiw::kExitConfig);
    CHECK(run_cli({"corollary", "--x", "10000", "--epsilon", "0.05"}).code == hiw::kExitConfig);

    const fs::path bad = scratch_dir() / "bad.qexp";
    std::ofstream(bad) << "QEXP v1\nweight 3/2 level 64 char trivial trunc 10\n3 1\n2 5\n";
    const Run parse = run_cli({"moments", "--form", bad.string(), "--x", "10"});
    CHECK(parse.code == hiw::kExitRuntime);
    CHECK(parse.err.find("strictly increasing") != std::string::npos);

    const Run strict = run_cli({"voronoi", "--x", "50", "--dual-trunc", "2000", "--tol", "1e-30", "--check"});
    CHECK(strict.code == hiw::kExitCheck);
    CHECK(json::parse(strict.out)["check"]["passed"] == false);
  }

  TEST_CASE("hecke report") {
    const Run r = run_cli({"hecke", "--form", "eta8_cubed", "--p", "2,3,5,7", "--check"});
    REQUIRE(r.code == hiw::kExitOk);
    const json j = json::parse(r.out);
    const auto& res = j["report"]["results"];
    REQUIRE(res.size() == 4);
    CHECK(res[0]["level_prime"] == true);
    CHECK(res[1]["lambda"] == "-4");
    CHECK(res[2]["lambda"] == "6");
    CHECK(res[3]["lambda"] == "-8");
    for (const auto& row : res) CHECK(row["is_eigen"] == true);
  }

  TEST_CASE("shimura and signs checks pass") {
    const Run s = run_cli({"shimura", "--form", "eta8_cubed", "--t", "1", "--nmax", "15", "--check"});
    CHECK(s.code == hiw::kExitOk);
    const Run g = run_cli({"signs", "--x", "2000", "--p", "7", "--check", "--seed", "5"});
    CHECK(g.code == hiw::kExitOk);
    CHECK(json::parse(g.out)["check"]["passed"] == true);
  }

  TEST_CASE("output is deterministic across runs and thread counts") {
    const std::vector<std::string> args = {"moments", "--x", "10000"};
    ::setenv("HIW_THREADS", "1", 1);
    const Run one = run_cli(args);
    ::setenv("HIW_THREADS", "4", 1);
    const Run four = run_cli(args);
    const Run again = run_cli(args);
    ::unsetenv("HIW_THREADS");
    REQUIRE(one.code == hiw::kExitOk);
    CHECK(one.out == four.out);
    CHECK(four.out == again.out);
  }

  TEST_CASE("form file feeds the other commands") {
    const fs::path qexp = scratch_dir() / "td.qexp";
    const Run form = run_cli({"form", "--name", "theta_delta", "--trunc", "10000", "--out", qexp.string(), "--check"});
    REQUIRE(form.code == hiw::kExitOk);
    CHECK(fs::exists(qexp));
    CHECK(json::parse(form.out)["report"]["truncation"] == 10000);

    const fs::path csv = scratch_dir() / "m.csv";
    const fs::path report = scratch_dir() / "m.json";
    const Run from_file = run_cli({"moments", "--form", qexp.string(), "--x", "10000", "--out", report.string(),
                                   "--csv", csv.string(), "--gnuplot", (scratch_dir() / "gp").string()});
    REQUIRE(from_file.code == hiw::kExitOk);
    CHECK(from_file.out.empty());
    const Run builtin = run_cli({"moments", "--x", "10000"});
    const json a = json::parse(slurp(report));
    const json b = json::parse(builtin.out);
    CHECK(a["report"]["runs"] == b["report"]["runs"]);
    CHECK(a["report"]["runs"][0]["report"]["p"] == 157);

    const std::string table = slurp(csv);
    CHECK(table.rfind("x,p,a,E\n", 0) == 0);
    CHECK(std::count(table.begin(), table.end(), '\n') == 158);
    CHECK(fs::exists(scratch_dir() / "gp_0.dat"));
  }

  TEST_CASE("survey and corollary verdicts") {
    const Run s = run_cli({"survey", "--x", "10000", "--alpha", "0.23", "--check"});
    CHECK(s.code == hiw::kExitOk);
    const json j = json::parse(s.out);
    CHECK(j["report"]["verdict"]["fraction_classes_hit"].get<double>() >= 0.01);
    const Run c = run_cli({"corollary", "--x", "10000", "--check"});
    CHECK(c.code == hiw::kExitOk);
    CHECK(json::parse(c.out)["report"]["result"]["pass"] == true);
  }
}
