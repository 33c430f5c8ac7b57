#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hiw/error.hpp"

namespace hiw {

/// A configuration field failed validation.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error("--" + field + ": " + message), field_(std::move(field)) {}
  [[nodiscard]] const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct Thresholds {
  double r = 0.01;
  std::optional<double> m;   // eigen survey; default 0.1 cf
  std::optional<double> m1;  // plain survey; defaults from cf and the window
  std::optional<double> m2;
  double delta = 0.05;
  double eta = 0.1;
  double epsilon = 0.02;
};

struct ExperimentConfig {
  std::string command;
  std::string form = "theta_delta";   // built-in name or path to a .qexp file
  std::size_t truncation = 0;         // 0: derived from x (or the command)
  std::optional<std::string> window;  // "standard" or "a,b"
  std::vector<double> xs;
  std::optional<std::uint64_t> p;
  std::vector<std::uint64_t> primes;  // hecke
  double p_exp = 0.55;
  std::optional<double> alpha;
  Thresholds thresholds;
  std::optional<double> cf;
  std::string out;
  std::string csv;
  std::string gnuplot;
  std::uint64_t seed = 1;
  bool check = false;

  std::string mode = "plain";  // survey: plain | eigen
  std::int64_t t = 1;          // shimura
  std::size_t n_max = 15;
  std::int64_t u = 1;          // voronoi
  std::uint64_t q = 3;
  std::vector<std::uint64_t> classes;  // rearrange
  std::size_t dual_truncation = 40000;
  double tol = 0.0;                    // 0: command default
  std::optional<std::int64_t> salie_u;  // sums
  std::optional<std::int64_t> salie_v;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitCheck = 3;

/// Throws ConfigError naming the first offending field.
void validate(const ExperimentConfig& cfg);

/// Runs one subcommand; reports go to cfg.out (or `out` when empty).
/// Returns kExitCheck when --check assertions fail.
int run(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses argv and runs; maps errors to the documented exit codes.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hiw
