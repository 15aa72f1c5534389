#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coulomb/config.hpp"
#include "coulomb/geometry.hpp"

namespace coulomb::harness {

enum ExitCode : int { kPass = 0, kVerificationFailed = 2, kConfigError = 3, kConditioningError = 4 };

struct RunConfig {
  enum class Sweep { linear, doubling };

  int genus = 0;
  double tau_re = 0.0;
  double tau_im = 1.0;
  geometry::PotentialSpec potential = geometry::PotentialSpec::zero();
  int n_min = 2;
  int n_max = 100;
  int n_step = 1;
  Sweep sweep = Sweep::linear;
  int grid_resolution = 64;
  std::map<std::string, double> tolerances;
  std::string output_path;
  std::uint64_t seed = 20240611;

  geometry::SurfaceSpec surface() const;
  std::vector<int> n_values() const;
  double tolerance(const std::string& name, double fallback) const;
};

// Throws config::ConfigError on a missing, mistyped or out-of-range entry.
RunConfig parse_run_config(const config::Document& doc);
RunConfig load_run_config(const std::string& path);

struct ResidualRow {
  int n = 0;
  double exact = 0.0;
  double asymptotic = 0.0;
  double residual = 0.0;
  double scaled_residual = 0.0;  // residual * n / ln n
};

ResidualRow make_row(int n, double exact, double asymptotic);

// Header row n,exact,asymptotic,residual,scaled_residual; reals at 17 digits.
void write_residual_csv(std::ostream& out, const std::vector<ResidualRow>& rows);
std::vector<ResidualRow> read_residual_csv(std::istream& in);

struct CommandResult {
  int exit_code = kPass;
  std::string report;
  std::vector<ResidualRow> rows;
};

CommandResult cmd_verify_sphere(const RunConfig& cfg);
CommandResult cmd_verify_torus(const RunConfig& cfg);
// `only` restricts the run to one suite.
CommandResult cmd_identities(const RunConfig& cfg, const std::optional<std::string>& only = {});
CommandResult cmd_fit_b2(const RunConfig& cfg);

// Loads the config, runs the command, writes the report to `report` and the
// residual CSV (if any) to `out_path` or the configured path. Maps config,
// domain and conditioning errors to exit codes.
int run_command(const std::string& command, const std::string& config_path, const std::optional<std::string>& only,
                const std::optional<std::string>& out_path, std::ostream& report);

// COULOMB_THREADS if set and positive, otherwise the hardware concurrency.
int worker_count();
// Runs fn(0..n-1) on up to worker_count() threads; rethrows the first exception.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

}  // namespace coulomb::harness
