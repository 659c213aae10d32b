#pragma once

#include "hybrid/config.hpp"
#include "hybrid/picard.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hybrid::cli {

enum ExitCode : int {
  kOk = 0,
  kVerificationFailed = 1,
  kConfigError = 2,
  kSolverError = 3,
  kUsage = 64,
};

/// Output directory: explicit flag, else $HYBRID_OUTPUT_DIR, else ".".
std::string resolve_output_dir(const std::optional<std::string>& flag);

struct SimulateOptions {
  std::string config_path;
  std::optional<std::string> mode;  ///< pointwise | nonlocal
  std::optional<double> delta;
  std::optional<double> tol;
  std::optional<double> horizon;
  std::optional<double> dt;
  std::optional<std::string> output_dir;
  std::vector<double> snapshot_times;
  double snapshot_box = 4.0;
  double snapshot_h = 0.1;
};

struct VerifyOptions {
  std::string config_path;
  std::vector<std::string> suites;
  std::size_t samples = 1000;
  std::uint64_t seed = 20240607;
  bool falsify = false;
  std::optional<std::string> output_dir;
};

struct BoundsOptions {
  std::string config_path;
  std::optional<std::string> output_dir;
};

struct FieldExportOptions {
  std::string config_path;
  std::vector<double> times;
  double box = 4.0;
  double h = 0.1;
  std::optional<std::string> mode;
  std::optional<double> delta;
  std::optional<std::string> output_dir;
};

/// Writes trajectory.csv, manifest.json and field_<k>.txt snapshots.
int cmd_simulate(const SimulateOptions& options, std::ostream& log);

/// Writes verify_report.json; returns kVerificationFailed if any report fails.
int cmd_verify(const VerifyOptions& options, std::ostream& log);

/// Writes certificate.txt.
int cmd_bounds(const BoundsOptions& options, std::ostream& log);

/// Solves up to the latest requested time and writes field_<k>.txt snapshots.
int cmd_field_export(const FieldExportOptions& options, std::ostream& log);

/// Runs `body`, mapping ConfigError to 2 and SolverError (or other runtime failures) to 3.
int run_guarded(const std::function<int()>& body, std::ostream& err);

const std::vector<std::string>& suite_names();

/// Run parameters shared by the commands, read from the config with flag overrides applied.
struct RunSetup {
  ScenarioConfig config;
  Scenario scenario;
  PsiOptions psi;
  GlobalOptions global;
  double horizon = 1.0;
};

RunSetup prepare_run(const std::string& config_path, const std::optional<std::string>& mode,
                     const std::optional<double>& delta, const std::optional<double>& tol,
                     const std::optional<double>& horizon, const std::optional<double>& dt);

}  // namespace hybrid::cli
