// hybrid: command-line driver for the agent/field solver.
//
//   hybrid simulate     --config FILE [--mode M] [--delta D] [--tol E] [--horizon T] [--dt H] [--snapshot t ...]
//   hybrid verify       --config FILE [--suite NAME ...] [--samples K] [--seed S] [--falsify]
//   hybrid bounds       --config FILE
//   hybrid field-export --config FILE --time t [--time t ...] [--box B] [--spacing H]
//
// Every command accepts --output-dir; otherwise $HYBRID_OUTPUT_DIR, otherwise the working directory.

#include "hybrid/commands.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace cli = hybrid::cli;

int main(int argc, char** argv) {
  CLI::App app{"hybrid agent/field solver"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "hybrid 1.0");

  std::optional<std::string> output_dir;
  auto add_output = [&](CLI::App* sub) {
    sub->add_option("-o,--output-dir", output_dir, "output directory");
  };

  cli::SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "solve the coupled system and write the trajectory");
  simulate->add_option("-c,--config", sim.config_path, "scenario file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--mode", sim.mode, "pointwise | nonlocal")->check(CLI::IsMember({"pointwise", "nonlocal"}));
  simulate->add_option("--delta", sim.delta, "ball radius for the nonlocal gradient")->check(CLI::PositiveNumber);
  simulate->add_option("--tol", sim.tol, "Picard tolerance")->check(CLI::PositiveNumber);
  simulate->add_option("-T,--horizon", sim.horizon, "final time")->check(CLI::PositiveNumber);
  simulate->add_option("--dt", sim.dt, "path grid step")->check(CLI::PositiveNumber);
  simulate->add_option("--snapshot", sim.snapshot_times, "field snapshot times");
  simulate->add_option("--snapshot-box", sim.snapshot_box, "snapshot half-width")->check(CLI::PositiveNumber);
  simulate->add_option("--snapshot-h", sim.snapshot_h, "snapshot spacing")->check(CLI::PositiveNumber);
  add_output(simulate);

  cli::VerifyOptions ver;
  auto* verify = app.add_subcommand("verify", "run estimate checks and write verify_report.json");
  verify->add_option("-c,--config", ver.config_path, "scenario file")->required()->check(CLI::ExistingFile);
  verify->add_option("--suite", ver.suites, "kernel-mass, gamma-estimates, prop1, holder, gronwall, residual");
  verify->add_option("--samples", ver.samples, "samples per check")->check(CLI::PositiveNumber);
  verify->add_option("--seed", ver.seed, "sample seed");
  verify->add_flag("--falsify", ver.falsify, "shrink the claimed constants (checker control)");
  add_output(verify);

  cli::BoundsOptions bnd;
  auto* bounds = app.add_subcommand("bounds", "write the horizon certificate");
  bounds->add_option("-c,--config", bnd.config_path, "scenario file")->required()->check(CLI::ExistingFile);
  add_output(bounds);

  cli::FieldExportOptions fex;
  auto* field = app.add_subcommand("field-export", "write field snapshots of the solved system");
  field->add_option("-c,--config", fex.config_path, "scenario file")->required()->check(CLI::ExistingFile);
  field->add_option("-t,--time", fex.times, "snapshot times")->required();
  field->add_option("--box", fex.box, "half-width")->check(CLI::PositiveNumber);
  field->add_option("--spacing", fex.h, "grid spacing")->check(CLI::PositiveNumber);
  field->add_option("--mode", fex.mode, "pointwise | nonlocal")->check(CLI::IsMember({"pointwise", "nonlocal"}));
  field->add_option("--delta", fex.delta, "ball radius")->check(CLI::PositiveNumber);
  add_output(field);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kUsage;
  }

  return cli::run_guarded(
      [&]() -> int {
        if (*simulate) {
          sim.output_dir = output_dir;
          return cli::cmd_simulate(sim, std::cout);
        }
        if (*verify) {
          ver.output_dir = output_dir;
          return cli::cmd_verify(ver, std::cout);
        }
        if (*bounds) {
          bnd.output_dir = output_dir;
          return cli::cmd_bounds(bnd, std::cout);
        }
        fex.output_dir = output_dir;
        return cli::cmd_field_export(fex, std::cout);
      },
      std::cerr);
}
