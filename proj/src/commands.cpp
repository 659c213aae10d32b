#include "hybrid/commands.hpp"

#include "hybrid/io.hpp"
#include "hybrid/kernel.hpp"
#include "hybrid/verify.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <ostream>

namespace hybrid::cli {

namespace fs = std::filesystem;

std::string resolve_output_dir(const std::optional<std::string>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("HYBRID_OUTPUT_DIR"); env && *env) return env;
  return ".";
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"kernel-mass", "gamma-estimates", "prop1",
                                                 "holder",      "gronwall",        "residual"};
  return names;
}

int run_guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << "\n";
    return kSolverError;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "solver error: " << e.what() << "\n";
    return kSolverError;
  }
}

RunSetup prepare_run(const std::string& config_path, const std::optional<std::string>& mode,
                     const std::optional<double>& delta, const std::optional<double>& tol,
                     const std::optional<double>& horizon, const std::optional<double>& dt) {
  RunSetup run;
  run.config = ScenarioConfig::load(config_path);
  if (delta) run.config.set("delta", *delta);
  if (horizon) run.config.set("horizon", *horizon);
  if (mode) run.config.set("mode", *mode);
  if (tol) run.config.set("solver.tol", *tol);
  if (dt) run.config.set("solver.dt", *dt);
  run.scenario = build_scenario(run.config);
  run.horizon = run.scenario.horizon();

  const std::string m =
      run.config.get_string("mode", run.scenario.nonlocal_delta ? "nonlocal" : "pointwise");
  if (m == "pointwise") {
    run.psi.mode = GradientMode::Pointwise;
  } else if (m == "nonlocal") {
    if (!run.scenario.nonlocal_delta) throw ConfigError("nonlocal mode needs 'delta' (or --delta)");
    run.psi.mode = GradientMode::Nonlocal;
    run.psi.delta = *run.scenario.nonlocal_delta;
  } else {
    throw ConfigError("unknown mode '" + m + "' (expected pointwise or nonlocal)");
  }

  run.psi.dt = run.config.get_double("solver.dt", 1e-2);
  if (!(run.psi.dt > 0.0)) throw ConfigError("solver.dt must be positive");
  run.global.tol = run.config.get_double("solver.tol", 1e-8);
  if (!(run.global.tol > 0.0)) throw ConfigError("solver.tol must be positive");
  run.global.max_iters = run.config.get_int("solver.max_iters", 50);
  run.global.safety = run.config.get_double("solver.safety", 0.9);
  run.global.margin = run.config.get_double("solver.margin", 0.1);

  QuadratureSpec& q = run.psi.quadrature;
  q.u_max = run.config.get_double("quad.u_max", q.u_max);
  q.space_panels = run.config.get_int("quad.space_panels", q.space_panels);
  q.space_nodes = run.config.get_int("quad.space_nodes", q.space_nodes);
  q.time_panels = run.config.get_int("quad.time_panels", q.time_panels);
  q.time_nodes = run.config.get_int("quad.time_nodes", q.time_nodes);
  q.fd_box = run.config.get_double("quad.fd_box", q.fd_box);
  q.fd_h = run.config.get_double("quad.fd_h", q.fd_h);
  q.fd_snapshot_dt = run.config.get_double("quad.fd_snapshot_dt", q.fd_snapshot_dt);
  try {
    q.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return run;
}

namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
}

nlohmann::ordered_json estimates_json(const kernel::EstimateParams& est) {
  nlohmann::ordered_json j;
  j["lambda0"] = est.lambda0;
  j["lambda0_star"] = est.lambda0_star;
  j["nu0"] = est.nu0;
  j["C_gamma"] = est.C_gamma;
  j["K"] = est.K;
  j["kappa"] = est.kappa;
  return j;
}

nlohmann::ordered_json segment_json(std::size_t index, const LocalSolution& seg) {
  nlohmann::ordered_json j;
  j["segment"] = index;
  j["t0"] = seg.path.times.front();
  j["t1"] = seg.path.times.back();
  j["T1"] = seg.certificate.T1;
  j["T2"] = seg.certificate.T2;
  j["T_bar"] = seg.certificate.T_bar;
  j["S_value"] = seg.certificate.S_value;
  j["S_standard"] = seg.certificate.S_standard;
  j["gamma_bar"] = seg.certificate.gamma_bar;
  j["C0"] = seg.C0;
  j["iterations"] = seg.iterations;
  j["diffs"] = seg.diffs;
  j["ratios"] = seg.ratios;
  return j;
}

std::string snapshot_name(std::size_t k) { return "field_" + std::to_string(k) + ".txt"; }

std::vector<std::string> write_snapshots(const Scenario& scenario, const AgentPath& path, const PsiOptions& psi,
                                         const std::vector<double>& times, double box, double h,
                                         const std::string& dir) {
  std::vector<std::string> files;
  if (times.empty()) return files;
  const FieldProbe probe(scenario, path, psi.quadrature);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    if (t < 0.0 || t > path.horizon() * (1.0 + 1e-12))
      throw ConfigError("snapshot time " + format_double(t) + " outside [0, " + format_double(path.horizon()) + "]");
    const std::string name = snapshot_name(k);
    io::write_field_snapshot((fs::path(dir) / name).string(), io::sample_field(probe, t, box, h));
    files.push_back(name);
  }
  return files;
}

}  // namespace

int cmd_simulate(const SimulateOptions& options, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  RunSetup run = prepare_run(options.config_path, options.mode, options.delta, options.tol, options.horizon, options.dt);
  const std::string dir = resolve_output_dir(options.output_dir);
  ensure_dir(dir);

  const GlobalSolution sol = solve_global(run.scenario, run.horizon, run.psi, run.global);
  std::vector<std::string> outputs = {"trajectory.csv"};
  io::write_trajectory((fs::path(dir) / "trajectory.csv").string(), sol.path);
  for (const auto& f : write_snapshots(run.scenario, sol.path, run.psi, options.snapshot_times, options.snapshot_box,
                                       options.snapshot_h, dir))
    outputs.push_back(f);
  outputs.push_back("manifest.json");

  const kernel::EstimateParams est = kernel::scenario_estimate_params(run.scenario);
  nlohmann::ordered_json manifest;
  manifest["format"] = io::kManifestFormat;
  manifest["command"] = "simulate";
  manifest["config_digest"] = run.config.digest();
  manifest["mode"] = mode_name(run.psi.mode);
  if (run.psi.mode == GradientMode::Nonlocal) manifest["delta"] = run.psi.delta;
  else manifest["delta"] = nullptr;
  manifest["tol"] = run.global.tol;
  manifest["dt"] = run.psi.dt;
  manifest["horizon"] = run.horizon;
  manifest["backend"] = run.scenario.coeffs.is_constant ? backend_name(FieldBackend::ClosedFormKernel)
                                                        : backend_name(FieldBackend::FiniteDifference);
  manifest["estimates"] = estimates_json(est);
  nlohmann::ordered_json segments = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < sol.segments.size(); ++k) segments.push_back(segment_json(k, sol.segments[k]));
  manifest["segments"] = segments;
  if (run.scenario.force.global_lipschitz) {
    const GronwallConstants g = gronwall_constants(run.scenario, run.horizon, est);
    manifest["B"] = g.B;
    manifest["gronwall_alpha"] = g.alpha_g;
  } else {
    manifest["B"] = nullptr;
  }
  manifest["sup_deviation"] = sup_deviation(sol.path, run.scenario.X0, run.scenario.V0);
  manifest["outputs"] = outputs;
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  manifest["wall_clock_seconds"] = elapsed.count();
  io::write_json((fs::path(dir) / "manifest.json").string(), manifest);

  log << "simulate: " << sol.path.size() << " nodes, " << sol.segments.size() << " segment(s), output in " << dir
      << "\n";
  return kOk;
}

namespace {

double kernel_decay(const kernel::Kernel& k, double lambda0_star) {
  Eigen::SelfAdjointEigenSolver<SmallMatrix> eig(k.inverse_diffusion(), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() - lambda0_star;
}

}  // namespace

int cmd_verify(const VerifyOptions& options, std::ostream& log) {
  std::vector<std::string> suites = options.suites.empty() ? suite_names() : options.suites;
  for (const auto& s : suites)
    if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
      throw ConfigError("unknown suite '" + s + "'");

  RunSetup run = prepare_run(options.config_path, std::nullopt, std::nullopt, std::nullopt, std::nullopt, std::nullopt);
  const Scenario& sc = run.scenario;
  const std::string dir = resolve_output_dir(options.output_dir);
  ensure_dir(dir);

  std::vector<verify::EstimateReport> reports;
  for (const auto& suite : suites) {
    if (suite == "kernel-mass") {
      const kernel::Kernel k = kernel::make_kernel(sc.coeffs);
      reports.push_back(verify::check_kernel_mass(k, verify::kernel_samples(sc.dim(), options.samples, options.seed)));
    } else if (suite == "gamma-estimates") {
      const kernel::Kernel k = kernel::make_kernel(sc.coeffs);
      const kernel::EstimateParams params = kernel::make_estimate_params(sc.lambda0, sc.lambda0_star);
      auto c = verify::per_order_constants(k, params);
      if (options.falsify)
        for (double& v : c) v *= 0.5;
      const double z_max = std::sqrt(240.0 / kernel_decay(k, params.lambda0_star));
      for (auto& r : verify::check_gamma_estimates(
               k, params, c, verify::similarity_samples(sc.dim(), options.samples, options.seed, z_max)))
        reports.push_back(std::move(r));
    } else if (suite == "prop1") {
      const kernel::EstimateParams est = kernel::scenario_estimate_params(sc);
      const long steps = std::max(1L, std::lround(run.horizon / run.psi.dt));
      const AgentPath path = AgentPath::constant(sc.X0, sc.V0, grid_times(0, steps, run.horizon / steps));
      const FieldProbe probe(sc, path, run.psi.quadrature, FieldBackend::ClosedFormKernel);
      auto [r1, r2] = verify::check_prop1(sc, probe,
                                          verify::field_samples(sc.dim(), options.samples, options.seed, 3.0,
                                                                0.01 * run.horizon, run.horizon),
                                          est, options.falsify ? 0.1 : 1.0);
      reports.push_back(std::move(r1));
      reports.push_back(std::move(r2));
    } else if (suite == "holder") {
      const double R = std::max(2.0, sc.X0.norm() + sc.radius);
      const auto pairs = verify::holder_pairs(sc.dim(), sc.n, options.samples, options.seed, R);
      if (std::isfinite(sc.growth.H))
        reports.push_back(verify::check_holder(sc.phi.value, sc.alpha(), sc.growth.C, sc.growth.H, pairs, R));
      if (!sc.g.is_zero)
        reports.push_back(
            verify::check_holder(sc.g.value, sc.alpha(), sc.growth.C, sc.growth.holder_g(R), pairs, R));
    } else if (suite == "gronwall") {
      const double w0 = 0.7;
      reports.push_back(verify::gronwall_oracle(1.0, [](double) { return 0.0; }, [](double, double) { return 0.0; })
                            .report);
      reports.push_back(
          verify::gronwall_oracle(1.0, [w0](double) { return w0; }, [](double, double) { return 0.0; }).report);
      reports.push_back(
          verify::gronwall_oracle(1.0, [](double) { return 0.0; }, [](double, double) { return 1.0; }).report);
      reports[reports.size() - 3].claim = "gronwall-zero";
      reports[reports.size() - 2].claim = "gronwall-constant-w";
      reports[reports.size() - 1].claim = "gronwall-double-integral";
    } else if (suite == "residual") {
      const GlobalSolution sol = solve_global(sc, run.horizon, run.psi, run.global);
      std::unique_ptr<FieldProbe> probe;
      if (sc.force.uses_gradient) probe = std::make_unique<FieldProbe>(sc, sol.path, run.psi.quadrature);
      reports.push_back(verify::residual_check(sol.path, sc, probe.get(), run.psi.mode, run.psi.delta));
    }
  }

  bool all_pass = true;
  nlohmann::ordered_json doc;
  doc["format"] = io::kReportFormat;
  doc["config_digest"] = run.config.digest();
  doc["seed"] = options.seed;
  doc["falsify"] = options.falsify;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (auto& r : reports) {
    r.seed = options.seed;
    all_pass = all_pass && r.pass;
    arr.push_back(io::report_json(r));
    log << (r.pass ? "PASS " : "FAIL ") << r.claim << " worst_ratio=" << format_double(r.worst_ratio) << "\n";
  }
  doc["reports"] = arr;
  doc["pass"] = all_pass;
  io::write_json((fs::path(dir) / "verify_report.json").string(), doc);
  return all_pass ? kOk : kVerificationFailed;
}

int cmd_bounds(const BoundsOptions& options, std::ostream& log) {
  RunSetup run = prepare_run(options.config_path, std::nullopt, std::nullopt, std::nullopt, std::nullopt, std::nullopt);
  const Scenario& sc = run.scenario;
  const std::string dir = resolve_output_dir(options.output_dir);
  ensure_dir(dir);

  const kernel::EstimateParams est = kernel::scenario_estimate_params(sc);
  std::optional<double> delta;
  if (run.psi.mode == GradientMode::Nonlocal) delta = run.psi.delta;
  const HorizonCertificate cert =
      horizon_certificate(sc, sc.radius, est, delta, run.global.margin, run.global.safety);

  io::Certificate out;
  out.set("config_digest", run.config.digest());
  out.set("mode", std::string(mode_name(run.psi.mode)));
  if (delta) out.set("delta", *delta);
  out.set("radius", sc.radius);
  out.set("T1", cert.T1);
  out.set("T2", cert.T2);
  out.set("T_bar", cert.T_bar);
  out.set("S_value", cert.S_value);
  out.set("S_standard", cert.S_standard);
  out.set("gamma_bar", cert.gamma_bar);
  out.set("K", est.K);
  out.set("kappa", est.kappa);
  out.set("C_gamma", est.C_gamma);
  out.set("lambda0", est.lambda0);
  out.set("lambda0_star", est.lambda0_star);
  out.set("nu0", est.nu0);
  out.set("margin", cert.margin);
  out.set("safety", cert.safety);
  if (sc.force.global_lipschitz) out.set("B", gronwall_bound_B(sc, run.horizon, est));
  io::write_certificate((fs::path(dir) / "certificate.txt").string(), out);
  log << "bounds: T_bar = " << format_double(cert.T_bar) << ", S = " << format_double(cert.S_value) << "\n";
  return kOk;
}

int cmd_field_export(const FieldExportOptions& options, std::ostream& log) {
  if (options.times.empty()) throw ConfigError("field-export needs at least one --time");
  RunSetup run = prepare_run(options.config_path, options.mode, options.delta, std::nullopt, std::nullopt, std::nullopt);
  const double t_max = *std::max_element(options.times.begin(), options.times.end());
  if (t_max > run.horizon * (1.0 + 1e-12))
    throw ConfigError("requested time " + format_double(t_max) + " beyond the horizon " + format_double(run.horizon));
  const std::string dir = resolve_output_dir(options.output_dir);
  ensure_dir(dir);
  const double solve_to = std::max(run.psi.dt, std::ceil(t_max / run.psi.dt - 1e-9) * run.psi.dt);
  const GlobalSolution sol = solve_global(run.scenario, solve_to, run.psi, run.global);
  const auto files = write_snapshots(run.scenario, sol.path, run.psi, options.times, options.box, options.h, dir);
  log << "field-export: wrote " << files.size() << " snapshot(s) to " << dir << "\n";
  return kOk;
}

}  // namespace hybrid::cli
