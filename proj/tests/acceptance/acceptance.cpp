// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "hybrid/commands.hpp"
#include "hybrid/io.hpp"
#include "hybrid/verify.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

using namespace hybrid;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Scenario scenario_from(const std::string& text) { return build_scenario(ScenarioConfig::parse(text)); }

AgentPath rest_path(const Scenario& s, double horizon = 1.0, long steps = 100) {
  return AgentPath::constant(s.X0, s.V0, grid_times(0, steps, horizon / steps));
}

Point point(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double a : v) p[i++] = a;
  return p;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

kernel::Kernel kernel_of(const SmallMatrix& a) { return kernel::Kernel(a, Point::Zero(a.rows()), 0.0); }

SmallMatrix diag(std::initializer_list<double> v) { return point(v).asDiagonal(); }

// heat flow of exp(-|x|^2) and its derivatives
double gauss_f(const Point& x, double t) {
  const double q = 1.0 + 4.0 * t;
  return std::pow(q, -0.5 * static_cast<double>(x.size())) * std::exp(-x.squaredNorm() / q);
}
Point gauss_grad(const Point& x, double t) { return -2.0 / (1.0 + 4.0 * t) * gauss_f(x, t) * x; }
SmallMatrix gauss_hess(const Point& x, double t) {
  const double q = 1.0 + 4.0 * t;
  const SmallMatrix I = SmallMatrix::Identity(x.size(), x.size());
  return gauss_f(x, t) * (4.0 / (q * q) * x * x.transpose() - 2.0 / q * I);
}

Outcome kernel_mass() {
  double worst = 0.0;
  bool ok = true;
  const std::vector<SmallMatrix> diffusions = {diag({1.0}), diag({1.0, 1.0}), diag({1.0, 1.0, 1.0}),
                                               diag({0.5, 2.0}), diag({0.5, 2.0, 1.0})};
  for (const SmallMatrix& a : diffusions) {
    const auto rep = verify::check_kernel_mass(kernel_of(a), verify::kernel_samples(int(a.rows()), 20, 11));
    ok = ok && rep.pass && rep.samples == 20;
    worst = std::max(worst, rep.constant("worst_deviation"));
  }
  return {ok && worst < 1e-6, "worst |mass-1|=" + fmt(worst)};
}

Outcome gamma_estimates() {
  bool ok = true;
  std::string detail;
  for (const SmallMatrix& a : {diag({1.0}), diag({0.5, 2.0})}) {
    Eigen::SelfAdjointEigenSolver<SmallMatrix> eig(SmallMatrix(a.inverse()));
    const double mu0 = eig.eigenvalues().minCoeff() > 0 ? 1.0 / eig.eigenvalues().maxCoeff() : 0.0;
    const double mu1 = 1.0 / eig.eigenvalues().minCoeff();
    const double lambda0 = kernel::lambda0_bound(mu0, mu1);
    const auto params = kernel::make_estimate_params(lambda0, 0.9 * lambda0);
    const kernel::Kernel k = kernel_of(a);
    const auto c = verify::per_order_constants(k, params);
    const double decay = eig.eigenvalues().minCoeff() - params.lambda0_star;
    const auto samples = verify::similarity_samples(int(a.rows()), 1000, 20240607, std::sqrt(240.0 / decay));
    const auto good = verify::check_gamma_estimates(k, params, c, samples);
    auto halved = c;
    for (double& v : halved) v *= 0.5;
    const auto bad = verify::check_gamma_estimates(k, params, halved, samples);
    for (int order = 0; order < 3; ++order) {
      ok = ok && good[order].pass && !bad[order].pass;
      detail += " N" + std::to_string(a.rows()) + "o" + std::to_string(order) + "=" + fmt(good[order].worst_ratio) +
                "/" + fmt(bad[order].worst_ratio);
    }
  }
  return {ok, "ratio good/halved" + detail};
}

Outcome field_oracle() {
  // gradients vanish at the origin: errors are relative to the larger of |exact| and the peak of the
  // same quantity over the probe set at that time
  double worst = 0.0;
  for (int dim : {1, 2}) {
    const Scenario sc = scenario_from("dimension = " + std::to_string(dim) +
                                      "\ncoefficients = heat\nphi = gaussian\ng = zero\nx0 = " +
                                      (dim == 1 ? "0" : "0 0") + "\n");
    const FieldProbe probe(sc, rest_path(sc));
    std::vector<Point> xs;
    const int m = dim == 1 ? 41 : 13;
    for (int i = 0; i < m; ++i) {
      const double a = -2.0 + 4.0 * i / (m - 1);
      if (dim == 1) {
        xs.push_back(point({a}));
        continue;
      }
      for (int j = 0; j < m; ++j) {
        const Point x = point({a, -2.0 + 4.0 * j / (m - 1)});
        if (x.norm() <= 2.0) xs.push_back(x);
      }
    }
    for (double t : {0.05, 0.1, 0.25, 0.5, 0.75, 1.0}) {
      const double q = 1.0 + 4.0 * t;
      const double peak_f = std::pow(q, -0.5 * dim);
      const double peak_g = peak_f * std::sqrt(2.0 / q) * std::exp(-0.5);
      const double peak_h = gauss_hess(Point::Zero(dim), t).norm();
      for (const Point& x : xs) {
        const double ef = std::abs(probe.eval_f(x, t) - gauss_f(x, t)) / std::max(gauss_f(x, t), 1e-300);
        const Point G = gauss_grad(x, t);
        const double eg = (probe.grad_f(x, t) - G).norm() / std::max(G.norm(), peak_g);
        const SmallMatrix H = gauss_hess(x, t);
        const double eh = (probe.hessian_f(x, t) - H).norm() / std::max(H.norm(), peak_h);
        worst = std::max({worst, ef, eg, eh});
      }
    }
  }
  return {worst < 1e-4, "worst relative error=" + fmt(worst)};
}

Outcome backend_agreement() {
  const std::vector<std::string> configs = {
      "dimension = 1\ncoefficients = heat\nphi = gaussian\ng = agent-secretion\nx0 = 0.3\nv0 = -0.4\n",
      "dimension = 2\ncoefficients = heat\nphi = gaussian\ng = agent-secretion\nx0 = 0.3 -0.2\nv0 = -0.4 0.2\n",
      "dimension = 2\ncoefficients = anisotropic-constant\nphi = gaussian\ng = agent-secretion\nx0 = 0.3 -0.2\n"
      "v0 = -0.4 0.2\n",
      "dimension = 1\ncoefficients = constant\ndiffusion = 0.8\ndrift = 0.5\nreaction = -0.3\nphi = gaussian\n"
      "g = agent-secretion\nx0 = 0.3\nv0 = -0.2\n",
  };
  double worst = 0.0;
  std::string detail;
  for (const auto& text : configs) {
    const Scenario sc = scenario_from(text);
    AgentPath path = rest_path(sc);
    for (std::size_t k = 0; k < path.size(); ++k) path.X[k] += path.times[k] * sc.V0;
    const FieldProbe cf(sc, path);
    QuadratureSpec spec;
    if (sc.dim() == 2) spec.fd_h = 0.1;
    const FieldProbe fd(sc, path, spec, FieldBackend::FiniteDifference);
    double err = 0.0, scale = 0.0;
    for (double t : {0.25, 0.5, 1.0})
      for (double a = -2.0; a <= 2.0 + 1e-12; a += 0.5)
        for (double b = -2.0; b <= 2.0 + 1e-12; b += sc.dim() == 2 ? 0.5 : 10.0) {
          const Point x = sc.dim() == 2 ? point({a, b}) : point({a});
          const double v = cf.eval_f(x, t);
          err = std::max(err, std::abs(v - fd.eval_f(x, t)));
          scale = std::max(scale, std::abs(v));
        }
    worst = std::max(worst, err / scale);
    detail += " " + sc.coeffs.name + "/N" + std::to_string(sc.dim()) + "=" + fmt(err / scale);
  }
  return {worst < 5e-3, "max relative error" + detail};
}

Outcome prop1_certificates() {
  bool ok = true;
  std::string detail;
  for (const char* text : {"dimension = 1\ncoefficients = heat\nphi = abs-sqrt\ng = zero\nx0 = 0\nalpha = 0.5\n",
                           "dimension = 1\nagents = 2\ncoefficients = heat\nphi = zero\ng = agent-secretion\n"
                           "x0 = 0.5 -0.5\nalpha = 0.5\n"}) {
    const Scenario sc = scenario_from(text);
    const auto est = kernel::scenario_estimate_params(sc);
    const FieldProbe probe(sc, rest_path(sc));
    const auto samples = verify::field_samples(1, 1000, 20240607, 3.0, 0.01, 1.0);
    const auto [r1, r2] = verify::check_prop1(sc, probe, samples, est);
    ok = ok && r1.pass && r2.pass && r1.worst_ratio <= 1.01 && r2.worst_ratio <= 1.01;
    detail += " " + sc.phi.name + "/" + sc.g.name + "=" + fmt(r1.worst_ratio) + "," + fmt(r2.worst_ratio);
  }
  return {ok, "worst ratios" + detail};
}

Outcome contraction() {
  const Scenario sc = scenario_from(
      "dimension = 1\nagents = 2\nphi = gaussian\ng = agent-secretion\nforce = damped-chemotaxis\n"
      "x0 = 0.5 -0.5\nv0 = 0 0.2\n");
  const HorizonCertificate cert = horizon_certificate(sc, 1.0);
  PsiOptions opt;
  opt.dt = cert.T_bar / 20.0;
  const LocalSolution sol = solve_local(sc, cert, 1e-8, 30, opt);
  double worst = 0.0;
  for (double r : sol.ratios) worst = std::max(worst, r);
  return {worst <= cert.S_value + 0.05 && sol.iterations <= 30,
          "T_bar=" + fmt(cert.T_bar) + " S=" + fmt(cert.S_value) + " max ratio=" + fmt(worst) +
              " iterations=" + std::to_string(sol.iterations)};
}

Outcome residuals() {
  std::vector<std::string> configs;
  for (const char* force : {"zero", "constant", "pure-chemotaxis", "damped-chemotaxis", "saturating-chemotaxis"})
    configs.push_back(std::string("dimension = 1\nagents = 2\ncoefficients = heat\nphi = gaussian\n"
                                  "g = agent-secretion\nforce = ") +
                      force + "\nforce.chi = 0.01\nforce.value = 0.5\nx0 = 0.5 -0.5\nv0 = 0 0.2\n");
  for (const char* coeffs : {"anisotropic-constant", "variable-sine"})
    configs.push_back(std::string("dimension = 1\nagents = 2\ncoefficients = ") + coeffs +
                      "\nphi = gaussian\ng = agent-secretion\nforce = damped-chemotaxis\nforce.chi = 0.01\n"
                      "x0 = 0.5 -0.5\nv0 = 0 0.2\n");
  configs.push_back(
      "dimension = 1\nagents = 2\ncoefficients = constant\ndiffusion = 0.8\ndrift = 0.5\nreaction = -0.3\n"
      "phi = abs-sqrt\ng = constant\ng.value = 0.5\nforce = damped-chemotaxis\nforce.chi = 0.01\nx0 = 0.5 -0.5\n"
      "v0 = 0 0.2\nalpha = 0.5\n");
  double worst = 0.0;
  bool ok = true;
  for (const auto& text : configs) {
    const Scenario sc = scenario_from(text);
    PsiOptions opt;
    opt.dt = 1e-2;
    const GlobalSolution g = solve_global(sc, 1.0, opt);
    const FieldProbe probe(sc, g.path);
    const auto rep = verify::residual_check(g.path, sc, &probe, GradientMode::Pointwise, 0.0, 1e-3);
    ok = ok && rep.pass;
    worst = std::max(worst, rep.worst_ratio * 1e-3);
  }
  return {ok && worst < 1e-3, std::to_string(configs.size()) + " scenarios, worst residual=" + fmt(worst)};
}

// x' = v, v' = -k v by an adaptive Dormand-Prince stepper
std::array<double, 2> ode_oracle(double x0, double v0, double k, double t) {
  using State = std::array<double, 2>;
  State s{x0, v0};
  boost::numeric::odeint::integrate_adaptive(
      boost::numeric::odeint::make_controlled<boost::numeric::odeint::runge_kutta_dopri5<State>>(1e-13, 1e-13),
      [k](const State& y, State& dy, double) {
        dy[0] = y[1];
        dy[1] = -k * y[1];
      },
      s, 0.0, t, 1e-3);
  return s;
}

Outcome global_continuation() {
  const Scenario damped = scenario_from(
      "dimension = 1\nagents = 2\nphi = gaussian\ng = agent-secretion\nforce = damped-chemotaxis\n"
      "force.chi = 0\nforce.kappa_v = 1\nx0 = 0.5 -0.5\nv0 = 0.3 -0.1\nhorizon = 2\n");
  const GlobalSolution gd = solve_global(damped, 2.0, PsiOptions{}, GlobalOptions{1e-12});
  double oracle_gap = 0.0;
  for (std::size_t k = 0; k < gd.path.size(); ++k)
    for (int i = 0; i < 2; ++i) {
      const auto o = ode_oracle(damped.X0(0, i), damped.V0(0, i), 1.0, gd.path.times[k]);
      oracle_gap = std::max({oracle_gap, std::abs(gd.path.X[k](0, i) - o[0]), std::abs(gd.path.V[k](0, i) - o[1])});
    }
  bool within = std::abs(gd.path.horizon() - 2.0) < 1e-12;
  double worst_fraction = 0.0;
  for (const char* force : {"zero", "constant", "pure-chemotaxis", "damped-chemotaxis", "saturating-chemotaxis"}) {
    const Scenario sc = scenario_from(std::string("dimension = 1\nagents = 2\nphi = gaussian\ng = agent-secretion\n"
                                                  "force = ") +
                                      force + "\nforce.chi = 0.01\nforce.value = 0.5\nx0 = 0.4 -0.6\n"
                                              "v0 = 0.1 0.2\nhorizon = 2\n");
    const GlobalSolution g = solve_global(sc, 2.0, PsiOptions{});
    const double dev = sup_deviation(g.path, sc.X0, sc.V0);
    const double B = gronwall_bound_B(sc, 2.0);
    within = within && dev <= B;
    if (B > 0) worst_fraction = std::max(worst_fraction, dev / B);
  }
  return {oracle_gap < 1e-3 && within,
          "oracle gap=" + fmt(oracle_gap) + " max sup|Y-Y0|/B=" + fmt(worst_fraction)};
}

Outcome nonlocal_consistency() {
  const Scenario g2 = scenario_from("dimension = 2\ncoefficients = heat\nphi = gaussian\nx0 = 0 0\n");
  const FieldProbe probe(g2, rest_path(g2));
  const double deltas[3] = {0.2, 0.1, 0.05};
  double min_order = 1e300;
  for (const Point& x : {point({0.4, -0.3}), point({1.0, 0.5}), point({-0.2, 1.5})})
    for (double t : {0.1, 0.5}) {
      const Point g = probe.grad_f(x, t);
      double err[3];
      for (int k = 0; k < 3; ++k) err[k] = (probe.ball_avg_grad(x, t, deltas[k]) - g).norm();
      min_order = std::min({min_order, std::log2(err[0] / err[1]), std::log2(err[1] / err[2])});
    }

  const Scenario sc = scenario_from(
      "dimension = 1\nagents = 1\nphi = gaussian\ng = zero\nforce = pure-chemotaxis\nforce.chi = 0.01\n"
      "x0 = 0.6\nv0 = 0\nhorizon = 0.5\n");
  PsiOptions opt;
  opt.dt = 0.025;
  const GlobalOptions tight{1e-13};
  const GlobalSolution pointwise = solve_global(sc, 0.5, opt, tight);
  double gap[3];
  for (int k = 0; k < 3; ++k) {
    PsiOptions nl = opt;
    nl.mode = GradientMode::Nonlocal;
    nl.delta = deltas[k];
    gap[k] = sup_distance(solve_global(sc, 0.5, nl, tight).path, pointwise.path);
  }
  const bool monotone = gap[1] < gap[0] && gap[2] < gap[1];
  return {min_order >= 1.8 && monotone, "min ball-average order=" + fmt(min_order) + " gaps=" + fmt(gap[0]) + "," +
                                            fmt(gap[1]) + "," + fmt(gap[2])};
}

Outcome gronwall() {
  const auto zero = [](double) { return 0.0; };
  const auto vzero = [](double, double) { return 0.0; };
  const auto a = verify::gronwall_oracle(2.0, zero, vzero, 1.0, 1000, 1e-3);
  const auto b = verify::gronwall_oracle(1.0, [](double) { return 0.7; }, vzero, 1.0, 1000, 1e-3);
  const auto c = verify::gronwall_oracle(1.0, zero, [](double, double) { return 1.0; }, 1.0, 1000, 1e-3);
  double closed_form = 0.0;
  for (std::size_t i = 0; i < c.times.size(); ++i)
    closed_form = std::max(closed_form, std::abs(c.bound[i] / std::exp(c.times[i] * c.times[i] / 2.0) - 1.0));
  const bool ok = a.report.pass && b.report.pass && c.report.pass && c.times.size() == 1001 && closed_form < 1e-6;
  return {ok, "ratios=" + fmt(a.report.worst_ratio) + "," + fmt(b.report.worst_ratio) + "," +
                  fmt(c.report.worst_ratio) + " bound vs exp(t^2/2)=" + fmt(closed_form)};
}

Outcome closed_forms() {
  using boost::math::quadrature::gauss_kronrod;
  const double area[4] = {0.0, 2.0, 2.0 * std::numbers::pi, 4.0 * std::numbers::pi};
  double worst = 0.0;
  for (int n = 1; n <= 3; ++n)
    for (double g = 0.1; g <= 10.0 + 1e-9; g *= std::pow(100.0, 1.0 / 12.0)) {
      const double R = 12.0 / std::sqrt(g);
      const auto radial = [&](int p) {
        return area[n] * gauss_kronrod<double, 61>::integrate(
                             [&](double r) { return std::pow(r, p) * std::exp(-g * r * r); }, 0.0, R, 15, 1e-14);
      };
      worst = std::max({worst, std::abs(kernel::gaussian_I0(g, n) / radial(n - 1) - 1.0),
                        std::abs(kernel::gaussian_I1(g, n) / radial(n) - 1.0)});
    }

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  bool bound_ok = true;
  for (int m = 0; m < 100; ++m) {
    const int n = 1 + m % 3;
    SmallMatrix A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = u(rng);
    A = A * A.transpose() + 0.05 * SmallMatrix::Identity(n, n);
    Eigen::SelfAdjointEigenSolver<SmallMatrix> eig(A);
    const double mu0 = eig.eigenvalues().minCoeff();
    const double mu1 = eig.eigenvalues().maxCoeff();
    const double lambda0 = kernel::lambda0_bound(mu0, mu1);
    const SmallMatrix Ainv = A.inverse();
    for (int k = 0; k < 20; ++k) {
      Point xi(n);
      for (int i = 0; i < n; ++i) xi[i] = u(rng);
      bound_ok = bound_ok && xi.dot(Ainv * xi) >= lambda0 * xi.squaredNorm() * (1.0 - 1e-12);
    }
  }
  return {worst < 1e-6 && bound_ok, "worst I0/I1 relative error=" + fmt(worst) +
                                        (bound_ok ? " lambda0 bound holds" : " lambda0 bound violated")};
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "hybrid_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path cfg = dir / "scenario.cfg";
  std::ofstream(cfg) << "dimension = 1\nagents = 2\nphi = gaussian\ng = agent-secretion\nforce = damped-chemotaxis\n"
                        "force.chi = 0.01\nx0 = 0.5 -0.5\nv0 = 0 0.2\nhorizon = 0.5\n";
  const auto run = [&](const std::string& name) {
    cli::SimulateOptions opt;
    opt.config_path = cfg.string();
    opt.output_dir = (dir / name).string();
    opt.snapshot_times = {0.25, 0.5};
    std::ostringstream log;
    return cli::cmd_simulate(opt, log);
  };
  if (run("a") != cli::kOk || run("b") != cli::kOk) return {false, "simulate failed"};
  const auto slurp = [](const fs::path& f) {
    std::ifstream in(f, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  bool same = true;
  for (const char* f : {"trajectory.csv", "field_0.txt", "field_1.txt"})
    same = same && slurp(dir / "a" / f) == slurp(dir / "b" / f) && !slurp(dir / "a" / f).empty();
  auto ma = nlohmann::json::parse(slurp(dir / "a" / "manifest.json"));
  auto mb = nlohmann::json::parse(slurp(dir / "b" / "manifest.json"));
  ma.erase("wall_clock_seconds");
  mb.erase("wall_clock_seconds");
  same = same && ma.dump() == mb.dump();
  return {same, same ? "trajectory, snapshots and manifest identical" : "outputs differ"};
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    Outcome (*run)();
    double budget_seconds;
  };
  const Entry entries[] = {
      {"kernel-mass", kernel_mass, 10.0},
      {"gamma-estimates", gamma_estimates, 0.0},
      {"field-oracle", field_oracle, 60.0},
      {"backend-agreement", backend_agreement, 0.0},
      {"prop1-certificates", prop1_certificates, 0.0},
      {"contraction", contraction, 0.0},
      {"fixed-point-residual", residuals, 0.0},
      {"global-continuation", global_continuation, 0.0},
      {"nonlocal-consistency", nonlocal_consistency, 0.0},
      {"gronwall", gronwall, 0.0},
      {"closed-forms", closed_forms, 0.0},
      {"determinism", determinism, 0.0},
  };
  int failures = 0;
  int index = 0;
  for (const Entry& e : entries) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = e.run();
    } catch (const std::exception& ex) {
      out = {false, std::string("exception: ") + ex.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (e.budget_seconds > 0 && seconds > e.budget_seconds) {
      out.pass = false;
      out.detail += " over time budget";
    }
    if (!out.pass) ++failures;
    std::cout << (out.pass ? "PASS " : "FAIL ") << index << " " << e.name << ": " << out.detail << " ("
              << fmt(seconds) << " s)" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
