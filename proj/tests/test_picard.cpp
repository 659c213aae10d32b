#include "doctest.h"

#include "hybrid/picard.hpp"

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>

using namespace hybrid;

namespace {

Scenario scenario_from(const std::string& text) { return build_scenario(ScenarioConfig::parse(text)); }

Point p1(double a) {
  Point p(1);
  p << a;
  return p;
}

const char* kDampedPure =
    "dimension = 1\nagents = 2\nphi = gaussian\ng = agent-secretion\nforce = damped-chemotaxis\n"
    "force.chi = 0\nforce.kappa_v = 1\nx0 = 0.5 -0.5\nv0 = 0.3 -0.1\nhorizon = 2\n";

const char* kDampedChemo =
    "dimension = 1\nagents = 2\nphi = gaussian\ng = agent-secretion\nforce = damped-chemotaxis\n"
    "force.chi = 0.01\nforce.kappa_v = 1\nx0 = 0.5 -0.5\nv0 = 0 0.2\nhorizon = 1\n";

// x' = v, v' = -k v integrated by an adaptive Dormand-Prince stepper
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

}  // namespace

TEST_CASE("apply_psi examples") {
  const Scenario zero = scenario_from("dimension = 1\nagents = 2\nforce = zero\nx0 = 0 1\nv0 = 0.5 -0.25\n");
  const AgentPath rest = AgentPath::constant(zero.X0, zero.V0, grid_times(0, 50, 0.01));
  PsiOptions opt;
  const AgentPath out = apply_psi(rest, zero, opt);
  for (std::size_t k = 0; k < out.size(); ++k) {
    CHECK((out.X[k] - (zero.X0 + out.times[k] * zero.V0)).norm() < 1e-14);
    CHECK((out.V[k] - zero.V0).norm() == 0.0);
  }

  const Scenario chemo =
      scenario_from("dimension = 1\nagents = 2\nphi = zero\ng = zero\nforce = pure-chemotaxis\nforce.chi = 2\n"
                    "x0 = 0 1\nv0 = 0.5 -0.25\n");
  const AgentPath out2 = apply_psi(rest, chemo, opt);
  CHECK(sup_distance(out, out2) < 1e-14);

  const Scenario cst = scenario_from(
      "dimension = 2\nagents = 1\nforce = constant\nforce.value = 0.4 -1\nx0 = 0.1 0.2\nv0 = 0.3 0\nradius = 5\n");
  AgentPath exact = AgentPath::constant(cst.X0, cst.V0, grid_times(0, 40, 0.025));
  Point F(2);
  F << 0.4, -1.0;
  for (std::size_t k = 0; k < exact.size(); ++k) {
    const double t = exact.times[k];
    exact.X[k] = cst.X0 + t * cst.V0 + 0.5 * t * t * F;
    exact.V[k] = cst.V0 + t * F;
  }
  CHECK(sup_distance(apply_psi(exact, cst, opt), exact) < 1e-13);
}

TEST_CASE("apply_psi rejects paths outside E_R") {
  const Scenario zero = scenario_from("dimension = 1\nforce = zero\nx0 = 0\nv0 = 0\nradius = 0.5\n");
  AgentPath path = AgentPath::constant(zero.X0, zero.V0, grid_times(0, 10, 0.1));
  path.X[7](0, 0) = 0.8;
  CHECK_THROWS_WITH_AS(apply_psi(path, zero, PsiOptions{}), doctest::Contains("node 7"), SolverError);
}

TEST_CASE("horizon_T1") {
  const auto est = kernel::make_estimate_params(1.0, 0.9);
  const Scenario one = scenario_from("dimension = 1\nforce = zero\nx0 = 0\nv0 = 0\nhorizon = 1\n");
  CHECK(horizon_T1(one, 1.0, est) == doctest::Approx(1.0));

  const Scenario four = scenario_from("dimension = 1\nagents = 4\nforce = zero\nx0 = 0 0 0 0\nv0 = 1 0 0 0\n");
  CHECK(horizon_T1(four, 1.0, est) == doctest::Approx(1.0 / 8.0));

  Scenario chemo = scenario_from(
      "dimension = 1\nagents = 4\nphi = gaussian\nforce = pure-chemotaxis\nforce.chi = 0.5\nx0 = 0 0 0 0\n"
      "v0 = 1 0 0 0\n");
  const auto full = kernel::scenario_estimate_params(chemo);
  CHECK(horizon_T1(chemo, 1.0, full) < 1.0 / 8.0);
  chemo.force.lipschitz_w = 0.0;
  CHECK(horizon_T1(chemo, 1.0, full) == doctest::Approx(1.0 / 8.0));
}

TEST_CASE("contraction_S") {
  const Scenario sc = scenario_from(kDampedChemo);
  const auto est = kernel::scenario_estimate_params(sc);
  CHECK(contraction_S(sc, 1.0, 1e-14, est) < 1e-3);
  double last = 0.0;
  for (int k = 1; k <= 20; ++k) {
    const double s = contraction_S(sc, 1.0, 0.05 * k, est);
    CHECK(s > last);
    last = s;
  }
  CHECK(contraction_S(sc, 1.0, 0.3, est, true) >= contraction_S(sc, 1.0, 0.3, est, false));

  Scenario frozen = sc;
  frozen.force.lipschitz_w = 0.0;
  frozen.force.lipschitz_xv = [](double) { return 0.0; };
  for (double t : {0.01, 0.5, 1.0}) CHECK(contraction_S(frozen, 1.0, t, est) == 0.0);

  Scenario growing = sc;
  growing.growth.C = 0.2;
  CHECK_THROWS(contraction_S(growing, 1.0, 0.9, est));
}

TEST_CASE("horizon_certificate") {
  const Scenario zero = scenario_from("dimension = 1\nagents = 2\nforce = zero\nx0 = 0 1\nv0 = 0.5 0.5\n");
  const HorizonCertificate cz = horizon_certificate(zero, 1.0);
  CHECK(cz.S_value == 0.0);
  CHECK(cz.T_bar == doctest::Approx(0.9 * std::min(cz.T1, zero.horizon())));

  const Scenario sc = scenario_from(kDampedChemo);
  const auto est = kernel::scenario_estimate_params(sc);
  const HorizonCertificate c = horizon_certificate(sc, 1.0, est);
  CHECK(c.S_value < 1.0);
  CHECK(contraction_S(sc, 1.0, c.T_bar, est) == c.S_value);
  CHECK(c.T_bar <= c.T1);
  CHECK(c.gamma_bar > 0.0);

  const double v0 = sc.V0.norm();
  const HorizonCertificate half = horizon_certificate(sc, 0.5, est);
  CHECK(half.T1 == doctest::Approx(std::min(0.5 / (2.0 * (0.5 + v0)), horizon_T1(sc, 0.5, est))));
  CHECK(horizon_T1(sc, 0.5, est) <= 0.5 / (2.0 * (0.5 + v0)));
}

TEST_CASE("solve_local") {
  PsiOptions opt;
  const Scenario zero = scenario_from("dimension = 1\nagents = 2\nforce = zero\nx0 = 0 1\nv0 = 0.5 0.5\n");
  const LocalSolution lz = solve_local(zero, horizon_certificate(zero, 1.0), 1e-10, 10, opt);
  CHECK(lz.iterations == 2);
  for (std::size_t k = 0; k < lz.path.size(); ++k)
    CHECK((lz.path.X[k] - (zero.X0 + lz.path.times[k] * zero.V0)).norm() < 1e-14);

  const Scenario damped = scenario_from(kDampedPure);
  const HorizonCertificate cert = horizon_certificate(damped, 1.0);
  const LocalSolution ld = solve_local(damped, cert, 1e-12, 50, opt);
  for (std::size_t k = 0; k < ld.path.size(); ++k) {
    const double t = ld.path.times[k];
    for (int i = 0; i < 2; ++i) CHECK(std::abs(ld.path.V[k](0, i) - damped.V0(0, i) * std::exp(-t)) < 1e-4 + 1e-12);
  }
  for (std::size_t k = 0; k < ld.ratios.size(); ++k) CHECK(ld.ratios[k] <= cert.S_value + 0.05);
  for (std::size_t k = 1; k < ld.diffs.size(); ++k) CHECK(ld.diffs[k] <= ld.diffs[k - 1]);
  CHECK(sup_distance(apply_psi(ld.path, damped, opt), ld.path) < 2e-12);

  CHECK_THROWS_AS(solve_local(damped, cert, 1e-15, 2, opt), SolverError);
  HorizonCertificate tiny = cert;
  tiny.T_bar = 1e-4;
  CHECK_THROWS_WITH_AS(solve_local(damped, tiny, 1e-8, 10, opt), doctest::Contains("underflow"), SolverError);
}

TEST_CASE("solve_local with chemotaxis contracts at the certified rate") {
  const Scenario sc = scenario_from(kDampedChemo);
  const HorizonCertificate cert = horizon_certificate(sc, 1.0);
  PsiOptions opt;
  opt.dt = cert.T_bar / 20.0;
  const LocalSolution sol = solve_local(sc, cert, 1e-10, 30, opt);
  for (double r : sol.ratios) CHECK(r <= cert.S_value + 0.05);
  for (std::size_t k = 1; k < sol.diffs.size(); ++k) CHECK(sol.diffs[k] <= sol.diffs[k - 1]);
  CHECK(sup_distance(apply_psi(sol.path, sc, opt), sol.path) < 2e-10);
}

TEST_CASE("solve_global") {
  PsiOptions opt;
  const Scenario zero = scenario_from("dimension = 2\nagents = 1\nforce = zero\nx0 = 0 1\nv0 = 0.5 0.5\n");
  const GlobalSolution gz = solve_global(zero, 1.0, opt);
  CHECK(gz.path.horizon() == doctest::Approx(1.0));
  CHECK(gz.segments.size() > 1);
  for (std::size_t k = 0; k < gz.path.size(); ++k)
    CHECK((gz.path.X[k] - (zero.X0 + gz.path.times[k] * zero.V0)).norm() < 1e-13);

  const Scenario damped = scenario_from(kDampedPure);
  const GlobalSolution gd = solve_global(damped, 2.0, opt, GlobalOptions{1e-12});
  CHECK(gd.path.horizon() == doctest::Approx(2.0));
  double worst = 0.0;
  for (std::size_t k = 0; k < gd.path.size(); ++k) {
    for (int i = 0; i < 2; ++i) {
      const auto o = ode_oracle(damped.X0(0, i), damped.V0(0, i), 1.0, gd.path.times[k]);
      worst = std::max({worst, std::abs(gd.path.X[k](0, i) - o[0]), std::abs(gd.path.V[k](0, i) - o[1])});
    }
  }
  CHECK(worst < 1e-3);
  for (std::size_t s = 1; s < gd.segments.size(); ++s)
    CHECK(gd.segments[s].path.times.front() == gd.segments[s - 1].path.times.back());

  const double B = gronwall_bound_B(damped, 2.0);
  CHECK(sup_deviation(gd.path, damped.X0, damped.V0) <= B);
}

TEST_CASE("stitching does not depend on the segmentation") {
  const Scenario sc = scenario_from(kDampedChemo);
  PsiOptions opt;
  const double tol = 1e-10;
  GlobalOptions a{tol};
  GlobalOptions b{tol};
  b.safety = 0.45;
  const GlobalSolution ga = solve_global(sc, 1.0, opt, a);
  const GlobalSolution gb = solve_global(sc, 1.0, opt, b);
  CHECK(gb.segments.size() > ga.segments.size());
  CHECK(sup_distance(ga.path, gb.path) < 5 * tol);
}

TEST_CASE("gronwall_bound_B") {
  const Scenario still = scenario_from("dimension = 1\nforce = zero\nx0 = 0.3\nv0 = 0\n");
  CHECK(gronwall_bound_B(still, 1.0) == 0.0);
  CHECK(sup_deviation(solve_global(still, 1.0, PsiOptions{}).path, still.X0, still.V0) == 0.0);

  const Scenario cst =
      scenario_from("dimension = 1\nagents = 2\nforce = constant\nforce.value = 0.5\nx0 = 0 1\nv0 = 0.3 0.4\n");
  const double T = 1.5;
  CHECK(gronwall_bound_B(cst, T) == doctest::Approx((0.5 * T + 2.0 * T * 0.5) * std::exp(T)).epsilon(1e-13));

  const Scenario sat = scenario_from("dimension = 1\nforce = saturating-chemotaxis\nphi = gaussian\nx0 = 0\n");
  CHECK(std::isfinite(gronwall_bound_B(sat, 1.0)));
  Scenario free = sat;
  free.force.global_lipschitz.reset();
  CHECK_THROWS(gronwall_bound_B(free, 1.0));
}

TEST_CASE("global paths stay within B on globally Lipschitz presets") {
  PsiOptions opt;
  for (const char* force : {"pure-chemotaxis", "damped-chemotaxis", "saturating-chemotaxis"}) {
    const std::string text = std::string("dimension = 1\nagents = 2\nphi = gaussian\ng = agent-secretion\nforce = ") +
                             force + "\nforce.chi = 0.01\nx0 = 0.4 -0.6\nv0 = 0.1 0.2\nhorizon = 1\n";
    const Scenario sc = scenario_from(text);
    const GlobalSolution g = solve_global(sc, 1.0, opt);
    INFO(force);
    CHECK(sup_deviation(g.path, sc.X0, sc.V0) <= gronwall_bound_B(sc, 1.0));
  }
}

TEST_CASE("apriori_grad_bound") {
  const Scenario flat = scenario_from("dimension = 1\nphi = zero\nx0 = 0\ngrowth.M = 0\n");
  const auto est0 = kernel::scenario_estimate_params(flat);
  const AgentPath rest0 = AgentPath::constant(flat.X0, flat.V0, grid_times(0, 10, 0.1));
  CHECK(apriori_grad_bound(flat, p1(0.5), 0.5, rest0, est0) == 0.0);

  const Scenario sc = scenario_from("dimension = 1\nagents = 1\nphi = gaussian\nx0 = 0.7\ngrowth.M = 1\n");
  const auto est = kernel::scenario_estimate_params(sc);
  const AgentPath rest = AgentPath::constant(sc.X0, sc.V0, grid_times(0, 100, 0.01));
  const GronwallConstants gc = gronwall_constants(sc, sc.horizon(), est);
  for (double t : {0.1, 0.5, 1.0}) {
    const double x = -1.3;
    const double b = apriori_grad_bound(sc, p1(x), t, rest, est);
    const double integral = b / gc.K1 - (1.0 + std::abs(x)) / std::sqrt(t) - gc.K2;
    CHECK(integral == doctest::Approx((1.0 + std::abs(x) + 0.7) * 2.0 * std::sqrt(t)).epsilon(1e-8));
  }
  CHECK_THROWS(apriori_grad_bound(sc, p1(0.0), 0.0, rest, est));

  const FieldProbe probe(sc, rest);
  for (int k = 0; k < 1000; ++k) {
    const double x = -3.0 + 6.0 * (k % 37) / 36.0;
    const double t = 0.01 + 0.99 * ((k * 7919) % 1000) / 999.0;
    REQUIRE(std::abs(probe.grad_f(p1(x), t)[0]) <= apriori_grad_bound(sc, p1(x), t, rest, est));
  }
}

TEST_CASE("nonlocal solutions approach the pointwise solution") {
  const Scenario sc = scenario_from(
      "dimension = 1\nagents = 1\nphi = gaussian\ng = zero\nforce = pure-chemotaxis\nforce.chi = 0.01\n"
      "x0 = 0.6\nv0 = 0\nhorizon = 0.5\n");
  PsiOptions opt;
  opt.dt = 0.025;
  const GlobalOptions tight{1e-13};
  const GlobalSolution point = solve_global(sc, 0.5, opt, tight);
  double gap[3];
  const double deltas[3] = {0.2, 0.1, 0.05};
  for (int k = 0; k < 3; ++k) {
    PsiOptions nl = opt;
    nl.mode = GradientMode::Nonlocal;
    nl.delta = deltas[k];
    gap[k] = sup_distance(solve_global(sc, 0.5, nl, tight).path, point.path);
  }
  CHECK(gap[1] < gap[0]);
  CHECK(gap[2] < gap[1]);
  CHECK(std::log2(gap[0] / gap[1]) >= 1.8);
  CHECK(std::log2(gap[1] / gap[2]) >= 1.8);
}
