#include "hybrid/picard.hpp"
#include "hybrid/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace hybrid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Product that treats any zero factor as annihilating, so 0 * inf = 0.
double guarded_product(std::initializer_list<double> factors) {
  for (double f : factors)
    if (f == 0.0) return 0.0;
  double p = 1.0;
  for (double f : factors) p *= f;
  return p;
}

struct LocalData {
  double n, N, alpha, x0, v0, R, exponent_arg, H, H_X, L_F, L_R, C;
};

LocalData local_data(const Scenario& s, double radius, std::optional<double> delta) {
  if (!(radius > 0.0)) throw std::domain_error("compact radius R must be positive");
  LocalData d{};
  d.n = s.n;
  d.N = s.dim();
  d.alpha = s.alpha();
  d.x0 = s.X0.norm();
  d.v0 = s.V0.norm();
  d.R = radius;
  const double dl = delta.value_or(0.0);
  d.exponent_arg = d.x0 * d.x0 + radius * radius + dl * dl;
  d.H = s.growth.H;
  d.H_X = s.growth.holder_g(d.x0 + radius + dl);
  d.L_F = s.force.lipschitz_w;
  d.L_R = s.force.lipschitz_on(std::max(d.x0, d.v0) + radius);
  d.C = s.growth.C;
  return d;
}

}  // namespace

double horizon_T1(const Scenario& scenario, double radius, const kernel::EstimateParams& est,
                  std::optional<double> delta) {
  const LocalData d = local_data(scenario, radius, delta);
  const double first = d.R / (d.n * (d.R + d.v0));
  double second = kInf;
  const double denom = guarded_product({2.0 * d.n * std::sqrt(d.N) * d.L_F * est.K / (d.alpha + 1.0),
                                        std::exp(est.kappa * d.exponent_arg),
                                        1.0 + 2.0 * d.H_X / (d.alpha + 3.0)});
  if (denom > 0.0) second = std::pow(d.R / denom, 2.0 / (d.alpha + 1.0));
  return std::min({first, second, scenario.horizon()});
}

double contraction_S(const Scenario& scenario, double radius, double T_bar, const kernel::EstimateParams& est,
                     bool conservative, std::optional<double> delta) {
  if (!(T_bar > 0.0)) throw std::domain_error("contraction_S: T_bar must be positive");
  const LocalData d = local_data(scenario, radius, delta);
  const double gamma_bar = est.lambda0_star / 4.0 - 2.0 * d.C * T_bar;
  if (!(gamma_bar > 0.0))
    throw std::domain_error("contraction_S: gamma_bar = lambda0*/4 - 2 C T_bar is not positive");

  const double kappa_exp = (conservative ? 2.0 : 1.0) * est.kappa * d.exponent_arg;
  const double term1 = 2.0 * d.L_R * T_bar;
  const double term2 = guarded_product({d.L_F * d.N * d.N * est.K, std::exp(kappa_exp),
                                        std::pow(T_bar, d.alpha / 2.0) * (2.0 / d.alpha),
                                        d.H + d.H_X * T_bar});
  const double term3 = guarded_product({d.L_F * est.C_gamma * d.H_X, std::exp(2.0 * d.C * d.exponent_arg),
                                        std::pow(std::numbers::pi / gamma_bar, d.N / 2.0),
                                        std::pow(T_bar, 1.5)});
  return term1 + term2 + term3;
}

HorizonCertificate horizon_certificate(const Scenario& scenario, double radius, const kernel::EstimateParams& est,
                                       std::optional<double> delta, double margin, double safety) {
  if (!(margin > 0.0 && margin < 1.0)) throw std::invalid_argument("certificate: margin must lie in (0, 1)");
  if (!(safety > 0.0 && safety <= 1.0)) throw std::invalid_argument("certificate: safety must lie in (0, 1]");
  HorizonCertificate cert;
  cert.radius = radius;
  cert.margin = margin;
  cert.safety = safety;
  cert.estimates = est;
  cert.T1 = horizon_T1(scenario, radius, est, delta);

  const double C = scenario.growth.C;
  double upper = scenario.horizon();
  if (C > 0.0) upper = std::min(upper, est.lambda0_star / (8.0 * C) * (1.0 - 1e-12));
  const double target = 1.0 - margin;
  auto S = [&](double t) { return contraction_S(scenario, radius, t, est, true, delta); };

  if (S(upper) <= target) {
    cert.T2 = upper;
  } else {
    double lo = 0.0;
    double hi = upper;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * upper; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (S(mid) <= target) lo = mid;
      else hi = mid;
    }
    cert.T2 = lo;
  }
  cert.T_bar = safety * std::min(cert.T1, cert.T2);
  if (!(cert.T_bar > 0.0) || !std::isfinite(cert.T_bar))
    throw SolverError("no admissible contraction horizon: T1 = " + format_double(cert.T1) +
                      ", T2 = " + format_double(cert.T2));
  cert.S_value = S(cert.T_bar);
  cert.S_standard = contraction_S(scenario, radius, cert.T_bar, est, false, delta);
  cert.gamma_bar = est.lambda0_star / 4.0 - 2.0 * C * cert.T_bar;
  return cert;
}

HorizonCertificate horizon_certificate(const Scenario& scenario, double radius) {
  return horizon_certificate(scenario, radius, kernel::scenario_estimate_params(scenario), scenario.nonlocal_delta);
}

double force_at_rest(const Scenario& scenario, double t0, double length, int samples) {
  const Point zero = Point::Zero(scenario.dim());
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double tau = t0 + (samples > 1 ? length * k / (samples - 1) : 0.0);
    for (int i = 0; i < scenario.n; ++i)
      worst = std::max(worst, scenario.force.eval(tau, scenario.X0, scenario.V0, zero, i).norm());
  }
  return worst;
}

GronwallConstants gronwall_constants(const Scenario& scenario, double horizon, const kernel::EstimateParams& est) {
  if (!scenario.force.global_lipschitz)
    throw std::invalid_argument("gronwall bound: force law is not globally Lipschitz");
  GronwallConstants g;
  const double T = horizon;
  const double n = scenario.n;
  const int N = scenario.dim();
  const double x0 = scenario.X0.norm();
  const double v0 = scenario.V0.norm();
  const double ls = est.lambda0_star;
  g.L_F = *scenario.force.global_lipschitz;
  g.K1 = est.C_gamma * scenario.growth.M * std::pow(2.0, N) * std::pow(std::numbers::pi, N / 2.0) /
         std::pow(ls, N / 2.0);
  const double K2_tilde = 2.0 / std::sqrt(ls) * (kernel::sphere_area(N) * std::numbers::pi / kernel::sphere_area(N + 1));
  g.K2 = K2_tilde * (1.0 + T);
  g.C0 = force_at_rest(scenario, 0.0, T);

  const double nL = n * g.L_F;
  g.alpha_g = v0 * T + n * T * g.C0 + nL * g.K1 * (1.0 + x0) * 2.0 * std::sqrt(T) +
              nL * g.K1 * (1.0 + 2.0 * x0) * (4.0 / 3.0) * std::pow(T, 1.5) + nL * g.K1 * g.K2 * T;
  g.exponent = (1.0 + nL * std::sqrt(2.0)) * T + 2.0 * std::sqrt(T) * nL * g.K1 +
               (2.0 / 3.0) * nL * g.K1 * std::pow(T, 1.5);
  g.B = g.alpha_g == 0.0 ? 0.0 : g.alpha_g * std::exp(g.exponent);
  return g;
}

double gronwall_bound_B(const Scenario& scenario, double horizon, const kernel::EstimateParams& est) {
  return gronwall_constants(scenario, horizon, est).B;
}

double gronwall_bound_B(const Scenario& scenario, double horizon) {
  return gronwall_bound_B(scenario, horizon, kernel::scenario_estimate_params(scenario));
}

double apriori_grad_bound(const Scenario& scenario, const Point& x, double t, const AgentPath& path,
                          const kernel::EstimateParams& est, int time_panels, int time_nodes) {
  if (!(t > 0.0)) throw std::domain_error("apriori_grad_bound: t must be positive");
  const int N = scenario.dim();
  const double ls = est.lambda0_star;
  const double K1 = est.C_gamma * scenario.growth.M * std::pow(2.0, N) * std::pow(std::numbers::pi, N / 2.0) /
                    std::pow(ls, N / 2.0);
  if (K1 == 0.0) return 0.0;
  const double K2 = 2.0 / std::sqrt(ls) * (kernel::sphere_area(N) * std::numbers::pi / kernel::sphere_area(N + 1)) *
                    (1.0 + scenario.horizon());
  const double xn = x.norm();
  // tau = t - sigma^2: dtau / sqrt(t - tau) = 2 dsigma
  const auto rule = quad::composite_gauss_legendre(time_panels, time_nodes, 0.0, std::sqrt(t));
  double integral = 0.0;
  for (std::size_t k = 0; k < rule.size(); ++k) {
    const double sigma = rule.nodes[k];
    integral += rule.weights[k] * 2.0 * (1.0 + xn + path.X_at(t - sigma * sigma).norm());
  }
  return K1 * ((1.0 + xn) / std::sqrt(t) + K2 + integral);
}

}  // namespace hybrid
