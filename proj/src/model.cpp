#include "hybrid/model.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace hybrid {

ParabolicityBounds sample_parabolicity(const OperatorCoefficients& coeffs, double horizon, double box_half_width,
                                       int points_per_axis, int time_points) {
  const int dim = coeffs.dim;
  ParabolicityBounds bounds;
  bounds.mu0 = std::numeric_limits<double>::infinity();
  bounds.mu1 = -std::numeric_limits<double>::infinity();

  int total = 1;
  for (int d = 0; d < dim; ++d) total *= points_per_axis;
  const double step = points_per_axis > 1 ? 2.0 * box_half_width / (points_per_axis - 1) : 0.0;

  for (int k = 0; k < time_points; ++k) {
    const double t = time_points > 1 ? horizon * k / (time_points - 1) : 0.0;
    for (int flat = 0; flat < total; ++flat) {
      Point x(dim);
      int rem = flat;
      for (int d = 0; d < dim; ++d) {
        x[d] = -box_half_width + step * (rem % points_per_axis);
        rem /= points_per_axis;
      }
      const SmallMatrix a = coeffs.a(x, t);
      bounds.max_asymmetry = std::max(bounds.max_asymmetry, (a - a.transpose()).cwiseAbs().maxCoeff());
      Eigen::SelfAdjointEigenSolver<SmallMatrix> eig(0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly);
      bounds.mu0 = std::min(bounds.mu0, eig.eigenvalues().minCoeff());
      bounds.mu1 = std::max(bounds.mu1, eig.eigenvalues().maxCoeff());
      if (coeffs.is_constant) break;
    }
    if (coeffs.is_constant) break;
  }
  return bounds;
}

namespace {

AgentMatrix agent_matrix_from(const std::vector<double>& values, int dim, int agents, const std::string& key) {
  if (static_cast<int>(values.size()) != dim * agents)
    throw ConfigError("dimension mismatch: '" + key + "' has " + std::to_string(values.size()) +
                      " entries, expected N*n = " + std::to_string(dim * agents));
  AgentMatrix m(dim, agents);
  for (int i = 0; i < agents; ++i)
    for (int d = 0; d < dim; ++d) m(d, i) = values[static_cast<std::size_t>(i * dim + d)];
  return m;
}

}  // namespace

Scenario build_scenario(const ScenarioConfig& config) {
  const int dim = config.get_int("dimension", 1);
  if (dim < 1 || dim > kMaxDimension) throw ConfigError("dimension must be 1, 2 or 3");
  const int agents = config.get_int("agents", 1);
  if (agents < 1) throw ConfigError("agents must be >= 1");

  const double alpha = config.get_double("alpha", 0.5);
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");

  Scenario s;
  s.n = agents;
  s.coeffs = make_coefficients(config.get_string("coefficients", "heat"), dim, config);
  s.coeffs.holder_exponent = alpha;
  if (s.coeffs.name == "variable-sine") s.coeffs.holder.diffusion_x = std::pow(0.5, alpha);

  s.phi = make_initial_datum(config.get_string("phi", "zero"), dim, alpha);
  s.g = make_source(config.get_string("g", "zero"), dim, agents, alpha, config);
  s.force = make_force(config.get_string("force", "zero"), dim, config);

  s.X0 = agent_matrix_from(config.get_list("x0"), dim, agents, "x0");
  s.V0 = config.has("v0") ? agent_matrix_from(config.get_list("v0"), dim, agents, "v0") : AgentMatrix::Zero(dim, agents);

  s.growth.T = config.get_double("horizon", 1.0);
  if (!(s.growth.T > 0.0)) throw ConfigError("horizon must be positive");
  s.growth.C = config.get_double("growth.C", 0.0);
  if (s.growth.C < 0.0) throw ConfigError("growth.C must be >= 0");
  s.growth.H = config.get_double("growth.H", s.phi.holder_H);
  if (config.has("growth.HR")) {
    const double hr = config.get_double("growth.HR");
    s.growth.HR = [hr](double) { return hr; };
  } else {
    s.growth.HR = s.g.holder_HR;
  }
  s.growth.M = config.get_double("growth.M", std::max(s.phi.growth_M, s.g.growth_M));

  s.radius = config.get_double("radius", 1.0);
  if (!(s.radius > 0.0)) throw ConfigError("radius must be positive");
  if (config.has("delta")) {
    const double delta = config.get_double("delta");
    if (!(delta > 0.0)) throw ConfigError("delta must be strictly positive");
    s.nonlocal_delta = delta;
  }

  const ParabolicityBounds bounds = sample_parabolicity(s.coeffs, s.growth.T);
  if (bounds.max_asymmetry > 1e-12) throw ConfigError("diffusion matrix is not symmetric");
  if (!(bounds.mu0 > 0.0))
    throw ConfigError("parabolicity violated: sampled eigenvalue " + format_double(bounds.mu0) + " of a is not positive");
  s.mu0 = bounds.mu0;
  s.mu1 = bounds.mu1;

  const double lambda_bound = s.mu0 / (s.mu1 * s.mu1);
  s.lambda0 = config.get_double("lambda0", lambda_bound);
  if (!(s.lambda0 > 0.0) || s.lambda0 > lambda_bound * (1.0 + 1e-12))
    throw ConfigError("lambda0 must lie in (0, mu0/mu1^2]");
  s.lambda0_star = config.get_double("lambda0_star", 0.9 * s.lambda0);
  if (!(s.lambda0_star > 0.0 && s.lambda0_star < s.lambda0))
    throw ConfigError("lambda0_star must lie in (0, lambda0)");

  if (!(s.growth.C < s.lambda0 / (4.0 * s.growth.T)))
    throw ConfigError("growth constant violates the parabolic side condition C < lambda0/(4T) = " +
                      format_double(s.lambda0 / (4.0 * s.growth.T)));
  return s;
}

}  // namespace hybrid
