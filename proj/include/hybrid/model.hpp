#pragma once

#include "hybrid/config.hpp"
#include "hybrid/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hybrid {

/// Hölder constants of the operator coefficients: exponent alpha in x, alpha/2 in t.
struct CoefficientHolder {
  double diffusion_x = 0.0;
  double diffusion_t = 0.0;
  double drift_x = 0.0;
  double drift_t = 0.0;
  double reaction_x = 0.0;
  double reaction_t = 0.0;
};

/// Coefficients of L = sum a_ij d_ij + sum b_i d_i + c - d_t.
struct OperatorCoefficients {
  int dim = 1;
  std::string name;
  std::function<SmallMatrix(const Point&, double)> diffusion;
  std::function<Point(const Point&, double)> drift;
  std::function<double(const Point&, double)> reaction;
  bool is_constant = true;
  double holder_exponent = 0.5;
  CoefficientHolder holder;

  SmallMatrix a(const Point& x, double t) const { return diffusion(x, t); }
  Point b(const Point& x, double t) const { return drift(x, t); }
  double c(const Point& x, double t) const { return reaction(x, t); }
};

/// Growth and Hölder data of phi and g.
struct GrowthSpec {
  double C = 0.0;                       ///< Gaussian-growth exponent
  double H = 0.0;                       ///< Hölder constant of phi
  std::function<double(double)> HR;     ///< radius -> Hölder constant of g
  double M = 0.0;                       ///< linear-growth constant (0 when unused)
  double T = 1.0;                       ///< time horizon

  double holder_g(double radius) const { return HR ? HR(radius) : 0.0; }
};

/// Initial datum phi with its declared regularity.
struct InitialDatum {
  std::string name;
  std::function<double(const Point&)> value;
  /// Analytic gradient; used for the t = 0 limit of grad f.
  std::function<Point(const Point&)> gradient;
  bool is_zero = false;
  double holder_H = 0.0;
  double growth_M = 0.0;
  bool decays = true;  ///< |phi| -> 0 at infinity (finite-difference box is admissible)
};

/// Source term g(x, X). Positive values deplete f.
struct SourceTerm {
  std::string name;
  std::function<double(const Point&, const AgentMatrix&)> value;
  bool is_zero = false;
  bool space_independent = false;
  std::function<double(double)> holder_HR;
  double growth_M = 0.0;
};

/// Force law F_i(t, X, V, w).
struct ForceLaw {
  std::string name;
  std::function<Point(double, const AgentMatrix&, const AgentMatrix&, const Point&, int)> eval;
  double lipschitz_w = 0.0;                       ///< L_F
  std::function<double(double)> lipschitz_xv;     ///< compact radius -> L_F^K
  bool uses_gradient = true;
  /// Global Lipschitz constant (all arguments) when the law is globally Lipschitz.
  std::optional<double> global_lipschitz;

  double lipschitz_on(double radius) const { return lipschitz_xv ? lipschitz_xv(radius) : 0.0; }
};

/// A validated problem instance. Immutable after build_scenario.
struct Scenario {
  OperatorCoefficients coeffs;
  InitialDatum phi;
  SourceTerm g;
  ForceLaw force;
  int n = 1;
  AgentMatrix X0;
  AgentMatrix V0;
  GrowthSpec growth;
  std::optional<double> nonlocal_delta;
  double radius = 1.0;  ///< compact-set radius R of the local theorem

  // recorded by build_scenario
  double mu0 = 1.0;
  double mu1 = 1.0;
  double lambda0 = 1.0;
  double lambda0_star = 0.9;

  int dim() const { return coeffs.dim; }
  double alpha() const { return coeffs.holder_exponent; }
  double horizon() const { return growth.T; }
};

/// Sampled eigenvalue bounds of a(x,t) on a probe grid.
struct ParabolicityBounds {
  double mu0 = 0.0;
  double mu1 = 0.0;
  double max_asymmetry = 0.0;
};

ParabolicityBounds sample_parabolicity(const OperatorCoefficients& coeffs, double horizon,
                                       double box_half_width = 4.0, int points_per_axis = 33,
                                       int time_points = 5);

/// Builds and validates a scenario from its parsed description.
Scenario build_scenario(const ScenarioConfig& config);

// ---- preset catalog ------------------------------------------------------

struct PresetInfo {
  std::string kind;  ///< coefficients | phi | g | force
  std::string name;
  std::string description;
};

std::vector<PresetInfo> preset_catalog();

OperatorCoefficients make_coefficients(const std::string& name, int dim, const ScenarioConfig& config);
InitialDatum make_initial_datum(const std::string& name, int dim, double alpha);
SourceTerm make_source(const std::string& name, int dim, int agents, double alpha, const ScenarioConfig& config);
ForceLaw make_force(const std::string& name, int dim, const ScenarioConfig& config);

}  // namespace hybrid
