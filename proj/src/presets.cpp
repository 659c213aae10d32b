#include "hybrid/model.hpp"

#include <cmath>
#include <limits>

namespace hybrid {

namespace {

// max |grad exp(-|x|^2)| = sqrt(2) e^{-1/2}
const double kGaussianLipschitz = std::sqrt(2.0) * std::exp(-0.5);

Point zero_point(int dim) { return Point::Zero(dim); }

OperatorCoefficients constant_coefficients(std::string name, const SmallMatrix& a, const Point& b, double c) {
  OperatorCoefficients coeffs;
  coeffs.dim = static_cast<int>(a.rows());
  coeffs.name = std::move(name);
  coeffs.diffusion = [a](const Point&, double) { return a; };
  coeffs.drift = [b](const Point&, double) { return b; };
  coeffs.reaction = [c](const Point&, double) { return c; };
  coeffs.is_constant = true;
  return coeffs;
}

}  // namespace

std::vector<PresetInfo> preset_catalog() {
  return {
      {"coefficients", "heat", "a = I, b = 0, c = 0"},
      {"coefficients", "anisotropic-constant", "a = diag(0.5, 2, 1) truncated to N, b = 0, c = 0"},
      {"coefficients", "variable-sine", "a(x,t) = (1 + 0.5 sin x_1) I, b = 0, c = 0"},
      {"coefficients", "constant", "inline constants: diffusion (N*N), drift (N), reaction"},
      {"phi", "zero", "phi = 0"},
      {"phi", "gaussian", "phi = exp(-|x|^2)"},
      {"phi", "abs-sqrt", "phi = |x|^(1/2), Hölder 1/2 with H = 1"},
      {"phi", "linear", "phi = x_1 (test datum, not decaying)"},
      {"g", "zero", "g = 0"},
      {"g", "constant", "g = g.value"},
      {"g", "agent-secretion", "g(x, X) = -sum_j exp(-|x - x_j|^2)"},
      {"force", "zero", "F = 0"},
      {"force", "constant", "F_i = force.value"},
      {"force", "pure-chemotaxis", "F_i = chi w"},
      {"force", "damped-chemotaxis", "F_i = -kappa_v v_i + chi w"},
      {"force", "saturating-chemotaxis", "F_i = chi w / (1 + |w|)"},
  };
}

OperatorCoefficients make_coefficients(const std::string& name, int dim, const ScenarioConfig& config) {
  if (name == "heat") {
    return constant_coefficients(name, SmallMatrix::Identity(dim, dim), zero_point(dim), 0.0);
  }
  if (name == "anisotropic-constant") {
    const double diag[3] = {0.5, 2.0, 1.0};
    SmallMatrix a = SmallMatrix::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) a(i, i) = diag[i];
    return constant_coefficients(name, a, zero_point(dim), 0.0);
  }
  if (name == "variable-sine") {
    OperatorCoefficients coeffs;
    coeffs.dim = dim;
    coeffs.name = name;
    coeffs.diffusion = [dim](const Point& x, double) -> SmallMatrix {
      return (1.0 + 0.5 * std::sin(x[0])) * SmallMatrix::Identity(dim, dim);
    };
    coeffs.drift = [dim](const Point&, double) -> Point { return Point::Zero(dim); };
    coeffs.reaction = [](const Point&, double) { return 0.0; };
    coeffs.is_constant = false;
    coeffs.holder.diffusion_x = 0.5;  // Lipschitz constant; build_scenario rescales to 0.5^alpha
    return coeffs;
  }
  if (name == "constant") {
    const auto a_list = config.get_list("diffusion");
    if (static_cast<int>(a_list.size()) != dim * dim)
      throw ConfigError("dimension mismatch: 'diffusion' needs N*N entries");
    SmallMatrix a(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) a(i, j) = a_list[static_cast<std::size_t>(i * dim + j)];
    Point b = Point::Zero(dim);
    if (config.has("drift")) {
      const auto b_list = config.get_list("drift");
      if (static_cast<int>(b_list.size()) != dim) throw ConfigError("dimension mismatch: 'drift' needs N entries");
      for (int i = 0; i < dim; ++i) b[i] = b_list[static_cast<std::size_t>(i)];
    }
    return constant_coefficients(name, a, b, config.get_double("reaction", 0.0));
  }
  throw ConfigError("unknown coefficient preset '" + name + "'");
}

InitialDatum make_initial_datum(const std::string& name, int dim, double alpha) {
  InitialDatum phi;
  phi.name = name;
  if (name == "zero") {
    phi.value = [](const Point&) { return 0.0; };
    phi.gradient = [dim](const Point&) -> Point { return Point::Zero(dim); };
    phi.is_zero = true;
    return phi;
  }
  if (name == "gaussian") {
    phi.value = [](const Point& x) { return std::exp(-x.squaredNorm()); };
    phi.gradient = [](const Point& x) -> Point { return -2.0 * std::exp(-x.squaredNorm()) * x; };
    // |dphi| <= min(1, L d) <= (L d)^alpha
    phi.holder_H = std::pow(kGaussianLipschitz, alpha);
    phi.growth_M = 1.0;
    return phi;
  }
  if (name == "abs-sqrt") {
    if (std::abs(alpha - 0.5) > 1e-12) throw ConfigError("abs-sqrt datum is Hölder continuous only with alpha = 1/2");
    phi.value = [](const Point& x) { return std::sqrt(x.norm()); };
    phi.gradient = [dim](const Point& x) -> Point {
      const double r = x.norm();
      if (r == 0.0) return Point::Zero(dim);
      return 0.5 * std::pow(r, -1.5) * x;
    };
    phi.holder_H = 1.0;
    phi.growth_M = 1.0;
    phi.decays = false;
    return phi;
  }
  if (name == "linear") {
    phi.value = [](const Point& x) { return x[0]; };
    phi.gradient = [dim](const Point&) -> Point {
      Point e = Point::Zero(dim);
      e[0] = 1.0;
      return e;
    };
    phi.holder_H = std::numeric_limits<double>::infinity();
    phi.growth_M = 1.0;
    phi.decays = false;
    return phi;
  }
  throw ConfigError("unknown phi preset '" + name + "'");
}

SourceTerm make_source(const std::string& name, int /*dim*/, int agents, double alpha, const ScenarioConfig& config) {
  SourceTerm g;
  g.name = name;
  if (name == "zero") {
    g.value = [](const Point&, const AgentMatrix&) { return 0.0; };
    g.is_zero = true;
    g.space_independent = true;
    g.holder_HR = [](double) { return 0.0; };
    return g;
  }
  if (name == "constant") {
    const double level = config.get_double("g.value", 1.0);
    g.value = [level](const Point&, const AgentMatrix&) { return level; };
    g.space_independent = true;
    g.is_zero = level == 0.0;
    g.holder_HR = [](double) { return 0.0; };
    g.growth_M = std::abs(level);
    return g;
  }
  if (name == "agent-secretion") {
    g.value = [](const Point& x, const AgentMatrix& X) {
      double sum = 0.0;
      for (Eigen::Index j = 0; j < X.cols(); ++j) {
        double d2 = 0.0;
        for (Eigen::Index k = 0; k < X.rows(); ++k) {
          const double diff = x[k] - X(k, j);
          d2 += diff * diff;
        }
        sum += std::exp(-d2);
      }
      return -sum;
    };
    // n L^alpha |x - x'|^alpha from the x-dependence, sqrt(n) L |X - X'| from the agents
    const double n = agents;
    const double hr = std::max(n * std::pow(kGaussianLipschitz, alpha), std::sqrt(n) * kGaussianLipschitz);
    g.holder_HR = [hr](double) { return hr; };
    g.growth_M = n;
    return g;
  }
  throw ConfigError("unknown g preset '" + name + "'");
}

ForceLaw make_force(const std::string& name, int dim, const ScenarioConfig& config) {
  ForceLaw force;
  force.name = name;
  const double chi = config.get_double("force.chi", 0.1);
  const double kappa = config.get_double("force.kappa_v", 1.0);

  if (name == "zero") {
    force.eval = [dim](double, const AgentMatrix&, const AgentMatrix&, const Point&, int) -> Point {
      return Point::Zero(dim);
    };
    force.lipschitz_xv = [](double) { return 0.0; };
    force.uses_gradient = false;
    force.global_lipschitz = 0.0;
    return force;
  }
  if (name == "constant") {
    const auto list = config.get_list("force.value");
    if (static_cast<int>(list.size()) != dim) throw ConfigError("dimension mismatch: 'force.value' needs N entries");
    Point value(dim);
    for (int i = 0; i < dim; ++i) value[i] = list[static_cast<std::size_t>(i)];
    force.eval = [value](double, const AgentMatrix&, const AgentMatrix&, const Point&, int) -> Point { return value; };
    force.lipschitz_xv = [](double) { return 0.0; };
    force.uses_gradient = false;
    force.global_lipschitz = 0.0;
    return force;
  }
  if (name == "pure-chemotaxis") {
    force.eval = [chi](double, const AgentMatrix&, const AgentMatrix&, const Point& w, int) -> Point {
      return chi * w;
    };
    force.lipschitz_w = std::abs(chi);
    force.lipschitz_xv = [](double) { return 0.0; };
    force.uses_gradient = chi != 0.0;
    force.global_lipschitz = std::abs(chi);
    return force;
  }
  if (name == "damped-chemotaxis") {
    force.eval = [chi, kappa](double, const AgentMatrix&, const AgentMatrix& V, const Point& w, int i) -> Point {
      return -kappa * Point(V.col(i)) + chi * w;
    };
    force.lipschitz_w = std::abs(chi);
    force.lipschitz_xv = [kappa](double) { return std::abs(kappa); };
    force.uses_gradient = chi != 0.0;
    force.global_lipschitz = std::max(std::abs(chi), std::abs(kappa));
    return force;
  }
  if (name == "saturating-chemotaxis") {
    force.eval = [chi](double, const AgentMatrix&, const AgentMatrix&, const Point& w, int) -> Point {
      return chi * w / (1.0 + w.norm());
    };
    // Jacobian of w/(1+|w|) has spectral norm 1/(1+|w|) <= 1
    force.lipschitz_w = std::abs(chi);
    force.lipschitz_xv = [](double) { return 0.0; };
    force.uses_gradient = chi != 0.0;
    force.global_lipschitz = std::abs(chi);
    return force;
  }
  throw ConfigError("unknown force preset '" + name + "'");
}

}  // namespace hybrid
