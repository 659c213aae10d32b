#pragma once

#include "hybrid/field.hpp"
#include "hybrid/kernel.hpp"
#include "hybrid/model.hpp"
#include "hybrid/path.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hybrid {

enum class GradientMode { Pointwise, Nonlocal };

const char* mode_name(GradientMode mode);

struct PsiOptions {
  GradientMode mode = GradientMode::Pointwise;
  double delta = 0.0;  ///< ball radius in nonlocal mode
  QuadratureSpec quadrature;
  double dt = 1e-2;  ///< path grid step
  bool check_membership = true;
};

/// Contraction horizon of the local existence theorem.
struct HorizonCertificate {
  double T1 = 0.0;
  double T2 = 0.0;
  double T_bar = 0.0;
  double S_value = 0.0;
  double S_standard = 0.0;  ///< S at T_bar with exponent kappa (|X0|^2 + R^2) instead of twice that
  double gamma_bar = 0.0;
  double radius = 1.0;
  double margin = 0.1;
  double safety = 0.9;
  kernel::EstimateParams estimates;
};

/// T1 = min(R/(n(R+|V0|)), [R/((2n sqrt(N) L_F K e^{kappa(|X0|^2+R^2)}/(alpha+1))(1+2H_X/(alpha+3)))]^{2/(alpha+1)}, T).
double horizon_T1(const Scenario& scenario, double radius, const kernel::EstimateParams& est,
                  std::optional<double> delta = std::nullopt);

/// Three-term contraction modulus at T_bar. `conservative` doubles the exponent of the middle term.
double contraction_S(const Scenario& scenario, double radius, double T_bar, const kernel::EstimateParams& est,
                     bool conservative = true, std::optional<double> delta = std::nullopt);

HorizonCertificate horizon_certificate(const Scenario& scenario, double radius, const kernel::EstimateParams& est,
                                       std::optional<double> delta = std::nullopt, double margin = 0.1,
                                       double safety = 0.9);
HorizonCertificate horizon_certificate(const Scenario& scenario, double radius);

/// Already-solved trajectory on [0, t0] feeding the field's source term.
struct SegmentContext {
  AgentPath history;
};

/// Psi(X, V): new X = X0 + int V, new V = V0 + int F(tau, X, V, w) on the path grid (trapezoid),
/// with w evaluated on the input path. X0, V0 are the scenario's initial data.
AgentPath apply_psi(const AgentPath& path, const Scenario& scenario, const PsiOptions& options,
                    const SegmentContext& context = {});

/// Throws SolverError naming the first node with |X - X0| > R or |V - V0| > R (R = scenario.radius).
void check_membership(const AgentPath& path, const Scenario& scenario);

struct LocalSolution {
  AgentPath path;
  double C0 = 0.0;             ///< max_i |F_i(t, X0, V0, 0)| on the segment
  std::vector<double> diffs;   ///< ||Y_{k+1} - Y_k||
  std::vector<double> ratios;  ///< diffs[k] / diffs[k-1]
  int iterations = 0;
  HorizonCertificate certificate;
};

/// Picard iteration from the constant path on the grid t0 + k dt covering [t0, t0 + T_bar].
LocalSolution solve_local(const Scenario& scenario, const HorizonCertificate& certificate, double tol,
                          int max_iters, const PsiOptions& options, const SegmentContext& context = {},
                          long start_index = 0, long max_steps = -1);

struct GlobalSolution {
  AgentPath path;
  std::vector<LocalSolution> segments;  ///< per-segment certificate, C0 and iterate history
  std::vector<double> segment_starts;
};

struct GlobalOptions {
  double tol = 1e-8;
  int max_iters = 50;
  double safety = 0.9;
  double margin = 0.1;
};

/// Continuation: restarts the local solve from each segment's endpoint until the horizon is covered.
GlobalSolution solve_global(const Scenario& scenario, double horizon, const PsiOptions& options,
                            const GlobalOptions& global = {});

/// max over sampled tau in [t0, t0 + length] of max_i |F_i(tau, X0, V0, 0)|.
double force_at_rest(const Scenario& scenario, double t0, double length, int samples = 17);

struct GronwallConstants {
  double alpha_g = 0.0;
  double exponent = 0.0;
  double B = 0.0;
  double K1 = 0.0;
  double K2 = 0.0;
  double C0 = 0.0;
  double L_F = 0.0;
};

GronwallConstants gronwall_constants(const Scenario& scenario, double horizon, const kernel::EstimateParams& est);

/// Bound on sup_t |Y(t) - Y0| for globally Lipschitz forces and linearly growing data.
double gronwall_bound_B(const Scenario& scenario, double horizon, const kernel::EstimateParams& est);
double gronwall_bound_B(const Scenario& scenario, double horizon);

/// K1((1+|x|)/sqrt(t) + K2 + int_0^t (1 + |x| + |X(tau)|)/sqrt(t - tau) dtau).
double apriori_grad_bound(const Scenario& scenario, const Point& x, double t, const AgentPath& path,
                          const kernel::EstimateParams& est, int time_panels = 8, int time_nodes = 8);

}  // namespace hybrid
