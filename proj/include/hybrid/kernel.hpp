#pragma once

#include "hybrid/model.hpp"
#include "hybrid/types.hpp"

#include <array>

namespace hybrid::kernel {

/// e^{-theta} (theta/nu)^theta, the maximum of y^theta e^{-nu y} over y >= 0.
double ell(double theta, double nu);

/// Surface area of the unit sphere in R^N: 2 pi^{N/2} / Gamma(N/2).
double sphere_area(int dim);

/// Integral of exp(-gamma |y|^2) over R^N.
double gaussian_I0(double gamma, int dim);

/// Integral of exp(-gamma |y|^2) |y| over R^N.
double gaussian_I1(double gamma, int dim);

/// Admissible upper bound mu0/mu1^2 for the parabolic decay constant.
double lambda0_bound(double mu0, double mu1);

/// Fundamental solution of sum a_ij d_ij u + b.grad u + c u - u_t = 0 for constant coefficients:
///
///   Gamma(x,t; xi,tau) = (4 pi s)^{-N/2} det(a)^{-1/2} exp(-<a^{-1} d, d>/(4 s) + c s),
///   s = t - tau,  d = x - xi + sigma b s.
///
/// The drift enters with sign sigma = kDriftSign; a point mass at xi is carried along -b.
class Kernel {
public:
  static constexpr int kDriftSign = +1;

  Kernel(const SmallMatrix& diffusion, const Point& drift, double reaction);

  int dim() const { return dim_; }
  const SmallMatrix& diffusion() const { return a_; }
  const Point& drift() const { return b_; }
  double reaction() const { return c_; }
  const SmallMatrix& inverse_diffusion() const { return a_inv_; }
  /// Lower Cholesky factor: a = L L^T.
  const SmallMatrix& cholesky() const { return chol_; }
  /// L^{-T}, so that grad_x Gamma = Gamma L^{-T} u / sqrt(s) under xi = x + b s + 2 sqrt(s) L u.
  const SmallMatrix& cholesky_inv_transpose() const { return chol_inv_t_; }

  double eval(const Point& x, double t, const Point& xi, double tau) const;
  Point grad_x(const Point& x, double t, const Point& xi, double tau) const;
  SmallMatrix hess_x(const Point& x, double t, const Point& xi, double tau) const;

  /// xi = x + b s + 2 sqrt(s) L u: maps the standard Gaussian variable u to the source point.
  Point source_point(const Point& x, double s, const Point& u) const;

private:
  double lag(double t, double tau) const;
  Point offset(const Point& x, double t, const Point& xi, double tau) const;

  int dim_;
  SmallMatrix a_;
  Point b_;
  double c_;
  SmallMatrix a_inv_;
  SmallMatrix chol_;
  SmallMatrix chol_inv_t_;
  double norm_;  // (4 pi)^{-N/2} det(a)^{-1/2}
};

/// Builds the kernel of a constant-coefficient operator.
Kernel make_kernel(const OperatorCoefficients& coeffs);

/// Constants of the Gamma-derivative estimates and of the gradient bounds derived from them.
struct EstimateParams {
  double lambda0 = 1.0;
  double lambda0_star = 0.9;
  double nu0 = 0.025;  ///< (lambda0 - lambda0_star) / 4
  double C_gamma = 0.0;
  double K = 0.0;
  double kappa = 0.0;
};

EstimateParams make_estimate_params(double lambda0, double lambda0_star);

/// Smallest C such that |d^k Gamma| <= C s^{-(N+k)/2} exp(-lambda0* |x-xi|^2 / (4 s)) for every
/// component of the order-k derivative, found by maximizing over u = (x - xi)/sqrt(s).
/// Reaction enters through max(1, e^{c T}). With drift b the driftless constant at a Gaussian rate halfway
/// to the kernel's decay is multiplied by the factor that absorbs |b|^2 s, so the result is an upper bound.
double gamma_estimate_Cgamma(const Kernel& kernel, const EstimateParams& params, int order, double horizon = 1.0);

/// Ratio |d^k Gamma| / (s^{-(N+k)/2} exp(-lambda0*|x-xi|^2/(4s))) at one point (max over components).
double gamma_estimate_ratio(const Kernel& kernel, double lambda0_star, int order, const Point& x, double t,
                            const Point& xi, double tau);

struct DerivativeConstants {
  double K = 0.0;
  double kappa = 0.0;
};

/// K = pi^{N/2} C_Gamma ell(alpha/2, nu0) / (lambda0/2 - 2CT)^{N/2},  kappa = C^2 T/(lambda0/4 - CT) + 2C.
DerivativeConstants derivative_bound_constants(const EstimateParams& params, const GrowthSpec& growth, int dim,
                                               double alpha);

/// C_gamma per derivative order, maximized over the kernels representing the scenario's operator.
std::array<double, 3> scenario_order_constants(const Scenario& scenario, const EstimateParams& params);

/// Full estimate constants for a scenario: C_Gamma is the largest of the order 0/1/2 constants.
/// Variable coefficients use the frozen kernels a = mu0 I and a = mu1 I.
EstimateParams scenario_estimate_params(const Scenario& scenario);

}  // namespace hybrid::kernel
