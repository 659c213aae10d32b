#include "hybrid/kernel.hpp"

#include "hybrid/quadrature.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace hybrid::kernel {

double ell(double theta, double nu) {
  if (!(theta > 0.0) || !(nu > 0.0)) throw std::domain_error("ell: arguments must be positive");
  return std::exp(-theta) * std::pow(theta / nu, theta);
}

double sphere_area(int dim) { return quad::sphere_area(dim); }

double gaussian_I0(double gamma, int dim) {
  if (!(gamma > 0.0)) throw std::domain_error("gaussian_I0: gamma must be positive");
  if (dim < 1) throw std::domain_error("gaussian_I0: dimension must be >= 1");
  return std::pow(std::numbers::pi / gamma, 0.5 * dim);
}

double gaussian_I1(double gamma, int dim) {
  if (!(gamma > 0.0)) throw std::domain_error("gaussian_I1: gamma must be positive");
  if (dim < 1) throw std::domain_error("gaussian_I1: dimension must be >= 1");
  const double half = 0.5 * (dim + 1);
  return std::pow(1.0 / gamma, half) * 0.5 * sphere_area(dim) * 2.0 * std::pow(std::numbers::pi, half) /
         sphere_area(dim + 1);
}

double lambda0_bound(double mu0, double mu1) {
  if (!(mu0 > 0.0) || !(mu1 >= mu0)) throw std::domain_error("lambda0_bound: need 0 < mu0 <= mu1");
  return mu0 / (mu1 * mu1);
}

// ---- Kernel ----------------------------------------------------------------

Kernel::Kernel(const SmallMatrix& diffusion, const Point& drift, double reaction)
    : dim_(static_cast<int>(diffusion.rows())), a_(diffusion), b_(drift), c_(reaction) {
  if (diffusion.rows() != diffusion.cols() || drift.size() != diffusion.rows())
    throw std::invalid_argument("Kernel: inconsistent coefficient dimensions");
  Eigen::LLT<SmallMatrix> llt(a_);
  if (llt.info() != Eigen::Success || !(a_.determinant() > 0.0))
    throw std::invalid_argument("Kernel: diffusion matrix is singular or not positive definite");
  chol_ = llt.matrixL();
  a_inv_ = llt.solve(SmallMatrix::Identity(dim_, dim_));
  chol_inv_t_ = chol_.inverse().transpose();
  norm_ = std::pow(4.0 * std::numbers::pi, -0.5 * dim_) / std::sqrt(a_.determinant());
}

double Kernel::lag(double t, double tau) const {
  const double s = t - tau;
  if (!(s > 0.0)) throw std::domain_error("Kernel: requires tau < t");
  return s;
}

Point Kernel::offset(const Point& x, double t, const Point& xi, double tau) const {
  const double s = t - tau;
  return x - xi + kDriftSign * s * b_;
}

double Kernel::eval(const Point& x, double t, const Point& xi, double tau) const {
  const double s = lag(t, tau);
  const Point d = offset(x, t, xi, tau);
  const double q = d.dot(a_inv_ * d);
  return norm_ * std::pow(s, -0.5 * dim_) * std::exp(-q / (4.0 * s) + c_ * s);
}

Point Kernel::grad_x(const Point& x, double t, const Point& xi, double tau) const {
  const double s = lag(t, tau);
  const Point d = offset(x, t, xi, tau);
  const Point qd = a_inv_ * d;
  const double gamma = norm_ * std::pow(s, -0.5 * dim_) * std::exp(-d.dot(qd) / (4.0 * s) + c_ * s);
  return -gamma / (2.0 * s) * qd;
}

SmallMatrix Kernel::hess_x(const Point& x, double t, const Point& xi, double tau) const {
  const double s = lag(t, tau);
  const Point d = offset(x, t, xi, tau);
  const Point qd = a_inv_ * d;
  const double gamma = norm_ * std::pow(s, -0.5 * dim_) * std::exp(-d.dot(qd) / (4.0 * s) + c_ * s);
  return gamma * (qd * qd.transpose() / (4.0 * s * s) - a_inv_ / (2.0 * s));
}

Point Kernel::source_point(const Point& x, double s, const Point& u) const {
  return x + kDriftSign * s * b_ + 2.0 * std::sqrt(s) * (chol_ * u);
}

Kernel make_kernel(const OperatorCoefficients& coeffs) {
  if (!coeffs.is_constant) throw std::invalid_argument("make_kernel: coefficients are not constant");
  const Point origin = Point::Zero(coeffs.dim);
  return Kernel(coeffs.a(origin, 0.0), coeffs.b(origin, 0.0), coeffs.c(origin, 0.0));
}

// ---- estimate constants ----------------------------------------------------

EstimateParams make_estimate_params(double lambda0, double lambda0_star) {
  if (!(lambda0_star > 0.0 && lambda0_star < lambda0))
    throw std::domain_error("estimate params: need 0 < lambda0_star < lambda0");
  EstimateParams p;
  p.lambda0 = lambda0;
  p.lambda0_star = lambda0_star;
  p.nu0 = 0.25 * (lambda0 - lambda0_star);
  return p;
}

namespace {

// Scaled derivative magnitude at u = (x - xi)/sqrt(s) for a drift-free kernel, c = 0.
double scaled_ratio(const Kernel& k, double lambda0_star, int order, const Point& u) {
  const SmallMatrix& Q = k.inverse_diffusion();
  const Point qu = Q * u;
  const int n = k.dim();
  const double base = std::pow(4.0 * std::numbers::pi, -0.5 * n) / std::sqrt(k.diffusion().determinant()) *
                      std::exp(-(u.dot(qu) - lambda0_star * u.squaredNorm()) / 4.0);
  switch (order) {
    case 0:
      return base;
    case 1:
      return base * 0.5 * qu.cwiseAbs().maxCoeff();
    case 2: {
      double worst = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) worst = std::max(worst, std::abs(qu[i] * qu[j] / 4.0 - Q(i, j) / 2.0));
      return base * worst;
    }
    default:
      throw std::invalid_argument("gamma estimate: order must be 0, 1 or 2");
  }
}

std::vector<Point> direction_set(int dim) {
  std::vector<Point> dirs;
  if (dim == 1) {
    Point p(1);
    p[0] = 1.0;
    dirs.push_back(p);
    p[0] = -1.0;
    dirs.push_back(p);
  } else if (dim == 2) {
    const int m = 720;
    for (int k = 0; k < m; ++k) {
      const double th = 2.0 * std::numbers::pi * k / m;
      Point p(2);
      p << std::cos(th), std::sin(th);
      dirs.push_back(p);
    }
  } else {
    // Fibonacci sphere
    const int m = 2000;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < m; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / m;
      const double r = std::sqrt(1.0 - z * z);
      Point p(3);
      p << r * std::cos(golden * k), r * std::sin(golden * k), z;
      dirs.push_back(p);
    }
  }
  return dirs;
}

}  // namespace

double gamma_estimate_ratio(const Kernel& kernel, double lambda0_star, int order, const Point& x, double t,
                            const Point& xi, double tau) {
  const double s = t - tau;
  if (!(s > 0.0)) throw std::domain_error("gamma estimate: requires tau < t");
  const int n = kernel.dim();
  double value = 0.0;
  switch (order) {
    case 0:
      value = kernel.eval(x, t, xi, tau);
      break;
    case 1:
      value = kernel.grad_x(x, t, xi, tau).cwiseAbs().maxCoeff();
      break;
    case 2:
      value = kernel.hess_x(x, t, xi, tau).cwiseAbs().maxCoeff();
      break;
    default:
      throw std::invalid_argument("gamma estimate: order must be 0, 1 or 2");
  }
  const double envelope = std::pow(s, -0.5 * (n + order)) * std::exp(-lambda0_star * (x - xi).squaredNorm() / (4.0 * s));
  return value / envelope;
}

double gamma_estimate_Cgamma(const Kernel& kernel, const EstimateParams& params, int order, double horizon) {
  if (order < 0 || order > 2) throw std::invalid_argument("gamma estimate: order must be 0, 1 or 2");
  if (!(params.lambda0_star < params.lambda0))
    throw std::domain_error("gamma estimate: lambda0_star must be below lambda0 (supremum is infinite)");
  const int n = kernel.dim();
  Eigen::SelfAdjointEigenSolver<SmallMatrix> eig(kernel.inverse_diffusion(), Eigen::EigenvaluesOnly);
  const double decay = eig.eigenvalues().minCoeff() - params.lambda0_star;
  if (!(decay > 0.0)) throw std::domain_error("gamma estimate: lambda0_star exceeds the kernel's Gaussian decay");

  if (kernel.drift().norm() != 0.0) {
    // x - xi = d - b s with |x - xi|^2 <= (lambda'/lambda*) |d|^2 + lambda'/(lambda' - lambda*) |b|^2 s^2
    EstimateParams shifted = params;
    shifted.lambda0_star = params.lambda0_star + 0.5 * decay;
    shifted.lambda0 = eig.eigenvalues().minCoeff();
    const Kernel centred(kernel.diffusion(), Point::Zero(n), kernel.reaction());
    const double lp = shifted.lambda0_star;
    const double tail = params.lambda0_star * lp / (lp - params.lambda0_star) * kernel.drift().squaredNorm();
    return gamma_estimate_Cgamma(centred, shifted, order, horizon) * std::exp(tail * horizon / 4.0);
  }

  // exp(-decay z^2/4) < e^{-60} beyond z_max
  const double z_max = std::sqrt(240.0 / decay);
  const int radial = n == 1 ? 20000 : 400;

  Point best_u = Point::Zero(n);
  double best = scaled_ratio(kernel, params.lambda0_star, order, best_u);
  for (const Point& dir : direction_set(n)) {
    for (int k = 1; k <= radial; ++k) {
      const Point u = (z_max * k / radial) * dir;
      const double r = scaled_ratio(kernel, params.lambda0_star, order, u);
      if (r > best) {
        best = r;
        best_u = u;
      }
    }
  }

  // pattern search refinement around the grid maximizer
  double step = z_max / radial;
  while (step > 1e-12 * std::max(1.0, best_u.norm())) {
    bool improved = false;
    for (int d = 0; d < n; ++d) {
      for (const double sign : {1.0, -1.0}) {
        Point u = best_u;
        u[d] += sign * step;
        const double r = scaled_ratio(kernel, params.lambda0_star, order, u);
        if (r > best) {
          best = r;
          best_u = u;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return best * std::max(1.0, std::exp(kernel.reaction() * horizon));
}

DerivativeConstants derivative_bound_constants(const EstimateParams& params, const GrowthSpec& growth, int dim,
                                               double alpha) {
  const double C = growth.C;
  const double T = growth.T;
  const double half_gap = params.lambda0 / 2.0 - 2.0 * C * T;
  const double quarter_gap = params.lambda0 / 4.0 - C * T;
  if (!(half_gap > 0.0) || !(quarter_gap > 0.0))
    throw std::domain_error("derivative bound constants: lambda0/4 - C T must be positive");
  if (C > 0.0 && !(params.nu0 < quarter_gap))
    throw std::domain_error("derivative bound constants: nu0 must be below lambda0/4 - C T");

  DerivativeConstants out;
  out.K = std::pow(std::numbers::pi, 0.5 * dim) * params.C_gamma * ell(alpha / 2.0, params.nu0) /
          std::pow(half_gap, 0.5 * dim);
  out.kappa = C * C * T / quarter_gap + 2.0 * C;
  return out;
}

std::array<double, 3> scenario_order_constants(const Scenario& scenario, const EstimateParams& params) {
  const int n = scenario.dim();
  std::vector<Kernel> kernels;
  if (scenario.coeffs.is_constant) {
    kernels.push_back(make_kernel(scenario.coeffs));
  } else {
    kernels.emplace_back(scenario.mu0 * SmallMatrix::Identity(n, n), Point::Zero(n), 0.0);
    kernels.emplace_back(scenario.mu1 * SmallMatrix::Identity(n, n), Point::Zero(n), 0.0);
  }
  std::array<double, 3> c{0.0, 0.0, 0.0};
  for (const Kernel& k : kernels)
    for (int order = 0; order <= 2; ++order)
      c[static_cast<std::size_t>(order)] =
          std::max(c[static_cast<std::size_t>(order)], gamma_estimate_Cgamma(k, params, order, scenario.horizon()));
  return c;
}

EstimateParams scenario_estimate_params(const Scenario& scenario) {
  EstimateParams p = make_estimate_params(scenario.lambda0, scenario.lambda0_star);
  const auto c = scenario_order_constants(scenario, p);
  p.C_gamma = *std::max_element(c.begin(), c.end());
  const DerivativeConstants dc = derivative_bound_constants(p, scenario.growth, scenario.dim(), scenario.alpha());
  p.K = dc.K;
  p.kappa = dc.kappa;
  return p;
}

}  // namespace hybrid::kernel
