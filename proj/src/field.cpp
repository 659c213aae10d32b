#include "hybrid/field.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hybrid {

const char* backend_name(FieldBackend backend) {
  return backend == FieldBackend::ClosedFormKernel ? "closed-form-kernel" : "finite-difference";
}

void QuadratureSpec::validate() const {
  if (u_max < 6.0) throw std::invalid_argument("quadrature: u_max must be >= 6");
  if (space_panels < 0 || space_nodes < 1 || time_panels < 1 || time_nodes < 1)
    throw std::invalid_argument("quadrature: node counts must be positive");
  if (ball_radial_nodes < 1 || ball_angular_nodes < 1)
    throw std::invalid_argument("quadrature: ball rule needs positive node counts");
  if (!(fd_box > 0.0) || !(fd_h > 0.0) || !(fd_snapshot_dt > 0.0) || fd_dt < 0.0)
    throw std::invalid_argument("quadrature: finite-difference parameters must be positive");
}

Point ball_average(const std::function<Point(const Point&)>& grad, const Point& x, double delta,
                   const quad::TensorRule& unit_ball) {
  if (!(delta > 0.0)) throw std::invalid_argument("ball average: delta must be positive");
  Point sum = Point::Zero(x.size());
  for (std::size_t k = 0; k < unit_ball.size(); ++k) sum += unit_ball.weights[k] * grad(x + delta * unit_ball.nodes[k]);
  return sum;
}

namespace {

int default_panels(int dim) { return dim == 3 ? 8 : 16; }

}  // namespace

FieldProbe::FieldProbe(const Scenario& scenario, AgentPath path, QuadratureSpec spec,
                       std::optional<FieldBackend> backend)
    : scenario_(&scenario), path_(std::move(path)), spec_(spec) {
  spec_.validate();
  if (!path_.empty()) path_.validate();
  if (!scenario.g.is_zero && path_.empty())
    throw std::invalid_argument("field probe: an agent path is required for a nonzero source");

  const bool constant = scenario.coeffs.is_constant;
  backend_ = backend.value_or(constant ? FieldBackend::ClosedFormKernel : FieldBackend::FiniteDifference);
  if (backend_ == FieldBackend::ClosedFormKernel && !constant)
    throw std::invalid_argument("field probe: closed-form kernel backend requires constant coefficients");

  const int dim = scenario.dim();
  ball_rule_ = quad::unit_ball_rule(dim, spec_.ball_radial_nodes, spec_.ball_angular_nodes);
  if (backend_ == FieldBackend::ClosedFormKernel) {
    kernel_ = kernel::make_kernel(scenario.coeffs);
    const int panels = spec_.space_panels > 0 ? spec_.space_panels : default_panels(dim);
    const auto axis = quad::composite_gauss_legendre(panels, spec_.space_nodes, -spec_.u_max, spec_.u_max);
    space_rule_ = quad::tensor_rule(axis, dim, spec_.prune_radius_sq);
    const double norm = std::pow(std::numbers::pi, -0.5 * dim);
    for (std::size_t k = 0; k < space_rule_.size(); ++k)
      space_rule_.weights[k] *= norm * std::exp(-space_rule_.nodes[k].squaredNorm());
    time_rule_ = quad::composite_gauss_legendre(spec_.time_panels, spec_.time_nodes, 0.0, 1.0);
  } else {
    AgentPath fd_path = path_;
    if (fd_path.empty()) {
      const AgentMatrix none = AgentMatrix::Zero(dim, scenario.n);
      fd_path = AgentPath::constant(none, none, {0.0, scenario.horizon()});
    }
    grid_ = std::make_shared<const FieldGrid>(solve_field_fd(scenario, fd_path, spec_));
  }
}

void FieldProbe::check_time(double t, bool allow_zero) const {
  if (!std::isfinite(t) || t < 0.0 || (!allow_zero && t == 0.0))
    throw std::domain_error("field probe: time " + format_double(t) + " outside (0, horizon]");
  double horizon = path_.empty() ? scenario_->horizon() : path_.horizon();
  if (grid_) horizon = grid_->times.back();
  if (!scenario_->g.is_zero || grid_) {
    if (t > horizon * (1.0 + 1e-12) + 1e-14)
      throw std::domain_error("field probe: time " + format_double(t) + " beyond the path horizon " +
                              format_double(horizon));
  }
}

AgentMatrix FieldProbe::agents_at(double tau) const { return path_.X_at(tau); }

double FieldProbe::eval_f(const Point& x, double t) const {
  check_time(t, true);
  const Scenario& sc = *scenario_;
  if (t == 0.0) return sc.phi.value(x);
  if (grid_) return grid_->value(x, t);

  const kernel::Kernel& k = *kernel_;
  const double c = k.reaction();
  double total = 0.0;
  if (!sc.phi.is_zero) {
    double sum = 0.0;
    for (std::size_t q = 0; q < space_rule_.size(); ++q)
      sum += space_rule_.weights[q] * sc.phi.value(k.source_point(x, t, space_rule_.nodes[q]));
    total += std::exp(c * t) * sum;
  }
  if (!sc.g.is_zero) {
    const double root = std::sqrt(t);
    double integral = 0.0;
    for (std::size_t j = 0; j < time_rule_.size(); ++j) {
      const double sigma = root * time_rule_.nodes[j];
      const double s = sigma * sigma;
      const AgentMatrix X = agents_at(t - s);
      double inner = 0.0;
      if (sc.g.space_independent) {
        inner = sc.g.value(x, X);
      } else {
        for (std::size_t q = 0; q < space_rule_.size(); ++q)
          inner += space_rule_.weights[q] * sc.g.value(k.source_point(x, s, space_rule_.nodes[q]), X);
      }
      integral += root * time_rule_.weights[j] * 2.0 * sigma * std::exp(c * s) * inner;
    }
    total -= integral;
  }
  return total;
}

Point FieldProbe::grad_f(const Point& x, double t) const {
  check_time(t, true);
  const Scenario& sc = *scenario_;
  if (t == 0.0) return sc.phi.gradient(x);
  if (grid_) return grid_->gradient(x, t);

  const kernel::Kernel& k = *kernel_;
  const SmallMatrix& LinvT = k.cholesky_inv_transpose();
  const double c = k.reaction();
  const int dim = sc.dim();
  Point total = Point::Zero(dim);
  if (!sc.phi.is_zero) {
    const double center = sc.phi.value(x);
    Point sum = Point::Zero(dim);
    for (std::size_t q = 0; q < space_rule_.size(); ++q) {
      const Point& u = space_rule_.nodes[q];
      sum += space_rule_.weights[q] * (sc.phi.value(k.source_point(x, t, u)) - center) * u;
    }
    total += std::exp(c * t) / std::sqrt(t) * (LinvT * sum);
  }
  if (!sc.g.is_zero && !sc.g.space_independent) {
    const double root = std::sqrt(t);
    Point integral = Point::Zero(dim);
    for (std::size_t j = 0; j < time_rule_.size(); ++j) {
      const double sigma = root * time_rule_.nodes[j];
      const double s = sigma * sigma;
      const AgentMatrix X = agents_at(t - s);
      const double center = sc.g.value(x, X);
      Point inner = Point::Zero(dim);
      for (std::size_t q = 0; q < space_rule_.size(); ++q) {
        const Point& u = space_rule_.nodes[q];
        inner += space_rule_.weights[q] * (sc.g.value(k.source_point(x, s, u), X) - center) * u;
      }
      // ds / sqrt(s) = 2 dsigma
      integral += root * time_rule_.weights[j] * 2.0 * std::exp(c * s) * inner;
    }
    total -= LinvT * integral;
  }
  return total;
}

SmallMatrix FieldProbe::hessian_f(const Point& x, double t) const {
  check_time(t, false);
  const Scenario& sc = *scenario_;
  if (grid_) return grid_->hessian(x, t);

  const kernel::Kernel& k = *kernel_;
  const SmallMatrix& LinvT = k.cholesky_inv_transpose();
  const double c = k.reaction();
  const int dim = sc.dim();
  const SmallMatrix half = 0.5 * SmallMatrix::Identity(dim, dim);
  auto weight_matrix = [&](const Point& u) -> SmallMatrix {
    return u * u.transpose() - half;
  };

  SmallMatrix total = SmallMatrix::Zero(dim, dim);
  if (!sc.phi.is_zero) {
    const double center = sc.phi.value(x);
    SmallMatrix sum = SmallMatrix::Zero(dim, dim);
    for (std::size_t q = 0; q < space_rule_.size(); ++q) {
      const Point& u = space_rule_.nodes[q];
      sum += space_rule_.weights[q] * (sc.phi.value(k.source_point(x, t, u)) - center) * weight_matrix(u);
    }
    total += std::exp(c * t) / t * sum;
  }
  if (!sc.g.is_zero && !sc.g.space_independent) {
    const double root = std::sqrt(t);
    SmallMatrix integral = SmallMatrix::Zero(dim, dim);
    for (std::size_t j = 0; j < time_rule_.size(); ++j) {
      const double sigma = root * time_rule_.nodes[j];
      const double s = sigma * sigma;
      const AgentMatrix X = agents_at(t - s);
      const double center = sc.g.value(x, X);
      SmallMatrix inner = SmallMatrix::Zero(dim, dim);
      for (std::size_t q = 0; q < space_rule_.size(); ++q) {
        const Point& u = space_rule_.nodes[q];
        inner += space_rule_.weights[q] * (sc.g.value(k.source_point(x, s, u), X) - center) * weight_matrix(u);
      }
      // ds / s = 2 dsigma / sigma
      integral += root * time_rule_.weights[j] * 2.0 / sigma * std::exp(c * s) * inner;
    }
    total -= integral;
  }
  SmallMatrix out = LinvT * total * LinvT.transpose();
  return 0.5 * (out + out.transpose());
}

Point FieldProbe::ball_avg_grad(const Point& x, double t, double delta) const {
  if (!(delta > 0.0)) throw std::invalid_argument("ball average: delta must be positive");
  return ball_average([&](const Point& y) { return grad_f(y, t); }, x, delta, ball_rule_);
}

}  // namespace hybrid
