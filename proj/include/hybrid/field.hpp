#pragma once

#include "hybrid/kernel.hpp"
#include "hybrid/model.hpp"
#include "hybrid/path.hpp"
#include "hybrid/quadrature.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace hybrid {

enum class FieldBackend { ClosedFormKernel, FiniteDifference };

const char* backend_name(FieldBackend backend);

/// Discretization parameters of both field backends.
struct QuadratureSpec {
  // representation formula, in u with xi = x + b s + 2 sqrt(s) L u
  double u_max = 8.0;
  int space_panels = 0;  ///< 0: 16 panels for N = 1, 2 and 8 for N = 3
  int space_nodes = 8;   ///< Gauss-Legendre nodes per panel
  double prune_radius_sq = 42.0;
  // tau = t - sigma^2, sigma in [0, sqrt(t)]
  int time_panels = 4;
  int time_nodes = 8;
  // ball averages
  int ball_radial_nodes = 6;
  int ball_angular_nodes = 12;
  // finite differences on [-fd_box, fd_box]^N
  double fd_box = 6.0;
  double fd_h = 0.05;
  double fd_snapshot_dt = 0.01;
  double fd_tail_tolerance = 1e-6;
  double fd_dt = 0.0;  ///< 0: largest stable step dividing the snapshot interval

  void validate() const;
};

/// Explicit finite-difference solution stored as snapshots on a uniform box grid.
class FieldGrid {
public:
  int dim = 1;
  double box = 6.0;
  double h = 0.05;
  int points_per_axis = 0;
  double dt = 0.0;  ///< time step actually used
  std::vector<double> times;
  std::vector<std::vector<double>> snapshots;  ///< row-major, axis 0 fastest

  double value(const Point& x, double t) const;
  Point gradient(const Point& x, double t) const;
  SmallMatrix hessian(const Point& x, double t) const;

  double coordinate(int index) const { return -box + h * index; }
  std::size_t node_count() const;

private:
  template <class NodeFn>
  auto interpolate(const Point& x, double t, NodeFn&& node_fn) const;
  double at(std::size_t snapshot, const int* idx) const;
  double node_derivative(std::size_t snapshot, const int* idx, int i, int j) const;
};

/// f_t = a:D^2 f + b.grad f + c f - g(x, X(t)) on the box, Dirichlet data phi on the boundary.
FieldGrid solve_field_fd(const Scenario& scenario, const AgentPath& path, const QuadratureSpec& spec);

/// Evaluator of f(.,.;X) and its derivatives for a fixed agent path.
/// Holds a reference to the scenario, which must outlive the probe.
class FieldProbe {
public:
  FieldProbe(const Scenario& scenario, AgentPath path, QuadratureSpec spec = {},
             std::optional<FieldBackend> backend = std::nullopt);

  FieldBackend backend() const { return backend_; }
  const Scenario& scenario() const { return *scenario_; }
  const AgentPath& path() const { return path_; }
  const QuadratureSpec& spec() const { return spec_; }
  const FieldGrid* grid() const { return grid_.get(); }

  double eval_f(const Point& x, double t) const;
  Point grad_f(const Point& x, double t) const;
  SmallMatrix hessian_f(const Point& x, double t) const;
  Point ball_avg_grad(const Point& x, double t, double delta) const;

private:
  void check_time(double t, bool allow_zero) const;
  AgentMatrix agents_at(double tau) const;

  const Scenario* scenario_;
  AgentPath path_;
  QuadratureSpec spec_;
  FieldBackend backend_;
  std::optional<kernel::Kernel> kernel_;
  quad::TensorRule space_rule_;
  quad::Rule1D time_rule_;  ///< on [0, 1], scaled to [0, sqrt(t)]
  quad::TensorRule ball_rule_;
  std::shared_ptr<const FieldGrid> grid_;
};

/// (1/|B_delta|) * integral over B_delta(x) of grad, with a normalized unit-ball rule.
Point ball_average(const std::function<Point(const Point&)>& grad, const Point& x, double delta,
                   const quad::TensorRule& unit_ball);

}  // namespace hybrid
