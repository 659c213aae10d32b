#pragma once

#include "hybrid/types.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace hybrid::quad {

/// One-dimensional rule: nodes and weights.
struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule on [a, b].
Rule1D gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Composite Gauss-Legendre: `panels` equal panels of `nodes` points each on [a, b].
Rule1D composite_gauss_legendre(int panels, int nodes, double a, double b);

/// Tensor-product rule in R^N restricted to the nodes passing `keep`.
struct TensorRule {
  int dim = 1;
  std::vector<Point> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// Tensor product of a 1-D rule in dimension N. Nodes with |u|^2 > radius_sq are dropped.
TensorRule tensor_rule(const Rule1D& axis, int dim,
                       double radius_sq = std::numeric_limits<double>::infinity());

/// Normalized cubature for averages over the unit ball B_1(0) in R^N.
/// Weights sum to 1. Radial Gauss-Legendre times an angular rule
/// (equispaced circle in 2-D, Gauss-Legendre in cos(theta) x equispaced azimuth in 3-D).
TensorRule unit_ball_rule(int dim, int radial_nodes, int angular_nodes);

/// Surface area of the unit (N-1)-sphere in R^N.
double sphere_area(int dim);

/// Halton low-discrepancy sequence in [0,1)^dim with a seed-dependent start offset.
class Halton {
public:
  Halton(int dim, std::uint64_t seed);

  /// Next point of the sequence.
  std::vector<double> next();

private:
  int dim_;
  std::uint64_t index_;
};

}  // namespace hybrid::quad
