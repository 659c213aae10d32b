#pragma once

#include "hybrid/types.hpp"

#include <cstddef>
#include <vector>

namespace hybrid {

/// Time-sampled agent trajectories (X, V), piecewise linear between nodes.
struct AgentPath {
  std::vector<double> times;
  std::vector<AgentMatrix> X;
  std::vector<AgentMatrix> V;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
  int dim() const { return X.empty() ? 0 : static_cast<int>(X.front().rows()); }
  int agents() const { return X.empty() ? 0 : static_cast<int>(X.front().cols()); }
  double start() const { return times.front(); }
  double horizon() const { return times.back(); }

  /// Interpolated positions; clamps to the end values outside the grid.
  AgentMatrix X_at(double t) const;
  AgentMatrix V_at(double t) const;

  /// Throws std::invalid_argument unless the grid is strictly increasing and shapes agree.
  void validate() const;

  /// Constant path (X0, V0) on the given grid.
  static AgentPath constant(const AgentMatrix& X0, const AgentMatrix& V0, std::vector<double> times);
};

/// Nodes k*dt for k = first, ..., first + count. Integer-indexed so that segments line up exactly.
std::vector<double> grid_times(long first, long count, double dt);

/// max over nodes of the Euclidean norm of the stacked (X - X', V - V') difference. Grids must match.
double sup_distance(const AgentPath& a, const AgentPath& b);

/// max over nodes of |(X(t) - X0, V(t) - V0)|.
double sup_deviation(const AgentPath& path, const AgentMatrix& X0, const AgentMatrix& V0);

/// max over nodes of |X(t)|.
double sup_position_norm(const AgentPath& path);

/// Appends `tail` to `head`; tail's first node must coincide with head's last and is dropped.
AgentPath concatenate(const AgentPath& head, const AgentPath& tail);

}  // namespace hybrid
