#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace hybrid {

/// Spatial point or vector in R^N, N <= 3. Fixed capacity, no heap allocation.
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
/// N x N matrix, N <= 3.
using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;
/// Agent configuration: column i holds agent i (N x n).
using AgentMatrix = Eigen::MatrixXd;

constexpr int kMaxDimension = 3;

/// Malformed or inconsistent scenario description.
class ConfigError : public std::invalid_argument {
public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical failure inside a solver (contraction lost, stability violated, ...).
class SolverError : public std::runtime_error {
public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hybrid
