#include "hybrid/path.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hybrid {

namespace {

template <class Samples>
AgentMatrix interpolate(const std::vector<double>& times, const Samples& values, double t) {
  if (times.empty()) throw std::invalid_argument("AgentPath: empty path");
  if (t <= times.front()) return values.front();
  if (t >= times.back()) return values.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - times.begin());
  const double t0 = times[k - 1];
  const double t1 = times[k];
  const double theta = (t - t0) / (t1 - t0);
  return (1.0 - theta) * values[k - 1] + theta * values[k];
}

}  // namespace

AgentMatrix AgentPath::X_at(double t) const { return interpolate(times, X, t); }
AgentMatrix AgentPath::V_at(double t) const { return interpolate(times, V, t); }

void AgentPath::validate() const {
  if (times.empty()) throw std::invalid_argument("AgentPath: empty path");
  if (X.size() != times.size() || V.size() != times.size())
    throw std::invalid_argument("AgentPath: sample count does not match the time grid");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw std::invalid_argument("AgentPath: time grid is not strictly increasing");
  for (std::size_t k = 0; k < times.size(); ++k)
    if (X[k].rows() != X[0].rows() || X[k].cols() != X[0].cols() || V[k].rows() != X[0].rows() ||
        V[k].cols() != X[0].cols())
      throw std::invalid_argument("AgentPath: inconsistent sample shapes");
}

AgentPath AgentPath::constant(const AgentMatrix& X0, const AgentMatrix& V0, std::vector<double> times) {
  AgentPath p;
  p.X.assign(times.size(), X0);
  p.V.assign(times.size(), V0);
  p.times = std::move(times);
  return p;
}

std::vector<double> grid_times(long first, long count, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("grid_times: dt must be positive");
  std::vector<double> t(static_cast<std::size_t>(count + 1));
  for (long k = 0; k <= count; ++k) t[static_cast<std::size_t>(k)] = static_cast<double>(first + k) * dt;
  return t;
}

double sup_distance(const AgentPath& a, const AgentPath& b) {
  if (a.size() != b.size()) throw std::invalid_argument("sup_distance: paths live on different grids");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d2 = (a.X[k] - b.X[k]).squaredNorm() + (a.V[k] - b.V[k]).squaredNorm();
    worst = std::max(worst, std::sqrt(d2));
  }
  return worst;
}

double sup_deviation(const AgentPath& path, const AgentMatrix& X0, const AgentMatrix& V0) {
  double worst = 0.0;
  for (std::size_t k = 0; k < path.size(); ++k) {
    const double d2 = (path.X[k] - X0).squaredNorm() + (path.V[k] - V0).squaredNorm();
    worst = std::max(worst, std::sqrt(d2));
  }
  return worst;
}

double sup_position_norm(const AgentPath& path) {
  double worst = 0.0;
  for (const auto& X : path.X) worst = std::max(worst, X.norm());
  return worst;
}

AgentPath concatenate(const AgentPath& head, const AgentPath& tail) {
  if (head.empty()) return tail;
  if (tail.empty()) return head;
  if (std::abs(tail.times.front() - head.times.back()) > 1e-12 * std::max(1.0, std::abs(head.times.back())))
    throw std::invalid_argument("concatenate: tail does not start where head ends");
  AgentPath out = head;
  out.times.insert(out.times.end(), tail.times.begin() + 1, tail.times.end());
  out.X.insert(out.X.end(), tail.X.begin() + 1, tail.X.end());
  out.V.insert(out.V.end(), tail.V.begin() + 1, tail.V.end());
  return out;
}

}  // namespace hybrid
