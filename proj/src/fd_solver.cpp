#include "hybrid/field.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace hybrid {

namespace {

struct Strides {
  std::array<long, 3> s{1, 1, 1};
};

Strides strides_for(int dim, int m) {
  Strides st;
  long acc = 1;
  for (int d = 0; d < dim; ++d) {
    st.s[d] = acc;
    acc *= m;
  }
  return st;
}

}  // namespace

std::size_t FieldGrid::node_count() const {
  std::size_t total = 1;
  for (int d = 0; d < dim; ++d) total *= static_cast<std::size_t>(points_per_axis);
  return total;
}

double FieldGrid::at(std::size_t snapshot, const int* idx) const {
  long flat = 0;
  long stride = 1;
  for (int d = 0; d < dim; ++d) {
    flat += idx[d] * stride;
    stride *= points_per_axis;
  }
  return snapshots[snapshot][static_cast<std::size_t>(flat)];
}

// i < 0: value; j < 0: d/dx_i; otherwise d^2/dx_i dx_j. One-sided near the boundary.
double FieldGrid::node_derivative(std::size_t snapshot, const int* idx, int i, int j) const {
  if (i < 0) return at(snapshot, idx);
  const int m = points_per_axis;
  int c[3] = {0, 0, 0};
  for (int d = 0; d < dim; ++d) c[d] = std::clamp(idx[d], 1, m - 2);
  auto shifted = [&](int di, int si, int dj, int sj) {
    int p[3] = {c[0], c[1], c[2]};
    if (di >= 0) p[di] += si;
    if (dj >= 0) p[dj] += sj;
    return at(snapshot, p);
  };
  if (j < 0) {
    return (shifted(i, 1, -1, 0) - shifted(i, -1, -1, 0)) / (2.0 * h);
  }
  if (i == j) {
    return (shifted(i, 1, -1, 0) - 2.0 * shifted(-1, 0, -1, 0) + shifted(i, -1, -1, 0)) / (h * h);
  }
  return (shifted(i, 1, j, 1) - shifted(i, 1, j, -1) - shifted(i, -1, j, 1) + shifted(i, -1, j, -1)) /
         (4.0 * h * h);
}

template <class NodeFn>
auto FieldGrid::interpolate(const Point& x, double t, NodeFn&& node_fn) const {
  if (x.size() != dim) throw std::invalid_argument("field grid: dimension mismatch");
  if (t < times.front() || t > times.back() * (1.0 + 1e-12) + 1e-14)
    throw std::domain_error("field grid: time outside the solved interval");
  const double tc = std::min(t, times.back());
  std::size_t k = static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), tc) - times.begin());
  k = std::clamp<std::size_t>(k, 1, times.size() - 1);
  const double theta = (tc - times[k - 1]) / (times[k] - times[k - 1]);

  int base[3] = {0, 0, 0};
  double frac[3] = {0.0, 0.0, 0.0};
  for (int d = 0; d < dim; ++d) {
    const double pos = (x[d] + box) / h;
    if (pos < -1e-9 || pos > points_per_axis - 1 + 1e-9)
      throw std::domain_error("field grid: point outside the finite-difference box");
    const int cell = std::clamp(static_cast<int>(std::floor(pos)), 0, points_per_axis - 2);
    base[d] = cell;
    frac[d] = pos - cell;
  }

  using Value = decltype(node_fn(std::size_t{0}, base));
  Value acc{};
  bool first = true;
  for (int corner = 0; corner < (1 << dim); ++corner) {
    int idx[3] = {0, 0, 0};
    double w = 1.0;
    for (int d = 0; d < dim; ++d) {
      const int bit = (corner >> d) & 1;
      idx[d] = base[d] + bit;
      w *= bit ? frac[d] : 1.0 - frac[d];
    }
    const Value v = (1.0 - theta) * node_fn(k - 1, idx) + theta * node_fn(k, idx);
    if (first) {
      acc = w * v;
      first = false;
    } else {
      acc = acc + w * v;
    }
  }
  return acc;
}

double FieldGrid::value(const Point& x, double t) const {
  return interpolate(x, t, [&](std::size_t s, const int* idx) { return node_derivative(s, idx, -1, -1); });
}

Point FieldGrid::gradient(const Point& x, double t) const {
  return interpolate(x, t, [&](std::size_t s, const int* idx) {
    Point g(dim);
    for (int i = 0; i < dim; ++i) g[i] = node_derivative(s, idx, i, -1);
    return g;
  });
}

SmallMatrix FieldGrid::hessian(const Point& x, double t) const {
  return interpolate(x, t, [&](std::size_t s, const int* idx) {
    SmallMatrix H(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j) H(i, j) = H(j, i) = node_derivative(s, idx, i, j);
    return H;
  });
}

FieldGrid solve_field_fd(const Scenario& scenario, const AgentPath& path, const QuadratureSpec& spec) {
  spec.validate();
  path.validate();
  const int dim = scenario.dim();
  FieldGrid grid;
  grid.dim = dim;
  grid.box = spec.fd_box;
  const long cells = std::max(2L, std::lround(2.0 * spec.fd_box / spec.fd_h));
  grid.points_per_axis = static_cast<int>(cells + 1);
  grid.h = 2.0 * spec.fd_box / static_cast<double>(cells);
  const int m = grid.points_per_axis;
  const double h = grid.h;
  const std::size_t total = grid.node_count();
  const Strides st = strides_for(dim, m);

  std::vector<Point> nodes(total);
  std::vector<char> boundary(total, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    Point x(dim);
    std::size_t rem = flat;
    for (int d = 0; d < dim; ++d) {
      const int i = static_cast<int>(rem % static_cast<std::size_t>(m));
      rem /= static_cast<std::size_t>(m);
      x[d] = grid.coordinate(i);
      if (i == 0 || i == m - 1) boundary[flat] = 1;
    }
    nodes[flat] = x;
  }

  std::vector<double> f(total);
  double tail = 0.0;
  for (std::size_t q = 0; q < total; ++q) {
    f[q] = scenario.phi.value(nodes[q]);
    if (boundary[q]) tail = std::max(tail, std::abs(f[q]));
  }
  if (tail > spec.fd_tail_tolerance)
    throw SolverError("finite-difference box too small: |phi| = " + format_double(tail) +
                      " on the boundary exceeds the tail tolerance " + format_double(spec.fd_tail_tolerance));

  const double t_end = path.horizon();
  const double t_start = 0.0;
  const long n_snap = std::max(1L, static_cast<long>(std::ceil((t_end - t_start) / spec.fd_snapshot_dt - 1e-9)));
  const double snap_dt = (t_end - t_start) / static_cast<double>(n_snap);
  const double dt_max = h * h / (2.0 * dim * scenario.mu1);
  long sub = 0;
  if (spec.fd_dt > 0.0) {
    if (spec.fd_dt > dt_max * (1.0 + 1e-12))
      throw SolverError("finite-difference stability violated: dt = " + format_double(spec.fd_dt) +
                        " exceeds h^2/(2 N mu1) = " + format_double(dt_max));
    sub = static_cast<long>(std::ceil(snap_dt / spec.fd_dt - 1e-9));
  } else {
    sub = static_cast<long>(std::ceil(snap_dt / dt_max - 1e-9));
  }
  sub = std::max(1L, sub);
  const double dt = snap_dt / static_cast<double>(sub);
  grid.dt = dt;

  const bool constant = scenario.coeffs.is_constant;
  SmallMatrix a_const;
  Point b_const;
  double c_const = 0.0;
  if (constant) {
    const Point origin = Point::Zero(dim);
    a_const = scenario.coeffs.a(origin, 0.0);
    b_const = scenario.coeffs.b(origin, 0.0);
    c_const = scenario.coeffs.c(origin, 0.0);
  }

  grid.times.push_back(t_start);
  grid.snapshots.push_back(f);
  std::vector<double> next(total);
  const double inv_h2 = 1.0 / (h * h);
  const double inv_2h = 1.0 / (2.0 * h);

  for (long snap = 0; snap < n_snap; ++snap) {
    for (long step = 0; step < sub; ++step) {
      const double t = t_start + (static_cast<double>(snap * sub + step)) * dt;
      const AgentMatrix X = path.X_at(t);
      const double g_uniform = scenario.g.space_independent ? scenario.g.value(Point::Zero(dim), X) : 0.0;
      for (std::size_t q = 0; q < total; ++q) {
        const Point& x = nodes[q];
        const double gq = scenario.g.is_zero ? 0.0 : (scenario.g.space_independent ? g_uniform : scenario.g.value(x, X));
        const SmallMatrix a = constant ? a_const : scenario.coeffs.a(x, t);
        const double c = constant ? c_const : scenario.coeffs.c(x, t);
        if (boundary[q]) {
          // far field: diffusion and transport negligible
          next[q] = f[q] + dt * (c * f[q] - gq);
          continue;
        }
        const Point b = constant ? b_const : scenario.coeffs.b(x, t);
        const long p = static_cast<long>(q);
        double rhs = c * f[q] - gq;
        for (int i = 0; i < dim; ++i) {
          const double fp = f[static_cast<std::size_t>(p + st.s[i])];
          const double fm = f[static_cast<std::size_t>(p - st.s[i])];
          rhs += a(i, i) * (fp - 2.0 * f[q] + fm) * inv_h2 + b[i] * (fp - fm) * inv_2h;
          for (int j = i + 1; j < dim; ++j) {
            if (a(i, j) == 0.0) continue;
            const double fpp = f[static_cast<std::size_t>(p + st.s[i] + st.s[j])];
            const double fpm = f[static_cast<std::size_t>(p + st.s[i] - st.s[j])];
            const double fmp = f[static_cast<std::size_t>(p - st.s[i] + st.s[j])];
            const double fmm = f[static_cast<std::size_t>(p - st.s[i] - st.s[j])];
            rhs += 2.0 * a(i, j) * (fpp - fpm - fmp + fmm) * 0.25 * inv_h2;
          }
        }
        next[q] = f[q] + dt * rhs;
      }
      f.swap(next);
    }
    grid.times.push_back(t_start + static_cast<double>(snap + 1) * snap_dt);
    grid.snapshots.push_back(f);
  }
  grid.times.back() = t_end;
  return grid;
}

}  // namespace hybrid
