#include "hybrid/verify.hpp"

#include "hybrid/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace hybrid::verify {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_ratio(double observed, double bound) {
  if (bound > 0.0) return observed / bound;
  return observed == 0.0 ? 0.0 : kInf;
}

std::vector<double> location(const Point& x, std::initializer_list<double> extra) {
  std::vector<double> loc(x.data(), x.data() + x.size());
  loc.insert(loc.end(), extra);
  return loc;
}

// Unit vector from coordinates in [0,1)^(N-1) (N = 1 uses the sign of one coordinate).
Point direction(int dim, const std::vector<double>& h, std::size_t offset) {
  Point d(dim);
  if (dim == 1) {
    d[0] = h[offset] < 0.5 ? -1.0 : 1.0;
  } else if (dim == 2) {
    const double th = 2.0 * std::numbers::pi * h[offset];
    d << std::cos(th), std::sin(th);
  } else {
    const double z = 2.0 * h[offset] - 1.0;
    const double ph = 2.0 * std::numbers::pi * h[offset + 1];
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    d << r * std::cos(ph), r * std::sin(ph), z;
  }
  return d;
}

int direction_coords(int dim) { return dim == 3 ? 2 : 1; }

}  // namespace

double EstimateReport::constant(const std::string& name) const {
  for (const auto& [key, value] : constants)
    if (key == name) return value;
  throw std::out_of_range("report has no constant '" + name + "'");
}

std::vector<KernelSample> kernel_samples(int dim, std::size_t count, std::uint64_t seed, double box, double s_min,
                                         double s_max) {
  quad::Halton halton(dim + 2, seed);
  std::vector<KernelSample> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const auto h = halton.next();
    KernelSample s;
    s.x = Point(dim);
    for (int d = 0; d < dim; ++d) s.x[d] = box * (2.0 * h[d] - 1.0);
    s.xi = s.x;
    s.tau = 0.5 * h[dim];
    s.t = s.tau + s_min + (s_max - s_min) * h[dim + 1];
    out.push_back(s);
  }
  return out;
}

std::vector<KernelSample> similarity_samples(int dim, std::size_t count, std::uint64_t seed, double z_max) {
  const int dc = direction_coords(dim);
  quad::Halton halton(dim + 2 + dc, seed);
  std::vector<KernelSample> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const auto h = halton.next();
    KernelSample s;
    s.x = Point(dim);
    for (int d = 0; d < dim; ++d) s.x[d] = 2.0 * (2.0 * h[d] - 1.0);
    s.tau = 0.0;
    s.t = 0.01 + 0.99 * h[dim];
    const double z = k == 0 ? 0.0 : z_max * h[dim + 1];
    s.xi = s.x - z * std::sqrt(s.t - s.tau) * direction(dim, h, static_cast<std::size_t>(dim + 2));
    out.push_back(s);
  }
  return out;
}

EstimateReport check_kernel_mass(const kernel::Kernel& kernel, const std::vector<KernelSample>& samples,
                                 double mass_tolerance) {
  if (kernel.reaction() != 0.0)
    throw std::invalid_argument("kernel mass check requires c = 0 (reaction rescales the mass)");
  const int dim = kernel.dim();
  const int panels = dim == 1 ? 16 : 8;
  const auto axis = quad::composite_gauss_legendre(panels, 8, -8.0, 8.0);
  const quad::TensorRule rule = quad::tensor_rule(axis, dim, 64.0);
  const double detL = kernel.cholesky().diagonal().prod();

  EstimateReport rep;
  rep.claim = "kernel-mass";
  rep.tolerance = 0.0;
  rep.constants = {{"mass_tolerance", mass_tolerance}};
  double worst_dev = 0.0;
  for (const auto& s : samples) {
    const double lag = s.t - s.tau;
    const double jac = std::pow(2.0, dim) * std::pow(lag, 0.5 * dim) * detL;
    double mass = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q)
      mass += rule.weights[q] * kernel.eval(s.x, s.t, kernel.source_point(s.x, lag, rule.nodes[q]), s.tau);
    mass *= jac;
    const double dev = std::abs(mass - 1.0);
    const double ratio = dev / mass_tolerance;
    if (ratio >= rep.worst_ratio) {
      rep.worst_ratio = ratio;
      rep.worst_location = location(s.x, {s.t, s.tau});
      worst_dev = dev;
    }
    ++rep.samples;
  }
  rep.constants.emplace_back("worst_deviation", worst_dev);
  rep.finalize();
  return rep;
}

std::array<double, 3> per_order_constants(const kernel::Kernel& kernel, const kernel::EstimateParams& params) {
  return {kernel::gamma_estimate_Cgamma(kernel, params, 0), kernel::gamma_estimate_Cgamma(kernel, params, 1),
          kernel::gamma_estimate_Cgamma(kernel, params, 2)};
}

std::vector<EstimateReport> check_gamma_estimates(const kernel::Kernel& kernel, const kernel::EstimateParams& params,
                                                  const std::array<double, 3>& c_gamma,
                                                  const std::vector<KernelSample>& samples, double tolerance) {
  if (!(params.lambda0_star < params.lambda0))
    throw std::invalid_argument("gamma estimates: lambda0_star must be below lambda0");
  std::vector<EstimateReport> reports;
  for (int order = 0; order <= 2; ++order) {
    EstimateReport rep;
    rep.claim = "gamma-estimate-order-" + std::to_string(order);
    rep.tolerance = tolerance;
    rep.constants = {{"C_gamma", c_gamma[static_cast<std::size_t>(order)]},
                     {"lambda0", params.lambda0},
                     {"lambda0_star", params.lambda0_star}};
    for (const auto& s : samples) {
      const double r =
          kernel::gamma_estimate_ratio(kernel, params.lambda0_star, order, s.x, s.t, s.xi, s.tau) /
          c_gamma[static_cast<std::size_t>(order)];
      if (r >= rep.worst_ratio) {
        rep.worst_ratio = r;
        const double z = (s.x - s.xi).norm() / std::sqrt(s.t - s.tau);
        rep.worst_location = location(s.x - s.xi, {s.t - s.tau, z});
      }
      ++rep.samples;
    }
    rep.finalize();
    reports.push_back(std::move(rep));
  }
  return reports;
}

std::vector<FieldSample> field_samples(int dim, std::size_t count, std::uint64_t seed, double radius, double t_min,
                                       double t_max) {
  quad::Halton halton(dim + 1, seed);
  std::vector<FieldSample> out;
  out.reserve(count);
  while (out.size() < count) {
    const auto h = halton.next();
    Point x(dim);
    for (int d = 0; d < dim; ++d) x[d] = radius * (2.0 * h[d] - 1.0);
    if (x.norm() > radius) continue;
    out.push_back({x, t_min + (t_max - t_min) * h[dim]});
  }
  return out;
}

std::pair<EstimateReport, EstimateReport> check_prop1(const Scenario& scenario, const FieldProbe& probe,
                                                      const std::vector<FieldSample>& samples,
                                                      const kernel::EstimateParams& est, double K_scale,
                                                      double tolerance) {
  if (probe.backend() != FieldBackend::ClosedFormKernel)
    throw std::invalid_argument("prop1 check requires the closed-form kernel backend");
  const double H = scenario.growth.H;
  if (!std::isfinite(H) && !scenario.phi.is_zero)
    throw std::invalid_argument("prop1 check: phi has no declared finite Hölder constant");
  const double alpha = scenario.alpha();
  // each derivative order only needs its own kernel estimate
  const auto c = kernel::scenario_order_constants(scenario, est);
  const double K1 = est.K * c[1] / est.C_gamma * K_scale;
  const double K2 = est.K * c[2] / est.C_gamma * K_scale;
  const double H_X = probe.path().empty() ? 0.0 : scenario.growth.holder_g(sup_position_norm(probe.path()));
  const double Hphi = scenario.phi.is_zero ? 0.0 : H;

  EstimateReport first;
  first.claim = "prop1-first-derivative";
  EstimateReport second;
  second.claim = "prop1-second-derivative";
  for (EstimateReport* rep : {&first, &second}) {
    rep->tolerance = tolerance;
    rep->constants = {{"kappa", est.kappa}, {"H", Hphi}, {"H_X", H_X}, {"alpha", alpha}};
  }
  first.constants.insert(first.constants.begin(), {"K", K1});
  second.constants.insert(second.constants.begin(), {"K", K2});
  for (const auto& s : samples) {
    const double weight = std::exp(est.kappa * s.x.squaredNorm());
    const double b1 = K1 * weight * (Hphi * std::pow(s.t, -(1.0 - alpha) / 2.0) +
                                2.0 / (alpha + 1.0) * std::pow(s.t, (alpha + 1.0) / 2.0) * H_X);
    const double b2 = K2 * weight * (Hphi * std::pow(s.t, -(1.0 - alpha / 2.0)) +
                                2.0 / alpha * std::pow(s.t, alpha / 2.0) * H_X);
    const double g1 = probe.grad_f(s.x, s.t).cwiseAbs().maxCoeff();
    const double g2 = probe.hessian_f(s.x, s.t).cwiseAbs().maxCoeff();
    const double r1 = safe_ratio(g1, b1);
    const double r2 = safe_ratio(g2, b2);
    if (r1 >= first.worst_ratio) {
      first.worst_ratio = r1;
      first.worst_location = location(s.x, {s.t});
    }
    if (r2 >= second.worst_ratio) {
      second.worst_ratio = r2;
      second.worst_location = location(s.x, {s.t});
    }
    ++first.samples;
    ++second.samples;
  }
  first.finalize();
  second.finalize();
  return {first, second};
}

std::vector<HolderPair> holder_pairs(int dim, int agents, std::size_t count, std::uint64_t seed, double radius) {
  const int dc = direction_coords(dim);
  quad::Halton halton(dim + 1 + dc, seed);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> decade(0.0, 1.0);

  auto agent_config = [&]() {
    AgentMatrix X(dim, agents);
    for (int i = 0; i < agents; ++i)
      for (int d = 0; d < dim; ++d) X(d, i) = unit(rng);
    const double scale = radius * decade(rng);
    return AgentMatrix(X * (scale / std::max(X.norm(), 1e-300)));
  };

  std::vector<HolderPair> out;
  out.reserve(count);
  while (out.size() < count) {
    const auto h = halton.next();
    Point x(dim);
    for (int d = 0; d < dim; ++d) x[d] = radius * (2.0 * h[d] - 1.0);
    if (x.norm() > radius) continue;
    const double r = radius * std::pow(10.0, -3.0 * h[dim]);
    Point xh = x + r * direction(dim, h, static_cast<std::size_t>(dim + 1));
    if (xh.norm() > radius) xh *= radius / xh.norm();

    HolderPair p;
    p.x = x;
    p.x_hat = xh;
    p.X = agent_config();
    AgentMatrix Xh = p.X;
    for (int i = 0; i < agents; ++i)
      for (int d = 0; d < dim; ++d) Xh(d, i) += radius * std::pow(10.0, -3.0 * decade(rng)) * unit(rng);
    if (Xh.norm() > radius) Xh *= radius / Xh.norm();
    p.X_hat = Xh;
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

EstimateReport holder_report(const std::function<double(const HolderPair&)>& diff,
                             const std::function<double(const HolderPair&)>& scale, double alpha, double C,
                             double claimed_H, const std::vector<HolderPair>& pairs, double radius, double tolerance,
                             const std::string& claim) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("holder check: alpha must lie in (0, 1]");
  EstimateReport rep;
  rep.claim = claim;
  rep.tolerance = tolerance;
  rep.constants = {{"H", claimed_H}, {"alpha", alpha}, {"C", C}, {"radius", radius}};
  for (const auto& p : pairs) {
    const double weight = std::exp(C * std::max(p.x.squaredNorm(), p.x_hat.squaredNorm()));
    const double bound = claimed_H * weight * scale(p);
    const double r = safe_ratio(std::abs(diff(p)), bound);
    if (r >= rep.worst_ratio) {
      rep.worst_ratio = r;
      rep.worst_location = location(p.x, {});
      rep.worst_location.insert(rep.worst_location.end(), p.x_hat.data(), p.x_hat.data() + p.x_hat.size());
    }
    ++rep.samples;
  }
  rep.finalize();
  return rep;
}

}  // namespace

EstimateReport check_holder(const std::function<double(const Point&, const AgentMatrix&)>& fn, double alpha, double C,
                            double claimed_H, const std::vector<HolderPair>& pairs, double radius, double tolerance) {
  return holder_report([&](const HolderPair& p) { return fn(p.x, p.X) - fn(p.x_hat, p.X_hat); },
                       [&](const HolderPair& p) {
                         return std::pow((p.x - p.x_hat).norm(), alpha) + (p.X - p.X_hat).norm();
                       },
                       alpha, C, claimed_H, pairs, radius, tolerance, "holder-source");
}

EstimateReport check_holder(const std::function<double(const Point&)>& fn, double alpha, double C, double claimed_H,
                            const std::vector<HolderPair>& pairs, double radius, double tolerance) {
  return holder_report([&](const HolderPair& p) { return fn(p.x) - fn(p.x_hat); },
                       [&](const HolderPair& p) { return std::pow((p.x - p.x_hat).norm(), alpha); }, alpha, C,
                       claimed_H, pairs, radius, tolerance, "holder-datum");
}

GronwallResult gronwall_oracle(double alpha_g, const std::function<double(double)>& w,
                               const std::function<double(double, double)>& v, double T, std::size_t steps,
                               double margin, int max_sweeps) {
  if (!(T > 0.0) || steps < 1) throw std::invalid_argument("gronwall oracle: need T > 0 and at least one step");
  const std::size_t m = steps + 1;
  const double dt = T / static_cast<double>(steps);
  GronwallResult res;
  res.times.resize(m);
  for (std::size_t i = 0; i < m; ++i) res.times[i] = dt * static_cast<double>(i);

  std::vector<double> wv(m);
  for (std::size_t i = 0; i < m; ++i) {
    wv[i] = w(res.times[i]);
    if (wv[i] < 0.0) throw std::invalid_argument("gronwall oracle: w must be nonnegative");
  }
  // vv[j * m + l] = v(s_l, tau_j) for l <= j
  std::vector<double> vv(m * m, 0.0);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t l = 0; l <= j; ++l) {
      const double val = v(res.times[l], res.times[j]);
      if (val < 0.0) throw std::invalid_argument("gronwall oracle: v must be nonnegative");
      vv[j * m + l] = val;
    }

  // inner(tau_j) = trapezoid over s in [0, tau_j] of v(s, tau_j) y(s)
  auto inner = [&](const std::vector<double>& y, std::size_t j) {
    if (j == 0) return 0.0;
    double acc = 0.5 * (vv[j * m] * y[0] + vv[j * m + j] * y[j]);
    for (std::size_t l = 1; l < j; ++l) acc += vv[j * m + l] * y[l];
    return acc * dt;
  };

  // bound exponent
  res.bound.assign(m, alpha_g);
  {
    const std::vector<double> ones(m, 1.0);
    double E = 0.0;
    double prev = wv[0] + inner(ones, 0);
    for (std::size_t i = 1; i < m; ++i) {
      const double cur = wv[i] + inner(ones, i);
      E += 0.5 * dt * (prev + cur);
      prev = cur;
      res.bound[i] = alpha_g * std::exp(E);
    }
  }

  std::vector<double> h(m, alpha_g);
  std::vector<double> next(m);
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    double A = 0.0;
    double prev = wv[0] * h[0] + inner(h, 0);
    next[0] = alpha_g;
    for (std::size_t i = 1; i < m; ++i) {
      const double cur = wv[i] * h[i] + inner(h, i);
      A += 0.5 * dt * (prev + cur);
      prev = cur;
      next[i] = alpha_g + A;
    }
    double change = 0.0;
    double scale = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (!std::isfinite(next[i])) throw SolverError("gronwall oracle: fixed-point sweeps diverged");
      change = std::max(change, std::abs(next[i] - h[i]));
      scale = std::max(scale, std::abs(next[i]));
    }
    h.swap(next);
    res.sweeps = sweep;
    if (change <= 1e-14 * scale) break;
    if (sweep == max_sweeps) throw SolverError("gronwall oracle: fixed-point sweeps did not become stationary");
  }
  res.h = h;

  EstimateReport& rep = res.report;
  rep.claim = "gronwall-lemma";
  rep.tolerance = margin;
  rep.constants = {{"alpha_g", alpha_g}, {"T", T}, {"dt", dt}, {"sweeps", static_cast<double>(res.sweeps)}};
  for (std::size_t i = 0; i < m; ++i) {
    const double r = safe_ratio(h[i], res.bound[i]);
    if (r >= rep.worst_ratio) {
      rep.worst_ratio = r;
      rep.worst_location = {res.times[i]};
    }
    ++rep.samples;
  }
  rep.finalize();
  return res;
}

EstimateReport residual_check(const AgentPath& path, const Scenario& scenario, const FieldProbe* probe,
                              GradientMode mode, double delta, double threshold) {
  if (path.size() < 3) throw std::invalid_argument("residual check: path too coarse (fewer than 3 nodes)");
  if (scenario.force.uses_gradient && probe == nullptr)
    throw std::invalid_argument("residual check: the force needs a field probe");
  EstimateReport rep;
  rep.claim = std::string("ode-residual-") + mode_name(mode);
  rep.tolerance = 0.0;
  double worst_x = 0.0;
  double worst_v = 0.0;
  const int N = scenario.dim();
  for (std::size_t k = 1; k + 1 < path.size(); ++k) {
    const double t = path.times[k];
    const double span = path.times[k + 1] - path.times[k - 1];
    const AgentMatrix dX = (path.X[k + 1] - path.X[k - 1]) / span - path.V[k];
    AgentMatrix F(N, scenario.n);
    for (int i = 0; i < scenario.n; ++i) {
      Point w = Point::Zero(N);
      if (scenario.force.uses_gradient) {
        const Point x = path.X[k].col(i);
        w = mode == GradientMode::Pointwise ? probe->grad_f(x, t) : probe->ball_avg_grad(x, t, delta);
      }
      F.col(i) = scenario.force.eval(t, path.X[k], path.V[k], w, i);
    }
    const AgentMatrix dV = (path.V[k + 1] - path.V[k - 1]) / span - F;
    const double rx = dX.norm();
    const double rv = dV.norm();
    worst_x = std::max(worst_x, rx);
    worst_v = std::max(worst_v, rv);
    const double r = std::max(rx, rv) / threshold;
    if (r >= rep.worst_ratio) {
      rep.worst_ratio = r;
      rep.worst_location = {t};
    }
    ++rep.samples;
  }
  rep.constants = {{"threshold", threshold}, {"residual_x", worst_x}, {"residual_v", worst_v}};
  rep.finalize();
  return rep;
}

}  // namespace hybrid::verify
