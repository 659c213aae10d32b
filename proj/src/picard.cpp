#include "hybrid/picard.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace hybrid {

const char* mode_name(GradientMode mode) { return mode == GradientMode::Pointwise ? "pointwise" : "nonlocal"; }

void check_membership(const AgentPath& path, const Scenario& scenario) {
  const double R = scenario.radius;
  for (std::size_t k = 0; k < path.size(); ++k) {
    const double dx = (path.X[k] - scenario.X0).norm();
    const double dv = (path.V[k] - scenario.V0).norm();
    if (dx > R || dv > R)
      throw SolverError("path exits E_R at node " + std::to_string(k) + " (t = " + format_double(path.times[k]) +
                        "): |X - X0| = " + format_double(dx) + ", |V - V0| = " + format_double(dv) +
                        ", R = " + format_double(R));
  }
}

AgentPath apply_psi(const AgentPath& path, const Scenario& scenario, const PsiOptions& options,
                    const SegmentContext& context) {
  path.validate();
  if (options.mode == GradientMode::Nonlocal && !(options.delta > 0.0))
    throw std::invalid_argument("apply_psi: nonlocal mode needs delta > 0");
  if (options.check_membership) check_membership(path, scenario);

  const int n = scenario.n;
  const int N = scenario.dim();
  std::unique_ptr<FieldProbe> probe;
  if (scenario.force.uses_gradient)
    probe = std::make_unique<FieldProbe>(scenario, concatenate(context.history, path), options.quadrature);

  const std::size_t m = path.size();
  std::vector<AgentMatrix> force(m, AgentMatrix(N, n));
  const Point zero = Point::Zero(N);
  for (std::size_t k = 0; k < m; ++k) {
    const double t = path.times[k];
    for (int i = 0; i < n; ++i) {
      Point w = zero;
      if (probe) {
        const Point x = path.X[k].col(i);
        w = options.mode == GradientMode::Pointwise ? probe->grad_f(x, t) : probe->ball_avg_grad(x, t, options.delta);
      }
      force[k].col(i) = scenario.force.eval(t, path.X[k], path.V[k], w, i);
    }
  }

  AgentPath out;
  out.times = path.times;
  out.X.resize(m);
  out.V.resize(m);
  out.X[0] = scenario.X0;
  out.V[0] = scenario.V0;
  for (std::size_t k = 1; k < m; ++k) {
    const double h = path.times[k] - path.times[k - 1];
    out.X[k] = out.X[k - 1] + 0.5 * h * (path.V[k - 1] + path.V[k]);
    out.V[k] = out.V[k - 1] + 0.5 * h * (force[k - 1] + force[k]);
  }
  return out;
}

LocalSolution solve_local(const Scenario& scenario, const HorizonCertificate& certificate, double tol,
                          int max_iters, const PsiOptions& options, const SegmentContext& context,
                          long start_index, long max_steps) {
  if (!(tol > 0.0)) throw std::invalid_argument("solve_local: tol must be positive");
  if (max_iters < 1) throw std::invalid_argument("solve_local: max_iters must be >= 1");
  long steps = static_cast<long>(std::floor(certificate.T_bar / options.dt + 1e-9));
  if (steps < 1)
    throw SolverError("segment horizon underflow: T_bar = " + format_double(certificate.T_bar) +
                      " is below the path step " + format_double(options.dt));
  if (max_steps > 0) steps = std::min(steps, max_steps);

  LocalSolution sol;
  sol.certificate = certificate;
  const std::vector<double> times = grid_times(start_index, steps, options.dt);
  sol.C0 = force_at_rest(scenario, times.front(), times.back() - times.front());
  AgentPath Y = AgentPath::constant(scenario.X0, scenario.V0, times);
  for (int it = 1; it <= max_iters; ++it) {
    AgentPath next = apply_psi(Y, scenario, options, context);
    const double diff = sup_distance(next, Y);
    if (!sol.diffs.empty()) sol.ratios.push_back(sol.diffs.back() > 0.0 ? diff / sol.diffs.back() : 0.0);
    sol.diffs.push_back(diff);
    Y = std::move(next);
    if (diff < tol) {
      if (options.check_membership) check_membership(Y, scenario);
      sol.iterations = it;
      sol.path = std::move(Y);
      return sol;
    }
  }
  throw SolverError("Picard iteration did not converge in " + std::to_string(max_iters) +
                    " iterations (last contraction ratio " +
                    format_double(sol.ratios.empty() ? 0.0 : sol.ratios.back()) + ")");
}

GlobalSolution solve_global(const Scenario& scenario, double horizon, const PsiOptions& options,
                            const GlobalOptions& global) {
  if (!(horizon > 0.0)) throw std::invalid_argument("solve_global: horizon must be positive");
  const long total = static_cast<long>(std::ceil(horizon / options.dt - 1e-9));
  const kernel::EstimateParams est = kernel::scenario_estimate_params(scenario);
  std::optional<double> delta;
  if (options.mode == GradientMode::Nonlocal) delta = options.delta;

  GlobalSolution out;
  Scenario segment = scenario;
  SegmentContext context;
  long done = 0;
  while (done < total) {
    const HorizonCertificate cert =
        horizon_certificate(segment, segment.radius, est, delta, global.margin, global.safety);
    LocalSolution local =
        solve_local(segment, cert, global.tol, global.max_iters, options, context, done, total - done);
    const long steps = static_cast<long>(local.path.size()) - 1;
    out.segment_starts.push_back(local.path.times.front());
    context.history = concatenate(context.history, local.path);
    segment.X0 = local.path.X.back();
    segment.V0 = local.path.V.back();
    out.segments.push_back(std::move(local));
    done += steps;
  }
  out.path = std::move(context.history);
  return out;
}

}  // namespace hybrid
