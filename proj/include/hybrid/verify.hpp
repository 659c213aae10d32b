#pragma once

#include "hybrid/field.hpp"
#include "hybrid/kernel.hpp"
#include "hybrid/model.hpp"
#include "hybrid/path.hpp"
#include "hybrid/picard.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace hybrid::verify {

/// Outcome of one bound check: pass iff worst_ratio <= 1 + tolerance.
struct EstimateReport {
  std::string claim;
  std::vector<std::pair<std::string, double>> constants;
  std::size_t samples = 0;
  double worst_ratio = 0.0;
  std::vector<double> worst_location;
  double tolerance = 0.01;
  std::uint64_t seed = 0;
  bool pass = false;

  void finalize() { pass = worst_ratio <= 1.0 + tolerance; }
  double constant(const std::string& name) const;
};

struct KernelSample {
  Point x;
  Point xi;
  double t = 1.0;
  double tau = 0.0;
};

/// x in [-box, box]^N, tau in [0, 0.5], t - tau in [s_min, s_max]; xi = x.
std::vector<KernelSample> kernel_samples(int dim, std::size_t count, std::uint64_t seed, double box = 2.0,
                                         double s_min = 0.05, double s_max = 1.0);

/// Samples laid out in the similarity variable z = |x - xi|/sqrt(t - tau), z in [0, z_max]; first sample has z = 0.
std::vector<KernelSample> similarity_samples(int dim, std::size_t count, std::uint64_t seed, double z_max);

/// |int Gamma dxi - 1| at each sample, relative to `mass_tolerance`. Requires c = 0.
EstimateReport check_kernel_mass(const kernel::Kernel& kernel, const std::vector<KernelSample>& samples,
                                 double mass_tolerance = 1e-6);

/// C_Gamma of each order 0, 1, 2.
std::array<double, 3> per_order_constants(const kernel::Kernel& kernel, const kernel::EstimateParams& params);

/// One report per derivative order, ratio |d^k Gamma| / (C_k s^{-(N+k)/2} e^{-lambda0*|x-xi|^2/(4s)}).
std::vector<EstimateReport> check_gamma_estimates(const kernel::Kernel& kernel, const kernel::EstimateParams& params,
                                                  const std::array<double, 3>& c_gamma,
                                                  const std::vector<KernelSample>& samples,
                                                  double tolerance = 0.01);

struct FieldSample {
  Point x;
  double t = 1.0;
};

/// x uniform in the ball |x| <= radius, t in [t_min, t_max].
std::vector<FieldSample> field_samples(int dim, std::size_t count, std::uint64_t seed, double radius = 3.0,
                                       double t_min = 0.01, double t_max = 1.0);

/// First- and second-derivative bounds of f against K e^{kappa|x|^2}(...), K taken from the order-1
/// and order-2 kernel constants respectively. K_scale < 1 falsifies.
std::pair<EstimateReport, EstimateReport> check_prop1(const Scenario& scenario, const FieldProbe& probe,
                                                      const std::vector<FieldSample>& samples,
                                                      const kernel::EstimateParams& est, double K_scale = 1.0,
                                                      double tolerance = 0.01);

struct HolderPair {
  Point x;
  Point x_hat;
  AgentMatrix X;
  AgentMatrix X_hat;
};

/// Pairs in B_R with separations spread over three decades.
std::vector<HolderPair> holder_pairs(int dim, int agents, std::size_t count, std::uint64_t seed, double radius);

/// |fn(x,X) - fn(x^,X^)| against H e^{C max(|x|^2,|x^|^2)} (|x - x^|^alpha + |X - X^|).
EstimateReport check_holder(const std::function<double(const Point&, const AgentMatrix&)>& fn, double alpha, double C,
                            double claimed_H, const std::vector<HolderPair>& pairs, double radius,
                            double tolerance = 0.01);

/// Single-argument variant: the |X - X^| term is absent.
EstimateReport check_holder(const std::function<double(const Point&)>& fn, double alpha, double C, double claimed_H,
                            const std::vector<HolderPair>& pairs, double radius, double tolerance = 0.01);

struct GronwallResult {
  EstimateReport report;
  std::vector<double> times;
  std::vector<double> h;      ///< discrete extremal function
  std::vector<double> bound;  ///< alpha_g exp(int (w + int v))
  int sweeps = 0;
};

/// Builds h = alpha_g + int w h + int int v h by fixed-point sweeps on a uniform grid of [0, T]
/// and checks h <= alpha_g exp(...) at every node.
GronwallResult gronwall_oracle(double alpha_g, const std::function<double(double)>& w,
                               const std::function<double(double, double)>& v, double T = 1.0,
                               std::size_t steps = 1000, double margin = 1e-3, int max_sweeps = 1000);

/// Centered-difference residuals |X' - V| and |V' - F(t, X, V, w)| at interior nodes, relative to `threshold`.
EstimateReport residual_check(const AgentPath& path, const Scenario& scenario, const FieldProbe* probe,
                              GradientMode mode, double delta = 0.0, double threshold = 1e-3);

}  // namespace hybrid::verify
