#include "hybrid/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>

namespace hybrid::quad {

Rule1D gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)>
      table(gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(n)),
            &gsl_integration_glfixed_table_free);
  if (!table) throw std::runtime_error("gauss_legendre: table allocation failed");

  Rule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    gsl_integration_glfixed_point(a, b, static_cast<std::size_t>(i), &rule.nodes[i],
                                  &rule.weights[i], table.get());
  }
  return rule;
}

Rule1D composite_gauss_legendre(int panels, int nodes, double a, double b) {
  if (panels < 1) throw std::invalid_argument("composite_gauss_legendre: need at least one panel");
  const double width = (b - a) / panels;
  const Rule1D ref = gauss_legendre(nodes, 0.0, 1.0);
  Rule1D rule;
  rule.nodes.reserve(static_cast<std::size_t>(panels) * nodes);
  rule.weights.reserve(static_cast<std::size_t>(panels) * nodes);
  for (int p = 0; p < panels; ++p) {
    const double left = a + p * width;
    for (std::size_t k = 0; k < ref.size(); ++k) {
      rule.nodes.push_back(left + width * ref.nodes[k]);
      rule.weights.push_back(width * ref.weights[k]);
    }
  }
  return rule;
}

TensorRule tensor_rule(const Rule1D& axis, int dim, double radius_sq) {
  if (dim < 1 || dim > kMaxDimension) throw std::invalid_argument("tensor_rule: dimension must be 1..3");
  TensorRule rule;
  rule.dim = dim;
  const std::size_t m = axis.size();
  std::size_t total = 1;
  for (int d = 0; d < dim; ++d) total *= m;

  std::vector<std::size_t> idx(dim, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (int d = 0; d < dim; ++d) {
      idx[d] = rem % m;
      rem /= m;
    }
    Point u(dim);
    double w = 1.0;
    for (int d = 0; d < dim; ++d) {
      u[d] = axis.nodes[idx[d]];
      w *= axis.weights[idx[d]];
    }
    if (u.squaredNorm() > radius_sq) continue;
    rule.nodes.push_back(u);
    rule.weights.push_back(w);
  }
  return rule;
}

TensorRule unit_ball_rule(int dim, int radial_nodes, int angular_nodes) {
  TensorRule rule;
  rule.dim = dim;
  const Rule1D radial = gauss_legendre(radial_nodes, 0.0, 1.0);
  switch (dim) {
    case 1: {
      const Rule1D line = gauss_legendre(radial_nodes, -1.0, 1.0);
      for (std::size_t i = 0; i < line.size(); ++i) {
        Point p(1);
        p[0] = line.nodes[i];
        rule.nodes.push_back(p);
        rule.weights.push_back(0.5 * line.weights[i]);
      }
      break;
    }
    case 2: {
      // (1/pi) int_0^1 int_0^{2pi} r dtheta dr
      for (std::size_t i = 0; i < radial.size(); ++i) {
        const double r = radial.nodes[i];
        for (int k = 0; k < angular_nodes; ++k) {
          const double theta = 2.0 * std::numbers::pi * (k + 0.5) / angular_nodes;
          Point p(2);
          p << r * std::cos(theta), r * std::sin(theta);
          rule.nodes.push_back(p);
          rule.weights.push_back(2.0 * r * radial.weights[i] / angular_nodes);
        }
      }
      break;
    }
    case 3: {
      // (3/(4pi)) int r^2 dr dOmega; polar angle by Gauss-Legendre in cos(theta)
      const Rule1D polar = gauss_legendre(angular_nodes, -1.0, 1.0);
      const int azimuth = 2 * angular_nodes;
      for (std::size_t i = 0; i < radial.size(); ++i) {
        const double r = radial.nodes[i];
        for (std::size_t j = 0; j < polar.size(); ++j) {
          const double ct = polar.nodes[j];
          const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
          for (int k = 0; k < azimuth; ++k) {
            const double ph = 2.0 * std::numbers::pi * (k + 0.5) / azimuth;
            Point p(3);
            p << r * st * std::cos(ph), r * st * std::sin(ph), r * ct;
            rule.nodes.push_back(p);
            rule.weights.push_back(3.0 * r * r * radial.weights[i] * polar.weights[j] * 0.5 / azimuth);
          }
        }
      }
      break;
    }
    default:
      throw std::invalid_argument("unit_ball_rule: dimension must be 1..3");
  }
  return rule;
}

double sphere_area(int dim) {
  if (dim < 1) throw std::invalid_argument("sphere_area: dimension must be >= 1");
  const double half = 0.5 * dim;
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

namespace {

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

double radical_inverse(std::uint64_t i, int base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

}  // namespace

Halton::Halton(int dim, std::uint64_t seed) : dim_(dim), index_(seed % 100003 + 1) {
  if (dim < 1 || dim > static_cast<int>(std::size(kPrimes)))
    throw std::invalid_argument("Halton: dimension out of range");
}

std::vector<double> Halton::next() {
  std::vector<double> p(dim_);
  for (int d = 0; d < dim_; ++d) p[d] = radical_inverse(index_, kPrimes[d]);
  ++index_;
  return p;
}

}  // namespace hybrid::quad
