#include "chns/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace chns {

namespace {

// Legendre P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  if (n == 0) return {1.0, 0.0};
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

void gauss_legendre(int npoints, std::vector<double>& nodes, std::vector<double>& weights) {
  if (npoints < 1) throw std::invalid_argument("gauss_legendre: npoints must be >= 1");
  const int n = npoints;
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;
}

QuadratureRule triangle_rule(int degree) {
  if (degree < 0) throw std::invalid_argument("triangle_rule: negative degree");
  // Under (u, v) -> (u, v (1 - u)) a degree-d polynomial becomes degree d+1 in u.
  const int npts = (degree + 3) / 2;
  std::vector<double> x;
  std::vector<double> w;
  gauss_legendre(npts, x, w);
  QuadratureRule rule;
  rule.degree = degree;
  for (int i = 0; i < npts; ++i) {
    const double u = 0.5 * (x[i] + 1.0);
    for (int j = 0; j < npts; ++j) {
      const double v = 0.5 * (x[j] + 1.0);
      rule.points.push_back({u, v * (1.0 - u)});
      rule.weights.push_back(0.25 * w[i] * w[j] * (1.0 - u));
    }
  }
  return rule;
}

QuadratureRule line_rule(int degree) {
  if (degree < 0) throw std::invalid_argument("line_rule: negative degree");
  const int npts = degree / 2 + 1;
  std::vector<double> x;
  std::vector<double> w;
  gauss_legendre(npts, x, w);
  QuadratureRule rule;
  rule.degree = degree;
  for (int i = 0; i < npts; ++i) {
    rule.points.push_back({0.5 * (x[i] + 1.0), 0.0});
    rule.weights.push_back(0.5 * w[i]);
  }
  return rule;
}

}  // namespace chns
