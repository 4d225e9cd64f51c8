#pragma once

#include <vector>

#include "chns/mesh.hpp"

namespace chns {

/// Rule on the reference triangle {(0,0),(1,0),(0,1)} (points in (xi, eta))
/// or on [0,1] (points in `.x`, `.y` unused). Weights sum to the reference
/// measure (1/2 or 1).
struct QuadratureRule {
  std::vector<Vec2> points;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return weights.size(); }
};

/// Gauss-Legendre nodes/weights on [-1,1].
void gauss_legendre(int npoints, std::vector<double>& nodes, std::vector<double>& weights);

/// Collapsed (Duffy) Gauss-Legendre product rule exact to total degree `degree`.
/// All weights positive, all points interior.
QuadratureRule triangle_rule(int degree);

/// Gauss-Legendre rule on [0,1] exact to `degree`.
QuadratureRule line_rule(int degree);

}  // namespace chns
