#pragma once

#include <Eigen/SparseLU>
#include <memory>

#include "chns/dgspace.hpp"
#include "chns/forms.hpp"

namespace chns {

/// Elliptic projection onto S_h: a_D(P c - c, chi) = 0 for all chi with the
/// mean constraint (P c - c, 1) = 0, imposed by one Lagrange multiplier
/// appended to the a_D system. Factorized once at construction.
class EllipticProjector {
 public:
  EllipticProjector(std::shared_ptr<const ScalarSpace> space, double sigma);

  /// Projects a smooth function given with its gradient.
  ScalarField project(const ScalarFunction& c, const GradientFunction& grad_c) const;
  /// Projects a discrete field of the same space.
  ScalarField project(const ScalarField& c) const;

  const SparseMatrix& a_D() const { return a_D_; }
  double sigma() const { return sigma_; }

 private:
  ScalarField solve(const Eigen::VectorXd& rhs, double mean) const;

  std::shared_ptr<const ScalarSpace> space_;
  double sigma_;
  SparseMatrix a_D_;
  Eigen::VectorXd mean_;
  Eigen::SparseLU<SparseMatrix> lu_;
};

/// Subtracts the mean so that (result, 1) = 0.
ScalarField remove_mean(const ScalarField& f);

/// (f, 1).
double integral(const ScalarField& f);

}  // namespace chns
