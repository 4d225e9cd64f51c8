#include "chns/projections.hpp"

#include "chns/errors.hpp"
#include "chns/quadrature.hpp"

namespace chns {
namespace {
// The target mean is a single number; a high-degree rule keeps it exact to
// roundoff for smooth data even on coarse meshes.
constexpr int kMeanRuleDegree = 24;
}  // namespace

EllipticProjector::EllipticProjector(std::shared_ptr<const ScalarSpace> space, double sigma)
    : space_(std::move(space)), sigma_(sigma), a_D_(assemble_a_D(*space_, sigma)) {
  mean_ = mean_functional(*space_);
  const int n = space_->total_dofs();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(a_D_.nonZeros() + 2 * n);
  for (int k = 0; k < a_D_.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a_D_, k); it; ++it)
      trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  for (int i = 0; i < n; ++i) {
    if (mean_[i] == 0.0) continue;
    trip.emplace_back(i, n, mean_[i]);
    trip.emplace_back(n, i, mean_[i]);
  }
  SparseMatrix k(n + 1, n + 1);
  k.setFromTriplets(trip.begin(), trip.end());
  k.makeCompressed();
  lu_.compute(k);
  if (lu_.info() != Eigen::Success) {
    throw SingularSystemError("EllipticProjector: saddle system is singular (sigma too small?)");
  }
}

ScalarField EllipticProjector::solve(const Eigen::VectorXd& rhs, double mean) const {
  const int n = space_->total_dofs();
  Eigen::VectorXd b(n + 1);
  b.head(n) = rhs;
  b[n] = mean;
  const Eigen::VectorXd x = lu_.solve(b);
  if (lu_.info() != Eigen::Success) throw SingularSystemError("EllipticProjector: solve failed");
  return ScalarField(space_, x.head(n));
}

ScalarField EllipticProjector::project(const ScalarField& c) const {
  return solve(a_D_ * c.coeffs, mean_.dot(c.coeffs));
}

ScalarField EllipticProjector::project(const ScalarFunction& c,
                                       const GradientFunction& grad_c) const {
  // For continuous c the jump terms vanish, leaving
  // (grad c, grad chi)_E - <grad c . n_e, [chi]>_e.
  const ScalarSpace& sp = *space_;
  const Mesh& mesh = sp.mesh();
  const int n = sp.dofs_per_element();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(sp.total_dofs());
  double mean = 0.0;
  std::vector<double> phi(n);
  std::vector<Vec2> grad(n);

  const auto& vr = sp.elevated_volume_rule();
  for (int e = 0; e < static_cast<int>(mesh.num_elements()); ++e) {
    const double detj = mesh.jacobian_determinant(e);
    for (std::size_t q = 0; q < vr.size(); ++q) {
      const Vec2 x = mesh.to_physical(e, vr.points[q]);
      const double w = vr.weights[q] * detj;
      sp.gradients_ref(e, vr.points[q], grad);
      const Vec2 g = grad_c(x);
      for (int i = 0; i < n; ++i) rhs[sp.dof(e, i)] += w * g.dot(grad[i]);
    }
  }
  const QuadratureRule mr = triangle_rule(kMeanRuleDegree);
  for (int e = 0; e < static_cast<int>(mesh.num_elements()); ++e) {
    const double detj = mesh.jacobian_determinant(e);
    for (std::size_t q = 0; q < mr.size(); ++q) mean += mr.weights[q] * detj * c(mesh.to_physical(e, mr.points[q]));
  }

  const auto& fr = sp.elevated_face_rule();
  for (const auto& f : mesh.interior_faces()) {
    for (std::size_t q = 0; q < fr.size(); ++q) {
      const Vec2 x = face_point(mesh, f.vertices, fr.points[q].x);
      const double w = fr.weights[q] * f.length;
      const double dn = grad_c(x).dot(f.normal);
      sp.values(f.minus, x, phi);
      for (int i = 0; i < n; ++i) rhs[sp.dof(f.minus, i)] -= w * dn * phi[i];
      sp.values(f.plus, x, phi);
      for (int i = 0; i < n; ++i) rhs[sp.dof(f.plus, i)] += w * dn * phi[i];
    }
  }
  return solve(rhs, mean);
}

double integral(const ScalarField& f) { return mean_functional(*f.space).dot(f.coeffs); }

ScalarField remove_mean(const ScalarField& f) {
  const double area = f.space->mesh().total_area();
  const double avg = integral(f) / area;
  ScalarField out = f;
  out.coeffs -= avg * constant_vector(*f.space);
  return out;
}

}  // namespace chns
