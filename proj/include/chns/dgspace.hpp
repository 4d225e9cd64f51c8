#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "chns/mesh.hpp"
#include "chns/quadrature.hpp"

namespace chns {

using ScalarFunction = std::function<double(Vec2)>;
using VectorFunction = std::function<Vec2(Vec2)>;
using GradientFunction = std::function<Vec2(Vec2)>;

/// Monomials orthonormalized on the reference triangle (Gram-Schmidt in the
/// reference L2 inner product). Mapped affinely and scaled by |J|^{-1/2}, they
/// are L2-orthonormal on every physical element.
class ReferenceBasis {
 public:
  explicit ReferenceBasis(int degree);

  int degree() const { return degree_; }
  int size() const { return static_cast<int>(exponents_.size()); }

  void values(Vec2 ref, std::span<double> out) const;
  void gradients(Vec2 ref, std::span<Vec2> out) const;

  /// Monomial exponents (a, b) of xi^a eta^b, in basis construction order.
  const std::vector<std::array<int, 2>>& exponents() const { return exponents_; }
  /// Row i holds the monomial coefficients of basis function i.
  const Eigen::MatrixXd& coefficients() const { return coeffs_; }

 private:
  int degree_;
  std::vector<std::array<int, 2>> exponents_;
  Eigen::MatrixXd coeffs_;
};

/// Broken polynomial space of degree q on a mesh (S_h; also Q_h with q-1).
/// Global dof of local function i on element e is e * dofs_per_element + i.
class ScalarSpace {
 public:
  ScalarSpace(std::shared_ptr<const Mesh> mesh, int degree);

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  int degree() const { return basis_.degree(); }
  int dofs_per_element() const { return basis_.size(); }
  int total_dofs() const { return dofs_per_element() * static_cast<int>(mesh_->num_elements()); }
  int dof(int element, int local) const { return element * dofs_per_element() + local; }
  const ReferenceBasis& reference_basis() const { return basis_; }

  /// Rule used for polynomial integrands (exact to degree 3q+1).
  const QuadratureRule& volume_rule() const { return volume_rule_; }
  const QuadratureRule& face_rule() const { return face_rule_; }
  /// Rule for nonpolynomial integrands (exact to degree 3q+3).
  const QuadratureRule& elevated_volume_rule() const { return elevated_volume_rule_; }
  const QuadratureRule& elevated_face_rule() const { return elevated_face_rule_; }

  /// Local basis values at physical point x inside element e.
  void values(int e, Vec2 x, std::span<double> out) const;
  void gradients(int e, Vec2 x, std::span<Vec2> out) const;
  void values_ref(int e, Vec2 ref, std::span<double> out) const;
  void gradients_ref(int e, Vec2 ref, std::span<Vec2> out) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  ReferenceBasis basis_;
  QuadratureRule volume_rule_;
  QuadratureRule face_rule_;
  QuadratureRule elevated_volume_rule_;
  QuadratureRule elevated_face_rule_;
};

/// X_h: two scalar components of degree q. Global dof of component k, local
/// function i on element e is e * 2 n + k * n + i with n = dofs per component.
class VectorSpace {
 public:
  explicit VectorSpace(std::shared_ptr<const ScalarSpace> component);

  const ScalarSpace& component() const { return *component_; }
  const std::shared_ptr<const ScalarSpace>& component_ptr() const { return component_; }
  const Mesh& mesh() const { return component_->mesh(); }
  int degree() const { return component_->degree(); }
  int dofs_per_element() const { return 2 * component_->dofs_per_element(); }
  int total_dofs() const { return 2 * component_->total_dofs(); }
  int dof(int element, int comp, int local) const {
    return element * dofs_per_element() + comp * component_->dofs_per_element() + local;
  }

 private:
  std::shared_ptr<const ScalarSpace> component_;
};

struct JumpAverage {
  double jump = 0.0;
  double average = 0.0;
};

/// Coefficients of a discrete scalar field, one block per element.
struct ScalarField {
  std::shared_ptr<const ScalarSpace> space;
  Eigen::VectorXd coeffs;

  ScalarField() = default;
  explicit ScalarField(std::shared_ptr<const ScalarSpace> s)
      : space(std::move(s)), coeffs(Eigen::VectorXd::Zero(space->total_dofs())) {}
  ScalarField(std::shared_ptr<const ScalarSpace> s, Eigen::VectorXd c);

  double value(int e, Vec2 x) const;
  Vec2 gradient(int e, Vec2 x) const;
  /// Value at a point of the reference element of e.
  double value_ref(int e, Vec2 ref) const;

  /// [f] and {f} at parameter s in [0,1] along an interior face.
  JumpAverage jump_average(const InteriorFace& f, double s) const;
  /// On boundary faces jump and average both equal the interior trace.
  JumpAverage jump_average(const BoundaryFace& f, double s) const;
};

struct VectorField {
  std::shared_ptr<const VectorSpace> space;
  Eigen::VectorXd coeffs;

  VectorField() = default;
  explicit VectorField(std::shared_ptr<const VectorSpace> s)
      : space(std::move(s)), coeffs(Eigen::VectorXd::Zero(space->total_dofs())) {}
  VectorField(std::shared_ptr<const VectorSpace> s, Eigen::VectorXd c);

  Vec2 value(int e, Vec2 x) const;
  /// Rows: gradient of component 0, gradient of component 1.
  std::array<Vec2, 2> gradient(int e, Vec2 x) const;
  double divergence(int e, Vec2 x) const;
  Vec2 value_ref(int e, Vec2 ref) const;

  /// Extracts component k as a scalar field on the component space.
  ScalarField component(int k) const;
};

/// Point on face at parameter s in [0,1] from vertices[0] to vertices[1].
Vec2 face_point(const Mesh& mesh, const std::array<int, 2>& vertices, double s);

/// Elementwise L2 projection (local mass solves).
ScalarField l2_project(const ScalarFunction& f, std::shared_ptr<const ScalarSpace> space);
VectorField l2_project(const VectorFunction& f, std::shared_ptr<const VectorSpace> space);

/// Constant field.
ScalarField constant_field(std::shared_ptr<const ScalarSpace> space, double value);

}  // namespace chns
