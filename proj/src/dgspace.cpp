#include "chns/dgspace.hpp"

#include <cmath>
#include <stdexcept>

#include "chns/errors.hpp"

namespace chns {
namespace {

double factorial(int n) {
  double r = 1.0;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

// Exact integral of xi^a eta^b over the reference triangle.
double monomial_integral(int a, int b) {
  return factorial(a) * factorial(b) / factorial(a + b + 2);
}

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

}  // namespace

ReferenceBasis::ReferenceBasis(int degree) : degree_(degree) {
  if (degree < 0) throw std::invalid_argument("ReferenceBasis: negative degree");
  for (int d = 0; d <= degree; ++d) {
    for (int b = 0; b <= d; ++b) exponents_.push_back({d - b, b});
  }
  const int n = size();
  Eigen::MatrixXd gram(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      gram(i, j) = monomial_integral(exponents_[i][0] + exponents_[j][0],
                                     exponents_[i][1] + exponents_[j][1]);
    }
  }
  // Cholesky-based Gram-Schmidt: phi = L^{-1} m has identity Gram matrix.
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) throw SingularSystemError("ReferenceBasis: monomial Gram");
  const Eigen::MatrixXd L = llt.matrixL();
  coeffs_ = L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));
}

void ReferenceBasis::values(Vec2 ref, std::span<double> out) const {
  const int n = size();
  double mono[64];
  for (int j = 0; j < n; ++j) mono[j] = ipow(ref.x, exponents_[j][0]) * ipow(ref.y, exponents_[j][1]);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j <= i; ++j) s += coeffs_(i, j) * mono[j];
    out[i] = s;
  }
}

void ReferenceBasis::gradients(Vec2 ref, std::span<Vec2> out) const {
  const int n = size();
  Vec2 dmono[64];
  for (int j = 0; j < n; ++j) {
    const int a = exponents_[j][0];
    const int b = exponents_[j][1];
    dmono[j].x = a > 0 ? a * ipow(ref.x, a - 1) * ipow(ref.y, b) : 0.0;
    dmono[j].y = b > 0 ? b * ipow(ref.x, a) * ipow(ref.y, b - 1) : 0.0;
  }
  for (int i = 0; i < n; ++i) {
    Vec2 s;
    for (int j = 0; j <= i; ++j) s += coeffs_(i, j) * dmono[j];
    out[i] = s;
  }
}

ScalarSpace::ScalarSpace(std::shared_ptr<const Mesh> mesh, int degree)
    : mesh_(std::move(mesh)),
      basis_(degree),
      volume_rule_(triangle_rule(3 * degree + 1)),
      face_rule_(line_rule(3 * degree + 1)),
      elevated_volume_rule_(triangle_rule(3 * degree + 3)),
      elevated_face_rule_(line_rule(3 * degree + 3)) {
  if (degree < 0) throw std::invalid_argument("ScalarSpace: negative degree");
  if (basis_.size() > 64) throw std::invalid_argument("ScalarSpace: degree too high");
}

void ScalarSpace::values_ref(int e, Vec2 ref, std::span<double> out) const {
  basis_.values(ref, out);
  const double scale = 1.0 / std::sqrt(mesh_->jacobian_determinant(e));
  for (int i = 0; i < dofs_per_element(); ++i) out[i] *= scale;
}

void ScalarSpace::gradients_ref(int e, Vec2 ref, std::span<Vec2> out) const {
  basis_.gradients(ref, out);
  const double scale = 1.0 / std::sqrt(mesh_->jacobian_determinant(e));
  const auto& J = mesh_->inverse_jacobian(e);
  for (int i = 0; i < dofs_per_element(); ++i) {
    const Vec2 g = out[i];
    // grad_x = J^{-T} grad_ref
    out[i] = Vec2{J[0] * g.x + J[2] * g.y, J[1] * g.x + J[3] * g.y} * scale;
  }
}

void ScalarSpace::values(int e, Vec2 x, std::span<double> out) const {
  values_ref(e, mesh_->to_reference(e, x), out);
}

void ScalarSpace::gradients(int e, Vec2 x, std::span<Vec2> out) const {
  gradients_ref(e, mesh_->to_reference(e, x), out);
}

VectorSpace::VectorSpace(std::shared_ptr<const ScalarSpace> component)
    : component_(std::move(component)) {}

ScalarField::ScalarField(std::shared_ptr<const ScalarSpace> s, Eigen::VectorXd c)
    : space(std::move(s)), coeffs(std::move(c)) {
  if (coeffs.size() != space->total_dofs()) {
    throw std::invalid_argument("ScalarField: coefficient length does not match space");
  }
}

double ScalarField::value_ref(int e, Vec2 ref) const {
  if (e < 0 || e >= static_cast<int>(space->mesh().num_elements())) {
    throw std::out_of_range("ScalarField: element index out of range");
  }
  const int n = space->dofs_per_element();
  double phi[64];
  space->values_ref(e, ref, std::span<double>(phi, n));
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += coeffs[space->dof(e, i)] * phi[i];
  return s;
}

double ScalarField::value(int e, Vec2 x) const {
  if (e < 0 || e >= static_cast<int>(space->mesh().num_elements())) {
    throw std::out_of_range("ScalarField: element index out of range");
  }
  return value_ref(e, space->mesh().to_reference(e, x));
}

Vec2 ScalarField::gradient(int e, Vec2 x) const {
  if (e < 0 || e >= static_cast<int>(space->mesh().num_elements())) {
    throw std::out_of_range("ScalarField: element index out of range");
  }
  const int n = space->dofs_per_element();
  Vec2 g[64];
  space->gradients(e, x, std::span<Vec2>(g, n));
  Vec2 s;
  for (int i = 0; i < n; ++i) s += coeffs[space->dof(e, i)] * g[i];
  return s;
}

JumpAverage ScalarField::jump_average(const InteriorFace& f, double s) const {
  const Vec2 x = face_point(space->mesh(), f.vertices, s);
  const double vm = value(f.minus, x);
  const double vp = value(f.plus, x);
  return {vm - vp, 0.5 * (vm + vp)};
}

JumpAverage ScalarField::jump_average(const BoundaryFace& f, double s) const {
  const double v = value(f.element, face_point(space->mesh(), f.vertices, s));
  return {v, v};
}

VectorField::VectorField(std::shared_ptr<const VectorSpace> s, Eigen::VectorXd c)
    : space(std::move(s)), coeffs(std::move(c)) {
  if (coeffs.size() != space->total_dofs()) {
    throw std::invalid_argument("VectorField: coefficient length does not match space");
  }
}

Vec2 VectorField::value_ref(int e, Vec2 ref) const {
  if (e < 0 || e >= static_cast<int>(space->mesh().num_elements())) {
    throw std::out_of_range("VectorField: element index out of range");
  }
  const auto& sc = space->component();
  const int n = sc.dofs_per_element();
  double phi[64];
  sc.values_ref(e, ref, std::span<double>(phi, n));
  Vec2 v;
  for (int i = 0; i < n; ++i) {
    v.x += coeffs[space->dof(e, 0, i)] * phi[i];
    v.y += coeffs[space->dof(e, 1, i)] * phi[i];
  }
  return v;
}

Vec2 VectorField::value(int e, Vec2 x) const {
  if (e < 0 || e >= static_cast<int>(space->mesh().num_elements())) {
    throw std::out_of_range("VectorField: element index out of range");
  }
  return value_ref(e, space->mesh().to_reference(e, x));
}

std::array<Vec2, 2> VectorField::gradient(int e, Vec2 x) const {
  if (e < 0 || e >= static_cast<int>(space->mesh().num_elements())) {
    throw std::out_of_range("VectorField: element index out of range");
  }
  const auto& sc = space->component();
  const int n = sc.dofs_per_element();
  Vec2 g[64];
  sc.gradients(e, x, std::span<Vec2>(g, n));
  std::array<Vec2, 2> out{};
  for (int i = 0; i < n; ++i) {
    out[0] += coeffs[space->dof(e, 0, i)] * g[i];
    out[1] += coeffs[space->dof(e, 1, i)] * g[i];
  }
  return out;
}

double VectorField::divergence(int e, Vec2 x) const {
  const auto g = gradient(e, x);
  return g[0].x + g[1].y;
}

ScalarField VectorField::component(int k) const {
  ScalarField out(space->component_ptr());
  const int n = space->component().dofs_per_element();
  for (int e = 0; e < static_cast<int>(space->mesh().num_elements()); ++e) {
    for (int i = 0; i < n; ++i) out.coeffs[out.space->dof(e, i)] = coeffs[space->dof(e, k, i)];
  }
  return out;
}

Vec2 face_point(const Mesh& mesh, const std::array<int, 2>& vertices, double s) {
  const Vec2 a = mesh.vertices()[vertices[0]];
  const Vec2 b = mesh.vertices()[vertices[1]];
  return a + s * (b - a);
}

namespace {

// Local mass matrix and load vectors on element e with the elevated rule.
template <class Load>
Eigen::MatrixXd local_project(const ScalarSpace& space, int e, int ncomp, Load&& load) {
  const int n = space.dofs_per_element();
  const auto& rule = space.elevated_volume_rule();
  const double detj = space.mesh().jacobian_determinant(e);
  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, ncomp);
  double phi[64];
  for (std::size_t q = 0; q < rule.size(); ++q) {
    space.values_ref(e, rule.points[q], std::span<double>(phi, n));
    const double w = rule.weights[q] * detj;
    const auto fv = load(space.mesh().to_physical(e, rule.points[q]));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) mass(i, j) += w * phi[i] * phi[j];
      for (int k = 0; k < ncomp; ++k) rhs(i, k) += w * fv[k] * phi[i];
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(mass);
  if (llt.info() != Eigen::Success) {
    throw SingularSystemError("l2_project: local mass matrix of element " + std::to_string(e) +
                              " is not positive definite");
  }
  return llt.solve(rhs);
}

}  // namespace

ScalarField l2_project(const ScalarFunction& f, std::shared_ptr<const ScalarSpace> space) {
  ScalarField out(space);
  const int n = space->dofs_per_element();
  for (int e = 0; e < static_cast<int>(space->mesh().num_elements()); ++e) {
    const Eigen::MatrixXd c =
        local_project(*space, e, 1, [&](Vec2 x) { return std::array<double, 1>{f(x)}; });
    for (int i = 0; i < n; ++i) out.coeffs[space->dof(e, i)] = c(i, 0);
  }
  return out;
}

VectorField l2_project(const VectorFunction& f, std::shared_ptr<const VectorSpace> space) {
  VectorField out(space);
  const auto& sc = space->component();
  const int n = sc.dofs_per_element();
  for (int e = 0; e < static_cast<int>(sc.mesh().num_elements()); ++e) {
    const Eigen::MatrixXd c = local_project(sc, e, 2, [&](Vec2 x) {
      const Vec2 v = f(x);
      return std::array<double, 2>{v.x, v.y};
    });
    for (int i = 0; i < n; ++i) {
      out.coeffs[space->dof(e, 0, i)] = c(i, 0);
      out.coeffs[space->dof(e, 1, i)] = c(i, 1);
    }
  }
  return out;
}

ScalarField constant_field(std::shared_ptr<const ScalarSpace> space, double value) {
  return l2_project([value](Vec2) { return value; }, std::move(space));
}

}  // namespace chns
